"""Routing instances, solutions, feasibility checks and SoC/DoD evaluation.

Node 0 is the depot. Customers are nodes 1..n-1. A solution stores one
ordered customer list per vehicle; the depot is implicitly first and last.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

TOL = 1e-9


class StructuralError(ValueError):
    """A tour or arc tensor that cannot describe a routing plan at all."""


class EnergyInfeasibleError(ValueError):
    """Some vehicle would finish its tour below 0 % state of charge."""

    def __init__(self, vehicles: Sequence[int], soc_end: Sequence[float]):
        self.vehicles = tuple(vehicles)
        self.soc_end = tuple(soc_end)
        detail = ", ".join(f"vehicle {k}: soc_end={self.soc_end[k]:.6g}" for k in self.vehicles)
        super().__init__(f"negative end state of charge ({detail})")


@dataclass(frozen=True)
class Violation:
    field: str
    index: Optional[tuple] = None
    message: str = ""

    def __str__(self) -> str:
        where = self.field if self.index is None else f"{self.field}{list(self.index)}"
        return f"{where}: {self.message}"


@dataclass(frozen=True)
class Vehicle:
    id: str
    soc_start: float


def _frozen_matrix(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Instance:
    """Routing graph plus fleet.

    ``cost`` and ``energy`` are n x n; energy is in percentage points of
    battery capacity. ``node_ids`` and ``coords`` are optional labels used
    only for reporting and serialization.
    """

    cost: np.ndarray
    energy: np.ndarray
    vehicles: tuple[Vehicle, ...]
    node_ids: tuple[str, ...] = ()
    coords: tuple[Optional[tuple[float, float]], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "cost", _frozen_matrix(self.cost))
        object.__setattr__(self, "energy", _frozen_matrix(self.energy))
        object.__setattr__(self, "vehicles", tuple(self.vehicles))
        n = self.cost.shape[0] if self.cost.ndim == 2 else 0
        if not self.node_ids:
            object.__setattr__(self, "node_ids", tuple(str(i) for i in range(n)))
        else:
            object.__setattr__(self, "node_ids", tuple(self.node_ids))
        if not self.coords:
            object.__setattr__(self, "coords", (None,) * n)
        else:
            object.__setattr__(self, "coords", tuple(self.coords))

    @property
    def node_count(self) -> int:
        return int(self.cost.shape[0])

    @property
    def n_vehicles(self) -> int:
        return len(self.vehicles)

    @property
    def customers(self) -> range:
        return range(1, self.node_count)

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.cost.shape == other.cost.shape
            and self.energy.shape == other.energy.shape
            and bool(np.array_equal(self.cost, other.cost))
            and bool(np.array_equal(self.energy, other.energy))
            and self.vehicles == other.vehicles
            and self.node_ids == other.node_ids
            and self.coords == other.coords
        )

    __hash__ = None


@dataclass(frozen=True)
class Solution:
    tours: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "tours", tuple(tuple(int(j) for j in t) for t in self.tours))

    def closed_tour(self, k: int) -> tuple[int, ...]:
        return (0, *self.tours[k], 0)

    def arcs(self, k: int):
        t = self.closed_tour(k)
        return list(zip(t[:-1], t[1:]))

    def canonical_key(self) -> tuple[int, ...]:
        """Depot-delimited concatenation of the tours in vehicle order.

        Depot 0 sorts below every customer, so this orders solutions the
        same way as comparing the tuple of tours.
        """
        key: list[int] = []
        for t in self.tours:
            key.extend(t)
            key.append(0)
        return tuple(key)


@dataclass(frozen=True)
class FleetState:
    soc_end: tuple[float, ...]
    dod: tuple[float, ...]

    @classmethod
    def from_soc_end(cls, soc_end: Sequence[float]) -> "FleetState":
        soc = tuple(float(s) for s in soc_end)
        return cls(soc_end=soc, dod=tuple(100.0 - s for s in soc))

    @property
    def dod_max(self) -> float:
        return max(self.dod)

    @property
    def dod_min(self) -> float:
        return min(self.dod)

    @property
    def spread(self) -> float:
        return self.dod_max - self.dod_min


def validate_instance(inst: Instance) -> list[Violation]:
    """Return one violation per broken invariant; empty means valid."""
    out: list[Violation] = []
    cost, energy = inst.cost, inst.energy
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        out.append(Violation("cost", None, f"must be square, got shape {cost.shape}"))
        return out
    n = cost.shape[0]
    if n < 2:
        out.append(Violation("node_count", None, f"need at least 2 nodes, got {n}"))
    if energy.shape != (n, n):
        out.append(Violation("energy", None, f"shape {energy.shape} does not match {(n, n)}"))
    for name, mat in (("cost", cost), ("energy", energy)):
        if mat.shape != (n, n):
            continue
        for i in range(n):
            for j in range(n):
                v = mat[i, j]
                if not math.isfinite(v):
                    out.append(Violation(name, (i, j), f"not finite ({v})"))
                elif v < 0:
                    out.append(Violation(name, (i, j), f"negative ({v:g})"))
                elif i == j and v != 0:
                    out.append(Violation(name, (i, j), f"diagonal must be 0, got {v:g}"))
    if len(inst.vehicles) < 1:
        out.append(Violation("vehicles", None, "need at least one vehicle"))
    elif len(inst.vehicles) > n - 1:
        out.append(
            Violation(
                "vehicles",
                None,
                f"|K| <= n-1 violated: {len(inst.vehicles)} vehicles for {n - 1} customers",
            )
        )
    for k, v in enumerate(inst.vehicles):
        if not (math.isfinite(v.soc_start) and 0.0 <= v.soc_start <= 100.0):
            out.append(Violation("vehicles.soc_start", (k,), f"must lie in [0, 100], got {v.soc_start}"))
    if len(inst.node_ids) != n:
        out.append(Violation("node_ids", None, f"{len(inst.node_ids)} ids for {n} nodes"))
    elif len(set(inst.node_ids)) != n:
        out.append(Violation("node_ids", None, "ids must be unique"))
    ids = [v.id for v in inst.vehicles]
    if len(set(ids)) != len(ids):
        out.append(Violation("vehicles.id", None, "ids must be unique"))
    return out


def check_feasibility(inst: Instance, sol: Solution) -> tuple[bool, list[Violation]]:
    """Routing feasibility: customer partition, nonempty tours, distinct nodes.

    Energy is not checked here; see :func:`evaluate`.
    """
    n = inst.node_count
    for k, tour in enumerate(sol.tours):
        for pos, j in enumerate(tour):
            if j <= 0 or j >= n:
                raise StructuralError(f"tour {k} position {pos}: node {j} is not a customer index in 1..{n - 1}")
    out: list[Violation] = []
    if len(sol.tours) != inst.n_vehicles:
        out.append(Violation("tours", None, f"{len(sol.tours)} tours for {inst.n_vehicles} vehicles"))
    seen: dict[int, int] = {}
    for k, tour in enumerate(sol.tours):
        if not tour:
            out.append(Violation("tours", (k,), "empty tour: vehicle never leaves the depot"))
        for j in tour:
            if j in seen:
                where = "twice in the same tour" if seen[j] == k else f"also in tour {seen[j]}"
                out.append(Violation("tours", (k, j), f"node {j} visited {where}"))
            else:
                seen[j] = k
    for j in range(1, n):
        if j not in seen:
            out.append(Violation("tours", (j,), f"customer {j} is never visited"))
    return not out, out


def to_arc_form(sol: Solution, n: int) -> np.ndarray:
    """Binary tensor x[k, i, j] = 1 iff vehicle k drives from i to j."""
    x = np.zeros((len(sol.tours), n, n), dtype=np.int8)
    for k in range(len(sol.tours)):
        for i, j in sol.arcs(k):
            x[k, i, j] = 1
    return x


def from_arc_form(x, n: int) -> Solution:
    """Rebuild tours from an arc tensor by walking each vehicle from the depot.

    Rejects anything that admits no MTZ ordering: degree violations, depot
    not left exactly once, cycles that miss the depot, stranded customers.
    """
    x = np.asarray(x)
    if x.ndim != 3 or x.shape[1:] != (n, n):
        raise StructuralError(f"arc tensor must have shape (K, {n}, {n}), got {x.shape}")
    if not np.all((x == 0) | (x == 1)):
        raise StructuralError("arc tensor must be binary")
    tours = []
    covered: dict[int, int] = {}
    for k in range(x.shape[0]):
        xk = x[k]
        if np.any(np.diag(xk)):
            raise StructuralError(f"vehicle {k}: self-loop arc")
        out_deg = xk.sum(axis=1)
        in_deg = xk.sum(axis=0)
        if out_deg[0] != 1:
            raise StructuralError(f"vehicle {k}: leaves the depot {int(out_deg[0])} times, expected 1")
        bad = [j for j in range(n) if out_deg[j] != in_deg[j] or out_deg[j] > 1]
        if bad:
            raise StructuralError(f"vehicle {k}: degree violation at nodes {bad}")
        tour = []
        node = int(np.argmax(xk[0]))
        while node != 0:
            tour.append(node)
            node = int(np.argmax(xk[node]))
        active = {j for j in range(1, n) if out_deg[j] == 1}
        stray = sorted(active - set(tour))
        if stray:
            raise StructuralError(f"vehicle {k}: subtour not through the depot on nodes {stray}")
        for j in tour:
            if j in covered:
                raise StructuralError(f"node {j} visited by vehicles {covered[j]} and {k}")
            covered[j] = k
        tours.append(tuple(tour))
    missing = [j for j in range(1, n) if j not in covered]
    if missing:
        raise StructuralError(f"unvisited nodes {missing}")
    return Solution(tuple(tours))


def tour_totals(mat: np.ndarray, sol: Solution) -> list[float]:
    out = []
    for k in range(len(sol.tours)):
        out.append(float(sum(mat[i, j] for i, j in sol.arcs(k))))
    return out


def evaluate(inst: Instance, sol: Solution, strict: bool = True) -> tuple[float, FleetState]:
    """Route cost and end-of-tour fleet state.

    Raises :class:`EnergyInfeasibleError` if a vehicle ends below 0 % SoC,
    unless ``strict`` is False.
    """
    costs = tour_totals(inst.cost, sol)
    used = tour_totals(inst.energy, sol)
    soc_end = [v.soc_start - e for v, e in zip(inst.vehicles, used)]
    bad = [k for k, s in enumerate(soc_end) if s < -TOL]
    if bad and strict:
        raise EnergyInfeasibleError(bad, soc_end)
    return float(sum(costs)), FleetState.from_soc_end(soc_end)
