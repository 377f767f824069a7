"""Exact search: insertion branch-and-bound plus an exhaustive oracle.

Both searches score complete solutions with the same floating-point
operations in the same order, keep every solution within ``tolerance`` of
the best objective, and return the one
with the smallest canonical key. The answer therefore does not depend on
visiting order, and the two searches agree exactly.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from degvrp.degradation import ObjectiveSpec, Variant, total_objective
from degvrp.model import TOL, FleetState, Instance, Solution, evaluate, validate_instance


class InfeasibleInstanceError(ValueError):
    """No routing plan keeps every vehicle at or above 0 % SoC."""

    def __init__(self, message: str, vehicles: Sequence[str] = ()):
        self.vehicles = tuple(vehicles)
        super().__init__(message)


class NodeLimitError(RuntimeError):
    """The node limit was hit before any feasible solution was found."""


@dataclass(frozen=True)
class SolverConfig:
    node_limit: Optional[int] = None
    tolerance: float = 1e-9

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be > 0, got {self.tolerance}")
        if self.node_limit is not None and self.node_limit < 1:
            raise ValueError(f"node_limit must be a positive integer, got {self.node_limit}")


@dataclass(frozen=True)
class SearchStats:
    nodes_explored: int = 0
    nodes_pruned: int = 0
    wall_time: float = 0.0


@dataclass(frozen=True)
class SolveResult:
    solution: Solution
    objective: float
    route_cost: float
    fleet: FleetState
    spec: ObjectiveSpec
    proven_optimal: bool = True
    stats: SearchStats = field(default=SearchStats(), compare=False)


def _scorer(inst: Instance, spec: ObjectiveSpec):
    """Objective of a complete tour list, or None if energy-infeasible."""
    C = inst.cost.tolist()
    E = inst.energy.tolist()
    socs = [v.soc_start for v in inst.vehicles]

    def score(tours):
        soc_end = []
        route_cost = 0
        for k, tour in enumerate(tours):
            c = e = 0
            prev = 0
            for j in tour:
                c += C[prev][j]
                e += E[prev][j]
                prev = j
            c += C[prev][0]
            e += E[prev][0]
            s = socs[k] - e
            if s < -TOL:
                return None
            soc_end.append(s)
            route_cost += c
        fleet = FleetState.from_soc_end(soc_end)
        return total_objective(spec, float(route_cost), fleet)

    return score


def _check_inputs(inst: Instance, spec: ObjectiveSpec):
    problems = validate_instance(inst)
    if problems:
        raise ValueError("invalid instance: " + "; ".join(str(p) for p in problems))
    if not isinstance(spec, ObjectiveSpec):
        raise TypeError("spec must be an ObjectiveSpec")


def _raise_infeasible(inst: Instance):
    E = inst.energy
    stuck = []
    for v in inst.vehicles:
        cheapest = min(E[0, j] + E[j, 0] for j in inst.customers)
        if cheapest > v.soc_start + TOL:
            stuck.append(v.id)
    if stuck:
        raise InfeasibleInstanceError(
            f"no energy-feasible plan: vehicles {', '.join(stuck)} cannot serve even one customer",
            stuck,
        )
    ids = [v.id for v in inst.vehicles]
    raise InfeasibleInstanceError(
        f"no energy-feasible plan: vehicles {', '.join(ids)} cannot jointly cover all customers",
        ids,
    )


def _finish(inst, spec, best_tours, proven, stats) -> SolveResult:
    sol = Solution(best_tours)
    route_cost, fleet = evaluate(inst, sol)
    return SolveResult(
        solution=sol,
        objective=total_objective(spec, route_cost, fleet),
        route_cost=route_cost,
        fleet=fleet,
        spec=spec,
        proven_optimal=proven,
        stats=stats,
    )


class _Pool:
    """Best objective so far plus every candidate within tolerance of it."""

    def __init__(self, tol: float):
        self.tol = tol
        self.best = math.inf
        self.items: list[tuple[float, tuple]] = []

    def offer(self, obj: float, tours) -> None:
        if obj > self.best + self.tol:
            return
        if obj < self.best:
            self.best = obj
            self.items = [it for it in self.items if it[0] <= obj + self.tol]
        self.items.append((obj, tuple(tuple(t) for t in tours)))

    def pick(self):
        if not self.items:
            return None
        keep = [t for o, t in self.items if o <= self.best + self.tol]
        return min(keep, key=lambda tours: Solution(tours).canonical_key())


def solve_bruteforce(inst: Instance, spec: ObjectiveSpec) -> SolveResult:
    """Enumerate every surjective assignment and every tour ordering."""
    _check_inputs(inst, spec)
    t0 = time.perf_counter()
    customers = list(inst.customers)
    K = inst.n_vehicles
    pool = _Pool(SolverConfig().tolerance)
    evaluated = 0
    C = inst.cost.tolist()
    E = inst.energy.tolist()
    socs = [v.soc_start for v in inst.vehicles]
    alpha = 0.0 if spec.variant is Variant.BASE else spec.alpha
    tours_cache: dict[tuple, list] = {}

    def orderings(group: tuple) -> list:
        # (tour, cost, energy) for every visiting order of one vehicle's customers
        if group not in tours_cache:
            rows = []
            for perm in itertools.permutations(group):
                c = e = 0
                prev = 0
                for j in perm:
                    c += C[prev][j]
                    e += E[prev][j]
                    prev = j
                rows.append((perm, c + C[prev][0], e + E[prev][0]))
            tours_cache[group] = rows
        return tours_cache[group]

    for assign in itertools.product(range(K), repeat=len(customers)):
        groups = [[] for _ in range(K)]
        for j, k in zip(customers, assign):
            groups[k].append(j)
        if any(not g for g in groups):
            continue
        options = [orderings(tuple(g)) for g in groups]
        for combo in itertools.product(*options):
            evaluated += 1
            soc_end = [socs[k] - row[2] for k, row in enumerate(combo)]
            if min(soc_end) < -TOL:
                continue
            route_cost = 0
            for row in combo:
                route_cost += row[1]
            if alpha:
                obj = total_objective(spec, float(route_cost), FleetState.from_soc_end(soc_end))
            else:
                obj = float(route_cost)
            pool.offer(obj, [row[0] for row in combo])
    best = pool.pick()
    if best is None:
        _raise_infeasible(inst)
    stats = SearchStats(evaluated, 0, time.perf_counter() - t0)
    return _finish(inst, spec, best, True, stats)


def _suffix(mat, n: int, pick, along_rows: bool, empty: float):
    """t[i][m] = pick over free customers u > m (u != i) of mat[i][u] or mat[u][i]."""
    table = [[empty] * (n + 1) for _ in range(n)]
    for i in range(n):
        row = table[i]
        for m in range(n - 2, -1, -1):
            u = m + 1
            v = mat[i][u] if along_rows else mat[u][i]
            row[m] = row[m + 1] if u == i else pick(row[m + 1], v)
    return table


class _BoundData:
    """Per-instance tables for the insertion-state bound."""

    def __init__(self, inst: Instance):
        n = inst.node_count
        self.n = n
        C = self.C = inst.cost.tolist()
        E = self.E = inst.energy.tolist()
        self.socs = [v.soc_start for v in inst.vehicles]
        others = [[j for j in range(n) if j != i] for i in range(n)]
        minout_c = [min(C[i][j] for j in others[i]) for i in range(n)]
        minin_c = [min(C[j][i] for j in others[i]) for i in range(n)]
        maxout_e = [max(E[i][j] for j in others[i]) for i in range(n)]
        minout_e = [min(E[i][j] for j in others[i]) for i in range(n)]
        self.base_dod = sum(100.0 - s for s in self.socs)
        inf = math.inf
        self.c_to_free = _suffix(C, n, min, True, inf)
        self.c_from_free = _suffix(C, n, min, False, inf)
        self.e_to_free = _suffix(E, n, min, True, inf)
        self.emax_to_free = _suffix(E, n, max, True, -inf)
        # sums over free customers u > m
        self.free_out_c = [0.0] * (n + 1)
        self.free_in_c = [0.0] * (n + 1)
        self.free_max_e = [0.0] * (n + 1)
        self.free_min_e = [0.0] * (n + 1)
        for m in range(n - 2, -1, -1):
            self.free_min_e[m] = self.free_min_e[m + 1] + minout_e[m + 1]
            self.free_out_c[m] = self.free_out_c[m + 1] + minout_c[m + 1]
            self.free_in_c[m] = self.free_in_c[m + 1] + minin_c[m + 1]
            self.free_max_e[m] = self.free_max_e[m + 1] + maxout_e[m + 1]


def _bound_parts(bd: _BoundData, tours, m: int):
    """Cost lower bound and per-vehicle DoD interval for an insertion state.

    Customers 1..m are placed, the rest are free. In any completion the
    arc leaving a placed node goes to its current successor or to a free
    customer, so its cost is at least the cheaper of the two; the same
    holds for the arc entering it. Summing either side over all nodes
    bounds the route cost. Returns None if no completion can exist.

    The DoD interval also carries bounds on the fleet DoD total: every
    node has exactly one outgoing arc across the whole fleet, so free
    customers are counted once rather than once per vehicle.
    """
    C, E = bd.C, bd.E
    free = bd.n - 1 - m
    if sum(1 for t in tours if not t) > free:
        return None
    c_to, c_from, e_to, emax_to = bd.c_to_free, bd.c_from_free, bd.e_to_free, bd.emax_to_free
    out_lb = bd.free_out_c[m]
    in_lb = bd.free_in_c[m]
    dod_lo, dod_hi = [], []
    total_lo = bd.base_dod + bd.free_min_e[m]
    total_hi = bd.base_dod + bd.free_max_e[m]
    for k, tour in enumerate(tours):
        e_lb = 0.0
        e_ub = bd.free_max_e[m]
        if not tour:
            out_lb += c_to[0][m]
            in_lb += c_from[0][m]
            e_lb += e_to[0][m]
            e_ub += emax_to[0][m]
        else:
            prev = 0
            for s in tour:
                out_lb += min(C[prev][s], c_to[prev][m])
                in_lb += min(C[prev][s], c_from[s][m])
                e_lb += min(E[prev][s], e_to[prev][m])
                e_ub += max(E[prev][s], emax_to[prev][m])
                prev = s
            out_lb += min(C[prev][0], c_to[prev][m])
            in_lb += min(C[prev][0], c_from[0][m])
            e_lb += min(E[prev][0], e_to[prev][m])
            e_ub += max(E[prev][0], emax_to[prev][m])
        soc = bd.socs[k]
        if e_lb > soc + TOL:
            return None
        total_lo += e_lb
        total_hi += e_ub - bd.free_max_e[m]
        dod_lo.append(100.0 - soc + e_lb)
        dod_hi.append(100.0 - soc + min(soc, e_ub))
    K = len(tours)
    return max(out_lb, in_lb), dod_lo, dod_hi, total_lo / K, total_hi / K


def _penalty_floor(variant: Variant, dod_lo, dod_hi, mean_lo, mean_hi) -> float:
    """Smallest penalty compatible with the DoD bounds.

    The fleet mean DoD lies in [mean_lo, mean_hi], so the largest DoD is
    at least mean_lo and the smallest at most mean_hi.
    """
    if variant is Variant.BASE:
        return 0.0
    top = max(max(dod_lo), mean_lo)
    bottom = min(min(dod_hi), mean_hi, 100.0)
    if variant is Variant.QUADRATIC_SPREAD:
        gap = max(0.0, top - bottom)
        return gap * gap
    return -bottom


def _bound(bd: _BoundData, tours, m: int, variant: Variant, alpha: float) -> float:
    parts = _bound_parts(bd, tours, m)
    if parts is None:
        return math.inf
    cost_lb = parts[0]
    if variant is Variant.BASE or alpha == 0:
        return cost_lb
    return cost_lb + alpha * _penalty_floor(variant, *parts[1:])


def lower_bound(inst: Instance, tours, spec: ObjectiveSpec, placed: Optional[int] = None) -> float:
    """Admissible bound on the objective of every completion of ``tours``.

    ``tours`` holds customers 1..placed in their relative visiting order;
    ``placed`` defaults to the largest customer present. Returns +inf for
    states with no feasible completion.
    """
    m = max((j for t in tours for j in t), default=0) if placed is None else placed
    return _bound(_BoundData(inst), [list(t) for t in tours], m, spec.variant, spec.alpha)


class _NodeLimit(Exception):
    pass


def solve(inst: Instance, spec: ObjectiveSpec, cfg: Optional[SolverConfig] = None) -> SolveResult:
    """Globally optimal plan by depth-first branch-and-bound.

    Customers are placed in increasing index order; each branch chooses a
    vehicle and an insertion position within its partial tour, so every
    complete plan is reached along exactly one path. Children are visited
    in order of (bound, vehicle, position).
    """
    cfg = cfg or SolverConfig()
    _check_inputs(inst, spec)
    t0 = time.perf_counter()
    bd = _BoundData(inst)
    score = _scorer(inst, spec)
    n, K = inst.node_count, inst.n_vehicles
    variant, alpha = spec.variant, spec.alpha
    tol = cfg.tolerance
    pool = _Pool(tol)
    tours: list[list[int]] = [[] for _ in range(K)]
    explored = pruned = 0

    def visit(m: int, bound: float):
        nonlocal explored, pruned
        explored += 1
        if cfg.node_limit is not None and explored > cfg.node_limit:
            raise _NodeLimit
        if bound > pool.best + tol:
            pruned += 1
            return
        if m == n - 1:
            obj = score(tours) if all(tours) else None
            if obj is None:
                pruned += 1
            else:
                pool.offer(obj, tours)
            return
        j = m + 1
        children = []
        for k in range(K):
            tour = tours[k]
            for pos in range(len(tour) + 1):
                tour.insert(pos, j)
                b = _bound(bd, tours, j, variant, alpha)
                del tour[pos]
                if b == math.inf:
                    pruned += 1
                else:
                    children.append((b, k, pos))
        children.sort()
        for b, k, pos in children:
            tours[k].insert(pos, j)
            visit(j, b)
            del tours[k][pos]

    proven = True
    try:
        visit(0, _bound(bd, tours, 0, variant, alpha))
    except _NodeLimit:
        proven = False
    best = pool.pick()
    if best is None:
        if not proven:
            raise NodeLimitError(f"node limit {cfg.node_limit} reached before any feasible solution")
        _raise_infeasible(inst)
    stats = SearchStats(explored, pruned, time.perf_counter() - t0)
    return _finish(inst, spec, best, proven, stats)


def sweep_alpha(
    inst: Instance,
    variant,
    alphas: Sequence[float],
    cfg: Optional[SolverConfig] = None,
    exhaustive: bool = False,
) -> list[SolveResult]:
    """Solve independently for each weight in a strictly increasing list."""
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise ValueError("alphas must be nonempty")
    if any(not (math.isfinite(a) and a >= 0) for a in alphas):
        raise ValueError(f"alphas must be finite and >= 0, got {alphas}")
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise ValueError(f"alphas must be strictly increasing, got {alphas}")
    variant = Variant.parse(variant)
    out = []
    for a in alphas:
        spec = ObjectiveSpec(variant, a)
        out.append(solve_bruteforce(inst, spec) if exhaustive else solve(inst, spec, cfg))
    return out
