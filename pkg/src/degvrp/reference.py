"""Bundled 8-node, 3-vehicle reference instance and the search that found it.

This is a constructed instance, not published data. Nodes sit on an integer
grid with the depot at the origin; costs are rounded Euclidean distances,
energies are a noisy fraction of cost. It was chosen from
``candidate_stream(11)`` because its exact optimum shows the qualitative
trade-off the tooling is meant to display:

* at alpha = 0 the fleet DoD spread exceeds 20 points,
* a small alpha narrows the spread with no extra route cost,
* a larger alpha brings the spread under 5 points at a positive extra cost.
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

from degvrp.degradation import ObjectiveSpec, Variant
from degvrp.model import Instance, Vehicle

SWEEP_ALPHAS = (0.0, 0.0625, 0.125, 0.25, 0.5, 1.0, 2.0, 4.0)

COORDS = ((0, 0), (-40, -37), (8, -22), (-11, -8), (36, 3), (34, -33), (18, 10), (3, 26))

COST = (
    (0, 54, 23, 14, 36, 47, 21, 26),
    (54, 0, 50, 41, 86, 74, 75, 76),
    (23, 50, 0, 24, 38, 28, 34, 48),
    (14, 41, 24, 0, 48, 51, 34, 37),
    (36, 86, 38, 48, 0, 36, 19, 40),
    (47, 74, 28, 51, 36, 0, 46, 67),
    (21, 75, 34, 34, 19, 46, 0, 22),
    (26, 76, 48, 37, 40, 67, 22, 0),
)

ENERGY = (
    (0, 15, 8, 4, 10, 13, 8, 9),
    (18, 0, 19, 12, 26, 21, 28, 25),
    (7, 15, 0, 8, 12, 8, 12, 13),
    (5, 15, 8, 0, 13, 14, 12, 11),
    (14, 25, 11, 16, 0, 12, 5, 11),
    (16, 26, 11, 17, 13, 0, 15, 24),
    (6, 20, 10, 10, 7, 16, 0, 8),
    (8, 29, 18, 10, 12, 20, 6, 0),
)

SOC_START = (95.0, 90.0, 85.0)

NODE_IDS = ("depot", "c1", "c2", "c3", "c4", "c5", "c6", "c7")

DEFAULT_OBJECTIVE = ObjectiveSpec(Variant.QUADRATIC_SPREAD, 0.125)


def reference_instance() -> Instance:
    return Instance(
        cost=COST,
        energy=ENERGY,
        vehicles=tuple(Vehicle(f"ev{k + 1}", s) for k, s in enumerate(SOC_START)),
        node_ids=NODE_IDS,
        coords=tuple((float(x), float(y)) for x, y in COORDS),
    )


def candidate_stream(seed: int) -> Iterator[Instance]:
    """Endless stream of random grid instances of the reference family."""
    rng = np.random.default_rng(seed)
    while True:
        pts = rng.integers(-40, 41, (8, 2))
        pts[0] = 0
        cost = np.round(np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(-1)))
        rate = rng.uniform(0.25, 0.45)
        energy = np.round(cost * rate * rng.uniform(0.8, 1.2, cost.shape))
        np.fill_diagonal(energy, 0)
        socs = [float(s) for s in rng.choice([85, 90, 95, 100], 3)]
        yield Instance(
            cost=cost,
            energy=energy,
            vehicles=tuple(Vehicle(f"ev{k + 1}", s) for k, s in enumerate(socs)),
            node_ids=NODE_IDS,
            coords=tuple((float(x), float(y)) for x, y in pts),
        )


def shows_tradeoff(inst: Instance, alphas=SWEEP_ALPHAS, solver=None) -> bool:
    """True if the quadratic-spread sweep has the three reference properties."""
    from degvrp.solver import InfeasibleInstanceError, solve_bruteforce

    solver = solver or solve_bruteforce
    try:
        results = [solver(inst, ObjectiveSpec(Variant.QUADRATIC_SPREAD, a)) for a in alphas]
    except InfeasibleInstanceError:
        return False
    base = results[0]
    if base.fleet.spread <= 20:
        return False
    free_gain = any(
        abs(r.route_cost - base.route_cost) <= 1e-9 and r.fleet.spread < base.fleet.spread - 1e-9
        for r in results[1:]
    )
    levelled = any(r.fleet.spread < 5 and r.route_cost > base.route_cost + 1e-9 for r in results)
    return free_gain and levelled
