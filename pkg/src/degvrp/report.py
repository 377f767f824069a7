"""Per-alpha report blocks: JSON document and a fixed-width text table."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from degvrp.degradation import CYCLES_LABEL, ObjectiveSpec, Variant, WoehlerCurve, fit_default_curve, worst_case_cycles
from degvrp.model import Instance
from degvrp.solver import SolveResult

REPORT_VERSION = 1


@dataclass(frozen=True)
class ReportBlock:
    alpha: float
    variant: str
    cost_diff_percent: Optional[float]
    route_cost: float
    objective: float
    soc_end: tuple[float, ...]
    dod: tuple[float, ...]
    spread: float
    worst_case_cycles: float
    tours: tuple[tuple[str, ...], ...]
    proven_optimal: bool
    nodes_explored: int


def cost_diff_percent(cost: float, base_cost: float) -> Optional[float]:
    if base_cost == 0:
        return 0.0 if cost == 0 else None
    return 100.0 * (cost - base_cost) / base_cost


def make_block(inst: Instance, result: SolveResult, base_cost: float, curve: Optional[WoehlerCurve] = None) -> ReportBlock:
    curve = curve or fit_default_curve()
    ids = inst.node_ids
    tours = tuple(tuple(ids[j] for j in result.solution.closed_tour(k)) for k in range(inst.n_vehicles))
    return ReportBlock(
        alpha=result.spec.alpha,
        variant=result.spec.variant.value,
        cost_diff_percent=cost_diff_percent(result.route_cost, base_cost),
        route_cost=result.route_cost,
        objective=result.objective,
        soc_end=result.fleet.soc_end,
        dod=result.fleet.dod,
        spread=result.fleet.spread,
        worst_case_cycles=worst_case_cycles(curve, result.fleet),
        tours=tours,
        proven_optimal=result.proven_optimal,
        nodes_explored=result.stats.nodes_explored,
    )


def report_document(inst: Instance, blocks: Sequence[ReportBlock], base_cost: float, mode: str) -> dict:
    def clean(x):
        return None if x is None or math.isinf(x) else x

    return {
        "format_version": REPORT_VERSION,
        "mode": mode,
        "base_route_cost": base_cost,
        "vehicles": [v.id for v in inst.vehicles],
        "cycles_note": CYCLES_LABEL,
        "blocks": [
            {
                "alpha": b.alpha,
                "variant": b.variant,
                "cost_diff_percent": clean(b.cost_diff_percent),
                "route_cost": b.route_cost,
                "objective": b.objective,
                "soc_end": list(b.soc_end),
                "dod": list(b.dod),
                "dod_spread": b.spread,
                "worst_case_cycles": clean(b.worst_case_cycles),
                "tours": [list(t) for t in b.tours],
                "proven_optimal": b.proven_optimal,
                "nodes_explored": b.nodes_explored,
            }
            for b in blocks
        ],
    }


def dumps_report(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _pct(x: Optional[float]) -> str:
    return "n/a" if x is None else f"{x:.1f}"


def _pct_set(xs) -> str:
    return "{" + ",".join(f"{x:.1f}" for x in xs) + "}"


def format_cycles(cycles: float, table1_style: bool = False) -> str:
    if math.isinf(cycles):
        return "no cycling"
    if table1_style:
        # round up so the "<" bound stays true
        return f"<{int(math.ceil(cycles / 100.0)) * 100}"
    return str(int(round(cycles / 100.0)) * 100)


def render_table(inst: Instance, blocks: Sequence[ReportBlock], table1_style: bool = False) -> str:
    names = {
        Variant.BASE.value: "Base",
        Variant.QUADRATIC_SPREAD.value: "Quadratic spread",
        Variant.LINEAR_MIN_DOD.value: "Linear min-DoD",
    }
    rows = [
        ("Variant", [names[b.variant] for b in blocks]),
        ("alpha", [f"{b.alpha:g}" for b in blocks]),
        ("Route cost", [f"{b.route_cost:.6g}" for b in blocks]),
        ("Objective", [f"{b.objective:.6g}" for b in blocks]),
        ("Cost diff. [%]", [_pct(b.cost_diff_percent) for b in blocks]),
        ("SoC_end [%]", [_pct_set(b.soc_end) for b in blocks]),
        ("DoD [%]", [_pct_set(b.dod) for b in blocks]),
        ("DoD spread", [f"{b.spread:.1f}" for b in blocks]),
        ("Cycles", [format_cycles(b.worst_case_cycles, table1_style) for b in blocks]),
        ("Proven optimal", ["yes" if b.proven_optimal else "no" for b in blocks]),
    ]
    label_w = max(len(r[0]) for r in rows)
    col_w = [max(len(r[1][i]) for r in rows) for i in range(len(blocks))]
    lines = []
    for label, cells in rows:
        line = label.ljust(label_w) + "  " + "  ".join(c.rjust(w) for c, w in zip(cells, col_w))
        lines.append(line.rstrip())
    lines.append("")
    for b in blocks:
        lines.append(f"Tours at alpha={b.alpha:g}:")
        for vehicle, tour in zip(inst.vehicles, b.tours):
            lines.append(f"  {vehicle.id}: {' -> '.join(tour)}")
    lines.append("")
    lines.append(f"Cycles: {CYCLES_LABEL}")
    return "\n".join(lines) + "\n"


def base_cost_for(inst: Instance, solver) -> float:
    return solver(inst, ObjectiveSpec(Variant.BASE, 0.0)).route_cost
