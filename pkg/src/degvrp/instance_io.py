"""Strict JSON instance documents with a canonical byte layout.

Canonical form: keys sorted at every level, two-space indent, each matrix
row on one line, numbers written with at most 6 significant digits.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

from degvrp.degradation import ObjectiveSpec
from degvrp.model import Instance, Vehicle, validate_instance

FORMAT_VERSION = 1

_TOP_REQUIRED = {"format_version", "nodes", "depot", "cost_matrix", "energy_matrix", "vehicles"}
_TOP_OPTIONAL = {"default_objective"}


class DocumentError(ValueError):
    """Malformed, mis-dimensioned or invalid instance document."""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(field)
        super().__init__(f"{': '.join(where)}: {message}" if where else message)


@dataclass(frozen=True)
class InstanceDocument:
    instance: Instance
    depot: str
    default_objective: Optional[ObjectiveSpec] = None


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise DocumentError(f"duplicate member {k!r}")
        out[k] = v
    return out


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _number(v, field: str) -> float:
    if not _is_number(v):
        raise DocumentError(f"expected a number, got {type(v).__name__}", field)
    x = float(v)
    if not math.isfinite(x):
        raise DocumentError("number must be finite", field)
    return x


def _object(v, field: str, required: set, optional: set = frozenset()) -> dict:
    if not isinstance(v, dict):
        raise DocumentError(f"expected an object, got {type(v).__name__}", field)
    unknown = sorted(set(v) - required - optional)
    if unknown:
        raise DocumentError(f"unknown members {unknown}", field)
    missing = sorted(required - set(v))
    if missing:
        raise DocumentError(f"missing members {missing}", field)
    return v


def _matrix(v, field: str, n: int) -> list[list[float]]:
    if not isinstance(v, list):
        raise DocumentError("expected an array of rows", field)
    if len(v) != n:
        raise DocumentError(f"has {len(v)} rows but there are {n} nodes", field)
    rows = []
    for i, row in enumerate(v):
        if not isinstance(row, list) or len(row) != n:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise DocumentError(f"row must have {n} entries, got {got}", f"{field}[{i}]")
        rows.append([_number(x, f"{field}[{i}][{j}]") for j, x in enumerate(row)])
    return rows


def parse_document(text: str) -> InstanceDocument:
    try:
        raw = json.loads(text, object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as exc:
        raise DocumentError(exc.msg, line=exc.lineno) from None
    doc = _object(raw, "document", _TOP_REQUIRED, _TOP_OPTIONAL)

    version = doc["format_version"]
    if not isinstance(version, int) or isinstance(version, bool) or version != FORMAT_VERSION:
        raise DocumentError(f"unsupported format_version {version!r}, expected {FORMAT_VERSION}", "format_version")

    nodes = doc["nodes"]
    if not isinstance(nodes, list) or not nodes:
        raise DocumentError("expected a nonempty array", "nodes")
    ids, coords = [], []
    for i, node in enumerate(nodes):
        f = f"nodes[{i}]"
        node = _object(node, f, {"id"}, {"x", "y"})
        if not isinstance(node["id"], str) or not node["id"]:
            raise DocumentError("id must be a nonempty string", f"{f}.id")
        if ("x" in node) != ("y" in node):
            raise DocumentError("give both x and y or neither", f)
        ids.append(node["id"])
        coords.append((_number(node["x"], f"{f}.x"), _number(node["y"], f"{f}.y")) if "x" in node else None)
    if len(set(ids)) != len(ids):
        raise DocumentError("node ids must be unique", "nodes")

    depot = doc["depot"]
    if depot not in ids:
        raise DocumentError(f"depot {depot!r} is not a node id", "depot")
    if ids[0] != depot:
        raise DocumentError(f"depot {depot!r} must be the first entry of nodes", "depot")

    n = len(ids)
    cost = _matrix(doc["cost_matrix"], "cost_matrix", n)
    energy = _matrix(doc["energy_matrix"], "energy_matrix", n)

    vehicles_raw = doc["vehicles"]
    if not isinstance(vehicles_raw, list):
        raise DocumentError("expected an array", "vehicles")
    vehicles = []
    for k, v in enumerate(vehicles_raw):
        f = f"vehicles[{k}]"
        v = _object(v, f, {"id", "soc_start"})
        if not isinstance(v["id"], str) or not v["id"]:
            raise DocumentError("id must be a nonempty string", f"{f}.id")
        vehicles.append(Vehicle(v["id"], _number(v["soc_start"], f"{f}.soc_start")))

    objective = None
    if "default_objective" in doc:
        obj = _object(doc["default_objective"], "default_objective", {"variant", "alpha"})
        try:
            objective = ObjectiveSpec(obj["variant"], _number(obj["alpha"], "default_objective.alpha"))
        except ValueError as exc:
            if isinstance(exc, DocumentError):
                raise
            raise DocumentError(str(exc), "default_objective") from None

    inst = Instance(cost=cost, energy=energy, vehicles=tuple(vehicles), node_ids=tuple(ids), coords=tuple(coords))
    problems = validate_instance(inst)
    if problems:
        raise DocumentError("; ".join(str(p) for p in problems), "instance")
    return InstanceDocument(instance=inst, depot=depot, default_objective=objective)


def parse_instance(text: str) -> Instance:
    return parse_document(text).instance


def format_number(x: float) -> str:
    s = format(float(x), ".6g")
    return "0" if s == "-0" else s


def _emit(value, indent: int) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {_emit(value[k], indent + 1)}" for k in sorted(value)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if all(_is_number(x) for x in value):
            return "[" + ", ".join(format_number(x) for x in value) + "]"
        items = [inner + _emit(x, indent + 1) for x in value]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return json.dumps(value)
    if _is_number(value):
        return format_number(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")


def document_to_dict(doc: InstanceDocument) -> dict:
    inst = doc.instance
    nodes = []
    for nid, xy in zip(inst.node_ids, inst.coords):
        node = {"id": nid}
        if xy is not None:
            node["x"], node["y"] = xy
        nodes.append(node)
    out = {
        "format_version": FORMAT_VERSION,
        "nodes": nodes,
        "depot": doc.depot,
        "cost_matrix": inst.cost.tolist(),
        "energy_matrix": inst.energy.tolist(),
        "vehicles": [{"id": v.id, "soc_start": v.soc_start} for v in inst.vehicles],
    }
    if doc.default_objective is not None:
        out["default_objective"] = {
            "variant": doc.default_objective.variant.value,
            "alpha": doc.default_objective.alpha,
        }
    return out


def serialize_document(doc: InstanceDocument) -> str:
    return _emit(document_to_dict(doc), 0) + "\n"


def serialize_instance(inst: Instance, default_objective: Optional[ObjectiveSpec] = None) -> str:
    return serialize_document(InstanceDocument(inst, inst.node_ids[0], default_objective))


def canonicalize(text: str) -> str:
    """Canonical byte form of a valid document."""
    return serialize_document(parse_document(text))


def gen_reference() -> InstanceDocument:
    from degvrp.reference import DEFAULT_OBJECTIVE, reference_instance

    inst = reference_instance()
    return InstanceDocument(inst, inst.node_ids[0], DEFAULT_OBJECTIVE)
