"""JSON formats shared by the CLI and the fixtures.

Values are written as ``"p/q"`` strings or ``"inf"``; tables are flat lists in
lexicographic index order.  Every top-level document carries a ``schema`` tag.
"""

from __future__ import annotations

import json
from pathlib import Path

from .catalog import RELATIONS
from .core import Language, WeightedRelation, ext, format_value
from .plane import Constraint, PlaneGraph, PlaneInstance


class InputError(ValueError):
    pass


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def relation_to_json(rel: WeightedRelation) -> dict:
    return {
        "domain_size": rel.domain_size,
        "arity": rel.arity,
        "table": [format_value(v) for v in rel.table],
    }


def relation_from_json(data, domain_size: int | None = None) -> WeightedRelation:
    if isinstance(data, str):
        if data not in RELATIONS:
            raise InputError(f"unknown catalog relation {data!r}")
        return RELATIONS[data]
    try:
        d = data.get("domain_size", domain_size)
        return WeightedRelation(int(d), int(data["arity"]), tuple(ext(v) for v in data["table"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad relation: {exc}") from exc


def language_to_json(lang: Language) -> dict:
    return {
        "schema": "language",
        "domain_size": lang.domain_size,
        "relations": [dict(name=n, **{k: v for k, v in relation_to_json(g).items() if k != "domain_size"})
                      for n, g in lang.relations],
    }


def language_from_json(data: dict) -> Language:
    _expect_schema(data, "language")
    d = data.get("domain_size")
    rels = []
    for k, entry in enumerate(data.get("relations", [])):
        if isinstance(entry, str):
            rels.append((entry, relation_from_json(entry)))
            continue
        if "name" not in entry:
            raise InputError(f"relations[{k}] has no name")
        if "table" in entry:
            rels.append((entry["name"], relation_from_json(entry, d)))
        else:
            rels.append((entry["name"], relation_from_json(entry.get("catalog", entry["name"]))))
    if not rels:
        raise InputError("language has no relations")
    if d is None:
        d = rels[0][1].domain_size
    try:
        return Language(int(d), tuple(rels))
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def instance_to_json(inst: PlaneInstance, v=None) -> dict:
    g = inst.graph
    out = {
        "schema": "plane-instance",
        "domain_size": inst.domain_size,
        "vertices": g.n,
        "darts": [{"vertex": u} for u in g.dart_vertex],
        "edges": [list(e) for e in g.edges()],
        "rotations": [list(r) for r in g.rotations],
        "outer_face": inst.outer_face,
        "relations": {n: relation_to_json(r) for n, r in sorted(inst.relations.items())},
        "constraints": [
            {k: v for k, v in (
                ("relation", c.relation),
                ("weight", format_value(c.weight)),
                ("anchor_dart", c.anchor_dart),
                ("scope", list(c.scope) if c.scope is not None else None),
            ) if v is not None}
            for c in inst.constraints
        ],
    }
    if v is not None:
        out["v"] = list(v)
    return out


def instance_from_json(data: dict) -> tuple[PlaneInstance, tuple | None]:
    """Parse an instance document; returns the instance and its optional query tuple."""
    _expect_schema(data, "plane-instance")
    try:
        d = int(data["domain_size"])
        darts = [int(x["vertex"]) for x in data["darts"]]
        graph = PlaneGraph.from_edges(int(data["vertices"]), darts, data["edges"], data["rotations"])
        relations = {}
        for name, rel in data.get("relations", {}).items():
            relations[name] = relation_from_json(rel, d)
        constraints = []
        for k, c in enumerate(data.get("constraints", [])):
            name = c["relation"]
            if name not in relations:
                relations[name] = relation_from_json(name)
            constraints.append(Constraint(name, ext(c.get("weight", "1")), int(c["anchor_dart"]), c.get("scope")))
        inst = PlaneInstance(graph, d, relations, tuple(constraints), data.get("outer_face"))
    except (KeyError, TypeError) as exc:
        raise InputError(f"bad instance: missing or malformed field {exc}") from exc
    except ValueError as exc:
        raise InputError(f"bad instance: {exc}") from exc
    v = tuple(data["v"]) if data.get("v") is not None else None
    return inst, v


def load(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc


def _expect_schema(data, schema: str) -> None:
    if not isinstance(data, dict):
        raise InputError("top-level JSON value must be an object")
    tag = data.get("schema", schema)
    if tag != schema:
        raise InputError(f"expected schema {schema!r}, got {tag!r}")
