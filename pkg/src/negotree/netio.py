"""Interchange formats: net documents/files, trace NDJSON, results CSV.

The net document layout is canonical so equal nets serialize to identical
bytes: attributes in space order, edges sorted by (parent, child) position,
CPT rows in the Cartesian-product order of the parent domains, `given`
keys in canonical parent order.  Attribute order in the file is the
canonical order on load.
"""

from __future__ import annotations

import itertools
import json
from typing import Iterable, Mapping, Sequence

from .cpnet import CPNet
from .domain import OutcomeSpace, PartialAssignment
from .errors import InvalidAssignment, NetFormatError
from .protocol import RunStats, TraceEvent

CSV_HEADER = "s_attr,s_os,s_out,s_dq,s_iter,s_time_sec"


# --- net documents ---

def net_to_doc(net: CPNet) -> dict:
    space = net.space
    edges = sorted(
        ((p, a) for a in space.attributes for p in net.parents[a]),
        key=lambda e: (space.index(e[0]), space.index(e[1])),
    )
    cpt = {}
    for attr in space.attributes:
        ps = net.parents[attr]
        by_ctx = {
            tuple(given[p] for p in ps): order for given, order in net.cpt[attr]
        }
        rows = []
        for combo in itertools.product(*(space.domains[p] for p in ps)):
            rows.append(
                {"given": dict(zip(ps, combo)), "order": list(by_ctx[combo])}
            )
        cpt[attr] = rows
    return {
        "attributes": [
            {"name": a, "values": list(space.domains[a])} for a in space.attributes
        ],
        "edges": [list(e) for e in edges],
        "cpt": cpt,
    }


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise NetFormatError(msg)


def net_from_doc(doc: Mapping) -> CPNet:
    """Build a net from a document; structural problems raise NetFormatError.

    Semantic validity (acyclicity, context coverage) is the caller's move
    via `require_valid`, so validators can report those as a batch.
    """
    _require(isinstance(doc, Mapping), "document must be a JSON object")
    for key in ("attributes", "edges", "cpt"):
        _require(key in doc, f"missing top-level key {key!r}")
    attrs_field = doc["attributes"]
    _require(isinstance(attrs_field, Sequence) and not isinstance(attrs_field, str),
             "'attributes' must be a list")
    names = []
    domains = {}
    for item in attrs_field:
        _require(isinstance(item, Mapping) and "name" in item and "values" in item,
                 "each attribute needs 'name' and 'values'")
        name = item["name"]
        values = item["values"]
        _require(isinstance(name, str), "attribute names must be strings")
        _require(isinstance(values, Sequence) and not isinstance(values, str),
                 f"values of {name!r} must be a list")
        names.append(name)
        domains[name] = [str(v) for v in values]
    try:
        space = OutcomeSpace(names, domains)
    except InvalidAssignment as exc:
        raise NetFormatError(str(exc)) from exc

    parents: dict[str, list[str]] = {a: [] for a in names}
    _require(isinstance(doc["edges"], Sequence), "'edges' must be a list")
    for edge in doc["edges"]:
        _require(
            isinstance(edge, Sequence) and not isinstance(edge, str) and len(edge) == 2,
            f"edge {edge!r} must be a [parent, child] pair",
        )
        p, c = edge
        _require(p in domains, f"edge parent {p!r} is not an attribute")
        _require(c in domains, f"edge child {c!r} is not an attribute")
        parents[c].append(p)

    cpt_field = doc["cpt"]
    _require(isinstance(cpt_field, Mapping), "'cpt' must be an object")
    cpt = {}
    for attr, rows in cpt_field.items():
        _require(attr in domains, f"CPT given for unknown attribute {attr!r}")
        _require(isinstance(rows, Sequence), f"CPT of {attr!r} must be a list of rows")
        parsed = []
        for row in rows:
            _require(isinstance(row, Mapping) and "order" in row,
                     f"CPT row of {attr!r} needs an 'order'")
            given = row.get("given", {})
            _require(isinstance(given, Mapping), f"'given' of {attr!r} must be an object")
            order = row["order"]
            _require(isinstance(order, Sequence) and not isinstance(order, str),
                     f"'order' of {attr!r} must be a list")
            parsed.append((dict(given), tuple(str(v) for v in order)))
        cpt[attr] = parsed
    return CPNet(space, parents, cpt)


def dumps_net(net: CPNet) -> str:
    return json.dumps(net_to_doc(net), indent=2) + "\n"


def write_net(net: CPNet, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_net(net))


def read_net(path) -> CPNet:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise NetFormatError(f"{path}: not valid JSON ({exc})") from exc
    return net_from_doc(doc)


# --- traces ---

def event_record(event: TraceEvent, space: OutcomeSpace) -> dict:
    outcome = None
    if event.outcome is not None:
        outcome = {a: event.outcome[a] for a in space.attributes if a in event.outcome}
    return {
        "iteration": event.iteration,
        "agent": event.agent,
        "event": event.event,
        "node": event.node,
        "outcome": outcome,
    }


def trace_to_ndjson(events: Iterable[TraceEvent], space: OutcomeSpace) -> str:
    lines = [
        json.dumps(event_record(e, space), separators=(",", ":")) for e in events
    ]
    return "\n".join(lines) + "\n" if lines else ""


def write_trace(events: Iterable[TraceEvent], space: OutcomeSpace, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(trace_to_ndjson(events, space))


def read_trace(path) -> list[dict]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise NetFormatError(f"{path}:{lineno}: bad trace line ({exc})") from exc
    return records


# --- results CSV ---

def csv_row(
    s_attr: int | float,
    s_os: int | float,
    s_out: float,
    s_dq: float,
    s_iter: float,
    s_time_sec: float,
) -> str:
    def num(x):
        if isinstance(x, int):
            return str(x)
        return f"{x:.6f}"

    return ",".join(num(v) for v in (s_attr, s_os, s_out, s_dq, s_iter, s_time_sec))


def stats_csv(stats: RunStats) -> str:
    """Header plus the single-run row (per-agent values averaged)."""
    row = csv_row(stats.s_attr, stats.s_os, stats.s_out_mean, stats.s_dq_mean,
                  stats.s_iter, stats.s_time_sec)
    return CSV_HEADER + "\n" + row + "\n"


def outcome_record(o: PartialAssignment, space: OutcomeSpace) -> dict[str, str]:
    return {a: o[a] for a in space.attributes}
