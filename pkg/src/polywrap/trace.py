"""JSONL move traces: a header with the starting state, one line per atomic event, a final line."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .geom import PointSet
from .moves import MoveEngine, event_from_json
from .wrap import Wrap, dump_points, load_points

FORMAT = "polywrap-trace/1"


class TraceError(ValueError):
    pass


@dataclass
class Trace:
    ps: PointSet
    initial: list
    events: list = field(default_factory=list)  # (move index, move kind, event)
    final: list | None = None
    meta: dict = field(default_factory=dict)

    @property
    def initial_wrap(self) -> Wrap:
        return Wrap(self.ps, list(self.initial))

    def replay(self, check_level="off") -> Wrap:
        """Re-run every event from the initial state; raises if a step or the end state differs."""
        eng = MoveEngine(self.initial_wrap, check_level=check_level)
        for _, _, ev in self.events:
            eng.replay(ev)
        if self.final is not None and eng.wrap.sigma != list(self.final):
            raise TraceError(f"replay ended at {eng.wrap.sigma}, trace records {self.final}")
        return eng.wrap


def write_trace(path, ps: PointSet, initial, journal, final, meta: dict | None = None) -> int:
    """Write a journal of MoveRecords; returns the number of event lines."""
    lines = 0
    with open(path, "w") as fh:
        head = {"type": "header", "format": FORMAT, **dump_points(ps), "initial": list(initial)}
        if meta:
            head["meta"] = meta
        fh.write(json.dumps(head) + "\n")
        for k, rec in enumerate(journal):
            for ev in rec.events:
                fh.write(json.dumps({"type": "event", "move": k, "kind": rec.kind, **ev.to_json()}) + "\n")
                lines += 1
        fh.write(json.dumps({"type": "final", "sigma": list(final), "moves": len(journal)}) + "\n")
    return lines


def read_trace(path) -> Trace:
    text = Path(path).read_text()
    rows = []
    for n, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            rows.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise TraceError(f"line {n}: {exc}") from exc
    if not rows or rows[0].get("type") != "header":
        raise TraceError("trace must start with a header line")
    head = rows[0]
    try:
        tr = Trace(load_points(head), list(head["initial"]), meta=head.get("meta", {}))
        for row in rows[1:]:
            kind = row.get("type")
            if kind == "event":
                tr.events.append((row["move"], row["kind"], event_from_json(row)))
            elif kind == "final":
                tr.final = list(row["sigma"])
            else:
                raise TraceError(f"unknown line type {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, TraceError):
            raise
        raise TraceError(f"malformed trace: {exc}") from exc
    return tr
