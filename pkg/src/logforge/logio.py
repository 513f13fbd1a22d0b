"""File formats and the observed-log projection.

The ground-truth trace is a sidecar: the observed log deliberately carries
only what a logging mechanism would have seen (labels, timestamps, recorded
objects), with every link back to the model stripped.  Formats are versioned
and written atomically (temp file + rename) so failures never leave partial
output behind.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass

from .nets import Net
from .serialize import (SCHEMA_VERSION, canonical_json, net_from_dict,
                        net_to_dict, provenance_from_dict, provenance_to_dict)
from .simulate import FiringRecord, GroundTruthTrace, render_timestamp
from .timing import ReportRule


class ParseError(Exception):
    def __init__(self, message: str, path: str = "", line: int | None = None):
        self.path = path
        self.line = line
        at = f" at {path}" + (f":{line}" if line is not None else "") if path else ""
        super().__init__(message + at)


class SchemaVersionMismatch(Exception):
    pass


def atomic_write(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _check_version(d: dict, path: str):
    v = d.get("schema_version")
    if v != SCHEMA_VERSION:
        raise SchemaVersionMismatch(f"{path}: schema_version {v!r}, expected {SCHEMA_VERSION!r}")


# -- models -----------------------------------------------------------------

def write_model(net: Net, path: str) -> None:
    atomic_write(path, canonical_json(net_to_dict(net)) + "\n")


def read_model(path: str) -> Net:
    try:
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, path, e.lineno) from None
    _check_version(d, path)
    try:
        return net_from_dict(d)
    except (KeyError, TypeError) as e:
        raise ParseError(f"malformed model: {e!r}", path) from None


# -- ground-truth traces ------------------------------------------------------

def record_to_dict(r: FiringRecord) -> dict:
    return {
        "seq_no": r.seq_no,
        "time": r.time,
        "transition": r.transition,
        "activity": r.activity,
        "values": [[k, v] for k, v in r.values],
        "fresh": [[k, v] for k, v in r.fresh],
        "provenance": provenance_to_dict(r.provenance),
        "consumed": [[pid, list(tok)] for pid, tok in r.consumed],
        "produced": [[pid, list(tok), avail] for pid, tok, avail in r.produced],
        "recorded_objects": list(r.recorded_objects),
        "coarsen_window": r.coarsen_window,
        "timing_causes": list(r.timing_causes),
    }


def record_from_dict(d: dict) -> FiringRecord:
    return FiringRecord(
        seq_no=d["seq_no"],
        time=d["time"],
        transition=d["transition"],
        activity=d.get("activity"),
        values=tuple((k, v) for k, v in d.get("values", [])),
        fresh=tuple((k, v) for k, v in d.get("fresh", [])),
        provenance=provenance_from_dict(d.get("provenance", {})),
        consumed=tuple((pid, tuple(tok)) for pid, tok in d.get("consumed", [])),
        produced=tuple((pid, tuple(tok), avail) for pid, tok, avail in d.get("produced", [])),
        recorded_objects=tuple(d.get("recorded_objects", [])),
        coarsen_window=d.get("coarsen_window"),
        timing_causes=tuple(d.get("timing_causes", [])),
    )


def trace_to_dicts(trace: GroundTruthTrace) -> list[dict]:
    header = {
        "schema_version": SCHEMA_VERSION,
        "kind": "ground_truth_trace",
        "run_id": trace.run_id,
        "seed": trace.seed,
        "epoch": trace.epoch,
        "model_digests": trace.model_digests,
        "config_digest": trace.config_digest,
        "object_types": trace.object_types,
        "pattern_stats": trace.pattern_stats,
        "report_rules": [r.to_dict() for r in trace.report_rules],
        "termination": trace.termination,
        "final_time": trace.final_time,
        "injected": [[pid, list(tok)] for pid, tok in trace.injected],
    }
    return [header] + [record_to_dict(r) for r in trace.records]


def write_trace(trace: GroundTruthTrace, path: str) -> None:
    lines = [canonical_json(d) for d in trace_to_dicts(trace)]
    atomic_write(path, "\n".join(lines) + "\n")


def read_trace(path: str, net: Net | None = None) -> GroundTruthTrace:
    dicts = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                dicts.append(json.loads(line))
            except json.JSONDecodeError as e:
                raise ParseError(e.msg, path, lineno) from None
    if not dicts or dicts[0].get("kind") != "ground_truth_trace":
        raise ParseError("missing ground_truth_trace header", path, 1)
    header = dicts[0]
    _check_version(header, path)
    records = tuple(record_from_dict(d) for d in dicts[1:])
    if net is not None:
        for i, r in enumerate(records):
            if r.transition not in net.transition_map:
                raise ParseError(f"record references unknown transition {r.transition!r}",
                                 path, i + 2)
    return GroundTruthTrace(
        run_id=header["run_id"],
        seed=header["seed"],
        epoch=header["epoch"],
        records=records,
        model_digests=header.get("model_digests", {}),
        config_digest=header.get("config_digest", ""),
        object_types=header.get("object_types", {}),
        pattern_stats=header.get("pattern_stats", {}),
        report_rules=tuple(ReportRule.from_dict(r) for r in header.get("report_rules", [])),
        termination=header.get("termination", ""),
        final_time=header.get("final_time", 0.0),
        injected=tuple((pid, tuple(tok)) for pid, tok in header.get("injected", [])),
    )


# -- observed logs -------------------------------------------------------------

@dataclass(frozen=True)
class ObservedEvent:
    event_id: str
    timestamp: str
    activity: str
    objects: tuple[str, ...]
    run_id: str

    def to_dict(self) -> dict:
        return {"event_id": self.event_id, "timestamp": self.timestamp,
                "activity": self.activity, "objects": list(self.objects),
                "run_id": self.run_id}

    @classmethod
    def from_dict(cls, d: dict) -> "ObservedEvent":
        return cls(d["event_id"], d["timestamp"], d["activity"],
                   tuple(d.get("objects", [])), d.get("run_id", ""))


@dataclass(frozen=True)
class ObservedLog:
    events: tuple[ObservedEvent, ...]
    objects: dict  # identifier -> object type
    run_id: str = ""


def event_id_for(run_id: str, seq_no: int) -> str:
    return f"{run_id}-{seq_no:06d}"


def project_observed(trace: GroundTruthTrace) -> ObservedLog:
    """The visible side of a trace: one event per labeled firing, objects per
    record_spec, timestamps coarsened where a coarsening window applies;
    silent firings disappear entirely."""
    rows = []
    for r in trace.records:
        if r.activity is None:
            continue
        eta = r.time
        if r.coarsen_window:
            eta = math.floor(eta / r.coarsen_window) * r.coarsen_window
        rows.append((eta, r.seq_no, r))
    rows.sort(key=lambda row: (row[0], row[1]))  # ties keep true order
    events = tuple(
        ObservedEvent(
            event_id=event_id_for(trace.run_id, seq_no),
            timestamp=render_timestamp(trace.epoch, eta),
            activity=r.activity,
            objects=r.recorded_objects,
            run_id=trace.run_id,
        )
        for eta, seq_no, r in rows
    )
    mentioned = {o for e in events for o in e.objects}
    universe = {o: t for o, t in trace.object_types.items() if o in mentioned}
    return ObservedLog(events=events, objects=universe, run_id=trace.run_id)


def write_observed_jsonl(log: ObservedLog, path: str) -> None:
    header = {"schema_version": SCHEMA_VERSION, "kind": "observed_log",
              "run_id": log.run_id, "objects": dict(sorted(log.objects.items()))}
    lines = [canonical_json(header)] + [canonical_json(e.to_dict()) for e in log.events]
    atomic_write(path, "\n".join(lines) + "\n")


def read_observed_jsonl(path: str) -> ObservedLog:
    dicts = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                dicts.append(json.loads(line))
            except json.JSONDecodeError as e:
                raise ParseError(e.msg, path, lineno) from None
    if not dicts or dicts[0].get("kind") != "observed_log":
        raise ParseError("missing observed_log header", path, 1)
    _check_version(dicts[0], path)
    return ObservedLog(
        events=tuple(ObservedEvent.from_dict(d) for d in dicts[1:]),
        objects=dicts[0].get("objects", {}),
        run_id=dicts[0].get("run_id", ""),
    )


CSV_FIELDS = ("event_id", "timestamp", "activity", "objects", "run_id")


def write_observed_csv(log: ObservedLog, path: str) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(CSV_FIELDS)
    for e in log.events:
        writer.writerow([e.event_id, e.timestamp, e.activity, ";".join(e.objects), e.run_id])
    atomic_write(path, buf.getvalue())


def read_observed_csv(path: str) -> ObservedLog:
    events = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty csv", path, 1) from None
        if tuple(header) != CSV_FIELDS:
            raise ParseError(f"unexpected csv header {header!r}", path, 1)
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(CSV_FIELDS):
                raise ParseError(f"expected {len(CSV_FIELDS)} columns, got {len(row)}",
                                 path, lineno)
            event_id, timestamp, activity, objects, run_id = row
            events.append(ObservedEvent(
                event_id, timestamp, activity,
                tuple(o for o in objects.split(";") if o), run_id))
    return ObservedLog(events=tuple(events), objects={},
                       run_id=events[0].run_id if events else "")


# -- small json documents -------------------------------------------------------

def write_json(doc: dict, path: str) -> None:
    doc = {"schema_version": SCHEMA_VERSION, **doc}
    atomic_write(path, canonical_json(doc) + "\n")


def read_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, path, e.lineno) from None
    _check_version(d, path)
    return d
