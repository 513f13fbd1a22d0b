"""Ground-truth targets for conformance checking.

From a trace and its observed log we derive the optimal alignment a checker
should have produced: base labeled firings are synchronous moves, recording
insertions become log/model move pairs, skipped or unrecorded activities
become model moves, deviation silents become cause-tagged silent model moves,
and object-level recording errors stay synchronous but carry an
object-discrepancy annotation.  Timing-only patterns do not surface in
alignments at all; they appear in the deviation report only.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .logio import ObservedLog, atomic_write, event_id_for, project_observed
from .nets import Net
from .simulate import FiringRecord, GroundTruthTrace

INSERTION_CODES = ("RI_in^e", "RI_in^a")
SKIP_CODES = ("RI_mi^e", "BI_3")
OBJECT_ERROR_CODES = ("RI_mi^o", "RI_in^o")
TIMING_CODES = ("RI_mi^p", "BI_11")


class LogTraceMismatch(Exception):
    pass


class CoverageMismatch(Exception):
    pass


@dataclass(frozen=True)
class Cause:
    pattern_code: str
    application_id: str
    origin: str

    def to_dict(self) -> dict:
        return {"pattern_code": self.pattern_code,
                "application_id": self.application_id, "origin": self.origin}

    @classmethod
    def from_dict(cls, d: dict) -> "Cause":
        return cls(d["pattern_code"], d["application_id"], d.get("origin", ""))


@dataclass(frozen=True)
class Move:
    kind: str  # synchronous | log | model | silent_model
    activity: str | None
    objects: tuple[str, ...]
    event_id: str | None = None
    transition: str | None = None
    cause: Cause | None = None
    discrepancy: dict | None = None

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind, "activity": self.activity,
                   "objects": list(self.objects)}
        if self.event_id is not None:
            d["event_id"] = self.event_id
        if self.transition is not None:
            d["transition"] = self.transition
        if self.cause is not None:
            d["cause"] = self.cause.to_dict()
        if self.discrepancy is not None:
            d["discrepancy"] = self.discrepancy
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Move":
        return cls(
            kind=d["kind"],
            activity=d.get("activity"),
            objects=tuple(d.get("objects", [])),
            event_id=d.get("event_id"),
            transition=d.get("transition"),
            cause=Cause.from_dict(d["cause"]) if d.get("cause") else None,
            discrepancy=d.get("discrepancy"),
        )


@dataclass
class GtAlignment:
    system: tuple[Move, ...]
    per_object: dict

    def covered_event_ids(self) -> set[str]:
        ids: set[str] = set()
        for moves in self.per_object.values():
            for m in moves:
                if m.kind in ("synchronous", "log") and m.event_id:
                    ids.add(m.event_id)
        return ids


def _cause(record: FiringRecord) -> Cause:
    p = record.provenance
    return Cause(p.pattern_code or "", p.application_id or "", p.origin)


def _bound_objects(record: FiringRecord) -> tuple[str, ...]:
    seen: list[str] = []
    for _, ident in record.values:
        if ident not in seen:
            seen.append(ident)
    return tuple(seen)


def _shadow_label(m0: Net, record: FiringRecord) -> str | None:
    shadow = record.provenance.shadow_of
    if shadow and shadow in m0.transition_map:
        return m0.transition_map[shadow].activity_label
    return record.activity


def _object_discrepancy(m0: Net, trace: GroundTruthTrace, record: FiringRecord) -> dict:
    shadow = record.provenance.shadow_of
    shadow_vars = m0.variable_types(shadow) if shadow in m0.transition_map else {}
    recorded = set(record.recorded_objects)
    shadow_bound = {ident for var, ident in record.values if var in shadow_vars}
    unrecorded = sorted(ident for var, ident in record.values
                        if var in shadow_vars and ident not in recorded)
    substituted = sorted(ident for ident in recorded if ident not in shadow_bound)
    bound_types = {trace.object_types.get(ident) for _, ident in record.values}
    missing_types = sorted(t for t in set(shadow_vars.values()) if t not in bound_types)
    out: dict = {}
    if unrecorded:
        out["unrecorded"] = unrecorded
    if substituted:
        out["substituted"] = substituted
    if missing_types:
        out["missing_types"] = missing_types
    return out


def gt_alignment(m0: Net, trace: GroundTruthTrace, log: ObservedLog) -> GtAlignment:
    """The ground-truth alignment of `log` against the base model."""
    projected = project_observed(trace)
    if projected.events != log.events or projected.run_id != log.run_id:
        raise LogTraceMismatch("log is not the projection of this trace")

    events = {e.event_id: e for e in log.events}

    system: list[Move] = []
    grouped: dict[str, list[Move]] = {}

    def emit(move: Move, group_objects) -> None:
        system.append(move)
        for obj in group_objects:
            grouped.setdefault(obj, []).append(move)

    for record in trace.records:
        prov = record.provenance
        code = prov.pattern_code
        if record.activity is None:
            if prov.is_base:
                continue
            bound = _bound_objects(record)
            if code in SKIP_CODES:
                move = Move("model", _shadow_label(m0, record), bound,
                            transition=prov.shadow_of or record.transition,
                            cause=_cause(record))
            else:
                move = Move("silent_model", None, bound,
                            transition=record.transition, cause=_cause(record))
            emit(move, bound)
            continue

        event = events[event_id_for(trace.run_id, record.seq_no)]
        if prov.is_base:
            emit(Move("synchronous", event.activity, event.objects,
                      event_id=event.event_id, transition=record.transition),
                 event.objects)
        elif code in INSERTION_CODES:
            bound = _bound_objects(record)
            emit(Move("log", event.activity, event.objects,
                      event_id=event.event_id, cause=_cause(record)),
                 event.objects)
            emit(Move("model", _shadow_label(m0, record), bound,
                      transition=prov.shadow_of, cause=_cause(record)),
                 bound)
        elif code in OBJECT_ERROR_CODES:
            disc = _object_discrepancy(m0, trace, record)
            move = Move("synchronous", event.activity, event.objects,
                        event_id=event.event_id,
                        transition=prov.shadow_of or record.transition,
                        cause=_cause(record), discrepancy=disc or None)
            emit(move, tuple(dict.fromkeys(list(event.objects) + disc.get("unrecorded", []))))
        else:
            # remaining labeled creations (batch-logged pairs) stay synchronous
            emit(Move("synchronous", event.activity, event.objects,
                      event_id=event.event_id,
                      transition=prov.shadow_of or record.transition,
                      cause=_cause(record)),
                 event.objects)

    return GtAlignment(system=tuple(system),
                       per_object={k: tuple(v) for k, v in sorted(grouped.items())})


@dataclass
class DeviationReport:
    entries: dict  # application_id -> {code, count, responsible, affected}

    def to_dict(self) -> dict:
        return {"entries": {
            app: {"code": e["code"], "count": e["count"],
                  "responsible": sorted(e["responsible"]),
                  "affected": sorted(e["affected"])}
            for app, e in sorted(self.entries.items())
        }}


def deviation_report(trace: GroundTruthTrace) -> DeviationReport:
    """Per pattern application: occurrence count plus the responsible and
    affected objects, read off the created transitions' bindings."""
    rules = {r.transition: r for r in trace.report_rules}
    entries: dict[str, dict] = {}
    for app, stats in trace.pattern_stats.items():
        entries[app] = {"code": stats.get("pattern_code", ""),
                        "count": stats.get("fired", 0),
                        "responsible": set(), "affected": set()}

    for record in trace.records:
        apps = []
        if record.provenance.application_id:
            apps.append((record.provenance.application_id, False))
        for app in record.timing_causes:
            apps.append((app, True))
        for app, timing in apps:
            entry = entries.setdefault(
                app, {"code": record.provenance.pattern_code or "",
                      "count": 0, "responsible": set(), "affected": set()})
            values = dict(record.values)
            if timing:
                entry["responsible"].update(values.values())
                continue
            rule = rules.get(record.transition)
            if rule is None:
                entry["responsible"].update(values.values())
                continue
            resp_names = list(values) if rule.responsible is None else list(rule.responsible)
            responsible = {values[n] for n in resp_names if n in values}
            if rule.affected is None:
                affected = {v for n, v in values.items() if v not in responsible}
            else:
                affected = {values[n] for n in rule.affected if n in values}
            entry["responsible"].update(responsible)
            entry["affected"].update(affected)

    for entry in entries.values():
        entry["affected"] -= entry["responsible"]
    return DeviationReport(entries=entries)


def _levenshtein(a: list, b: list) -> int:
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, xa in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, xb in enumerate(b, start=1):
            cost = 0 if xa == xb else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
        prev = cur
    return prev[len(b)]


def _move_key(m: Move):
    return (m.kind, m.activity, frozenset(m.objects))


def move_distance(candidate: GtAlignment, gt: GtAlignment) -> float:
    """Normalized per-object edit distance between two alignments over move
    tuples (kind, activity, object set); 0 iff identical."""
    if candidate.covered_event_ids() != gt.covered_event_ids():
        raise CoverageMismatch("alignments cover different observed events")
    objects = sorted(set(candidate.per_object) | set(gt.per_object))
    if not objects:
        return 0.0
    total = 0.0
    for obj in objects:
        seq_c = [_move_key(m) for m in candidate.per_object.get(obj, ())]
        seq_g = [_move_key(m) for m in gt.per_object.get(obj, ())]
        denom = max(len(seq_c), len(seq_g))
        if denom == 0:
            continue
        total += _levenshtein(seq_c, seq_g) / denom
    return total / len(objects)


# -- interchange ---------------------------------------------------------------

def write_alignment(alignment: GtAlignment, path: str) -> None:
    lines = []
    for obj, moves in sorted(alignment.per_object.items()):
        for i, m in enumerate(moves):
            lines.append(json.dumps({"object": obj, "seq": i, **m.to_dict()},
                                    sort_keys=True, separators=(",", ":")))
    atomic_write(path, "\n".join(lines) + "\n")


def read_alignment(path: str) -> GtAlignment:
    from .logio import ParseError
    grouped: dict[str, list[tuple[int, Move]]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                d = json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseError(e.msg, path, lineno) from None
            grouped.setdefault(d["object"], []).append(
                (d.get("seq", lineno), Move.from_dict(d)))
    per_object = {obj: tuple(m for _, m in sorted(pairs, key=lambda p: p[0]))
                  for obj, pairs in grouped.items()}
    system = tuple(m for moves in per_object.values() for m in moves)
    return GtAlignment(system=system, per_object=per_object)
