"""Model transformations: the union of a net with a mapped pattern fragment.

`apply` never touches pre-existing elements; it only adds the fragment's
created places, transitions, arcs, object types and initial tokens, and
attaches the fragment's simulation annotations.  `apply_sequence` chains
transformations and keeps a provenance ledger attributing every created
element to exactly one application.
"""
from __future__ import annotations

from dataclasses import dataclass

from .nets import Diagnostic, Net
from .patterns import PatternApplication, PatternFragment, instantiate


class InvalidMapping(Exception):
    def __init__(self, diagnostics, index: int | None = None):
        self.diagnostics = list(diagnostics)
        self.index = index
        where = f" (application #{index})" if index is not None else ""
        super().__init__("invalid mapping" + where + ": " +
                         "; ".join(d.message for d in self.diagnostics))


class OrderViolation(Exception):
    pass


_KIND_SPACE = {"place": "places", "transition": "transitions",
               "place_set": "places", "object_type": "object_types",
               "label": "labels"}


def validate_mapping(net: Net, fragment: PatternFragment,
                     app: PatternApplication) -> list[Diagnostic]:
    """Check that `app` maps every wildcard to a suitable element of `net`."""
    out: list[Diagnostic] = []
    seen_per_kind: dict[str, dict] = {}

    for wc in fragment.wildcards:
        if wc.name not in app.mapping:
            out.append(Diagnostic("MissingMapping", wc.name,
                                  f"wildcard <{wc.name}> of {fragment.code} is unmapped"))
            continue
        values = app.many(wc.name) if wc.many else (app.one(wc.name),)
        if wc.many and not values:
            out.append(Diagnostic("MissingMapping", wc.name,
                                  f"wildcard <{wc.name}> mapped to an empty set"))
        for value in values:
            if not isinstance(value, str):
                out.append(Diagnostic("KindMismatch", wc.name,
                                      f"<{wc.name}> must map to string values, got {value!r}"))
                continue
            if wc.kind in ("place", "place_set") and value not in net.place_map:
                out.append(Diagnostic("UnresolvedElement", value,
                                      f"<{wc.name}> maps to unknown place {value!r}"))
            elif wc.kind == "transition" and value not in net.transition_map:
                out.append(Diagnostic("UnresolvedElement", value,
                                      f"<{wc.name}> maps to unknown transition {value!r}"))
            elif wc.kind == "object_type" and value not in net.type_map:
                out.append(Diagnostic("UnresolvedElement", value,
                                      f"<{wc.name}> maps to unknown object type {value!r}"))
            space = _KIND_SPACE[wc.kind]
            prev = seen_per_kind.setdefault(space, {})
            if value in prev and prev[value] != wc.name:
                out.append(Diagnostic(
                    "InjectivityViolation", value,
                    f"<{prev[value]}> and <{wc.name}> both map to {value!r}"))
            prev[value] = wc.name

    if out:
        return out

    params = {**fragment.params, **app.params}
    for req in fragment.requirements:
        msg = req.check(net, app, params)
        if msg:
            code = "RoleMismatch" if "role" in req.name else "RequirementFailed"
            out.append(Diagnostic(code, req.name, f"{fragment.code}: {msg}"))
    return out


def apply(net: Net, fragment: PatternFragment, app: PatternApplication) -> Net:
    """The net unioned with the mapped fragment's created elements."""
    diagnostics = validate_mapping(net, fragment, app)
    if diagnostics:
        raise InvalidMapping(diagnostics)

    built = fragment.build(net, app)
    clashes = [p.id for p in built.places if p.id in net.place_map]
    clashes += [t.id for t in built.transitions if t.id in net.transition_map]
    if clashes:
        raise InvalidMapping([Diagnostic("DuplicateId", c, f"created id {c!r} already exists")
                              for c in clashes])

    marking = net.initial_marking.copy()
    for pid, token in built.initial_tokens:
        marking.add(pid, token)

    return Net(
        object_types=net.object_types + tuple(built.object_types),
        places=net.places + tuple(built.places),
        transitions=net.transitions + tuple(built.transitions),
        arcs=net.arcs + tuple(built.arcs),
        initial_marking=marking,
        final_marking=net.final_marking,
        annotations=net.annotations.merged_with(
            weights=tuple(built.weights.items()),
            overrides=tuple(built.overrides),
            probes=(built.probe,) if built.probe else (),
            report_rules=tuple(built.report_rules),
        ),
    )


@dataclass(frozen=True)
class LedgerEntry:
    application_id: str
    code: str
    origin: str
    created_places: tuple[str, ...]
    created_transitions: tuple[str, ...]
    created_arc_count: int
    mapping: dict
    params: dict

    def to_dict(self) -> dict:
        from .patterns import _params_to_json
        return {
            "application_id": self.application_id,
            "code": self.code,
            "origin": self.origin,
            "created_places": list(self.created_places),
            "created_transitions": list(self.created_transitions),
            "created_arc_count": self.created_arc_count,
            "mapping": {k: (list(v) if isinstance(v, (list, tuple)) else v)
                        for k, v in self.mapping.items()},
            "params": _params_to_json(self.params),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LedgerEntry":
        from .patterns import _params_from_json
        return cls(d["application_id"], d["code"], d["origin"],
                   tuple(d["created_places"]), tuple(d["created_transitions"]),
                   d["created_arc_count"], dict(d["mapping"]),
                   _params_from_json(d.get("params", {})))


@dataclass(frozen=True)
class ProvenanceLedger:
    entries: tuple[LedgerEntry, ...] = ()

    def application_ids(self) -> tuple[str, ...]:
        return tuple(e.application_id for e in self.entries)

    def entry(self, application_id: str) -> LedgerEntry | None:
        for e in self.entries:
            if e.application_id == application_id:
                return e
        return None

    def to_dict(self) -> dict:
        return {"entries": [e.to_dict() for e in self.entries]}

    @classmethod
    def from_dict(cls, d: dict) -> "ProvenanceLedger":
        return cls(tuple(LedgerEntry.from_dict(e) for e in d.get("entries", [])))


def apply_sequence(net: Net, apps) -> tuple[Net, ProvenanceLedger]:
    """Fold `apply` over the applications, behavioral before recording."""
    apps = list(apps)
    seen_recording = False
    seen_ids: set[str] = set()
    for i, app in enumerate(apps):
        if app.application_id in seen_ids:
            raise InvalidMapping([Diagnostic("DuplicateId", app.application_id,
                                             "application id reused")], index=i)
        seen_ids.add(app.application_id)
        frag = instantiate(app.code, app.params)
        if frag.origin == "recording":
            seen_recording = True
        elif seen_recording:
            raise OrderViolation(
                f"application #{i} ({app.code}) is behavioral but follows a recording one")

    entries: list[LedgerEntry] = []
    current = net
    for i, app in enumerate(apps):
        frag = instantiate(app.code, app.params)
        before_p = {p.id for p in current.places}
        before_t = {t.id for t in current.transitions}
        before_a = len(current.arcs)
        try:
            current = apply(current, frag, app)
        except InvalidMapping as e:
            raise InvalidMapping(e.diagnostics, index=i) from None
        entries.append(LedgerEntry(
            application_id=app.application_id,
            code=app.code,
            origin=frag.origin,
            created_places=tuple(p.id for p in current.places if p.id not in before_p),
            created_transitions=tuple(t.id for t in current.transitions if t.id not in before_t),
            created_arc_count=len(current.arcs) - before_a,
            mapping=dict(app.mapping),
            params={**frag.params, **app.params},
        ))
    return current, ProvenanceLedger(tuple(entries))
