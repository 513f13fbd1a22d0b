"""Typed Petri nets with identifiers (t-PNIDs).

Places are typed by tuples of object types and hold multisets of identifier
tuples.  Arcs carry variable inscriptions; a transition fires under a binding
of its variables to identifiers, consuming and producing token tuples.
Variables flagged fresh (nu-variables) bind to globally new identifiers at
fire time.  Everything here is value-like: nets and markings are never
mutated in place by the public operations.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property

from .timing import SimAnnotations

ROLE_HINTS = ("regular", "resource_idle", "resource_busy", "queue", "correlation", "other")
ORIGINS = ("base", "behavioral", "recording")


class NotEnabled(Exception):
    """Raised when a firing is attempted that the marking does not enable."""


class ExplosionGuard(Exception):
    """Raised when bounded-language exploration exceeds its node cap."""


@dataclass(frozen=True)
class ObjectType:
    name: str
    prefix: str = ""

    def __post_init__(self):
        if not self.prefix:
            object.__setattr__(self, "prefix", self.name)


@dataclass(frozen=True)
class Variable:
    name: str
    object_type: str
    fresh: bool = False


@dataclass(frozen=True)
class Place:
    id: str
    type_tuple: tuple[str, ...]
    role_hint: str = "regular"


@dataclass(frozen=True)
class ProvenanceTag:
    origin: str = "base"
    pattern_code: str | None = None
    application_id: str | None = None
    shadow_of: str | None = None

    @property
    def is_base(self) -> bool:
        return self.origin == "base"


BASE = ProvenanceTag()


@dataclass(frozen=True)
class Transition:
    """record_spec lists the arc-variable names whose bound identifiers appear
    in the emitted event; None records every bound variable."""

    id: str
    activity_label: str | None = None
    provenance: ProvenanceTag = BASE
    record_spec: tuple[str, ...] | None = None

    @property
    def silent(self) -> bool:
        return self.activity_label is None


@dataclass(frozen=True)
class Arc:
    source: str
    target: str
    inscription: tuple[Variable, ...]


class Marking:
    """Per-place multiset of identifier tuples."""

    __slots__ = ("_tokens",)

    def __init__(self, tokens: dict[str, Counter] | None = None):
        self._tokens: dict[str, Counter] = {}
        if tokens:
            for pid, cnt in tokens.items():
                c = Counter({tuple(tok): n for tok, n in cnt.items() if n})
                if c:
                    self._tokens[pid] = c

    @classmethod
    def of(cls, tokens: dict[str, list] | None = None) -> "Marking":
        m = cls()
        for pid, toks in (tokens or {}).items():
            for tok in toks:
                m.add(pid, tuple(tok))
        return m

    def tokens(self, place_id: str) -> Counter:
        return self._tokens.get(place_id, Counter())

    def count(self, place_id: str, token: tuple[str, ...]) -> int:
        return self._tokens.get(place_id, Counter()).get(tuple(token), 0)

    def add(self, place_id: str, token: tuple[str, ...], n: int = 1) -> None:
        if n <= 0:
            return
        self._tokens.setdefault(place_id, Counter())[tuple(token)] += n

    def remove(self, place_id: str, token: tuple[str, ...], n: int = 1) -> None:
        token = tuple(token)
        cnt = self._tokens.get(place_id)
        if cnt is None or cnt.get(token, 0) < n:
            raise ValueError(f"cannot remove {n} x {token} from {place_id}")
        cnt[token] -= n
        if cnt[token] == 0:
            del cnt[token]
        if not cnt:
            del self._tokens[place_id]

    def copy(self) -> "Marking":
        return Marking(self._tokens)

    def places(self):
        return self._tokens.keys()

    def items(self):
        for pid, cnt in self._tokens.items():
            for tok, n in cnt.items():
                yield pid, tok, n

    def identifiers(self) -> set[str]:
        ids = set()
        for _, tok, _ in self.items():
            ids.update(tok)
        return ids

    def total(self) -> int:
        return sum(n for _, _, n in self.items())

    def contains(self, other: "Marking") -> bool:
        for pid, tok, n in other.items():
            if self.count(pid, tok) < n:
                return False
        return True

    def freeze(self) -> tuple:
        return tuple(
            (pid, tuple(sorted(cnt.items())))
            for pid, cnt in sorted(self._tokens.items())
        )

    def to_lists(self) -> dict[str, list[list[str]]]:
        out: dict[str, list[list[str]]] = {}
        for pid, cnt in sorted(self._tokens.items()):
            toks: list[list[str]] = []
            for tok, n in sorted(cnt.items()):
                toks.extend([list(tok)] * n)
            out[pid] = toks
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Marking) and self.freeze() == other.freeze()

    def __repr__(self) -> str:
        return f"Marking({dict(self._tokens)!r})"


@dataclass(frozen=True)
class Binding:
    """Assignment of a transition's arc variables to identifiers.

    `values` holds the input-bound variables, `fresh` the nu-assignments
    resolved at fire time; both are sorted (name, identifier) pairs.
    """

    values: tuple[tuple[str, str], ...]
    fresh: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(sorted(self.values)))
        object.__setattr__(self, "fresh", tuple(sorted(self.fresh)))

    def as_dict(self) -> dict[str, str]:
        d = dict(self.values)
        d.update(self.fresh)
        return d

    def merged(self) -> tuple[tuple[str, str], ...]:
        return tuple(sorted(self.as_dict().items()))


@dataclass(frozen=True)
class FireResult:
    """Outcome of one firing: the full binding and the moved token tuples."""

    transition: str
    binding: Binding
    consumed: tuple[tuple[str, tuple[str, ...]], ...]
    produced: tuple[tuple[str, tuple[str, ...]], ...]


class IdGenerator:
    """Type-prefixed counters handing out identifiers never seen in the run."""

    def __init__(self, prefixes: dict[str, str], seen=()):
        self._prefixes = dict(prefixes)
        self._seen: set[str] = set(seen)
        self._counters: dict[str, int] = {t: 0 for t in prefixes}
        pats = {t: re.compile(re.escape(p) + r"_(\d+)$") for t, p in prefixes.items()}
        for ident in self._seen:
            for t, pat in pats.items():
                m = pat.match(ident)
                if m:
                    self._counters[t] = max(self._counters[t], int(m.group(1)))

    @classmethod
    def for_net(cls, net: "Net") -> "IdGenerator":
        seen = set(net.initial_marking.identifiers())
        if net.final_marking is not None:
            seen |= net.final_marking.identifiers()
        return cls({t.name: t.prefix for t in net.object_types}, seen)

    def register(self, identifier: str) -> None:
        self._seen.add(identifier)

    def fresh(self, type_name: str) -> str:
        prefix = self._prefixes.get(type_name, type_name)
        n = self._counters.get(type_name, 0)
        while True:
            n += 1
            ident = f"{prefix}_{n}"
            if ident not in self._seen:
                break
        self._counters[type_name] = n
        self._seen.add(ident)
        return ident


@dataclass(frozen=True, eq=False)
class Net:
    object_types: tuple[ObjectType, ...]
    places: tuple[Place, ...]
    transitions: tuple[Transition, ...]
    arcs: tuple[Arc, ...]
    initial_marking: Marking
    final_marking: Marking | None = None
    annotations: SimAnnotations = field(default_factory=SimAnnotations)

    @cached_property
    def place_map(self) -> dict[str, Place]:
        return {p.id: p for p in self.places}

    @cached_property
    def transition_map(self) -> dict[str, Transition]:
        return {t.id: t for t in self.transitions}

    @cached_property
    def type_map(self) -> dict[str, ObjectType]:
        return {t.name: t for t in self.object_types}

    @cached_property
    def _inputs(self) -> dict[str, tuple[Arc, ...]]:
        d: dict[str, list[Arc]] = {t.id: [] for t in self.transitions}
        for a in self.arcs:
            if a.target in d:
                d[a.target].append(a)
        return {k: tuple(v) for k, v in d.items()}

    @cached_property
    def _outputs(self) -> dict[str, tuple[Arc, ...]]:
        d: dict[str, list[Arc]] = {t.id: [] for t in self.transitions}
        for a in self.arcs:
            if a.source in d:
                d[a.source].append(a)
        return {k: tuple(v) for k, v in d.items()}

    def inputs_of(self, tid: str) -> tuple[Arc, ...]:
        return self._inputs.get(tid, ())

    def outputs_of(self, tid: str) -> tuple[Arc, ...]:
        return self._outputs.get(tid, ())

    @cached_property
    def consumers_of(self) -> dict[str, tuple[str, ...]]:
        d: dict[str, list[str]] = {p.id: [] for p in self.places}
        for tid, arcs in self._inputs.items():
            for a in arcs:
                if a.source in d and tid not in d[a.source]:
                    d[a.source].append(tid)
        return {k: tuple(v) for k, v in d.items()}

    def variable_types(self, tid: str) -> dict[str, str]:
        types: dict[str, str] = {}
        for a in list(self.inputs_of(tid)) + list(self.outputs_of(tid)):
            for v in a.inscription:
                types.setdefault(v.name, v.object_type)
        return types

    @property
    def id_generator_state(self) -> dict[str, int]:
        gen = IdGenerator.for_net(self)
        return dict(gen._counters)

    def id_generator(self) -> IdGenerator:
        return IdGenerator.for_net(self)


@dataclass(frozen=True)
class Diagnostic:
    code: str
    element: str
    message: str


def _check_marking(net: Net, marking: Marking, label: str, out: list[Diagnostic]) -> None:
    for pid, tok, _ in marking.items():
        place = net.place_map.get(pid)
        if place is None:
            out.append(Diagnostic("MarkingUnknownPlace", pid, f"{label} marks unknown place {pid!r}"))
        elif len(tok) != len(place.type_tuple):
            out.append(Diagnostic(
                "MarkingArityMismatch", pid,
                f"{label} token {tok!r} has arity {len(tok)}, place {pid!r} expects {len(place.type_tuple)}"))


def validate_net(net: Net) -> list[Diagnostic]:
    """Return one diagnostic per violated structural invariant (empty = valid)."""
    out: list[Diagnostic] = []

    names = [t.name for t in net.object_types]
    for name in sorted({n for n in names if names.count(n) > 1}):
        out.append(Diagnostic("DuplicateTypeName", name, f"object type {name!r} declared twice"))

    pids = [p.id for p in net.places]
    for pid in sorted({i for i in pids if pids.count(i) > 1}):
        out.append(Diagnostic("DuplicateId", pid, f"place id {pid!r} not unique"))
    tids = [t.id for t in net.transitions]
    for tid in sorted({i for i in tids if tids.count(i) > 1}):
        out.append(Diagnostic("DuplicateId", tid, f"transition id {tid!r} not unique"))
    overlap = set(pids) & set(tids)
    for eid in sorted(overlap):
        out.append(Diagnostic("DuplicateId", eid, f"id {eid!r} used for both a place and a transition"))

    known_types = {t.name for t in net.object_types}
    for p in net.places:
        if not p.type_tuple:
            out.append(Diagnostic("EmptyTypeTuple", p.id, f"place {p.id!r} has empty type tuple"))
        for tn in p.type_tuple:
            if tn not in known_types:
                out.append(Diagnostic("UnknownType", p.id, f"place {p.id!r} uses undeclared type {tn!r}"))
        if p.role_hint not in ROLE_HINTS:
            out.append(Diagnostic("BadRoleHint", p.id, f"place {p.id!r} role {p.role_hint!r} not in {ROLE_HINTS}"))

    for t in net.transitions:
        if t.provenance.origin not in ORIGINS:
            out.append(Diagnostic("ProvenanceInvalid", t.id, f"origin {t.provenance.origin!r} unknown"))
        if t.provenance.origin == "base" and t.provenance.pattern_code is not None:
            out.append(Diagnostic("ProvenanceInvalid", t.id, "base transition carries a pattern code"))
        if t.provenance.origin != "base" and not t.provenance.application_id:
            out.append(Diagnostic("ProvenanceInvalid", t.id, "created transition lacks an application id"))

    place_ids, trans_ids = set(pids), set(tids)
    for i, a in enumerate(net.arcs):
        aid = f"arc[{i}]({a.source}->{a.target})"
        src_p, src_t = a.source in place_ids, a.source in trans_ids
        dst_p, dst_t = a.target in place_ids, a.target in trans_ids
        if not ((src_p and dst_t) or (src_t and dst_p)):
            if not (src_p or src_t):
                out.append(Diagnostic("UnresolvedElement", aid, f"arc source {a.source!r} unknown"))
            if not (dst_p or dst_t):
                out.append(Diagnostic("UnresolvedElement", aid, f"arc target {a.target!r} unknown"))
            if (src_p and dst_p) or (src_t and dst_t):
                out.append(Diagnostic("BipartiteViolation", aid, "arc does not connect a place and a transition"))
            continue
        place = net.place_map[a.source if src_p else a.target]
        if len(a.inscription) != len(place.type_tuple):
            out.append(Diagnostic(
                "ArityMismatch", aid,
                f"inscription arity {len(a.inscription)} vs place {place.id!r} arity {len(place.type_tuple)}"))
        else:
            for v, tn in zip(a.inscription, place.type_tuple):
                if v.object_type != tn:
                    out.append(Diagnostic(
                        "TypeMismatch", aid,
                        f"variable {v.name!r}:{v.object_type} at a {tn} position of {place.id!r}"))
        if src_p:
            for v in a.inscription:
                if v.fresh:
                    out.append(Diagnostic("FreshOnInput", aid, f"nu-variable {v.name!r} on a place->transition arc"))

    for t in net.transitions:
        ins, outs = net.inputs_of(t.id), net.outputs_of(t.id)
        if not ins and not outs:
            out.append(Diagnostic("IsolatedTransition", t.id, f"transition {t.id!r} has no arcs"))
        seen_types: dict[str, str] = {}
        for a in list(ins) + list(outs):
            for v in a.inscription:
                prev = seen_types.setdefault(v.name, v.object_type)
                if prev != v.object_type:
                    out.append(Diagnostic(
                        "VariableTypeConflict", t.id,
                        f"variable {v.name!r} bound at types {prev!r} and {v.object_type!r}"))
        bound = {v.name for a in ins for v in a.inscription}
        for a in outs:
            for v in a.inscription:
                if not v.fresh and v.name not in bound:
                    out.append(Diagnostic(
                        "UnboundOutputVariable", t.id,
                        f"output variable {v.name!r} neither input-bound nor fresh"))
        if t.record_spec is not None:
            all_vars = bound | {v.name for a in outs for v in a.inscription}
            for name in t.record_spec:
                if name not in all_vars:
                    out.append(Diagnostic(
                        "RecordSpecUnknownVariable", t.id,
                        f"record_spec names {name!r}, not a variable of {t.id!r}"))

    _check_marking(net, net.initial_marking, "initial marking", out)
    if net.final_marking is not None:
        _check_marking(net, net.final_marking, "final marking", out)
    return out


def transition_bindings(net: Net, marking: Marking, tid: str) -> list[Binding]:
    """All bindings enabling `tid` in `marking` (input variables only)."""
    arcs = net.inputs_of(tid)
    if not arcs:
        return [Binding(values=())]
    results: list[Binding] = []
    bound: dict[str, str] = {}
    used: Counter = Counter()

    def rec(i: int) -> None:
        if i == len(arcs):
            results.append(Binding(values=tuple(bound.items())))
            return
        arc = arcs[i]
        avail = marking.tokens(arc.source)
        if not avail:
            return
        for token in sorted(avail):
            if used[(arc.source, token)] >= avail[token]:
                continue
            newly: list[str] = []
            ok = True
            for v, ident in zip(arc.inscription, token):
                if v.name in bound:
                    if bound[v.name] != ident:
                        ok = False
                        break
                else:
                    bound[v.name] = ident
                    newly.append(v.name)
            if ok:
                used[(arc.source, token)] += 1
                rec(i + 1)
                used[(arc.source, token)] -= 1
            for name in newly:
                del bound[name]

    rec(0)
    # identical bindings can arise through symmetric token picks; keep one
    uniq = {b.values: b for b in results}
    return [uniq[k] for k in sorted(uniq)]


def enabled_bindings(net: Net, marking: Marking) -> list[tuple[str, Binding]]:
    """Deterministic list of every enabled (transition, binding) firing."""
    out: list[tuple[str, Binding]] = []
    for t in net.transitions:
        out.extend((t.id, b) for b in transition_bindings(net, marking, t.id))
    out.sort(key=lambda f: (f[0], f[1].values))
    return out


def _consumption(net: Net, tid: str, bound: dict[str, str]):
    consumed = []
    for arc in net.inputs_of(tid):
        try:
            token = tuple(bound[v.name] for v in arc.inscription)
        except KeyError as e:
            raise NotEnabled(f"{tid}: variable {e.args[0]!r} unbound") from None
        consumed.append((arc.source, token))
    return consumed


def _check_available(marking: Marking, consumed) -> bool:
    need = Counter(consumed)
    return all(marking.count(pid, tok) >= n for (pid, tok), n in need.items())


def fire(net: Net, marking: Marking, firing: tuple[str, Binding],
         id_gen: IdGenerator) -> tuple[Marking, FireResult]:
    """Fire `firing` atomically; nu-variables draw identifiers from id_gen."""
    tid, binding = firing
    if tid not in net.transition_map:
        raise NotEnabled(f"unknown transition {tid!r}")
    bound = dict(binding.values)
    fresh = dict(binding.fresh)
    consumed = _consumption(net, tid, bound)
    if not _check_available(marking, consumed):
        raise NotEnabled(f"{tid} not enabled under {bound}")
    for arc in net.outputs_of(tid):
        for v in arc.inscription:
            if v.fresh and v.name not in fresh and v.name not in bound:
                fresh[v.name] = id_gen.fresh(v.object_type)
    full = {**bound, **fresh}
    produced = []
    for arc in net.outputs_of(tid):
        try:
            produced.append((arc.target, tuple(full[v.name] for v in arc.inscription)))
        except KeyError as e:
            raise NotEnabled(f"{tid}: output variable {e.args[0]!r} unbound") from None
    result = Marking(marking._tokens)
    for pid, tok in consumed:
        result.remove(pid, tok)
    for pid, tok in produced:
        result.add(pid, tok)
        for ident in tok:
            id_gen.register(ident)
    record = FireResult(tid, Binding(tuple(bound.items()), tuple(fresh.items())),
                        tuple(consumed), tuple(produced))
    return result, record


def replay(net: Net, trace, extra_tokens=()) -> bool:
    """True iff the (transition, binding) sequence fires from the initial
    marking; fresh identifiers are taken from the bindings, not regenerated.

    extra_tokens injects (place, token) pairs up front, e.g. the spontaneous
    arrivals of a simulation run (more tokens never disable a firing).
    """
    marking = net.initial_marking.copy()
    for pid, token in extra_tokens:
        marking.add(pid, tuple(token))
    for tid, binding in trace:
        if tid not in net.transition_map:
            return False
        full = binding.as_dict()
        try:
            consumed = _consumption(net, tid, full)
        except NotEnabled:
            return False
        if not _check_available(marking, consumed):
            return False
        try:
            produced = [(arc.target, tuple(full[v.name] for v in arc.inscription))
                        for arc in net.outputs_of(tid)]
        except KeyError:
            return False
        for pid, tok in consumed:
            marking.remove(pid, tok)
        for pid, tok in produced:
            marking.add(pid, tok)
    return True


def bounded_language(net: Net, depth: int, cap: int = 1_000_000) -> set:
    """All firing sequences of length <= depth, fresh identifiers canonicalized
    to ~1, ~2, ... in order of first appearance along each sequence."""
    if depth > 12:
        raise ValueError("depth > 12 is not supported (state explosion guard)")
    sequences: set = {()}
    stack: list[tuple[Marking, tuple, int]] = [(net.initial_marking.copy(), (), 0)]
    nodes = 0
    while stack:
        marking, seq, nfresh = stack.pop()
        if len(seq) >= depth:
            continue
        for tid, binding in enabled_bindings(net, marking):
            nodes += 1
            if nodes > cap:
                raise ExplosionGuard(f"bounded_language explored more than {cap} nodes")
            bound = dict(binding.values)
            fresh: dict[str, str] = {}
            k = nfresh
            for arc in net.outputs_of(tid):
                for v in arc.inscription:
                    if v.fresh and v.name not in fresh:
                        k += 1
                        fresh[v.name] = f"~{k}"
            full = {**bound, **fresh}
            m2 = marking.copy()
            for pid, tok in _consumption(net, tid, bound):
                m2.remove(pid, tok)
            for arc in net.outputs_of(tid):
                m2.add(arc.target, tuple(full[v.name] for v in arc.inscription))
            step = (tid, tuple(sorted(full.items())))
            seq2 = seq + (step,)
            sequences.add(seq2)
            stack.append((m2, seq2, k))
    return sequences
