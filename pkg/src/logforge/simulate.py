"""Stochastic, timed play-out of a net.

One run is a single-threaded event loop over a simulation state: at each step
either a firing is sampled from the enabled set (categorical over
time-dependent transition weights, split uniformly over a transition's
bindings) or the clock advances to the next pending token, arrival, schedule
event or weight breakpoint.  Produced tokens become available after a sampled
delay; transitions cannot consume them earlier.

Runs are reproducible: the PRNG is numpy's PCG64 seeded from the config seed,
and the enabled set is enumerated in a fixed order, so identical (net, config)
pairs yield bit-identical traces.
"""
from __future__ import annotations

import heapq
from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .nets import Binding, Net, ProvenanceTag, transition_bindings
from .serialize import digest_of, net_digest
from .timing import Delay, ReportRule

PRNG_NAME = "numpy-pcg64"
DEFAULT_EPOCH = "2024-03-04T08:00:00Z"


class AllWeightsZero(Exception):
    """Every enabled firing has weight zero at the current time."""


class ConfigInvalid(Exception):
    pass


@dataclass(frozen=True)
class Arrival:
    """Spontaneous objects of one type entering a place."""

    object_type: str
    target_place: str
    inter_arrival: Delay
    count: int
    first_at: float = 0.0

    def to_dict(self) -> dict:
        return {"object_type": self.object_type, "target_place": self.target_place,
                "inter_arrival": self.inter_arrival.to_dict(), "count": self.count,
                "first_at": self.first_at}

    @classmethod
    def from_dict(cls, d: dict) -> "Arrival":
        return cls(d["object_type"], d["target_place"], Delay.from_dict(d["inter_arrival"]),
                   int(d["count"]), float(d.get("first_at", 0.0)))


@dataclass(frozen=True)
class ScheduleEntry:
    """A scheduled resource token: present from start, withdrawn at stop."""

    place: str
    token: tuple[str, ...]
    start: float
    stop: float | None = None

    def to_dict(self) -> dict:
        return {"place": self.place, "token": list(self.token),
                "start": self.start, "stop": self.stop}

    @classmethod
    def from_dict(cls, d: dict) -> "ScheduleEntry":
        return cls(d["place"], tuple(d["token"]), float(d["start"]),
                   None if d.get("stop") is None else float(d["stop"]))


@dataclass
class SimConfig:
    """Everything a run needs besides the net itself."""

    seed: int = 0
    weights: dict = field(default_factory=dict)        # tid -> [(from_time, weight), ...]
    delays: dict = field(default_factory=dict)         # tid -> Delay
    arc_delays: dict = field(default_factory=dict)     # (tid, place) -> Delay
    arrivals: list = field(default_factory=list)
    schedules: list = field(default_factory=list)
    firing_limit: int | None = None
    time_horizon: float | None = None
    timestamp_epoch: str = DEFAULT_EPOCH
    run_id: str = "run"

    def to_dict(self) -> dict:
        return {
            "prng": PRNG_NAME,
            "seed": self.seed,
            "weights": {t: [[f, w] for f, w in pieces] for t, pieces in sorted(self.weights.items())},
            "delays": {t: d.to_dict() for t, d in sorted(self.delays.items())},
            "arc_delays": {f"{t}->{p}": d.to_dict() for (t, p), d in sorted(self.arc_delays.items())},
            "arrivals": [a.to_dict() for a in self.arrivals],
            "schedules": [s.to_dict() for s in self.schedules],
            "firing_limit": self.firing_limit,
            "time_horizon": self.time_horizon,
            "timestamp_epoch": self.timestamp_epoch,
            "run_id": self.run_id,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        arc_delays = {}
        for key, dd in d.get("arc_delays", {}).items():
            tid, pid = key.split("->", 1)
            arc_delays[(tid, pid)] = Delay.from_dict(dd)
        return cls(
            seed=int(d.get("seed", 0)),
            weights={t: [(float(f), float(w)) for f, w in pieces]
                     for t, pieces in d.get("weights", {}).items()},
            delays={t: Delay.from_dict(dd) for t, dd in d.get("delays", {}).items()},
            arc_delays=arc_delays,
            arrivals=[Arrival.from_dict(a) for a in d.get("arrivals", [])],
            schedules=[ScheduleEntry.from_dict(s) for s in d.get("schedules", [])],
            firing_limit=d.get("firing_limit"),
            time_horizon=d.get("time_horizon"),
            timestamp_epoch=d.get("timestamp_epoch", DEFAULT_EPOCH),
            run_id=d.get("run_id", "run"),
        )

    def digest(self) -> str:
        return digest_of(self.to_dict())


def epoch_seconds(stamp: str) -> float:
    return datetime.fromisoformat(stamp.replace("Z", "+00:00")).timestamp()


def render_timestamp(epoch: str, eta: float) -> str:
    dt = datetime.fromtimestamp(epoch_seconds(epoch) + eta, tz=timezone.utc)
    return dt.isoformat().replace("+00:00", "Z")


class WeightSpec:
    """Piecewise-constant transition weights over simulation time.

    Resolution per transition: configured schedule, else the net's annotated
    default pieces (deviation transitions), else 1.0.  Before a transition's
    first breakpoint its default applies.
    """

    def __init__(self, defaults: dict | None = None, schedule: dict | None = None):
        def norm(pieces):
            pieces = sorted((float(f), float(w)) for f, w in pieces)
            if any(w < 0 for _, w in pieces):
                raise ConfigInvalid("negative transition weight")
            return pieces

        self.defaults = {t: norm(p) for t, p in (defaults or {}).items()}
        self.schedule = {t: norm(p) for t, p in (schedule or {}).items()}
        froms = set()
        for table in (self.schedule, self.defaults):
            for pieces in table.values():
                froms.update(f for f, _ in pieces)
        self._breakpoints = sorted(froms)

    @classmethod
    def for_run(cls, net: Net, config: SimConfig) -> "WeightSpec":
        return cls(defaults=dict(net.annotations.weights), schedule=config.weights)

    @staticmethod
    def _eval(pieces, eta: float) -> float | None:
        froms = [f for f, _ in pieces]
        i = bisect_right(froms, eta) - 1
        if i >= 0:
            return pieces[i][1]
        return None

    def at(self, tid: str, eta: float) -> float:
        for table in (self.schedule, self.defaults):
            pieces = table.get(tid)
            if pieces:
                w = self._eval(pieces, eta)
                if w is not None:
                    return w
        return 1.0

    def breakpoints_after(self, eta: float) -> float | None:
        i = bisect_right(self._breakpoints, eta)
        return self._breakpoints[i] if i < len(self._breakpoints) else None


@dataclass(frozen=True)
class FiringRecord:
    """One firing of the ground-truth trace, fully linked to the model."""

    seq_no: int
    time: float
    transition: str
    activity: str | None
    values: tuple[tuple[str, str], ...]
    fresh: tuple[tuple[str, str], ...]
    provenance: ProvenanceTag
    consumed: tuple[tuple[str, tuple[str, ...]], ...]
    produced: tuple[tuple[str, tuple[str, ...], float], ...]
    recorded_objects: tuple[str, ...]
    coarsen_window: float | None = None
    timing_causes: tuple[str, ...] = ()

    def binding(self) -> Binding:
        return Binding(self.values, self.fresh)


@dataclass
class GroundTruthTrace:
    run_id: str
    seed: int
    epoch: str
    records: tuple[FiringRecord, ...]
    model_digests: dict
    config_digest: str
    object_types: dict
    pattern_stats: dict
    report_rules: tuple[ReportRule, ...]
    termination: str
    final_time: float
    injected: tuple[tuple[str, tuple[str, ...]], ...] = ()

    def labeled_records(self) -> list[FiringRecord]:
        return [r for r in self.records if r.activity is not None]

    def firing_sequence(self) -> list[tuple[str, Binding]]:
        return [(r.transition, r.binding()) for r in self.records]

    def digest(self) -> str:
        from .logio import trace_to_dicts
        return digest_of(trace_to_dicts(self))


def firing_probabilities(enabled, weights: WeightSpec, eta: float) -> list[float]:
    """Probability of each enabled firing under the categorical sampling law;
    a transition's weight is split uniformly over its enabled bindings."""
    counts = Counter(tid for tid, _ in enabled)
    shares = [weights.at(tid, eta) / counts[tid] for tid, _ in enabled]
    total = sum(shares)
    if total <= 0:
        raise AllWeightsZero("all enabled firings have zero weight")
    return [s / total for s in shares]


def sample_firing(enabled, weights: WeightSpec, eta: float, rng) -> tuple[str, Binding]:
    if not enabled:
        raise ValueError("no enabled firings to sample from")
    counts = Counter(tid for tid, _ in enabled)
    shares = [weights.at(tid, eta) / counts[tid] for tid, _ in enabled]
    total = sum(shares)
    if total <= 0:
        raise AllWeightsZero("all enabled firings have zero weight")
    r = float(rng.random()) * total
    acc = 0.0
    for firing, share in zip(enabled, shares):
        acc += share
        if r < acc:
            return firing
    return enabled[-1]


class SimState:
    """Mutable state of one run: clock, marking, pending tokens, RNG.

    Also owns the incremental enabled-binding cache; a transition is
    re-enumerated only when one of its input places changed.
    """

    def __init__(self, net: Net, config: SimConfig):
        _validate_config(net, config)
        self.net = net
        self.config = config
        self.weights = WeightSpec.for_run(net, config)
        self.rng = np.random.default_rng(np.random.PCG64(np.random.SeedSequence(config.seed)))
        self.id_gen = net.id_generator()
        self.marking = net.initial_marking.copy()
        self.eta = 0.0
        self.fired = 0
        self.seq_no = 0
        self.done: str | None = None
        self.records: list[FiringRecord] = []
        self.object_types: dict[str, str] = {}
        self.heap: list = []   # (time, tiebreak, kind, place, token)
        self._tie = 0
        self.pending_removals: Counter = Counter()
        self.injected: list[tuple[str, tuple[str, ...]]] = []

        self._tids = [t.id for t in sorted(net.transitions, key=lambda t: t.id)]
        self._dirty = set(self._tids)
        self._cache: dict[str, list[Binding]] = {}
        self._vtypes = {t.id: net.variable_types(t.id) for t in net.transitions}

        self._delay_t = dict(config.delays)
        self._coarsen: dict[str, tuple[float, str]] = {}
        self._slow: dict[str, tuple[float, Delay, str]] = {}
        for ov in net.annotations.overrides:
            if ov.kind == "delay":
                for tid in ov.transitions:
                    self._delay_t[tid] = ov.delay
            elif ov.kind == "coarsen":
                for tid in ov.transitions:
                    self._coarsen[tid] = (ov.window_s, ov.application_id)
            elif ov.kind == "slow_branch":
                for tid in ov.transitions:
                    self._slow[tid] = (ov.probability, ov.delay, ov.application_id)

        self._probes = net.annotations.probes
        self.pattern_stats = {
            p.application_id: {"pattern_code": p.pattern_code, "fired": 0,
                               "choice_points": 0, "chosen": 0}
            for p in self._probes
        }
        for ov in net.annotations.overrides:
            self.pattern_stats.setdefault(
                ov.application_id,
                {"pattern_code": ov.pattern_code, "fired": 0, "choice_points": 0, "chosen": 0})

        for pid, token, _ in net.initial_marking.items():
            place = net.place_map[pid]
            for ident, tname in zip(token, place.type_tuple):
                self.object_types.setdefault(ident, tname)

        self._presample_arrivals()
        self._schedule_events()

    # -- setup ------------------------------------------------------------

    def _push(self, time: float, kind: str, place: str, token: tuple[str, ...]):
        self._tie += 1
        heapq.heappush(self.heap, (time, self._tie, kind, place, token))

    def _presample_arrivals(self):
        entries = []
        for spec in self.config.arrivals:
            t = spec.first_at
            for _ in range(spec.count):
                t += spec.inter_arrival.sample(self.rng)
                entries.append((t, len(entries), spec))
        for t, _, spec in sorted(entries, key=lambda e: (e[0], e[1])):
            ident = self.id_gen.fresh(spec.object_type)
            self.object_types.setdefault(ident, spec.object_type)
            self.injected.append((spec.target_place, (ident,)))
            self._push(t, "token", spec.target_place, (ident,))

    def _schedule_events(self):
        for s in self.config.schedules:
            place = self.net.place_map[s.place]
            for ident, tname in zip(s.token, place.type_tuple):
                self.object_types.setdefault(ident, tname)
                self.id_gen.register(ident)
            self.injected.append((s.place, tuple(s.token)))
            self._push(s.start, "token", s.place, tuple(s.token))
            if s.stop is not None:
                self._push(s.stop, "remove", s.place, tuple(s.token))

    # -- marking mutation with cache invalidation --------------------------

    def _mark_dirty(self, place: str):
        for tid in self.net.consumers_of.get(place, ()):
            self._dirty.add(tid)

    def _add_token(self, place: str, token: tuple[str, ...]):
        if self.pending_removals.get((place, token), 0) > 0:
            self.pending_removals[(place, token)] -= 1
            return
        self.marking.add(place, token)
        self._mark_dirty(place)

    def _remove_token(self, place: str, token: tuple[str, ...]):
        self.marking.remove(place, token)
        self._mark_dirty(place)

    def enabled(self) -> list[tuple[str, Binding]]:
        for tid in self._dirty:
            self._cache[tid] = transition_bindings(self.net, self.marking, tid)
        self._dirty.clear()
        out: list[tuple[str, Binding]] = []
        for tid in self._tids:
            for b in self._cache.get(tid, ()):
                out.append((tid, b))
        return out

    # -- stepping -----------------------------------------------------------

    def _advance(self, enabled_nonempty: bool) -> bool:
        horizon = self.config.time_horizon
        nxt = self.heap[0][0] if self.heap else None
        if enabled_nonempty:
            bp = self.weights.breakpoints_after(self.eta)
            if bp is not None and (nxt is None or bp < nxt):
                nxt = bp
        if nxt is None:
            self.done = "deadlock"
            return False
        if horizon is not None and nxt > horizon:
            self.done = "time_horizon"
            return False
        self.eta = nxt
        while self.heap and self.heap[0][0] <= self.eta:
            _, _, kind, place, token = heapq.heappop(self.heap)
            if kind == "token":
                self._add_token(place, token)
            else:
                if self.marking.count(place, token) > 0:
                    self._remove_token(place, token)
                else:
                    self.pending_removals[(place, token)] += 1
        return True

    def _fire(self, tid: str, binding: Binding) -> FiringRecord:
        net = self.net
        t = net.transition_map[tid]
        bound = dict(binding.values)
        consumed = []
        for arc in net.inputs_of(tid):
            token = tuple(bound[v.name] for v in arc.inscription)
            consumed.append((arc.source, token))
        for pid, token in consumed:
            self._remove_token(pid, token)

        fresh: dict[str, str] = {}
        for arc in net.outputs_of(tid):
            for v in arc.inscription:
                if v.fresh and v.name not in fresh:
                    fresh[v.name] = self.id_gen.fresh(v.object_type)
                    self.object_types.setdefault(fresh[v.name], v.object_type)
        full = {**bound, **fresh}

        timing_causes: list[str] = []
        slow_sample = None
        if tid in self._slow:
            prob, delay, app = self._slow[tid]
            if float(self.rng.random()) < prob:
                slow_sample = delay.sample(self.rng)
                timing_causes.append(app)
                self.pattern_stats[app]["fired"] += 1
        base_delay = self._delay_t.get(tid)
        base_sample = base_delay.sample(self.rng) if base_delay is not None else 0.0

        produced = []
        for arc in net.outputs_of(tid):
            token = tuple(full[v.name] for v in arc.inscription)
            for ident in token:
                self.id_gen.register(ident)
            if slow_sample is not None:
                delay = slow_sample
            else:
                arc_spec = self.config.arc_delays.get((tid, arc.target))
                delay = arc_spec.sample(self.rng) if arc_spec is not None else base_sample
            avail = self.eta + delay
            produced.append((arc.target, token, avail))
            if delay <= 0:
                self._add_token(arc.target, token)
            else:
                self._push(avail, "token", arc.target, token)

        coarsen = self._coarsen.get(tid)
        if coarsen is not None:
            timing_causes.append(coarsen[1])
            self.pattern_stats[coarsen[1]]["fired"] += 1

        if t.record_spec is not None:
            recorded = []
            for name in t.record_spec:
                ident = full.get(name)
                if ident is not None and ident not in recorded:
                    recorded.append(ident)
        else:
            recorded = []
            for name in sorted(full):
                if full[name] not in recorded:
                    recorded.append(full[name])

        vtypes = self._vtypes[tid]
        for name, ident in full.items():
            self.object_types.setdefault(ident, vtypes.get(name, ""))

        record = FiringRecord(
            seq_no=self.seq_no,
            time=self.eta,
            transition=tid,
            activity=t.activity_label,
            values=tuple(sorted(bound.items())),
            fresh=tuple(sorted(fresh.items())),
            provenance=t.provenance,
            consumed=tuple(consumed),
            produced=tuple(produced),
            recorded_objects=tuple(recorded),
            coarsen_window=coarsen[0] if coarsen else None,
            timing_causes=tuple(timing_causes),
        )
        self.seq_no += 1
        self.fired += 1
        self.records.append(record)

        app = t.provenance.application_id
        if app in self.pattern_stats:
            for probe in self._probes:
                if probe.application_id == app and tid in probe.deviation:
                    self.pattern_stats[app]["fired"] += 1
                    break
        return record


def make_state(net: Net, config: SimConfig) -> SimState:
    return SimState(net, config)


def _validate_config(net: Net, config: SimConfig):
    if (config.firing_limit is None and config.time_horizon is None
            and net.final_marking is None):
        raise ConfigInvalid(
            "need a firing_limit, a time_horizon, or a final marking to terminate")
    if config.firing_limit is not None and config.firing_limit < 0:
        raise ConfigInvalid("firing_limit must be >= 0")
    for spec in config.arrivals:
        if spec.count < 0:
            raise ConfigInvalid("arrival count must be >= 0")
        if spec.target_place not in net.place_map:
            raise ConfigInvalid(f"arrival target {spec.target_place!r} unknown")
    for s in config.schedules:
        if s.place not in net.place_map:
            raise ConfigInvalid(f"schedule place {s.place!r} unknown")


def step(net: Net, state: SimState, config: SimConfig) -> tuple[SimState, FiringRecord | None]:
    """Advance the run by one event.

    Returns (state, record) after a firing, (state, None) after a clock
    advance or once the run is finished (state.done holds the reason).
    """
    if state.done is not None:
        return state, None
    if net.final_marking is not None and state.marking.contains(net.final_marking):
        state.done = "final_marking"
        return state, None
    if config.firing_limit is not None and state.fired >= config.firing_limit:
        state.done = "firing_limit"
        return state, None

    enabled = state.enabled()
    firing = None
    if enabled:
        try:
            candidate = sample_firing(enabled, state.weights, state.eta, state.rng)
        except AllWeightsZero:
            candidate = None
        if candidate is not None:
            enabled_tids = {tid for tid, _ in enabled}
            for probe in state._probes:
                stats = state.pattern_stats[probe.application_id]
                if not probe.deviation or not probe.competitors:
                    continue
                # a choice point needs both sides enabled with positive weight
                dev_on = any(tid in enabled_tids and state.weights.at(tid, state.eta) > 0
                             for tid in probe.deviation)
                comp_on = any(tid in enabled_tids and state.weights.at(tid, state.eta) > 0
                              for tid in probe.competitors)
                if dev_on and comp_on:
                    if candidate[0] in probe.deviation:
                        stats["choice_points"] += 1
                        stats["chosen"] += 1
                    elif candidate[0] in probe.competitors:
                        stats["choice_points"] += 1
            firing = candidate

    if firing is not None:
        record = state._fire(*firing)
        return state, record

    state._advance(enabled_nonempty=bool(enabled))
    return state, None


def trace_replays(net: Net, trace: "GroundTruthTrace") -> bool:
    """Replay the trace's firing sequence on `net`, injecting the run's
    spontaneous arrivals and scheduled tokens up front."""
    from .nets import replay
    return replay(net, trace.firing_sequence(), extra_tokens=trace.injected)


def run(ml: Net, config: SimConfig, lineage: dict | None = None) -> GroundTruthTrace:
    """Play out `ml` under `config` until a stop condition holds."""
    state = make_state(ml, config)
    while state.done is None:
        step(ml, state, config)
    digests = {"ml": net_digest(ml)}
    if lineage:
        digests.update(lineage)
    return GroundTruthTrace(
        run_id=config.run_id,
        seed=config.seed,
        epoch=config.timestamp_epoch,
        records=tuple(state.records),
        model_digests=digests,
        config_digest=config.digest(),
        object_types=dict(sorted(state.object_types.items())),
        pattern_stats=state.pattern_stats,
        report_rules=ml.annotations.report_rules,
        termination=state.done,
        final_time=state.eta,
        injected=tuple(state.injected),
    )
