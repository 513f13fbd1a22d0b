"""Delay distributions and per-net simulation annotations.

Annotations are the stochastic side channel of a net: default weights for
deviation transitions, timing overrides contributed by timing-only patterns,
and bookkeeping rules (frequency probes, responsibility rules) that the
simulator and the oracle consume.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Delay:
    """Non-negative sampling distribution for token-production delays.

    kinds: constant(c) | normal(mu, sigma; clamped at 0) | exponential(rate)
    | uniform(low, high).  All values are seconds.
    """

    kind: str
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        if self.kind == "exponential" and self.a <= 0:
            raise ValueError("exponential delay needs a positive rate")
        if self.kind == "normal" and self.b < 0:
            raise ValueError("normal delay needs a non-negative sigma")
        if self.kind == "uniform" and self.a > self.b:
            raise ValueError("uniform delay needs low <= high")

    @classmethod
    def constant(cls, c: float) -> "Delay":
        return cls("constant", float(c))

    @classmethod
    def normal(cls, mu: float, sigma: float) -> "Delay":
        return cls("normal", float(mu), float(sigma))

    @classmethod
    def exponential(cls, rate: float) -> "Delay":
        return cls("exponential", float(rate))

    @classmethod
    def uniform(cls, low: float, high: float) -> "Delay":
        return cls("uniform", float(low), float(high))

    def sample(self, rng) -> float:
        if self.kind == "constant":
            value = self.a
        elif self.kind == "normal":
            value = float(rng.normal(self.a, self.b))
        elif self.kind == "exponential":
            value = float(rng.exponential(1.0 / self.a))
        elif self.kind == "uniform":
            value = float(rng.uniform(self.a, self.b))
        else:
            raise ValueError(f"unknown delay kind {self.kind!r}")
        return max(0.0, value)  # durations never run backwards

    def mean(self) -> float:
        if self.kind == "constant":
            return self.a
        if self.kind == "normal":
            return self.a
        if self.kind == "exponential":
            return 1.0 / self.a
        if self.kind == "uniform":
            return 0.5 * (self.a + self.b)
        raise ValueError(self.kind)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "a": self.a, "b": self.b}

    @classmethod
    def from_dict(cls, d: dict) -> "Delay":
        return cls(d["kind"], d.get("a", 0.0), d.get("b", 0.0))


@dataclass(frozen=True)
class TimingOverride:
    """A timing contribution of a pattern application.

    coarsen: emitted timestamps of the target transitions floor to window_s.
    slow_branch: with the given probability a firing of the target draws its
    production delay from `delay` instead of the configured one.
    delay: fixed production-delay replacement for the target transitions.
    """

    kind: str  # coarsen | slow_branch | delay
    transitions: tuple[str, ...]
    application_id: str = ""
    pattern_code: str = ""
    window_s: float = 0.0
    probability: float = 0.0
    delay: Delay | None = None

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "transitions": list(self.transitions),
            "application_id": self.application_id,
            "pattern_code": self.pattern_code,
            "window_s": self.window_s,
            "probability": self.probability,
        }
        if self.delay is not None:
            d["delay"] = self.delay.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TimingOverride":
        return cls(
            kind=d["kind"],
            transitions=tuple(d["transitions"]),
            application_id=d.get("application_id", ""),
            pattern_code=d.get("pattern_code", ""),
            window_s=d.get("window_s", 0.0),
            probability=d.get("probability", 0.0),
            delay=Delay.from_dict(d["delay"]) if "delay" in d else None,
        )


@dataclass(frozen=True)
class FrequencyProbe:
    """Which firings count as this application's deviation choice vs. the
    competing base choice; used to measure occurrence frequencies."""

    application_id: str
    pattern_code: str
    deviation: tuple[str, ...]
    competitors: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "application_id": self.application_id,
            "pattern_code": self.pattern_code,
            "deviation": list(self.deviation),
            "competitors": list(self.competitors),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FrequencyProbe":
        return cls(d["application_id"], d["pattern_code"],
                   tuple(d["deviation"]), tuple(d.get("competitors", ())))


@dataclass(frozen=True)
class ReportRule:
    """Responsible/affected variable names for one created transition.

    responsible=None: every non-fresh bound identifier is responsible.
    affected=None: every non-fresh bound identifier not already responsible.
    """

    transition: str
    responsible: tuple[str, ...] | None = None
    affected: tuple[str, ...] | None = ()

    def to_dict(self) -> dict:
        return {
            "transition": self.transition,
            "responsible": None if self.responsible is None else list(self.responsible),
            "affected": None if self.affected is None else list(self.affected),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ReportRule":
        resp = d.get("responsible")
        aff = d.get("affected", [])
        return cls(d["transition"],
                   None if resp is None else tuple(resp),
                   None if aff is None else tuple(aff))


@dataclass(frozen=True)
class SimAnnotations:
    """Simulation-facing metadata carried by a net (immutable after build).

    weights holds per-transition piecewise-constant default weights as
    (transition_id, ((from_time, weight), ...)) pairs.
    """

    weights: tuple[tuple[str, tuple[tuple[float, float], ...]], ...] = ()
    overrides: tuple[TimingOverride, ...] = ()
    probes: tuple[FrequencyProbe, ...] = ()
    report_rules: tuple[ReportRule, ...] = ()

    def weight_default(self, transition_id: str) -> tuple[tuple[float, float], ...] | None:
        for tid, pieces in self.weights:
            if tid == transition_id:
                return pieces
        return None

    def merged_with(self, weights=(), overrides=(), probes=(), report_rules=()) -> "SimAnnotations":
        return SimAnnotations(
            weights=self.weights + tuple(weights),
            overrides=self.overrides + tuple(overrides),
            probes=self.probes + tuple(probes),
            report_rules=self.report_rules + tuple(report_rules),
        )

    def to_dict(self) -> dict:
        return {
            "weights": [[t, [[f, w] for f, w in pieces]] for t, pieces in self.weights],
            "overrides": [o.to_dict() for o in self.overrides],
            "probes": [p.to_dict() for p in self.probes],
            "report_rules": [r.to_dict() for r in self.report_rules],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SimAnnotations":
        return cls(
            weights=tuple((t, tuple((float(f), float(w)) for f, w in pieces))
                          for t, pieces in d.get("weights", [])),
            overrides=tuple(TimingOverride.from_dict(o) for o in d.get("overrides", [])),
            probes=tuple(FrequencyProbe.from_dict(p) for p in d.get("probes", [])),
            report_rules=tuple(ReportRule.from_dict(r) for r in d.get("report_rules", [])),
        )
