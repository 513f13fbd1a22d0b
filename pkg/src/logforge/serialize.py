"""Canonical JSON encoding and digests; net <-> dict conversion.

Field ordering is stable (sorted keys, compact separators) so that equal
values always produce equal bytes and digests.
"""
from __future__ import annotations

import hashlib
import json

from .nets import (Arc, Marking, Net, ObjectType, Place, ProvenanceTag,
                   Transition, Variable)
from .timing import SimAnnotations

SCHEMA_VERSION = "1"


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def digest_of(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


def _variable_to_dict(v: Variable) -> dict:
    d = {"name": v.name, "object_type": v.object_type}
    if v.fresh:
        d["fresh"] = True
    return d


def _variable_from_dict(d: dict) -> Variable:
    return Variable(d["name"], d["object_type"], bool(d.get("fresh", False)))


def provenance_to_dict(p: ProvenanceTag) -> dict:
    d: dict = {"origin": p.origin}
    if p.pattern_code is not None:
        d["pattern_code"] = p.pattern_code
    if p.application_id is not None:
        d["application_id"] = p.application_id
    if p.shadow_of is not None:
        d["shadow_of"] = p.shadow_of
    return d


def provenance_from_dict(d: dict) -> ProvenanceTag:
    return ProvenanceTag(
        origin=d.get("origin", "base"),
        pattern_code=d.get("pattern_code"),
        application_id=d.get("application_id"),
        shadow_of=d.get("shadow_of"),
    )


def net_to_dict(net: Net) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "object_types": [{"name": t.name, "prefix": t.prefix} for t in net.object_types],
        "places": [{"id": p.id, "type_tuple": list(p.type_tuple), "role_hint": p.role_hint}
                   for p in net.places],
        "transitions": [
            {
                "id": t.id,
                "activity_label": t.activity_label,
                "provenance": provenance_to_dict(t.provenance),
                "record_spec": None if t.record_spec is None else list(t.record_spec),
            }
            for t in net.transitions
        ],
        "arcs": [
            {"source": a.source, "target": a.target,
             "inscription": [_variable_to_dict(v) for v in a.inscription]}
            for a in net.arcs
        ],
        "initial_marking": net.initial_marking.to_lists(),
        "final_marking": None if net.final_marking is None else net.final_marking.to_lists(),
        "annotations": net.annotations.to_dict(),
    }


def net_from_dict(d: dict) -> Net:
    return Net(
        object_types=tuple(ObjectType(t["name"], t.get("prefix", "")) for t in d["object_types"]),
        places=tuple(Place(p["id"], tuple(p["type_tuple"]), p.get("role_hint", "regular"))
                     for p in d["places"]),
        transitions=tuple(
            Transition(
                t["id"],
                activity_label=t.get("activity_label"),
                provenance=provenance_from_dict(t.get("provenance", {})),
                record_spec=None if t.get("record_spec") is None else tuple(t["record_spec"]),
            )
            for t in d["transitions"]
        ),
        arcs=tuple(
            Arc(a["source"], a["target"], tuple(_variable_from_dict(v) for v in a["inscription"]))
            for a in d["arcs"]
        ),
        initial_marking=Marking.of(d.get("initial_marking", {})),
        final_marking=(None if d.get("final_marking") is None
                       else Marking.of(d["final_marking"])),
        annotations=SimAnnotations.from_dict(d.get("annotations", {})),
    )


def net_digest(net: Net) -> str:
    return digest_of(net_to_dict(net))


def net_canonical_digest(net: Net) -> str:
    """Digest insensitive to element order: nets built by applying the same
    transformations in a different order compare equal."""
    d = net_to_dict(net)
    d["object_types"].sort(key=canonical_json)
    d["places"].sort(key=canonical_json)
    d["transitions"].sort(key=canonical_json)
    d["arcs"].sort(key=canonical_json)
    for key in ("weights", "overrides", "probes", "report_rules"):
        d["annotations"][key].sort(key=canonical_json)
    return digest_of(d)
