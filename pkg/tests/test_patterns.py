import pytest

from logforge import fixtures
from logforge.patterns import (CODES, MissingParam, PatternApplication,
                               UnknownPattern, catalog, instantiate,
                               wildcard_requirements)

EXPECTED_CODES = {"RI_mi^e", "RI_in^e", "RI_in^a", "RI_mi^o", "RI_in^o", "RI_in^p",
                  "RI_mi^p", "BI_1", "BI_2", "BI_3", "BI_5", "BI_6", "BI_7",
                  "BI_9", "BI_10", "BI_11"}


def test_catalog_has_the_sixteen_patterns():
    entries = catalog()
    assert len(entries) == 16
    assert {code for code, _, _ in entries} == EXPECTED_CODES


def test_catalog_signatures():
    sig = {code: s for code, _, s in catalog()}
    assert sig["RI_mi^o"] == {"t": "transition", "O": "object_type set"}
    assert sig["BI_5"] == {"p_q1": "place", "p_q2": "place"}
    assert sig["RI_mi^p"] == {"T": "transition set"}


def test_bi6_covers_both_variants():
    _, description, _ = next(e for e in catalog() if e[0] == "BI_6")
    frag = instantiate("BI_6")
    locals_ = [t.local for t in frag.created_transitions]
    assert any("inc" in x for x in locals_) and any("dec" in x for x in locals_)
    only_dec = instantiate("BI_6", {"variant": "decrease"})
    assert all("dec" in t.local for t in only_dec.created_transitions)


def test_instantiate_counts():
    bi5 = instantiate("BI_5")
    assert len(bi5.created_transitions) == 1 and len(bi5.created_places) == 1
    ria = instantiate("RI_in^a")
    assert len(ria.created_transitions) == 1 and len(ria.created_places) == 0
    rimp = instantiate("RI_mi^p", {"window_s": 3600.0})
    assert rimp.timing_only
    assert rimp.created_transitions == () and rimp.created_places == ()


def test_timing_only_patterns_build_exactly_one_override():
    for name, net, app in fixtures.additivity_cases():
        frag = instantiate(app.code, app.params)
        built = frag.build(net, app)
        if frag.timing_only:
            assert not built.places and not built.transitions
            assert len(built.overrides) == 1
        else:
            assert built.places or built.transitions


def test_created_elements_carry_matching_provenance():
    for name, net, app in fixtures.additivity_cases():
        frag = instantiate(app.code, app.params)
        built = frag.build(net, app)
        expected = "behavioral" if app.code.startswith("BI") else "recording"
        for t in built.transitions:
            assert t.provenance.origin == expected
            assert t.provenance.pattern_code == app.code
            assert t.provenance.application_id == app.application_id


def test_distinct_application_ids_yield_disjoint_created_ids():
    net = fixtures.mini_chain()
    frag = instantiate("BI_3")
    a = frag.build(net, PatternApplication("one", "BI_3", {"t": "alpha"}))
    b = frag.build(net, PatternApplication("two", "BI_3", {"t": "alpha"}))
    ids_a = {t.id for t in a.transitions} | {p.id for p in a.places}
    ids_b = {t.id for t in b.transitions} | {p.id for p in b.places}
    assert ids_a and not ids_a & ids_b


def test_unknown_pattern_and_missing_param():
    with pytest.raises(UnknownPattern):
        instantiate("BI_99")
    with pytest.raises(UnknownPattern):
        wildcard_requirements("nope")
    with pytest.raises(MissingParam):
        instantiate("BI_10")  # requires the dropped-arc indices
    with pytest.raises(MissingParam):
        instantiate("BI_6", {"variant": "sideways"})


def test_requirements_are_named_and_checkable():
    for code in CODES:
        reqs = wildcard_requirements(code)
        assert all(r.name and r.description for r in reqs)


def test_missing_object_record_spec_excludes_bypassed():
    net = fixtures.mini_sideloop()
    app = PatternApplication("m1", "RI_mi^o", {"t": "scan", "O": ["gadget"]},
                             {"vars": ["d"]})
    built = instantiate(app.code, app.params).build(net, app)
    twin = next(t for t in built.transitions if t.activity_label == "scan")
    assert twin.record_spec == ("x",)
    silents = [t for t in built.transitions if t.silent]
    assert len(silents) == 2 and len(built.places) == 1


def test_wrong_object_records_the_substitute():
    net = fixtures.mini_pool()
    app = PatternApplication("w1", "RI_in^o", {"t": "work", "p_w": "p_r"}, {"var": "rr"})
    built = instantiate(app.code, app.params).build(net, app)
    dup = built.transitions[0]
    assert dup.record_spec == ("x", "wrong_rr")
    loops = [a for a in built.arcs if a.source == "p_r" or a.target == "p_r"]
    assert len(loops) == 4  # copied side loop of `work` plus the wrong-object loop


def test_switch_role_uses_a_fresh_alias():
    net = fixtures.mini_roles()
    app = PatternApplication("s1", "BI_7", {"p_r1": "p_ra", "p_r2": "p_rb"})
    built = instantiate(app.code, app.params).build(net, app)
    fresh_vars = [v for a in built.arcs for v in a.inscription if v.fresh]
    assert fresh_vars and all(v.object_type == "helper" for v in fresh_vars)


def test_batch_log_reroutes_through_twin_places():
    net = fixtures.mini_chain()
    app = PatternApplication("b1", "RI_in^p", {"t1": "alpha", "t2": "beta"})
    built = instantiate(app.code, app.params).build(net, app)
    assert len(built.places) == 1  # the twin of the shared place p1
    twin = built.places[0].id
    assert any(a.target == twin for a in built.arcs)
    assert any(a.source == twin for a in built.arcs)
    # the base place p1 is not written by the duplicate of t1
    dup1 = next(t.id for t in built.transitions if "alpha" in t.id)
    assert not any(a.source == dup1 and a.target == "p1" for a in built.arcs)


def test_multitasking_reclaims_the_exact_resource():
    from logforge.nets import Marking, enabled_bindings, fire
    from logforge.transform import apply
    net = fixtures.mini_corr()
    app = PatternApplication("mt", "BI_2", {"p1": "p_b", "p2": "p_r"})
    out = apply(net, instantiate("BI_2"), app)
    gen = out.id_generator()
    release = next(f for f in enabled_bindings(out, out.initial_marking)
                   if f[0].startswith("tau_early_release"))
    marking, _ = fire(out, out.initial_marking, release, gen)
    marking.add("p_r", ("r_1",))  # released resource comes back idle
    marking.add("p_r", ("r_3",))  # a different idle resource is also around
    claims = [f for f in enabled_bindings(out, marking)
              if f[0].startswith("tau_late_claim")]
    assert claims and all(dict(b.values)["v1"] == "r_1" for _, b in claims)
