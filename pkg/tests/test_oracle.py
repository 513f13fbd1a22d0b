from dataclasses import replace

import pytest

from logforge import fixtures
from logforge.logio import project_observed
from logforge.oracle import (CoverageMismatch, GtAlignment, LogTraceMismatch,
                             Move, deviation_report, gt_alignment,
                             move_distance, read_alignment, write_alignment)
from logforge.simulate import run


@pytest.fixture(scope="module")
def m0():
    net, _ = fixtures.fixture("package_delivery")
    return net


@pytest.fixture(scope="module")
def clean_run(m0):
    _, grid = fixtures.fixture("package_delivery")
    trace = run(m0, replace(grid.sim_configs[0], seed=99, run_id="clean"))
    return trace, project_observed(trace)


def test_clean_cell_is_all_synchronous(m0, clean_run):
    trace, log = clean_run
    al = gt_alignment(m0, trace, log)
    assert {m.kind for m in al.system} == {"synchronous"}
    assert all(m.cause is None for m in al.system)
    assert al.covered_event_ids() == {e.event_id for e in log.events}
    assert move_distance(al, al) == 0.0
    assert deviation_report(trace).entries == {}


def test_every_observed_event_covered_exactly_once(m0, package_cells):
    for item in package_cells:
        al = gt_alignment(m0, item["trace"], item["log"])
        consuming = [m for m in al.system if m.kind in ("synchronous", "log")]
        ids = [m.event_id for m in consuming]
        assert sorted(ids) == sorted(e.event_id for e in item["log"].events)
        assert len(set(ids)) == len(ids)


def test_incorrect_event_yields_log_model_pair(m0, cell_by_pattern):
    # the depot-order recording error: a log move for the recorded label and
    # a model move for the intended order, on the package object
    item = cell_by_pattern("rie1")
    al = gt_alignment(m0, item["trace"], item["log"])
    caused = [m for m in al.system if m.cause and m.cause.pattern_code == "RI_in^e"]
    assert caused
    logs = [m for m in caused if m.kind == "log"]
    models = [m for m in caused if m.kind == "model"]
    assert len(logs) == len(models) >= 1
    assert all(m.activity == "order depot" for m in logs)
    assert all(m.activity == "order home" for m in models)
    pkg = logs[0].objects[0]
    kinds = [(m.kind, m.activity) for m in al.per_object[pkg][:2]]
    assert kinds == [("log", "order depot"), ("model", "order home")]


def test_skip_yields_model_move_with_behavioral_cause(m0, cell_by_pattern):
    item = cell_by_pattern("bi3")
    al = gt_alignment(m0, item["trace"], item["log"])
    models = [m for m in al.system if m.kind == "model"]
    assert models and all(m.activity == "ring" for m in models)
    assert all(m.cause.pattern_code == "BI_3" and m.cause.origin == "behavioral"
               for m in models)


def test_missing_event_cause_is_recording(m0, cell_by_pattern):
    item = cell_by_pattern("rime")
    al = gt_alignment(m0, item["trace"], item["log"])
    models = [m for m in al.system if m.kind == "model"]
    assert models and all(m.activity == "load" for m in models)
    assert all(m.cause.origin == "recording" for m in models)


def test_object_error_stays_synchronous_with_discrepancy(m0, cell_by_pattern):
    item = cell_by_pattern("rino")
    al = gt_alignment(m0, item["trace"], item["log"])
    flagged = [m for m in al.system
               if m.cause and m.cause.pattern_code == "RI_in^o" and m.kind == "synchronous"]
    assert flagged
    for m in flagged:
        assert m.discrepancy and m.discrepancy["unrecorded"] and m.discrepancy["substituted"]

    item = cell_by_pattern("rimo")
    al = gt_alignment(m0, item["trace"], item["log"])
    flagged = [m for m in al.system
               if m.cause and m.cause.pattern_code == "RI_mi^o" and m.kind == "synchronous"]
    assert flagged
    assert all(m.discrepancy and m.discrepancy["missing_types"] == ["van"] for m in flagged)


def test_behavioral_silents_become_cause_tagged_silent_model_moves(m0, cell_by_pattern):
    for app, code in [("bi5", "BI_5"), ("bi7", "BI_7"), ("bi2", "BI_2"),
                      ("bi9", "BI_9"), ("bi10", "BI_10")]:
        item = cell_by_pattern(app)
        al = gt_alignment(m0, item["trace"], item["log"])
        silents = [m for m in al.system if m.kind == "silent_model"]
        assert silents, app
        assert all(m.cause and m.cause.pattern_code == code for m in silents)


def test_timing_only_patterns_do_not_surface_in_alignments(m0, cell_by_pattern):
    item = cell_by_pattern("rimp")
    al = gt_alignment(m0, item["trace"], item["log"])
    assert {m.kind for m in al.system} == {"synchronous"}
    assert all(m.cause is None for m in al.system)
    report = deviation_report(item["trace"])
    assert report.entries["rimp"]["count"] >= 1


def test_cause_soundness_against_ledger(m0, package_cells):
    for item in package_cells:
        ledger_ids = {e.application_id for e in item["ledger"]}
        al = gt_alignment(m0, item["trace"], item["log"])
        for m in al.system:
            if m.cause:
                assert m.cause.application_id in ledger_ids
                is_bi = m.cause.pattern_code.startswith("BI")
                assert m.cause.origin == ("behavioral" if is_bi else "recording")


def test_log_trace_mismatch(m0, package_cells):
    a, b = package_cells[0], package_cells[1]
    with pytest.raises(LogTraceMismatch):
        gt_alignment(m0, a["trace"], b["log"])


def test_deviation_report_switch_responsible(cell_by_pattern):
    item = cell_by_pattern("bi7")
    trace = item["trace"]
    report = deviation_report(trace)
    entry = report.entries["bi7"]
    couriers = {i for i, t in trace.object_types.items() if t == "courier"}
    assert entry["count"] >= 1
    assert entry["responsible"] and entry["responsible"] <= couriers
    assert entry["affected"] == set()


def test_deviation_report_missing_object(cell_by_pattern):
    item = cell_by_pattern("rimo")
    trace = item["trace"]
    entry = deviation_report(trace).entries["rimo"]
    types = {o: t for o, t in trace.object_types.items()}
    assert any(types[o] == "van" for o in entry["responsible"])
    affected_types = {types[o] for o in entry["affected"]}
    assert {"package", "warehouse_employee"} <= affected_types


def test_deviation_report_counts_match_manifest_stats(package_cells):
    for item in package_cells:
        report = deviation_report(item["trace"])
        for app, stats in item["trace"].pattern_stats.items():
            assert report.entries[app]["count"] == stats["fired"]


def test_move_distance_identity_and_pair_replacement():
    sync = [Move("synchronous", a, ("o_1",), event_id=f"e{i}", transition=a)
            for i, a in enumerate(["one", "two", "three"])]
    gt = GtAlignment(system=tuple(sync), per_object={"o_1": tuple(sync)})
    assert move_distance(gt, gt) == 0.0
    # replace one synchronous move by a log + model pair: edit distance 2
    replaced = [sync[0],
                Move("log", "two", ("o_1",), event_id="e1"),
                Move("model", "two", ("o_1",), transition="two"),
                sync[2]]
    cand = GtAlignment(system=tuple(replaced), per_object={"o_1": tuple(replaced)})
    assert move_distance(cand, gt) == pytest.approx(2 / 4)


def test_move_distance_all_log_strawman_is_one(m0, clean_run):
    trace, log = clean_run
    gt = gt_alignment(m0, trace, log)
    strawman_obj = {
        obj: tuple(Move("log", m.activity, m.objects, event_id=m.event_id)
                   for m in moves)
        for obj, moves in gt.per_object.items()
    }
    strawman = GtAlignment(
        system=tuple(m for ms in strawman_obj.values() for m in ms),
        per_object=strawman_obj)
    assert move_distance(strawman, gt) == 1.0


def test_move_distance_coverage_mismatch(m0, clean_run):
    trace, log = clean_run
    gt = gt_alignment(m0, trace, log)
    truncated = GtAlignment(
        system=gt.system[:-1],
        per_object={k: tuple(m for m in v if m.event_id != gt.system[-1].event_id)
                    for k, v in gt.per_object.items()})
    with pytest.raises(CoverageMismatch):
        move_distance(truncated, gt)


def test_alignment_interchange_round_trip(tmp_path, m0, package_cells):
    item = package_cells[6]
    al = gt_alignment(m0, item["trace"], item["log"])
    path = str(tmp_path / "align.jsonl")
    write_alignment(al, path)
    back = read_alignment(path)
    assert back.per_object.keys() == al.per_object.keys()
    for obj in al.per_object:
        assert back.per_object[obj] == al.per_object[obj]
    assert move_distance(back, al) == 0.0


# responsible/affected object types per package cell, frozen from the pinned
# seed: the bypassed/overtaking/switching object is responsible, correlated
# bystanders are affected
REPORT_TYPES = {
    "bi5": (["package"], ["package"]),
    "bi7": (["courier"], []),
    "bi10": (["queue", "van"], []),
    "bi3": (["courier", "package"], []),
    "bi9": (["courier", "package"], ["depot"]),
    "bi2": (["courier"], ["package"]),
    "rie1": (["package"], []),
    "rie2": (["package"], []),
    "rime": (["package", "queue", "van", "warehouse_employee"], []),
    "rimo": (["van"], ["package", "queue", "warehouse_employee"]),
    "rino": (["courier"], ["package"]),
    "rimp": (["courier", "depot", "package"], []),
}


def test_deviation_report_types_across_all_cells(package_cells):
    for item in package_cells:
        trace = item["trace"]
        report = deviation_report(trace)
        for app in item["apps"]:
            entry = report.entries[app]
            responsible = sorted({trace.object_types[o] for o in entry["responsible"]})
            affected = sorted({trace.object_types[o] for o in entry["affected"]})
            assert (responsible, affected) == tuple(map(list, REPORT_TYPES[app])), app
