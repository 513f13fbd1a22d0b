import pytest
from dataclasses import replace

from logforge import fixtures
from logforge.dataset import cell_seed, enumerate_cells
from logforge.logio import project_observed
from logforge.simulate import run
from logforge.transform import apply_sequence


@pytest.fixture(scope="session")
def package_fixture():
    return fixtures.fixture("package_delivery")


@pytest.fixture(scope="session")
def package_cells(package_fixture):
    """All twelve package cells, simulated in memory at the pinned seed."""
    net, grid = package_fixture
    out = []
    for cell in enumerate_cells(grid):
        ms, ledger_b = apply_sequence(net, list(cell.behavioral))
        ml, ledger_r = apply_sequence(ms, list(cell.recording))
        config = replace(
            grid.sim_configs[0],
            seed=cell_seed(grid.master_seed, cell.b_index, cell.r_index, cell.c_index),
            run_id=cell.cell_id,
        )
        trace = run(ml, config)
        log = project_observed(trace)
        ledger = ledger_b.entries + ledger_r.entries
        out.append({"cell": cell, "ml": ml, "trace": trace, "log": log,
                    "ledger": ledger,
                    "apps": [a.application_id for a in cell.behavioral + cell.recording]})
    return out


@pytest.fixture(scope="session")
def cell_by_pattern(package_cells):
    def find(application_id):
        for item in package_cells:
            if application_id in item["apps"]:
                return item
        raise KeyError(application_id)
    return find
