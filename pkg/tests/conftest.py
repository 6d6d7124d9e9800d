from __future__ import annotations

import numpy as np
import pytest

from vibronic_qtm.angmom import MultipletSpec
from vibronic_qtm.cfham import CrystalFieldModel, build_cf_hamiltonian, build_mode_operators, diagonalize_kramers
from vibronic_qtm.synthetic import axial_model, random_model


@pytest.fixture(scope="session")
def dy():
    return MultipletSpec.dysprosium()


@pytest.fixture(scope="session")
def axial_b20(dy):
    """Pure second-rank axial model; theta_2 < 0 so B_2^0 > 0 gives |+-15/2> lowest."""
    return CrystalFieldModel(dy, {(2, 0): 500.0})


@pytest.fixture(scope="session")
def random_system():
    model = random_model(seed=11, n_modes=6)
    ladder = diagonalize_kramers(build_cf_hamiltonian(model))
    return model, ladder, build_mode_operators(model)


@pytest.fixture(scope="session")
def axial_system():
    model = axial_model(seed=0, n_modes=12, transverse=10.0, coupling=5.0)
    ladder = diagonalize_kramers(build_cf_hamiltonian(model))
    return model, ladder, build_mode_operators(model)


def random_direction(rng):
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


# one line per acceptance criterion, echoed at the end of the pytest run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
