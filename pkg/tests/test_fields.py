import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vibronic_qtm.constants import K_B, MU_B, MU_N
from vibronic_qtm.fields import (
    DIPOLAR_MEAN_FACTOR,
    DY_NUCLEAR_G,
    NuclearSpinSpec,
    SampleSpec,
    dipolar_factor,
    dipolar_field,
    mean_distance,
    nuclear_field,
    nuclear_hamiltonian,
)

FROZEN = SampleSpec(volume=83e-9, concentration=170.0, measured_m_parallel=4.07)


def test_sample_validation():
    with pytest.raises(ValueError):
        SampleSpec(volume=0.0, concentration=1.0)
    with pytest.raises(ValueError):
        SampleSpec(volume=1.0)
    with pytest.raises(ValueError):
        SampleSpec(volume=1.0, concentration=-2.0)
    with pytest.raises(ValueError):
        SampleSpec(volume=1.0, n_molecules=0.0)
    assert SampleSpec(volume=1.0, concentration=5.0, n_molecules=3.0).count == 3.0


def test_mean_distance():
    assert mean_distance(SampleSpec(volume=1.0, n_molecules=1.0)) == pytest.approx(1e10)
    assert mean_distance(FROZEN) == pytest.approx(21.4, rel=5e-3)
    doubled = SampleSpec(volume=83e-9, concentration=340.0)
    assert mean_distance(FROZEN) / mean_distance(doubled) == pytest.approx(2 ** (1 / 3), rel=1e-14)


def test_dipolar_prefactor_and_scaling():
    est = dipolar_field(FROZEN)
    assert est.prefactor == pytest.approx(0.77, rel=0.02)
    assert est.moment == pytest.approx(8.14)
    assert est.range_factor == (1.0, 2.0)
    # field scales as r^-3, i.e. linearly in concentration
    dense = dipolar_field(SampleSpec(volume=83e-9, concentration=340.0, measured_m_parallel=4.07))
    assert dense.prefactor / est.prefactor == pytest.approx(2, rel=1e-12)
    assert dipolar_field(SampleSpec(volume=1e-6, n_molecules=10, measured_m_parallel=0.0)).prefactor == 0
    with pytest.raises(ValueError):
        dipolar_field(SampleSpec(volume=1e-6, n_molecules=10))


def test_dipolar_factor_range_and_mean():
    assert dipolar_factor(0.0) == 1.0 and dipolar_factor(1.0) == 2.0
    assert dipolar_factor(-1.0) == 2.0
    # mean of sqrt(1 + 3 c^2) over the sphere, by trapezoid in c
    c = np.linspace(0, 1, 200_001)
    f = dipolar_factor(c)
    trap = (f.sum() - 0.5 * (f[0] + f[-1])) * (c[1] - c[0])
    assert DIPOLAR_MEAN_FACTOR == pytest.approx(trap, abs=1e-10)
    est = dipolar_field(FROZEN, n_mc=1_000_000, seed=3)
    assert est.mean_factor_mc == pytest.approx(1.38, abs=0.01)
    assert abs(est.mean_factor_mc - DIPOLAR_MEAN_FACTOR) < 4 * est.mean_factor_stderr


def test_nuclear_spec():
    spec = NuclearSpinSpec.dysprosium(161)
    assert spec.I == 2.5 and spec.gN == DY_NUCLEAR_G[161]
    with pytest.raises(ValueError):
        NuclearSpinSpec(I=0.5, gN=1.0, A=np.ones((2, 2)))
    with pytest.raises(ValueError):
        NuclearSpinSpec(I=0.3, gN=1.0)
    with pytest.raises(ValueError):
        NuclearSpinSpec(I=0, gN=1.0)


def test_zero_hyperfine_gives_zero_field():
    spec = NuclearSpinSpec.dysprosium(163)
    assert np.abs(nuclear_field(spec, [0, 0, 1.0], 2.0, 4 / 3)).max() == 0


def _half_spin(a=0.03, gn=1.3, p=None):
    return NuclearSpinSpec(I=0.5, gN=gn, A=a * np.eye(3), P=np.zeros((3, 3)) if p is None else p)


@given(
    st.floats(0.05, 50.0),
    st.floats(0.01, 30.0),
    st.sampled_from([(0, 0, 1.0), (0.6, 0, 0.8), (-0.3, 0.4, np.sqrt(0.75))]),
)
def test_spin_half_tanh(temp, bmag, direction):
    a, gn, gj = 0.03, 1.3, 4 / 3
    b = bmag * np.asarray(direction)
    # lower level has I antiparallel to gN B
    mean_i = -0.5 * np.tanh(MU_N * gn * bmag / (2 * K_B * temp)) * b / bmag
    ref = a * mean_i / (MU_B * gj)
    got = nuclear_field(_half_spin(a, gn, p=np.diag([0.1, 0.2, 0.3])), b, temp, gj)
    assert np.abs(got - ref).max() <= 1e-8 * max(np.abs(ref).max(), 1e-30)


def test_nuclear_high_temperature():
    spec = NuclearSpinSpec.dysprosium(161, A=np.diag([1e-3, 2e-3, 2e-2]), P=np.diag([0.01, -0.01, 0.0]))
    b = np.array([0.1, 0.0, 0.5])
    assert np.abs(nuclear_field(spec, b, np.inf, 4 / 3)).max() <= 1e-12
    # Curie regime: <I> = -I(I+1) mu_N gN B / (3 kT) once kT dwarfs every level spacing
    temp = 1e6
    curie = -spec.I * (spec.I + 1) * MU_N * spec.gN * b / (3 * K_B * temp)
    ref = spec.A.T @ curie / (MU_B * 4 / 3)
    got = nuclear_field(spec, b, temp, 4 / 3)
    assert np.abs(got - ref).max() <= 1e-6 * np.abs(ref).max()
    assert np.abs(nuclear_field(spec, b, 10 * temp, 4 / 3) - got / 10).max() <= 1e-6 * np.abs(got).max()


def test_nuclear_field_odd_in_b():
    spec = NuclearSpinSpec.dysprosium(163, A=np.diag([1e-3, 1e-3, 2e-2]))
    b = np.array([0.2, -0.1, 0.7])
    assert np.allclose(nuclear_field(spec, -b, 0.5, 4 / 3), -nuclear_field(spec, b, 0.5, 4 / 3), rtol=1e-12)


def test_nuclear_hamiltonian_hermitian():
    p = np.array([[0.1, 0.02, 0], [0.02, -0.05, 0.01], [0, 0.01, -0.05]])
    h = nuclear_hamiltonian(NuclearSpinSpec.dysprosium(161, P=p), [0.3, 0.1, 0.2])
    assert h.shape == (6, 6)
    assert np.abs(h - h.conj().T).max() < 1e-15


@pytest.mark.parametrize("temp", [0.0, -1.0])
def test_nuclear_rejects_temperature(temp):
    with pytest.raises(ValueError):
        nuclear_field(_half_spin(), [0, 0, 1], temp, 4 / 3)
