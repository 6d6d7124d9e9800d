import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vibronic_qtm.cfham import ModeCoupling, zeeman_operator
from vibronic_qtm.constants import K_B, MU_B
from vibronic_qtm.vibronic import (
    pca_diagnostic,
    polaron_summary,
    reduced_resolvent,
    vibronic_g_matrix,
    w_vectors,
)

from conftest import random_direction
from oracles import first_order_states, spin_boson_levels, thermal_kappa


def _scaled(ops, factor=1.0, omega_factor=1.0):
    return [ModeCoupling(o.index, factor * o.V, omega_factor * o.omega) for o in ops]


def test_reduced_resolvent_annihilates_ground(random_system):
    _, ladder, _ = random_system
    q = reduced_resolvent(ladder)
    for v in ladder.pair(0):
        assert np.abs(q @ v).max() < 1e-14
    # on an excited doublet Q acts as 1 / (E_m - E_1)
    k = ladder.ket(3)
    assert np.abs(q @ k - k / (ladder.energies[3] - ladder.energies[0])).max() < 1e-14


def test_degenerate_resolvent_raises(dy):
    from vibronic_qtm.cfham import diagonalize_kramers

    h = np.diag((np.abs(dy.m_values) > 7).astype(float))
    ladder = diagonalize_kramers(h)
    with pytest.raises(ValueError, match="degenerate"):
        reduced_resolvent(ladder)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31))
def test_frame_consistency_and_linearity(random_system, seed):
    model, ladder, ops = random_system
    b = 0.2 * random_direction(np.random.default_rng(seed))
    ws = w_vectors(ladder, model.spec, ops, b)
    rotated = ws.w_tilde @ ws.rotation.T
    for w, r in zip(ws.w, rotated):
        assert np.linalg.norm(w - r) <= 1e-12 * np.linalg.norm(w)
    for lam in (2, 10):
        wl = w_vectors(ladder, model.spec, ops, lam * b)
        assert np.abs(wl.w - lam * ws.w).max() <= 1e-12 * np.abs(lam * ws.w).max()
        assert np.abs(wl.w_tilde - lam * ws.w_tilde).max() <= 1e-12 * np.abs(lam * ws.w).max()


def test_trivial_cases(random_system):
    model, ladder, ops = random_system
    assert np.abs(w_vectors(ladder, model.spec, ops, [0, 0, 0]).w).max() == 0
    zero = _scaled(ops, 0.0)
    assert np.abs(w_vectors(ladder, model.spec, zero, [0.1, 0.2, 0.3]).w).max() == 0
    assert np.abs(vibronic_g_matrix(ladder, model.spec, zero).total.matrix).max() == 0


def test_zero_diagonal_coupling_kills_gvib(random_system):
    model, ladder, ops = random_system
    one = ladder.ket(0)
    # remove the ground-doublet diagonal part of every V_j
    stripped = [
        ModeCoupling(o.index, o.V - np.real(one.conj() @ o.V @ one) * np.eye(16), o.omega) for o in ops
    ]
    assert np.abs(vibronic_g_matrix(ladder, model.spec, stripped).total.matrix).max() < 1e-13


def test_gvib_omega_scaling(random_system):
    model, ladder, ops = random_system
    g1 = vibronic_g_matrix(ladder, model.spec, ops)
    g2 = vibronic_g_matrix(ladder, model.spec, _scaled(ops, omega_factor=2.0))
    assert np.array_equal(g2.total.matrix, 0.5 * g1.total.matrix)
    total = sum(g.matrix for g in g1.per_mode)
    assert np.abs(total - g1.total.matrix).max() < 1e-15 * len(ops) * np.abs(total).max() + 1e-300


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31))
def test_gvib_matches_w_tilde(random_system, seed):
    model, ladder, ops = random_system
    b = 0.5 * random_direction(np.random.default_rng(seed))
    gv = vibronic_g_matrix(ladder, model.spec, ops).total.matrix
    ws = w_vectors(ladder, model.spec, ops, b)
    direct = 4 * np.sum((ws.v11 / ws.omega)[:, None] * ws.w_tilde, axis=0)
    via_g = MU_B * b @ gv
    assert np.linalg.norm(via_g - direct) <= 1e-10 * np.linalg.norm(direct)
    # the same sum, projected on the doublet axis, is the gap renormalisation
    ps = polaron_summary(ladder, model.spec, ops, b)
    axis = ws.rotation[2]
    assert ps.renormalized_gap - ps.electronic_gap == pytest.approx(via_g @ axis, rel=1e-10)


def test_w_against_first_order_states(random_system):
    model, ladder, ops = random_system
    direction = np.array([0.36, -0.48, 0.8])
    errors = []
    for bmag in (1e-3, 1e-4):
        b = bmag * direction
        ws = w_vectors(ladder, model.spec, ops, b)
        hz = zeeman_operator(model.spec, b)
        one, bar = first_order_states(ladder, hz)
        c, s = np.cos(ws.theta / 2), np.sin(ws.theta / 2)
        ep = np.exp(1j * ws.phi)
        plus = c * one + ep * s * bar
        minus = -s * one + ep * c * bar
        err = 0.0
        for j, op in enumerate(ops):
            upper = np.real(plus.conj() @ op.V @ plus)
            lower = np.real(minus.conj() @ op.V @ minus)
            off = minus.conj() @ op.V @ plus
            scale = np.abs(ws.w[j]).max()
            err = max(
                err,
                abs(upper - (ws.v11[j] - ws.w[j, 2])) / scale,
                abs(lower - (ws.v11[j] + ws.w[j, 2])) / scale,
                abs(off + (ws.w[j, 0] + 1j * ws.w[j, 1])) / scale,
            )
        errors.append(err)
    assert errors[0] < 1e-3
    # absolute residual is second order and w is first order, so the ratio falls tenfold
    assert errors[1] == pytest.approx(errors[0] / 10, rel=0.05)


def _strong_toy(axial_system, j=2, factor=150.0, bmag=0.3):
    model, ladder, ops = axial_system
    op = _scaled([ops[j]], factor)
    b = bmag * np.array([0.2, 0.1, 0.97])
    return model, ladder, op, b


def test_polaron_gap_matches_fock_diagonalisation(axial_system):
    model, ladder, op, b = _strong_toy(axial_system)
    ps = polaron_summary(ladder, model.spec, op, b, T=1e-3)
    om = op[0].omega
    xp, xm = ps.xi_plus[0], ps.xi_minus[0]
    assert 0.3 < abs(xm) < 3  # a non-perturbative displacement
    delta = ps.electronic_gap
    # pure dephasing: each level couples diagonally, w^x = w^y = 0
    args = (delta / 2, -delta / 2, om * xp, om * xm, om)
    up40, lo40 = spin_boson_levels(*args, n_fock=40)
    up60, lo60 = spin_boson_levels(*args, n_fock=60)
    assert abs(up60 - up40) < 1e-10 and abs(lo60 - lo40) < 1e-10
    assert up40 == pytest.approx(delta / 2 - om * xp**2, abs=1e-8)
    assert lo40 == pytest.approx(-delta / 2 - om * xm**2, abs=1e-8)
    assert up40 - lo40 == pytest.approx(ps.renormalized_gap, abs=1e-8)
    # energy shift carries the field-independent part; the rest is second order in w^z
    wz = ps.xi_minus[0] * om - ps.xi_plus[0] * om
    assert lo40 - (ps.energy_shift - ps.renormalized_gap / 2) == pytest.approx(-(wz / 2) ** 2 / om, abs=1e-8)


@pytest.mark.parametrize("j", [0, 2, 5])
def test_kappa_against_thermal_trace(axial_system, j):
    model, ladder, op, b = _strong_toy(axial_system, j=j, factor=40.0, bmag=2.0)
    om = op[0].omega
    temp = 2 * om / K_B
    ps = polaron_summary(ladder, model.spec, op, b, T=temp)
    ref = thermal_kappa(ps.xi_plus[0], ps.xi_minus[0], om, temp, n_fock=60)
    assert abs(ps.xi_plus[0] - ps.xi_minus[0]) > 1e-3
    assert ps.kappa[0] == pytest.approx(ref, abs=1e-6)


def test_zero_field_polaron(axial_system):
    model, ladder, ops = axial_system
    ps = polaron_summary(ladder, model.spec, ops, [0, 0, 0])
    assert np.array_equal(ps.xi_plus, ps.xi_minus)
    assert ps.renormalized_gap == 0
    one = ladder.ket(0)
    v11 = np.array([np.real(one.conj() @ o.V @ one) for o in ops])
    omega = np.array([o.omega for o in ops])
    assert np.array_equal(ps.kappa, 2 * v11 / omega)


def test_energy_shift_low_temperature(axial_system):
    model, ladder, ops = axial_system
    ps = polaron_summary(ladder, model.spec, ops, [0, 0, 0.01], T=0.01)
    one = ladder.ket(0)
    v11 = np.array([np.real(one.conj() @ o.V @ one) for o in ops])
    assert ps.energy_shift == pytest.approx(-np.sum(v11**2 / [o.omega for o in ops]), rel=1e-14)


@pytest.mark.parametrize("temp", [0.0, -1.0, float("nan")])
def test_polaron_rejects_bad_temperature(axial_system, temp):
    model, ladder, ops = axial_system
    with pytest.raises(ValueError):
        polaron_summary(ladder, model.spec, ops, [0, 0, 0.01], T=temp)


def test_pca_trivial_and_errors():
    w = np.zeros((5, 3))
    w[:, 2] = [1.0, -2.0, 0.5, 3.0, 0.0]
    assert pca_diagnostic(w)["ratio"] == 0
    assert pca_diagnostic(np.zeros((3, 3)))["ratio"] == 0
    with pytest.raises(ValueError):
        pca_diagnostic(np.ones((1, 3)))
    with pytest.raises(ValueError):
        pca_diagnostic(np.ones((4, 2)))


def test_pca_isotropic_sampling():
    w = np.random.default_rng(5).standard_normal((10_000, 3))
    assert pca_diagnostic(w)["ratio"] == pytest.approx(2 / 3, rel=0.05)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_pca_axial_toy(seed):
    from vibronic_qtm.cfham import build_cf_hamiltonian, build_mode_operators, diagonalize_kramers
    from vibronic_qtm.synthetic import axial_model

    model = axial_model(seed=seed, n_modes=12)
    ladder = diagonalize_kramers(build_cf_hamiltonian(model))
    rng = np.random.default_rng(seed)
    for _ in range(5):
        b = 0.01 * random_direction(rng)
        ws = w_vectors(ladder, model.spec, build_mode_operators(model), b)
        assert pca_diagnostic(ws)["ratio"] <= 1e-3
