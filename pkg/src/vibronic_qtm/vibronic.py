"""Vibronic corrections to the ground Kramers doublet.

The Zeeman interaction mixes excited doublets into the ground doublet; a
spin-phonon operator ``V_j`` evaluated in the perturbed states then carries a
field-linear part ``W_j = V_j Q H_Z + H_Z Q V_j``, where ``Q`` is the reduced
resolvent of the ground doublet. A polaron (displaced-oscillator) treatment
of the diagonal couplings turns these into a correction to the g-matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from .angmom import MultipletSpec, build_j_operators
from .cfham import KramersLadder, ModeCoupling, zeeman_operator
from .constants import K_B, MU_B
from .doublet import GMatrix, electronic_g_matrix, field_angles, frame_rotation


def reduced_resolvent(ladder: KramersLadder, tol: float = 1e-8) -> NDArray[np.complex128]:
    """``Q = sum_{m excited} |m><m| / (E_m - E_1)`` over both members of every excited doublet."""
    e = ladder.energies
    gaps = e[1:] - e[0]
    scale = max(e[-1] - e[0], 1.0)
    if np.any(np.abs(gaps) <= tol * scale):
        k = int(np.argmin(np.abs(gaps))) + 1
        raise ValueError(f"excited doublet {k} is degenerate with the ground doublet; resolvent undefined")
    vecs = ladder.vectors[:, 2:]
    inv = np.repeat(1.0 / gaps, 2)
    return (vecs * inv) @ vecs.conj().T


def _pseudo_spin_vector(op, upper, lower):
    """``(Re<lower|A|upper>, Im<lower|A|upper>, <upper|A|upper>)``."""
    off = lower.conj() @ op @ upper
    return np.array([off.real, off.imag, np.real(upper.conj() @ op @ upper)])


@dataclass(frozen=True)
class WVectorSet:
    """Field-induced coupling vectors of every mode, shape ``(n_modes, 3)``.

    ``w`` is expressed in the Zeeman-adapted frame ``(|1+>, |1->)`` and
    ``w_tilde`` in the crystal-field frame ``(|1>, |1_bar>)``;
    ``w = w_tilde @ rotation.T``.
    """

    w: NDArray[np.float64]
    w_tilde: NDArray[np.float64]
    rotation: NDArray[np.float64]
    delta: float
    theta: float
    phi: float
    v11: NDArray[np.float64]
    omega: NDArray[np.float64]

    @property
    def n_modes(self) -> int:
        return len(self.omega)


def w_vectors(
    ladder: KramersLadder, spec: MultipletSpec, mode_ops: Sequence[ModeCoupling], B
) -> WVectorSet:
    """Coupling vectors ``w_j`` and ``w~_j`` of the ground doublet at field ``B`` (T).

    When ``B.g`` vanishes the mixing angles are undefined; the crystal-field
    frame (``theta = phi = 0``) is used and every ``w_j`` is zero anyway for
    ``B = 0``.
    """
    q = reduced_resolvent(ladder)
    hz = zeeman_operator(spec, B)
    one, one_bar = ladder.pair(0)
    j1 = MU_B * np.asarray(B, dtype=float) @ electronic_g_matrix(ladder, spec, 0).matrix
    delta = float(np.linalg.norm(j1))
    theta, phi = field_angles(j1) if delta > 0 else (0.0, 0.0)
    ep = np.exp(1j * phi)
    plus = np.cos(theta / 2) * one + ep * np.sin(theta / 2) * one_bar
    minus = -np.sin(theta / 2) * one + ep * np.cos(theta / 2) * one_bar

    w, wt, v11 = [], [], []
    for op in mode_ops:
        a = op.V @ q @ hz
        wop = a + a.conj().T
        w.append(_pseudo_spin_vector(wop, plus, minus))
        wt.append(_pseudo_spin_vector(wop, one, one_bar))
        v11.append(np.real(one.conj() @ op.V @ one))
    return WVectorSet(
        w=np.array(w).reshape(-1, 3),
        w_tilde=np.array(wt).reshape(-1, 3),
        rotation=frame_rotation(theta, phi),
        delta=delta,
        theta=theta,
        phi=phi,
        v11=np.array(v11),
        omega=np.array([op.omega for op in mode_ops], dtype=float),
    )


@dataclass(frozen=True)
class VibronicG:
    total: GMatrix
    per_mode: list[GMatrix]


def vibronic_g_matrix(
    ladder: KramersLadder, spec: MultipletSpec, mode_ops: Sequence[ModeCoupling]
) -> VibronicG:
    """Field-independent vibronic g-matrix correction, total and per mode.

    ``g_vib_j = 4 gJ (<1|V_j|1>/omega_j) K_j`` with row ``alpha`` of ``K_j``
    built from ``V_j Q J_alpha + J_alpha Q V_j`` as in the electronic g-matrix.
    """
    q = reduced_resolvent(ladder)
    one, one_bar = ladder.pair(0)
    jops = build_j_operators(spec)
    per_mode = []
    total = np.zeros((3, 3))
    for op in mode_ops:
        v11 = np.real(one.conj() @ op.V @ one)
        rows = []
        for ja in jops:
            a = op.V @ q @ ja
            rows.append(_pseudo_spin_vector(a + a.conj().T, one, one_bar))
        g = 4 * spec.gJ * v11 / op.omega * np.array(rows)
        per_mode.append(GMatrix(g, kind="vibronicSingleMode"))
        total = total + g
    return VibronicG(total=GMatrix(total, kind="vibronicTotal"), per_mode=per_mode)


@dataclass(frozen=True)
class PolaronSummary:
    xi_plus: NDArray[np.float64]
    xi_minus: NDArray[np.float64]
    electronic_gap: float
    renormalized_gap: float
    energy_shift: float
    kappa: NDArray[np.float64]
    temperature: float


def polaron_summary(
    ladder: KramersLadder,
    spec: MultipletSpec,
    mode_ops: Sequence[ModeCoupling],
    B,
    T: float = 2.0,
) -> PolaronSummary:
    """Displacements, renormalised gap and thermal factors of the ground doublet.

    Transverse couplings that survive the thermal average are dropped; only
    the diagonal (``z``) parts of ``w_j`` enter.
    """
    if not T > 0:
        raise ValueError(f"temperature must be positive, got {T}")
    ws = w_vectors(ladder, spec, mode_ops, B)
    wz, v11, om = ws.w[:, 2], ws.v11, ws.omega
    xp = (v11 - wz) / om
    xm = (v11 + wz) / om
    x = om / (K_B * T)
    # Bose occupation written in exp(-x) so it neither overflows nor loses digits
    thermal = np.sum(om * np.exp(-x) / -np.expm1(-x)) if len(om) else 0.0
    shift = float(-np.sum(v11**2 / om) + thermal)
    gap = float(ws.delta + 4 * np.sum(v11 * wz / om))
    kappa = (xp + xm) * np.exp(-0.5 * (xp - xm) ** 2 / np.tanh(x / 2))
    return PolaronSummary(xp, xm, ws.delta, gap, shift, kappa, float(T))


def pca_diagnostic(wset) -> dict[str, float]:
    """Fraction of the spread of ``{w_j}`` lying in the transverse plane.

    Accepts a :class:`WVectorSet` or an ``(n, 3)`` array. Variances use the
    unbiased (``n - 1``) estimator.
    """
    w = np.asarray(wset.w if isinstance(wset, WVectorSet) else wset, dtype=float)
    if w.ndim != 2 or w.shape[1] != 3 or w.shape[0] < 2:
        raise ValueError("need at least 2 coupling vectors of length 3")
    var = w.var(axis=0, ddof=1)
    total = float(var.sum())
    xy = float(var[0] + var[1])
    return {"varXY": xy, "varTotal": total, "ratio": xy / total if total > 0 else 0.0}
