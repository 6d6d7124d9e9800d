"""Zeeman response of a single Kramers doublet: g-matrix, splitting and mixing frame.

Throughout, a field ``B`` (Tesla) acts on a g-matrix from the left, ``B @ g``,
so row ``alpha`` of ``g`` is the pseudo-spin vector produced by a unit field
along lab axis ``alpha``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from .angmom import MultipletSpec, build_j_operators
from .cfham import CrystalFieldModel, KramersLadder, build_cf_hamiltonian, diagonalize_kramers, zeeman_operator
from .constants import MU_B

GKind = Literal["electronic", "vibronicSingleMode", "vibronicTotal", "total"]


@dataclass(frozen=True)
class GMatrix:
    """A 3x3 effective spin-1/2 g-matrix, stored raw (not necessarily symmetric)."""

    matrix: NDArray[np.float64]
    kind: str = "electronic"

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (3, 3) or not np.all(np.isfinite(m)):
            raise ValueError("g-matrix must be a finite 3x3 array")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __add__(self, other: "GMatrix") -> "GMatrix":
        return GMatrix(self.matrix + np.asarray(other), kind="total")

    def hermitized(self) -> NDArray[np.float64]:
        """Symmetric positive semi-definite ``sqrt(g g^T)``."""
        u, s, _ = np.linalg.svd(self.matrix)
        return (u * s) @ u.T

    def principal_values(self) -> NDArray[np.float64]:
        """Principal g-values (singular values), largest first."""
        return np.linalg.svd(self.matrix, compute_uv=False)


def electronic_g_matrix(
    ladder: KramersLadder, spec: MultipletSpec, doublet: int = 0, hermitize: bool = False
) -> GMatrix:
    """g-matrix of one doublet from the matrix elements of ``J``.

    Row ``alpha`` is ``2 gJ (Re<m_bar|J_a|m>, Im<m_bar|J_a|m>, <m|J_a|m>)``.
    """
    m, mbar = ladder.pair(doublet)
    rows = []
    for op in build_j_operators(spec):
        off = mbar.conj() @ op @ m
        rows.append((off.real, off.imag, np.real(m.conj() @ op @ m)))
    g = 2 * spec.gJ * np.array(rows)
    if hermitize:
        g = GMatrix(g).hermitized()
    return GMatrix(g, kind="electronic")


def doublet_splitting(g, B) -> float:
    """First-order Zeeman splitting ``|mu_B B.g|`` in cm^-1."""
    return float(np.linalg.norm(MU_B * np.asarray(B, dtype=float) @ np.asarray(g)))


@dataclass(frozen=True)
class DoubletFrame:
    """Zeeman-adapted basis of a doublet for one field ``B``.

    ``plus`` is the upper state, ``plus = cos(theta/2)|m> + e^{i phi} sin(theta/2)|m_bar>``.
    """

    doublet_index: int
    delta: float
    theta: float
    phi: float
    plus: NDArray[np.complex128]
    minus: NDArray[np.complex128]
    j_vector: NDArray[np.float64]

    @property
    def rotation(self) -> NDArray[np.float64]:
        return frame_rotation(self.theta, self.phi)


def field_angles(vec, tol: float = 1e-14) -> tuple[float, float]:
    """Polar and azimuthal angle of ``vec``; ``phi = 0`` when it is (nearly) along z."""
    x, y, z = vec
    n, rho = np.linalg.norm(vec), np.hypot(x, y)
    # atan2 stays accurate near the poles, where arccos(z/n) loses digits
    theta = float(np.arctan2(rho, z))
    phi = 0.0 if rho <= tol * n else float(np.arctan2(y, x))
    return theta, phi


def frame_rotation(theta: float, phi: float) -> NDArray[np.float64]:
    """Rotation taking doublet-frame vectors into the Zeeman-adapted frame."""
    ct, st, cp, sp = np.cos(theta), np.sin(theta), np.cos(phi), np.sin(phi)
    return np.array([
        [ct * cp, ct * sp, -st],
        [-sp, cp, 0.0],
        [st * cp, st * sp, ct],
    ])


def mixing_frame(ladder: KramersLadder, spec: MultipletSpec, doublet: int, B) -> DoubletFrame:
    B = np.asarray(B, dtype=float)
    if not np.any(B):
        raise ValueError("mixing angles are undefined at zero field")
    g = electronic_g_matrix(ladder, spec, doublet)
    j = MU_B * B @ g.matrix
    delta = float(np.linalg.norm(j))
    if delta == 0.0:
        raise ValueError("field lies in the null space of the g-matrix; mixing angles undefined")
    theta, phi = field_angles(j)
    m, mbar = ladder.pair(doublet)
    ep = np.exp(1j * phi)
    plus = np.cos(theta / 2) * m + ep * np.sin(theta / 2) * mbar
    minus = -np.sin(theta / 2) * m + ep * np.cos(theta / 2) * mbar
    return DoubletFrame(doublet, delta, theta, phi, plus, minus, j)


@dataclass(frozen=True)
class PerturbationReport:
    first_order: float
    exact: float

    @property
    def discrepancy(self) -> float:
        return abs(self.exact - self.first_order)

    @property
    def relative(self) -> float:
        """Discrepancy over the exact splitting (0 when both vanish)."""
        return self.discrepancy / self.exact if self.exact else 0.0


def _exact_pair_gap(h_cf, h_z, doublet, dps):
    if dps is None:
        e = np.linalg.eigvalsh(h_cf + h_z)
        return float(e[2 * doublet + 1] - e[2 * doublet])
    import mpmath

    with mpmath.workdps(dps):
        n = h_cf.shape[0]
        a = mpmath.matrix(n, n)
        # sum in extended precision: a float sum would round the small Zeeman
        # entries against the large crystal-field diagonal
        for r in range(n):
            for c in range(n):
                x, z = h_cf[r, c], h_z[r, c]
                a[r, c] = mpmath.mpc(x.real, x.imag) + mpmath.mpc(z.real, z.imag)
        e = sorted(mpmath.eighe(a, eigvals_only=True))
        return float(e[2 * doublet + 1] - e[2 * doublet])


def perturbative_vs_exact_check(
    model: CrystalFieldModel, B, doublet: int = 0, dps: int | None = None
) -> PerturbationReport:
    """Compare ``|mu_B B.g|`` with the exact gap of ``H_CF + H_Zee``.

    ``dps`` switches the exact diagonalisation to ``mpmath`` at that many
    decimal digits, for fields where the true discrepancy falls below double
    precision eigenvalue noise.
    """
    h_cf = build_cf_hamiltonian(model)
    ladder = diagonalize_kramers(h_cf)
    g = electronic_g_matrix(ladder, model.spec, doublet)
    first = doublet_splitting(g, B)
    exact = _exact_pair_gap(h_cf, zeeman_operator(model.spec, B), doublet, dps)
    return PerturbationReport(first_order=first, exact=exact)
