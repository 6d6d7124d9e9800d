"""Angular momentum matrices, Stevens operators and time reversal.

All matrices act on the ``2J+1`` dimensional space of a single multiplet in
the ``|J, m_J>`` basis, ordered with ``m_J`` ascending from ``-J`` to ``+J``.
Every other module relies on this ordering.

Stevens operators follow the extended (Rudowicz) convention. For ``q > 0``

    O_k^q  = 1/4 {J_+^q + J_-^q, P_kq(J_z)}
    O_k^-q = -i/4 {J_+^q - J_-^q, P_kq(J_z)}

and ``O_k^0 = P_k0(J_z)``, where ``{A, B} = AB + BA`` and the polynomials
``P_kq`` (with ``X = J(J+1)``) are

    ====  ===================================================================
    k q   P_kq
    ====  ===================================================================
    2 0   3 Jz^2 - X
    2 1   Jz
    2 2   1
    4 0   35 Jz^4 - (30 X - 25) Jz^2 + 3 X^2 - 6 X
    4 1   7 Jz^3 - (3 X + 1) Jz
    4 2   7 Jz^2 - X - 5
    4 3   Jz
    4 4   1
    6 0   231 Jz^6 - (315 X - 735) Jz^4 + (105 X^2 - 525 X + 294) Jz^2
          - 5 X^3 + 40 X^2 - 60 X
    6 1   33 Jz^5 - (30 X - 15) Jz^3 + (5 X^2 - 10 X + 12) Jz
    6 2   33 Jz^4 - (18 X + 123) Jz^2 + X^2 + 10 X + 102
    6 3   11 Jz^3 - (3 X + 59) Jz
    6 4   11 Jz^2 - X - 38
    6 5   Jz
    6 6   1
    ====  ===================================================================

Crystal-field parameters supplied in another normalisation (e.g. Wybourne)
must be converted before use; results rescale otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray

# (coefficient, power of Jz, power of X) for every monomial of P_kq
_STEVENS_POLYNOMIALS: dict[tuple[int, int], tuple[tuple[int, int, int], ...]] = {
    (2, 0): ((3, 2, 0), (-1, 0, 1)),
    (2, 1): ((1, 1, 0),),
    (2, 2): ((1, 0, 0),),
    (4, 0): ((35, 4, 0), (-30, 2, 1), (25, 2, 0), (3, 0, 2), (-6, 0, 1)),
    (4, 1): ((7, 3, 0), (-3, 1, 1), (-1, 1, 0)),
    (4, 2): ((7, 2, 0), (-1, 0, 1), (-5, 0, 0)),
    (4, 3): ((1, 1, 0),),
    (4, 4): ((1, 0, 0),),
    (6, 0): (
        (231, 6, 0), (-315, 4, 1), (735, 4, 0), (105, 2, 2), (-525, 2, 1),
        (294, 2, 0), (-5, 0, 3), (40, 0, 2), (-60, 0, 1),
    ),
    (6, 1): ((33, 5, 0), (-30, 3, 1), (15, 3, 0), (5, 1, 2), (-10, 1, 1), (12, 1, 0)),
    (6, 2): ((33, 4, 0), (-18, 2, 1), (-123, 2, 0), (1, 0, 2), (10, 0, 1), (102, 0, 0)),
    (6, 3): ((11, 3, 0), (-3, 1, 1), (-59, 1, 0)),
    (6, 4): ((11, 2, 0), (-1, 0, 1), (-38, 0, 0)),
    (6, 5): ((1, 1, 0),),
    (6, 6): ((1, 0, 0),),
}

SUPPORTED_RANKS = (2, 4, 6)

# Operator equivalent factors of the Dy(III) 6H15/2 ground multiplet
DY_THETA = {2: -2 / 315, 4: -8 / 135135, 6: 4 / 3864861}
DY_GJ = 4 / 3


def _as_half_integer(j) -> Fraction:
    try:
        value = Fraction(j) if isinstance(j, (str, int, Fraction)) else Fraction(float(j))
    except (TypeError, ValueError, ZeroDivisionError):
        raise ValueError(f"not a valid angular momentum: {j!r}") from None
    if value < 0 or (2 * value).denominator != 1:
        raise ValueError(f"angular momentum must be a non-negative multiple of 1/2, got {j!r}")
    return value


@dataclass(frozen=True)
class MultipletSpec:
    """A single ``J`` multiplet: its Lande factor and operator equivalent factors.

    ``theta`` maps the rank ``k`` to the factor multiplying every ``B_k^q``
    term of that rank.
    """

    J: float
    gJ: float = DY_GJ
    theta: dict[int, float] = field(default_factory=lambda: dict(DY_THETA))

    def __post_init__(self):
        j = _as_half_integer(self.J)
        if j == 0:
            raise ValueError("J must be at least 1/2")
        object.__setattr__(self, "J", float(j))
        object.__setattr__(self, "theta", {int(k): float(v) for k, v in self.theta.items()})

    @classmethod
    def dysprosium(cls) -> "MultipletSpec":
        """Dy(III) 6H15/2 with tabulated ``gJ`` and ``theta_k``."""
        return cls(J=7.5, gJ=DY_GJ, theta=dict(DY_THETA))

    @property
    def dim(self) -> int:
        return int(round(2 * self.J)) + 1

    @property
    def m_values(self) -> NDArray[np.float64]:
        return np.arange(-self.J, self.J + 0.5)

    @property
    def is_kramers(self) -> bool:
        return self.dim % 2 == 0


@lru_cache(maxsize=64)
def _spin_matrices(two_j: int):
    j = two_j / 2
    m = np.arange(-j, j + 0.5)
    # <m+1|J+|m> sits on the first sub-diagonal in ascending order
    jp = np.diag(np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1)), k=-1).astype(complex)
    jm = jp.conj().T
    jx = 0.5 * (jp + jm)
    jy = -0.5j * (jp - jm)
    jz = np.diag(m).astype(complex)
    for a in (jx, jy, jz, jp, jm):
        a.setflags(write=False)
    return jx, jy, jz, jp, jm


def spin_matrices(j) -> tuple[NDArray[np.complex128], ...]:
    """Return ``(Jx, Jy, Jz, J+, J-)`` for angular momentum ``j``.

    Works for electronic and nuclear spins alike; the returned arrays are
    read-only views shared between calls.
    """
    two_j = int(2 * _as_half_integer(j))
    return _spin_matrices(two_j)


def build_j_operators(spec: MultipletSpec):
    """Return ``(Jx, Jy, Jz)`` for the multiplet in the ascending ``m_J`` basis."""
    jx, jy, jz, _, _ = spin_matrices(spec.J)
    return jx, jy, jz


def stevens_operator(k: int, q: int, spec: MultipletSpec) -> NDArray[np.complex128]:
    """Extended Stevens operator ``O_k^q`` as a dense Hermitian matrix."""
    return _stevens(int(k), int(q), int(round(2 * spec.J))).copy()


build_stevens_operator = stevens_operator


@lru_cache(maxsize=256)
def _stevens(k: int, q: int, two_j: int) -> NDArray[np.complex128]:
    if (k, abs(q)) not in _STEVENS_POLYNOMIALS:
        raise ValueError(f"unsupported Stevens operator O_{k}^{q}; k must be in {SUPPORTED_RANKS} and |q| <= k")
    j = two_j / 2
    x = j * (j + 1)
    m = np.arange(-j, j + 0.5)
    poly = sum(c * m**a * x**b for c, a, b in _STEVENS_POLYNOMIALS[(k, abs(q))])
    p = np.diag(poly).astype(complex)
    if q == 0:
        out = p
    else:
        _, _, _, jp, jm = _spin_matrices(two_j)
        jpq = np.linalg.matrix_power(jp, abs(q))
        jmq = np.linalg.matrix_power(jm, abs(q))
        if q > 0:
            c = jpq + jmq
            out = 0.25 * (c @ p + p @ c)
        else:
            s = jpq - jmq
            out = -0.25j * (s @ p + p @ s)
        # products of large integers leave ~1e-16 relative asymmetry
        out = 0.5 * (out + out.conj().T)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class TimeReversal:
    """Antiunitary time reversal ``Theta v = U conj(v)``.

    ``U`` is the matrix of ``exp(-i pi J_y)`` in the ascending ``m_J`` basis.
    """

    unitary: NDArray[np.complex128]

    def apply(self, v):
        """Apply Theta to a state vector or to the columns of a matrix."""
        return self.unitary @ np.conj(v)

    def conjugate_operator(self, a):
        """Return ``Theta A Theta^-1``."""
        u = self.unitary
        return u @ np.conj(a) @ u.conj().T


def time_reversal(spec_or_j) -> TimeReversal:
    """Time reversal for a multiplet (or bare angular momentum value)."""
    j = spec_or_j.J if isinstance(spec_or_j, MultipletSpec) else spec_or_j
    two_j = int(2 * _as_half_integer(j))
    dim = two_j + 1
    u = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        # exp(-i pi Jy)|m> = (-1)^(J-m) |-m>, and J - m = 2J - i
        u[dim - 1 - i, i] = (-1) ** (two_j - i)
    return TimeReversal(unitary=u)
