"""Internal bias fields: dipolar fields in frozen solution and hyperfine fields."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .angmom import _as_half_integer, spin_matrices
from .constants import K_B, MU0_OVER_4PI, MU_B, MU_B_SI, MU_N, N_A


@dataclass(frozen=True)
class SampleSpec:
    """A frozen solution of magnetic molecules.

    ``volume`` in m^3 and ``concentration`` in mol/m^3 (1 mM = 1 mol/m^3);
    ``n_molecules`` overrides the concentration when given. Magnetic moments
    are in Bohr magnetons per molecule.
    """

    volume: float
    concentration: float | None = None
    n_molecules: float | None = None
    measured_m_parallel: float | None = None
    msat: float | None = None

    def __post_init__(self):
        if not self.volume > 0:
            raise ValueError("sample volume must be positive")
        if self.n_molecules is None:
            if self.concentration is None or not self.concentration > 0:
                raise ValueError("give a positive concentration or molecule count")
        elif not self.n_molecules > 0:
            raise ValueError("molecule count must be positive")

    @property
    def count(self) -> float:
        if self.n_molecules is not None:
            return float(self.n_molecules)
        return self.concentration * self.volume * N_A


def mean_distance(sample: SampleSpec) -> float:
    """Mean intermolecular distance ``(V/N)^(1/3)`` in Angstrom."""
    return float(np.cbrt(sample.volume / sample.count) * 1e10)


def dipolar_factor(cos_angle):
    """Dipolar field magnitude in units of ``mu0 mu / (4 pi r^3)``: ``sqrt(1 + 3 cos^2)``."""
    c = np.asarray(cos_angle, dtype=float)
    return np.sqrt(1 + 3 * c * c)


# closed form of the orientation average of sqrt(1 + 3 c^2) over c in [0, 1]
DIPOLAR_MEAN_FACTOR = 1 + np.arcsinh(np.sqrt(3)) / (2 * np.sqrt(3))


@dataclass(frozen=True)
class DipolarEstimate:
    """Dipolar field of one neighbour at the mean distance.

    The field is ``prefactor * f`` with ``f`` between ``range_factor``;
    ``mean_factor`` is the average of ``f`` over random relative orientations.
    """

    distance: float
    moment: float
    prefactor: float
    range_factor: tuple[float, float]
    mean_factor: float
    mean_factor_mc: float | None = None
    mean_factor_stderr: float | None = None


def dipolar_field(sample: SampleSpec, n_mc: int = 0, seed: int = 0) -> DipolarEstimate:
    """Estimate the dipolar bias field between neighbouring molecules.

    The effective moment is twice the measured parallel magnetisation (the
    powder average of a pure easy-axis moment halves it). ``prefactor`` is
    ``mu0 mu / (4 pi r^3)`` in mT. With ``n_mc > 0`` the orientation average
    is also estimated by Monte Carlo over uniform directions.
    """
    if sample.measured_m_parallel is None:
        raise ValueError("sample needs measured_m_parallel for a dipolar estimate")
    r = mean_distance(sample) * 1e-10
    mu = 2 * sample.measured_m_parallel
    pref = MU0_OVER_4PI * mu * MU_B_SI / r**3 * 1e3
    mc = se = None
    if n_mc:
        rng = np.random.default_rng(seed)
        f = dipolar_factor(rng.uniform(-1, 1, n_mc))
        mc, se = float(f.mean()), float(f.std(ddof=1) / np.sqrt(n_mc))
    return DipolarEstimate(
        distance=r * 1e10,
        moment=mu,
        prefactor=float(pref),
        range_factor=(1.0, 2.0),
        mean_factor=float(DIPOLAR_MEAN_FACTOR),
        mean_factor_mc=mc,
        mean_factor_stderr=se,
    )


# nuclear g-factors (mu / (I mu_N)) of the magnetic dysprosium isotopes, both I = 5/2
DY_NUCLEAR_G = {161: -0.1922, 163: 0.2690}


@dataclass(frozen=True)
class NuclearSpinSpec:
    """Nuclear spin ``I`` with quadrupole tensor ``P`` and hyperfine tensor ``A`` (cm^-1).

    The hyperfine coupling is ``I.A.J`` so the field seen by the electronic
    multiplet is ``A^T I / (mu_B gJ)``.
    """

    I: float
    gN: float
    A: NDArray[np.float64] = field(default_factory=lambda: np.zeros((3, 3)))
    P: NDArray[np.float64] = field(default_factory=lambda: np.zeros((3, 3)))

    def __post_init__(self):
        object.__setattr__(self, "I", float(_as_half_integer(self.I)))
        for name in ("A", "P"):
            m = np.array(getattr(self, name), dtype=float)
            if m.shape != (3, 3) or not np.all(np.isfinite(m)):
                raise ValueError(f"{name} must be a finite 3x3 matrix")
            object.__setattr__(self, name, m)
        if self.I == 0:
            raise ValueError("nuclear spin must be at least 1/2")

    @classmethod
    def dysprosium(cls, isotope: int, A=None, P=None) -> "NuclearSpinSpec":
        return cls(
            I=2.5,
            gN=DY_NUCLEAR_G[isotope],
            A=np.zeros((3, 3)) if A is None else A,
            P=np.zeros((3, 3)) if P is None else P,
        )


def nuclear_hamiltonian(spec: NuclearSpinSpec, Bext) -> NDArray[np.complex128]:
    """Quadrupole plus nuclear Zeeman term ``I.P.I + mu_N gN Bext.I`` (cm^-1).

    The Zeeman sign follows the usual single-ion-magnet literature form.
    """
    ix, iy, iz, _, _ = spin_matrices(spec.I)
    ops = (ix, iy, iz)
    h = sum(spec.P[a, b] * ops[a] @ ops[b] for a in range(3) for b in range(3))
    b = np.asarray(Bext, dtype=float)
    return h + MU_N * spec.gN * sum(b[a] * ops[a] for a in range(3))


def nuclear_field(spec: NuclearSpinSpec, Bext, T: float, gJ: float) -> NDArray[np.float64]:
    """Thermal expectation of the hyperfine field (T) acting on the electrons.

    ``T = inf`` gives the maximally mixed (unpolarised) limit.
    """
    if not T > 0:
        raise ValueError(f"temperature must be positive, got {T}")
    if np.isinf(T):
        return np.zeros(3)
    ix, iy, iz, _, _ = spin_matrices(spec.I)
    e, v = np.linalg.eigh(nuclear_hamiltonian(spec, Bext))
    # I is traceless, so only p - 1 contributes; expm1 keeps it exact at high T
    q = np.expm1(-(e - e[0]) / (K_B * T))
    diag = np.array([np.real(np.einsum("ij,ik,kj->j", v.conj(), op, v)) for op in (ix, iy, iz)])
    mean_i = diag @ q / (len(e) + q.sum())
    return spec.A.T @ mean_i / (MU_B * gJ)
