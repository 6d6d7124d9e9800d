"""Crystal-field Hamiltonian, spin-phonon coupling operators and Kramers ladders."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .angmom import MultipletSpec, TimeReversal, spin_matrices, stevens_operator, time_reversal
from .constants import MU_B


class KramersPairingError(ValueError):
    """Raised when eigenvalues cannot be grouped into time-reversal pairs."""


def _check_kq(k, q):
    k, q = int(k), int(q)
    if k not in (2, 4, 6) or abs(q) > k:
        raise ValueError(f"unsupported crystal-field term (k={k}, q={q})")
    return k, q


@dataclass
class Mode:
    """A harmonic vibration: frequency (cm^-1) and dB_k^q/dX (cm^-1 per unit X)."""

    omega: float
    derivs: dict[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        self.omega = float(self.omega)
        if not np.isfinite(self.omega) or self.omega <= 0:
            raise ValueError(f"mode frequency must be positive, got {self.omega}")
        self.derivs = {_check_kq(*kq): float(v) for kq, v in self.derivs.items()}


@dataclass
class CrystalFieldModel:
    """Crystal-field parameters ``B_k^q`` (cm^-1) plus linear spin-phonon couplings."""

    spec: MultipletSpec
    cf_params: dict[tuple[int, int], float] = field(default_factory=dict)
    modes: list[Mode] = field(default_factory=list)

    def __post_init__(self):
        self.cf_params = {_check_kq(*kq): float(v) for kq, v in self.cf_params.items()}
        self.modes = [m if isinstance(m, Mode) else Mode(**m) for m in self.modes]

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    @property
    def omegas(self) -> NDArray[np.float64]:
        return np.array([m.omega for m in self.modes])

    def without_modes(self) -> "CrystalFieldModel":
        return CrystalFieldModel(self.spec, dict(self.cf_params), [])


def _stevens_sum(terms: dict[tuple[int, int], float], spec: MultipletSpec) -> NDArray[np.complex128]:
    h = np.zeros((spec.dim, spec.dim), dtype=complex)
    for (k, q), b in terms.items():
        if k not in spec.theta:
            raise ValueError(f"no operator equivalent factor theta_{k} for term (k={k}, q={q})")
        h += spec.theta[k] * b * stevens_operator(k, q, spec)
    return h


def build_cf_hamiltonian(model: CrystalFieldModel) -> NDArray[np.complex128]:
    """``H_CF = sum_kq theta_k B_k^q O_k^q`` in cm^-1."""
    return _stevens_sum(model.cf_params, model.spec)


@dataclass(frozen=True)
class ModeCoupling:
    """Spin-phonon coupling operator ``V_j`` of one mode, in cm^-1."""

    index: int
    V: NDArray[np.complex128]
    omega: float

    @property
    def strength(self) -> float:
        """Frobenius norm of ``V_j``, the per-mode coupling strength."""
        return float(np.linalg.norm(self.V))


def build_mode_operator(model: CrystalFieldModel, j: int) -> ModeCoupling:
    """``V_j = (1/sqrt 2) sum_kq theta_k dB_k^q/dX_j O_k^q``.

    The ``1/sqrt 2`` converts the dimensionless normal coordinate into
    ``b + b^dagger``.
    """
    if not 0 <= j < model.n_modes:
        raise IndexError(f"mode index {j} out of range for {model.n_modes} modes")
    mode = model.modes[j]
    v = _stevens_sum(mode.derivs, model.spec) / np.sqrt(2.0)
    return ModeCoupling(index=j, V=v, omega=mode.omega)


def build_mode_operators(model: CrystalFieldModel) -> list[ModeCoupling]:
    return [build_mode_operator(model, j) for j in range(model.n_modes)]


def zeeman_operator(spec: MultipletSpec, B) -> NDArray[np.complex128]:
    """``mu_B g_J B.J`` in cm^-1 for a field ``B`` in Tesla."""
    jx, jy, jz, _, _ = spin_matrices(spec.J)
    bx, by, bz = np.asarray(B, dtype=float)
    return MU_B * spec.gJ * (bx * jx + by * jy + bz * jz)


@dataclass(frozen=True)
class KramersLadder:
    """Time-reversal paired eigenstates of a field-free Hamiltonian.

    Doublets are indexed from 0 (ground) in ascending energy. Column ``2m`` of
    ``vectors`` is ``|m>`` and column ``2m+1`` is ``|m_bar> = Theta|m>``.
    """

    energies: NDArray[np.float64]
    vectors: NDArray[np.complex128]
    time_reversal: TimeReversal

    @property
    def n_doublets(self) -> int:
        return len(self.energies)

    def ket(self, m: int) -> NDArray[np.complex128]:
        return self.vectors[:, 2 * m]

    def bar(self, m: int) -> NDArray[np.complex128]:
        return self.vectors[:, 2 * m + 1]

    def pair(self, m: int):
        return self.ket(m), self.bar(m)

    @property
    def level_energies(self) -> NDArray[np.float64]:
        """Energy of every column of ``vectors`` (each doublet repeated)."""
        return np.repeat(self.energies, 2)

    def reconstruct(self) -> NDArray[np.complex128]:
        v = self.vectors
        return (v * self.level_energies) @ v.conj().T


def _fix_phase(v):
    i = np.argmax(np.abs(v))
    v = v * (np.conj(v[i]) / abs(v[i]))
    v[i] = v[i].real
    return v / np.linalg.norm(v)


def _split_cluster(basis, tr, ops, scale):
    """Pair the columns of ``basis`` (a degenerate eigenspace) into Kramers doublets.

    Within the space, ``|m>`` is the top eigenvector of the projected ``Jz``
    (falling back to ``Jx``, ``Jy`` when that is degenerate), so the choice of
    ``|m>`` inside a doublet is reproducible and not only its phase.
    """
    pairs = []
    while basis.shape[1] > 0:
        top = None
        for op in ops:
            proj = basis.conj().T @ op @ basis
            w, u = np.linalg.eigh(0.5 * (proj + proj.conj().T))
            if top is None:
                top = u[:, -1]
            if w[-1] - w[-2] > 1e-8 * scale:
                top = u[:, -1]
                break
        v = _fix_phase(basis @ top)
        vbar = tr.apply(v)
        pairs.append((v, vbar))
        rest = basis - np.outer(v, v.conj() @ basis) - np.outer(vbar, vbar.conj() @ basis)
        if rest.shape[1] <= 2:
            break
        u, s, _ = np.linalg.svd(rest, full_matrices=False)
        basis = u[:, s > 0.5]
    return pairs


def diagonalize_kramers(
    H, tr: TimeReversal | None = None, tol: float = 1e-8
) -> KramersLadder:
    """Diagonalise a time-reversal even Hamiltonian into Kramers doublets.

    Parameters
    ----------
    H : (n, n) array
        Hermitian, time-reversal even matrix on a half-integer ``J`` space.
    tr : TimeReversal, optional
        Time reversal for the same space; built from ``n`` when omitted.
    tol : float
        Eigenvalues closer than ``tol`` times the spectral spread are treated
        as degenerate.

    Raises
    ------
    KramersPairingError
        If a level has no partner within the tolerance.
    """
    H = np.asarray(H, dtype=complex)
    n = H.shape[0]
    if n % 2:
        raise ValueError("Kramers pairing needs an even-dimensional (half-integer J) space")
    j = (n - 1) / 2
    if tr is None:
        tr = time_reversal(j)
    jx, jy, jz, _, _ = spin_matrices(j)
    evals, evecs = np.linalg.eigh(0.5 * (H + H.conj().T))
    spread = evals[-1] - evals[0]
    thr = tol * spread

    clusters, start = [], 0
    for i in range(1, n + 1):
        if i == n or evals[i] - evals[i - 1] > thr:
            clusters.append(range(start, i))
            start = i
    doublets = []
    for c in clusters:
        if len(c) % 2:
            raise KramersPairingError(
                f"level(s) at {evals[c.start]:.6g} cm^-1 have no time-reversal partner "
                f"within {thr:.3g} cm^-1; is H time-reversal even?"
            )
        for v, vbar in _split_cluster(evecs[:, c], tr, (jz, jx, jy), max(j, 0.5)):
            doublets.append((float(np.real(v.conj() @ H @ v)), v, vbar))
    doublets.sort(key=lambda d: d[0])
    energies = np.array([d[0] for d in doublets])
    vectors = np.column_stack([x for d in doublets for x in d[1:]])
    return KramersLadder(energies=energies, vectors=vectors, time_reversal=tr)
