"""Landau-Zener spin-flip probabilities, orientation averages and axiality."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Literal, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.special import i0e

from .constants import HBAR, MU_B
from .doublet import GMatrix

MIN_RESOLUTION = 16
# Delta_perp below this fraction of |Delta| is indistinguishable from rounding
PERP_RTOL = 1e-12
_MC_CHUNK = 1 << 16


def _gmat(g) -> NDArray[np.float64]:
    return np.asarray(g, dtype=float)


def _lz_from_vectors(delta, vel):
    """LZ probability for rows of gap vectors ``delta`` (cm^-1) and sweep
    velocities ``vel`` (cm^-1/s), paired row by row."""
    vn = np.linalg.norm(vel, axis=1)
    adiabatic = vn == 0.0
    vhat = vel / np.where(adiabatic, 1.0, vn)[:, None]
    # cross product avoids the cancellation in |d|^2 - (d.v)^2
    c = np.cross(delta, vhat)
    perp = np.einsum("ij,ij->i", c, c)
    dsq = np.einsum("ij,ij->i", delta, delta)
    perp[perp <= (PERP_RTOL**2) * dsq] = 0.0
    x = np.pi * perp / (2 * HBAR * np.where(adiabatic, 1.0, vn))
    p = -np.expm1(-x)
    p[adiabatic] = 1.0
    return p, adiabatic


def lz_probability(g, Bint, sweep_dir, rate: float, full_output: bool = False):
    """Landau-Zener spin-flip probability of one passage.

    ``Delta = mu_B Bint.g`` is the gap opened by the internal field and
    ``v = mu_B rate sweep_dir.g`` the sweep velocity of the Zeeman vector;
    only the part of ``Delta`` normal to ``v`` opens an avoided crossing, so
    ``P = 1 - exp(-pi |Delta_perp|^2 / (2 hbar |v|))``.

    If ``g`` annihilates the sweep direction (``|v| = 0``) the passage is
    infinitely slow and ``P = 1``; ``full_output=True`` returns
    ``(P, adiabatic_flag)`` to expose that case.
    """
    if not rate > 0:
        raise ValueError(f"sweep rate must be positive, got {rate}")
    g = _gmat(g)
    d = MU_B * np.asarray(Bint, dtype=float) @ g
    v = MU_B * rate * np.asarray(sweep_dir, dtype=float) @ g
    p, flag = _lz_from_vectors(d[None], v[None])
    return (float(p[0]), bool(flag[0])) if full_output else float(p[0])


@dataclass(frozen=True)
class LZScenario:
    """Orientation-averaged passage through zero field.

    ``bint`` is the internal-field magnitude (T) and ``sweep_rate`` the
    external sweep rate (T/s). Both the internal field and the sweep
    direction are averaged over the full sphere; ``sweep_direction`` only
    serves single-orientation evaluations via :meth:`probability`.
    """

    g: GMatrix | NDArray[np.float64]
    bint: float
    sweep_rate: float
    sweep_direction: tuple[float, float, float] = (0.0, 0.0, 1.0)
    method: Literal["quadrature", "montecarlo"] = "quadrature"
    n_theta: int = 32
    n_phi: int = 64
    n_samples: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if not self.sweep_rate > 0:
            raise ValueError("sweep rate must be positive")
        if not self.bint >= 0:
            raise ValueError("internal field magnitude must be non-negative")
        d = np.asarray(self.sweep_direction, dtype=float)
        if abs(np.linalg.norm(d) - 1) > 1e-12:
            raise ValueError("sweep direction must be a unit vector")
        if self.method not in ("quadrature", "montecarlo"):
            raise ValueError(f"unknown sampling method {self.method!r}")

    def probability(self, bint_direction) -> float:
        u = np.asarray(bint_direction, dtype=float)
        return lz_probability(self.g, self.bint * u / np.linalg.norm(u), self.sweep_direction, self.sweep_rate)


@dataclass(frozen=True)
class LZResult:
    mean: float
    stderr: float = 0.0
    per_sample: NDArray[np.float64] | None = None
    adiabatic_fraction: float = 0.0
    variance: float = 0.0


def sphere_quadrature(n_theta: int, n_phi: int, phi_offset: float = 0.5):
    """Gauss-Legendre in ``cos(theta)`` times uniform ``phi`` on the unit sphere.

    The polar axis is ``x`` (the easy axis in the principal frame). The
    Legendre rule is applied separately on each hemisphere so that the
    equatorial (hard-plane) region is well resolved. ``phi`` nodes sit at
    ``2 pi (k + phi_offset) / n_phi``. Weights sum to 1.
    """
    if n_theta < MIN_RESOLUTION or n_phi < MIN_RESOLUTION or n_theta % 2:
        raise ValueError(f"need an even n_theta and n_phi, both >= {MIN_RESOLUTION}")
    x, w = np.polynomial.legendre.leggauss(n_theta // 2)
    c = np.concatenate([(x - 1) / 2, (x + 1) / 2])
    wc = np.concatenate([w, w]) / 4
    phi = 2 * np.pi * (np.arange(n_phi) + phi_offset) / n_phi
    s = np.sqrt(1 - c**2)
    pts = np.stack(
        [np.repeat(c, n_phi), np.outer(s, np.cos(phi)).ravel(), np.outer(s, np.sin(phi)).ravel()], axis=1
    )
    wts = np.repeat(wc, n_phi) / n_phi
    return pts, wts


def _random_unit(rng, n):
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _map(fn, items, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, items))
    return [fn(i) for i in items]


def _mean_exp_quadratic(lam, n_gl: int = 8):
    """``<exp(-u^T A u)>`` over unit vectors ``u`` for PSD ``A`` with eigenvalues ``lam``.

    ``lam`` has shape ``(n, 3)``, sorted ascending. With the polar axis along
    the smallest eigenvector the azimuthal average is a Bessel function, which
    leaves a 1-D polar integral. Its integrand peaks within ``1/lam`` of the
    pole, so it is integrated on Gauss-Legendre panels whose widths grow
    geometrically away from the pole.
    """
    l0, l1, l2 = (lam[:, i, None, None] for i in range(3))
    x, w = np.polynomial.legendre.leggauss(n_gl)
    t0 = 1.0 / (64.0 * np.maximum(lam[:, 2], 1.0))
    k = int(np.ceil(np.log2(1.0 / t0.min()))) + 1
    inner = np.minimum(t0[:, None] * 2.0 ** np.arange(k), 1.0)
    edges = np.concatenate([np.zeros((len(lam), 1)), inner, np.ones((len(lam), 1))], axis=1)
    lo, hi = edges[:, :-1, None], edges[:, 1:, None]
    tau = (lo + hi) / 2 + (hi - lo) / 2 * x
    wt = (hi - lo) / 2 * w
    r = tau * (2 - tau)  # sin^2 of the polar angle, with tau = 1 - cos
    f = np.exp(-l0 * (1 - tau) ** 2 - l1 * r) * i0e((l2 - l1) * r / 2)
    out = np.einsum("ikj,ikj->i", f, wt)
    out[np.all(lam == 0, axis=1)] = 1.0
    return out


@dataclass(frozen=True)
class _SweepNodes:
    weights: NDArray[np.float64]
    lam: NDArray[np.float64]
    adiabatic: NDArray[np.bool_]


def _sweep_nodes(s, a, b, n_theta, n_phi) -> _SweepNodes:
    """Per sweep-direction node, the eigenvalues of the quadratic form in the
    internal-field direction ``u`` with ``exp(-x) = exp(-u^T A u)``."""
    pts, wts = sphere_quadrature(n_theta, n_phi)
    vel = b * pts * s
    vn = np.linalg.norm(vel, axis=1)
    adiabatic = vn == 0.0
    vhat = vel / np.where(adiabatic, 1.0, vn)[:, None]
    proj = np.eye(3) - vhat[:, :, None] * vhat[:, None, :]
    m = (a * s)[None, :, None] * proj * (a * s)[None, None, :]
    kappa = np.pi / (2 * HBAR * np.where(adiabatic, 1.0, vn))
    lam = np.linalg.eigvalsh(m)
    floor = (PERP_RTOL * a * s[0]) ** 2
    lam = np.where(lam <= floor, 0.0, lam) * kappa[:, None]
    return _SweepNodes(wts, np.sort(lam, axis=1), adiabatic)


def ensemble_average(scenario: LZScenario, threads: int = 1, keep_samples: bool = False) -> LZResult:
    """Average the LZ probability over independent uniform orientations of
    the internal field and of the sweep direction.

    Quadrature works in the principal frame of ``g``, because the average
    depends only on its singular values; the result is therefore invariant
    under ``g -> R1 g R2``. The sweep direction is integrated with
    :func:`sphere_quadrature` (``n_theta x n_phi``, polar axis along the easy
    axis). For each sweep node, ``1 - P`` is a Gaussian in the internal-field
    direction; that sphere average is done semi-analytically, since its
    peak around the sweep direction is far narrower than any fixed grid.
    The quadrature result also carries ``variance``, the per-sample variance
    of ``P``, from which the standard error of an ``N``-sample Monte Carlo
    estimate follows as ``sqrt(variance / N)``.

    Monte Carlo draws ``n_samples`` pairs in the lab frame. The stream is
    split into fixed-size chunks, each seeded from
    ``SeedSequence(seed).spawn``, so results do not depend on ``threads``.
    """
    g = _gmat(scenario.g)
    a = MU_B * scenario.bint
    b = MU_B * scenario.sweep_rate
    if scenario.method == "quadrature":
        s = np.linalg.svd(g, compute_uv=False)
        nodes = _sweep_nodes(s, a, b, scenario.n_theta, scenario.n_phi)
        blocks = np.array_split(np.arange(len(nodes.weights)), max(1, len(nodes.weights) // 256))

        def block(idx):
            return _mean_exp_quadratic(nodes.lam[idx]), _mean_exp_quadratic(2 * nodes.lam[idx])

        parts = _map(block, blocks, threads)
        e1 = np.concatenate([p for p, _ in parts])
        e2 = np.concatenate([q for _, q in parts])
        e1[nodes.adiabatic] = 0.0
        e2[nodes.adiabatic] = 0.0
        m1 = float(nodes.weights @ e1)
        var = max(float(nodes.weights @ e2) - m1 * m1, 0.0)
        return LZResult(
            mean=min(max(1.0 - m1, 0.0), 1.0),
            stderr=0.0,
            adiabatic_fraction=float(nodes.weights @ nodes.adiabatic),
            variance=var,
        )

    n = scenario.n_samples
    if n < MIN_RESOLUTION:
        raise ValueError(f"need at least {MIN_RESOLUTION} Monte Carlo samples")
    sizes = [_MC_CHUNK] * (n // _MC_CHUNK) + ([n % _MC_CHUNK] if n % _MC_CHUNK else [])
    seeds = np.random.SeedSequence(scenario.seed).spawn(len(sizes))

    def chunk(k):
        rng = np.random.default_rng(seeds[k])
        u, w = _random_unit(rng, sizes[k]), _random_unit(rng, sizes[k])
        return _lz_from_vectors(a * u @ g, b * w @ g)

    parts = _map(chunk, range(len(sizes)), threads)
    p = np.concatenate([q for q, _ in parts])
    flags = np.concatenate([f for _, f in parts])
    var = float(p.var(ddof=1))
    return LZResult(
        mean=float(p.mean()),
        stderr=float(np.sqrt(var / n)),
        per_sample=p if keep_samples else None,
        adiabatic_fraction=float(flags.mean()),
        variance=var,
    )


def axiality(g) -> float:
    """Axiality ``A = |h - (tr h / 3) 1|_F / (sqrt(2/3) tr h)`` of ``h = sqrt(g g^T)``.

    1 for a pure easy axis, 1/2 for an easy plane and 0 when isotropic.
    """
    h = GMatrix(_gmat(g)).hermitized()
    tr = np.trace(h)
    if not tr > 0:
        raise ValueError("axiality undefined for a g-matrix with zero trace")
    return float(np.linalg.norm(h - tr / 3 * np.eye(3)) / (np.sqrt(2 / 3) * tr))


@dataclass(frozen=True)
class SplittingMap:
    """Doublet splittings (cm^-1) on a grid of lab-frame field directions."""

    theta: NDArray[np.float64]
    phi: NDArray[np.float64]
    delta_el: NDArray[np.float64]
    delta_vib: NDArray[np.float64]

    @property
    def correction(self) -> NDArray[np.float64]:
        return self.delta_vib - self.delta_el


def splitting_map(g_el, g_vib, bmag: float, n_theta: int = 91, n_phi: int = 181) -> SplittingMap:
    """Electronic and vibronically corrected splittings at ``|B| = bmag`` over
    polar angles ``[0, pi]`` and azimuths ``[0, 2 pi]`` (endpoints included)."""
    if not bmag > 0:
        raise ValueError("field magnitude must be positive")
    th, ph = np.meshgrid(np.linspace(0, np.pi, n_theta), np.linspace(0, 2 * np.pi, n_phi), indexing="ij")
    th, ph = th.ravel(), ph.ravel()
    b = bmag * np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=1)
    ge = _gmat(g_el)
    gt = ge + _gmat(g_vib)
    de = np.linalg.norm(MU_B * b @ ge, axis=1)
    dv = np.linalg.norm(MU_B * b @ gt, axis=1)
    return SplittingMap(th, ph, de, dv)


def sweep_profile(g, bint, sweep_dir, b_ext) -> NDArray[np.float64]:
    """``|mu_B (Bint + b sweep_dir).g|`` for each external field value ``b`` (T)."""
    b = np.asarray(b_ext, dtype=float)[:, None] * np.asarray(sweep_dir, dtype=float) + np.asarray(bint, dtype=float)
    return np.linalg.norm(MU_B * b @ _gmat(g), axis=1)


@dataclass(frozen=True)
class ModeAnalysis:
    """Per-mode axiality change and orientation-averaged LZ probability.

    ``axiality_el`` and ``p_el`` describe the purely electronic doublet;
    arrays are indexed by mode.
    """

    axiality_el: float
    p_el: float
    axiality: NDArray[np.float64]
    delta_axiality: NDArray[np.float64]
    p: NDArray[np.float64]
    coupling: NDArray[np.float64] | None = None
    omega: NDArray[np.float64] | None = None


def single_mode_analysis(
    g_el,
    per_mode_gvib: Sequence,
    scenario: LZScenario,
    coupling: Sequence[float] | None = None,
    omega: Sequence[float] | None = None,
    threads: int = 1,
) -> ModeAnalysis:
    """Evaluate each mode on its own: ``g_el + g_vib_j`` against ``g_el``.

    ``scenario`` fixes the internal field, sweep rate and sampling; its
    ``g`` is replaced for every evaluation.
    """
    ge = _gmat(g_el)
    a_el = axiality(ge)
    p_el = ensemble_average(replace(scenario, g=ge), threads).mean
    a, p = [], []
    for gv in per_mode_gvib:
        gt = ge + _gmat(gv)
        a.append(axiality(gt))
        p.append(ensemble_average(replace(scenario, g=gt), threads).mean)
    a = np.array(a)
    return ModeAnalysis(
        axiality_el=a_el,
        p_el=p_el,
        axiality=a,
        delta_axiality=a - a_el,
        p=np.array(p),
        coupling=None if coupling is None else np.asarray(coupling, dtype=float),
        omega=None if omega is None else np.asarray(omega, dtype=float),
    )
