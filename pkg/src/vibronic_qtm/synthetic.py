"""Seeded synthetic crystal-field models for validation and demonstrations."""

from __future__ import annotations

import numpy as np

from .angmom import MultipletSpec, stevens_operator
from .cfham import CrystalFieldModel, Mode

ALL_KQ = tuple((k, q) for k in (2, 4, 6) for q in range(-k, k + 1))


def _unit_scale(k: int, q: int, spec: MultipletSpec) -> float:
    """``B_k^q`` giving the term ``theta_k B_k^q O_k^q`` unit Frobenius norm."""
    return 1.0 / (abs(spec.theta[k]) * np.linalg.norm(stevens_operator(k, q, spec)))


def _random_terms(rng, spec, energy, kqs=ALL_KQ):
    return {(k, q): energy * rng.standard_normal() * _unit_scale(k, q, spec) for k, q in kqs}


def random_model(
    seed: int, n_modes: int = 0, energy: float = 100.0, coupling: float = 10.0, spec: MultipletSpec | None = None
) -> CrystalFieldModel:
    """Every ``B_k^q`` random, each term of Frobenius norm ``~energy`` (cm^-1).

    Modes get random frequencies in 20-400 cm^-1 and random derivatives for
    all ``(k, q)`` with per-term norm ``~coupling``.
    """
    spec = spec or MultipletSpec.dysprosium()
    rng = np.random.default_rng(seed)
    cf = _random_terms(rng, spec, energy)
    modes = [Mode(omega=rng.uniform(20, 400), derivs=_random_terms(rng, spec, coupling)) for _ in range(n_modes)]
    return CrystalFieldModel(spec, cf, modes)


def axial_model(
    seed: int = 0,
    n_modes: int = 0,
    transverse: float = 1.0,
    coupling: float = 5.0,
    spec: MultipletSpec | None = None,
) -> CrystalFieldModel:
    """Strongly axial Dy-like model: a ``|+-15/2>`` ground doublet a few
    hundred cm^-1 below the first excited doublet, perturbed by random
    ``q != 0`` terms of norm ``~transverse`` (cm^-1).

    Mode derivatives are random over all ``(k, q)`` with norm ``~coupling``.
    """
    spec = spec or MultipletSpec.dysprosium()
    rng = np.random.default_rng(seed)
    # theta_2 < 0 for Dy, so B_2^0 > 0 puts |+-15/2> lowest
    cf = {(2, 0): 1100.0, (4, 0): 100.0, (6, 0): 10.0}
    for kq, b in _random_terms(rng, spec, transverse, [kq for kq in ALL_KQ if kq[1] != 0]).items():
        cf[kq] = b
    modes = [Mode(omega=rng.uniform(20, 400), derivs=_random_terms(rng, spec, coupling)) for _ in range(n_modes)]
    return CrystalFieldModel(spec, cf, modes)
