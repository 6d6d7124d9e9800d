import numpy as np
import pytest

from vibronic_qtm.hysteresis import HysteresisTrace, extract_spin_flip

MSAT = 5.3


def _loop(m_of_b, n=401, bmax=1.0):
    """Full loop: -bmax -> +bmax -> -bmax, with the descending branch given by ``m_of_b``."""
    up = np.linspace(-bmax, bmax, n)
    down = up[::-1][1:]
    b = np.concatenate([up, down])
    m = np.concatenate([np.full(n, -MSAT), m_of_b(down)])
    return HysteresisTrace(np.arange(len(b), dtype=float), b, m, MSAT)


def test_full_flip_is_one():
    r = extract_spin_flip(_loop(lambda b: np.where(b > 0, MSAT, -MSAT)))
    assert r.P == 1.0 and not r.clamped
    assert r.M == MSAT and r.Mprime == -MSAT


def test_no_step_is_zero():
    r = extract_spin_flip(_loop(lambda b: np.full_like(b, MSAT)))
    assert r.P == 0.0 and not r.clamped


def test_partial_step_with_slope():
    p = 0.27
    trace = _loop(lambda b: np.where(b > 0, MSAT, MSAT - 2 * p * MSAT) + 0.4 * b)
    assert extract_spin_flip(trace).P == pytest.approx(p, abs=1e-12)


def test_clamping():
    # M' above M: negative step
    r = extract_spin_flip(_loop(lambda b: np.where(b > 0, 0.0, 1.0)))
    assert r.P == 0.0 and r.clamped


def test_window_controls_points():
    trace = _loop(lambda b: np.full_like(b, MSAT), n=41)
    with pytest.raises(ValueError, match="at least"):
        extract_spin_flip(trace, fit_window=0.05)
    assert extract_spin_flip(trace, fit_window=0.3).P == 0.0


def test_trace_validation():
    with pytest.raises(ValueError):
        HysteresisTrace([0, 1, 1], [0, 1, 2], [0, 0, 0], 1.0)
    with pytest.raises(ValueError):
        HysteresisTrace([0, 1], [0, 1, 2], [0, 0, 0], 1.0)
    with pytest.raises(ValueError):
        HysteresisTrace([0, 1, 2], [0, 1, 2], [0, 0, 0], 0.0)
    ascending = HysteresisTrace(np.arange(10.0), np.linspace(-1, 1, 10), np.zeros(10), 1.0)
    with pytest.raises(ValueError, match="descending"):
        extract_spin_flip(ascending)


def test_csv_reader(tmp_path):
    trace = _loop(lambda b: np.where(b > 0, MSAT, -MSAT))
    p = tmp_path / "trace.csv"
    lines = ["# digitised", "t,B,M"] + [f"{float(t)!r},{float(b)!r},{float(m)!r}" for t, b, m in zip(trace.t, trace.B, trace.M)]
    p.write_text("\n".join(lines) + "\n")
    back = HysteresisTrace.from_csv(p, MSAT)
    assert np.array_equal(back.B, trace.B) and np.array_equal(back.M, trace.M)
    assert extract_spin_flip(back).P == 1.0
    bad = tmp_path / "bad.csv"
    bad.write_text("t,B\n0,1\n")
    with pytest.raises(ValueError, match="missing"):
        HysteresisTrace.from_csv(bad, MSAT)
