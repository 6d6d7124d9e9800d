"""
Spin-flip probability from a hysteresis loop
============================================

Read the zero-field step on the descending branch: fit straight lines on
either side of zero field and compare the two intercepts with 2 Msat.
"""

import numpy as np

from vibronic_qtm.hysteresis import HysteresisTrace, extract_spin_flip

msat = 5.0
rng = np.random.default_rng(0)
up = np.linspace(-1, 1, 801)
down = up[::-1][1:]
b = np.concatenate([up, down])

# Descending branch: saturated, a 30 % step at zero field, a gentle slope and noise
p_true = 0.3
m_down = np.where(down > 0, msat, msat * (1 - 2 * p_true)) + 0.2 * down + 0.01 * rng.standard_normal(len(down))
m = np.concatenate([np.full(len(up), -msat), m_down])
trace = HysteresisTrace(np.arange(len(b), dtype=float), b, m, msat)

for window in (0.05, 0.1, 0.2):
    r = extract_spin_flip(trace, fit_window=window)
    print(f"fit window {window:4.2f} T: M = {r.M:.4f}, M' = {r.Mprime:.4f}, P = {r.P:.4f}")
