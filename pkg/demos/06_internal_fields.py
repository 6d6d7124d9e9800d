"""
Size of the internal bias fields
================================

Estimate the dipolar field between molecules in a frozen solution and the
thermal hyperfine field of a magnetic nucleus.
"""

import numpy as np

from vibronic_qtm.fields import NuclearSpinSpec, SampleSpec, dipolar_field, nuclear_field

# 83 microlitres of a 170 mM solution, 4.07 mu_B measured along the field
sample = SampleSpec(volume=83e-9, concentration=170.0, measured_m_parallel=4.07)
est = dipolar_field(sample, n_mc=1_000_000, seed=0)
print(f"mean distance {est.distance:.2f} A, moment {est.moment:.2f} mu_B")
print(f"dipolar field {est.prefactor:.3f} mT times a factor in {est.range_factor}")
print(f"orientation mean factor {est.mean_factor:.4f} (Monte Carlo {est.mean_factor_mc:.4f})")

# Illustrative 161Dy hyperfine and quadrupole tensors (cm^-1)
nuc = NuclearSpinSpec.dysprosium(161, A=np.diag([1e-3, 1e-3, 2e-2]), P=np.diag([-2e-3, -2e-3, 4e-3]))
for temp in (0.1, 2.0, 300.0, np.inf):
    b = nuclear_field(nuc, [0.0, 0.0, 1.0], temp, gJ=4 / 3)
    print(f"T = {temp:>6} K  hyperfine field {np.linalg.norm(b):.3e} T")
