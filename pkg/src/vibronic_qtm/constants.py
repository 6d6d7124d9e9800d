"""Physical constants in spectroscopic units.

Energies are in cm^-1, magnetic fields in Tesla, temperatures in Kelvin and
times in seconds. Values are CODATA 2018 conversions.
"""

#: Bohr magneton, cm^-1 / T
MU_B = 0.46686447783

#: Nuclear magneton, cm^-1 / T
MU_N = 2.542623e-4

#: Boltzmann constant, cm^-1 / K
K_B = 0.695034800

#: Reduced Planck constant, cm^-1 s
HBAR = 5.308837458e-12

#: Bohr magneton in SI, J / T
MU_B_SI = 9.2740100783e-24

#: Vacuum permeability over 4 pi, T m / A
MU0_OVER_4PI = 1.00000000055e-7

#: Avogadro constant, 1 / mol
N_A = 6.02214076e23

#: 1 Oe of applied field expressed in Tesla
OERSTED = 1e-4
