# entanglement spectra of a block, infinite and finite
import math

import numpy as np

from qvbs import isotropic_eigs, perturbative_eigs, rdm_double_scaling, rdm_finite_block, spectrum_of

S, q = 2, 0.5

spec = spectrum_of(rdm_double_scaling(S, q))
print("infinite block, degeneracies:", spec.degeneracies)
print("  p:", np.round([lv.p for lv in spec.levels], 6))

for l in (1, 3, 6, 10):
    exact = spectrum_of(rdm_finite_block(S, l, q)).values()
    approx = perturbative_eigs(S, l, q).values()
    nz = exact > 1e-12
    err = np.max(np.abs(approx - exact)[nz] / exact[nz])
    print(f"l={l:2d} rank={np.sum(exact > 1e-12)}  max rel. error of first order: {err:.2e}")

# isotropic multiplets: (2J+1)-fold degenerate
for lv in isotropic_eigs(S, 4).levels:
    print(f"J={lv.J} p={lv.p:.8f} x{lv.degeneracy}  eps={-math.log(lv.p):.4f}")
