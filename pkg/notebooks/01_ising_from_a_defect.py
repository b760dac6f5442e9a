"""Walkthrough: Ising F-symbols from the Z/2 defect bimodule.

Run with ``python3 notebooks/01_ising_from_a_defect.py``. Every step prints what it
computed; nothing is written to disk.
"""

from defectchain.bimodule import check_module_coherence, vec_zp_bimodule
from defectchain.fusion import STAR, check_pentagon, ising, vec_zp
from defectchain.tube import (AnnularCategory, TubeAlgebra, derive_extended_fsymbols,
                              four_string_covariance, primitive_idempotents, defect_setup)

# %% The ingredients: Vec(Z/2) and the invertible bimodule F1 with C(a, *, b) = (-1)^{ab}
C = vec_zp(2)
F1 = vec_zp_bimodule(2, 'F1')
print('F1 coherent:', check_module_coherence(F1)['ok'])
print('middle associator:', {(a, b): str(F1.Cphase(a, '*', b)) for a in (0, 1) for b in (0, 1)})

# %% Two defect strands fusing into a category line: the tube algebra of (*, *, 0)
A = TubeAlgebra(AnnularCategory(F1, F1, vec_zp_bimodule(2, 'X1')), (STAR, STAR, 0))
print('tube algebra: dim', A.dim, 'commutative', A.is_commutative())
for it in primitive_idempotents(A):
    print('  idempotent', [str(c) for c in it['idempotent']])

# %% Fixing the vertex normalization from the four-string covariance
s = defect_setup(C, F1)
cov = four_string_covariance(s, C, F1)
print('covariance: equations', cov['equations'], 'nullity', cov['nullity'])
print('ratios F[***;*]_{a,b} / F[***;*]_{0,0}:', {k: str(v) for k, v in cov['ratios'].items()})

# %% The derived table is the Ising category, for either Frobenius-Schur sign
for kappa in (1, -1):
    D = derive_extended_fsymbols(C, F1, kappa)
    print(f'kappa={kappa:+d}: equals ising -> {D.same_data(ising(kappa))}, '
          f'pentagon -> {check_pentagon(D)["ok"]}')
    print('   F[***;*] =', [[str(D.F(STAR, STAR, STAR, STAR, a, b)) for b in (0, 1)] for a in (0, 1)])
