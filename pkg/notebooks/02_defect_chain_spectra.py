"""Walkthrough: the defect chain, its Ising spectrum, and the critical energy density.

Run with ``python3 notebooks/02_defect_chain_spectra.py``.
"""

import numpy as np

from defectchain.chain import defect_chain_hamiltonian, free_sectors, golden_chain_hamiltonian
from defectchain.fusion import vec_zp
from defectchain.spectra import (compare_spectra, diagonalize, free_fermion_energy, richardson_extrapolate,
                                 tfim_energy_density, tfim_reference)

# %% Defect chain on 2k+1 edges with * at both ends vs the open Ising chain on k qubits
for k in range(1, 7):
    H = defect_chain_hamiltonian(2 * k + 1, '*,*')
    rep = compare_spectra(diagonalize(H), diagonalize(tfim_reference(k)))
    print(f'k={k}: dim {H.dim:3d}  equal {rep["equal"]}  max deviation {rep["max_deviation"]:.1e}')

# %% Free boundary: two decoupled copies
n = 10
free = diagonalize(defect_chain_hamiltonian(n, 'free'))
parts = [diagonalize(defect_chain_hamiltonian(n, b)) for b in free_sectors(n)]
print('free = union of sectors:', compare_spectra(free, parts[0], union_with=parts[1])['equal'])

# %% Criticality: ground energy per site approaches -(1 + 4/pi)/sqrt(2)
ns = [16, 32, 64, 128, 256]
e = [free_fermion_energy(n) / n for n in ns]
for n, x in zip(ns, e):
    print(f'n={n:4d}  E0/n = {x:.12f}')
print('extrapolated', richardson_extrapolate(ns[-3:], e[-3:]), 'exact', tfim_energy_density())

# %% The pure Vec(Z/2) chain is gapped and trivially ordered
for bnd in ('1,1', 'periodic'):
    s = diagonalize(golden_chain_hamiltonian(vec_zp(2), 1, 8, bnd))
    print(f'{bnd:9s} ground energy {s.ground_energy:+.1f}  degeneracy {s.ground_degeneracy}')
print('low Ising levels (k=8):', np.round(diagonalize(tfim_reference(8), 'lanczos_lowk', k=4).eigenvalues, 6))
