"""Exact fusion-category data, defect bimodules, tube algebras and defect spin chains.

The package is layered bottom-up:

* :mod:`~defectchain.scalar` — exact arithmetic in cyclotomic fields;
* :mod:`~defectchain.fusion` — skeletal multiplicity-free fusion categories and the pentagon check;
* :mod:`~defectchain.bimodule` — pointed bimodule categories (defects) and their coherence;
* :mod:`~defectchain.tube` — annular diagrams, tube algebras, idempotents and derived F-symbols;
* :mod:`~defectchain.chain` — edge bases and chain Hamiltonians;
* :mod:`~defectchain.spectra` — diagonalization, Ising reference and free-fermion oracle;
* :mod:`~defectchain.pipeline` / :mod:`~defectchain.cli` — end-to-end checks and the command line.
"""

__version__ = '0.1.0'

from .scalar import Scalar, ScalarError, root_of_unity, sqrt2, cyclotomic_polynomial
from .fusion import (FusionCategory, FusionError, FusionTree, STAR, vec_zp, ising, check_pentagon,
                     check_unitarity, check_qdims, admissible_labelings, f_move, inverse_f_move)
from .bimodule import Bimodule, BimoduleError, vec_zp_bimodule, catalog, check_module_coherence
from .tube import (AnnularCategory, AnnularDiagram, TubeAlgebra, TubeError, compose, object_classes,
                   endomorphism_algebra, primitive_idempotents, vertex_basis, transfer_leg,
                   four_string_covariance, defect_setup, derive_extended_fsymbols)
from .chain import (Boundary, ChainBasis, ChainOperator, ChainError, CATEGORY, parse_boundary,
                    enumerate_states, free_sectors, golden_chain_basis, golden_chain_hamiltonian,
                    defect_chain_hamiltonian, defect_local_operator)
from .spectra import (Spectrum, SpectrumError, diagonalize, lanczos, tfim_reference, compare_spectra,
                      free_fermion_energy, richardson_extrapolate, tfim_energy_density,
                      z2_flip_permutation, symmetry_blocks)

__all__ = [name for name in dir() if not name.startswith('_')]
