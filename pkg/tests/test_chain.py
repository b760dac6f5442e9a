"""Defect-chain state spaces and Hamiltonians."""

import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from defectchain.chain import (CATEGORY, Boundary, ChainError, defect_chain_hamiltonian, defect_local_operator,
                               enumerate_states, free_sectors, golden_chain_basis, golden_chain_hamiltonian,
                               is_alternating, parse_boundary)
from defectchain.fusion import STAR, ising, vec_zp
from defectchain.scalar import Scalar
from defectchain.spectra import tfim_reference

SQRT2 = np.sqrt(2.0)
BOUNDARIES = ['*,*', 'c,c', '*,c', 'c,*', '0,*', '*,1', '1,0', 'free']


def brute_force_states(n, left=None, right=None):
    """Oracle: all label sequences whose neighbours are related by fusing one defect strand."""
    C = ising(1)
    out = []
    for st_ in itertools.product(C.labels, repeat=n):
        if all(b in C.fuse(a, STAR) for a, b in zip(st_, st_[1:])):
            if left is not None and not (st_[0] == left or (left == CATEGORY and st_[0] != STAR)):
                continue
            if right is not None and not (st_[-1] == right or (right == CATEGORY and st_[-1] != STAR)):
                continue
            out.append(st_)
    return out


# --------------------------------------------------------------------------- bases

def test_basis_examples():
    b = enumerate_states(5, '*,*')
    assert b.dim == 4
    assert b.states[0] == (STAR, 0, STAR, 0, STAR)
    assert enumerate_states(4, 'free').dim == 8
    empty = enumerate_states(4, '*,*')
    assert empty.dim == 0 and empty.flag


@given(st.integers(2, 10), st.sampled_from(BOUNDARIES))
def test_basis_matches_fusion_oracle(n, bnd):
    b = parse_boundary(bnd)
    basis = enumerate_states(n, b)
    expected = brute_force_states(n, b.left, b.right) if b.kind == 'fixed' else brute_force_states(n)
    assert sorted(basis.states, key=str) == sorted(expected, key=str)
    assert all(is_alternating(s) for s in basis.states)
    order = {0: 0, 1: 1, STAR: 2}
    keys = [tuple(order[x] for x in s) for s in basis.states]
    assert keys == sorted(keys)


@given(st.integers(2, 12))
def test_free_space_is_sum_of_sectors(n):
    free = set(enumerate_states(n, 'free').states)
    parts = [set(enumerate_states(n, b).states) for b in free_sectors(n)]
    assert parts[0].isdisjoint(parts[1])
    assert free == parts[0] | parts[1]


def test_parse_boundary():
    assert parse_boundary('*,*') == Boundary.fixed(STAR, STAR)
    assert parse_boundary('0, c') == Boundary.fixed(0, CATEGORY)
    assert parse_boundary('free') == Boundary.free()
    assert parse_boundary((1, STAR)) == Boundary.fixed(1, STAR)
    with pytest.raises(ChainError):
        parse_boundary('1,2,3')


def test_periodic_defect_chain_rejected():
    with pytest.raises(ChainError):
        enumerate_states(6, 'periodic')


# --------------------------------------------------------------------------- Hamiltonians

def test_three_edge_chain():
    H = defect_chain_hamiltonian(3, '*,*')
    np.testing.assert_allclose(H.toarray(), -np.ones((2, 2)) / SQRT2, atol=1e-15)
    np.testing.assert_allclose(np.linalg.eigvalsh(H.toarray()), [-SQRT2, 0], atol=1e-14)


def _local_matrix(kappa=1, o_hat=0):
    apply = defect_local_operator(kappa, o_hat)
    triples = [t for t in itertools.product((0, 1, STAR), repeat=3) if is_alternating(t)]
    idx = {t: i for i, t in enumerate(triples)}
    h = np.zeros((len(triples), len(triples)))
    for t in triples:
        for t2, amp in apply(*t):
            h[idx[t2], idx[t]] += -amp.to_complex().real / SQRT2
    return h


@pytest.mark.parametrize('kappa', [1, -1])
def test_local_term_spectrum(kappa):
    ev = np.linalg.eigvalsh(_local_matrix(kappa))
    assert np.all(np.isclose(ev, -SQRT2, atol=1e-14) | np.isclose(ev, 0, atol=1e-14))
    assert np.isclose(ev, -SQRT2).sum() == np.isclose(ev, 0).sum()


@pytest.mark.parametrize('n', range(3, 14))
@pytest.mark.parametrize('bnd', BOUNDARIES)
def test_golden_chain_equals_defect_chain(n, bnd):
    D = defect_chain_hamiltonian(n, bnd)
    b = parse_boundary(bnd)
    # a chain of n edges has n - 1 strands
    G = golden_chain_hamiltonian(ising(1), STAR, n - 1, b)
    assert G.basis.states == D.basis.states
    assert G.exact == D.exact


@pytest.mark.parametrize('n', [13, 15])
def test_golden_chain_equals_defect_chain_long(n):
    assert golden_chain_hamiltonian(ising(1), STAR, n - 1, '*,*').exact == defect_chain_hamiltonian(n, '*,*').exact


@pytest.mark.parametrize('o_hat', [0, 1, -3, Scalar.zeta(1, 8)])
@pytest.mark.parametrize('bnd', ['*,*', 'free', 'c,c'])
def test_forbidden_sector_operator_is_irrelevant(o_hat, bnd):
    ref = defect_chain_hamiltonian(9, bnd)
    H = defect_chain_hamiltonian(9, bnd, o_hat=o_hat)
    assert H.exact == ref.exact
    assert H.metadata['dropped_forbidden_images'] == 0


@pytest.mark.parametrize('n', [5, 8, 11])
def test_kappa_does_not_change_the_matrix(n):
    assert defect_chain_hamiltonian(n, 'free', kappa=1).exact == defect_chain_hamiltonian(n, 'free', kappa=-1).exact


@pytest.mark.parametrize('k', range(1, 7))
def test_defect_matrix_equals_ising_reference_entrywise(k):
    H = defect_chain_hamiltonian(2 * k + 1, '*,*')
    T = tfim_reference(k)
    np.testing.assert_allclose(H.toarray(), T.toarray(), atol=1e-14)
    counts = H.metadata['term_counts']['*,*']
    assert counts == T.metadata['term_counts']


@given(st.integers(3, 12), st.sampled_from(BOUNDARIES))
def test_hamiltonian_is_hermitian_and_real(n, bnd):
    H = defect_chain_hamiltonian(n, bnd)
    assert H.is_hermitian()
    assert not np.any(H.matrix.data.imag)


@given(st.integers(3, 11))
def test_free_hamiltonian_is_block_diagonal(n):
    H = defect_chain_hamiltonian(n, 'free')
    blocks = [defect_chain_hamiltonian(n, b) for b in free_sectors(n)]
    for Hs in blocks:
        R = H.restrict(Hs.basis)
        np.testing.assert_array_equal(R.toarray(), Hs.toarray())
    assert sum(b.dim for b in blocks) == H.dim
    assert H.matrix.nnz == sum(b.matrix.nnz for b in blocks)


# --------------------------------------------------------------------------- pure chains

def test_vec_chain_fixed_boundary_is_one_state():
    H = golden_chain_hamiltonian(vec_zp(2), 1, 8, Boundary.fixed(1, 1))
    assert H.basis.states == [(1, 0, 1, 0, 1, 0, 1, 0, 1)]
    np.testing.assert_array_equal(H.toarray(), [[-7]])


def test_vec_chain_periodic_two_states():
    H = golden_chain_hamiltonian(vec_zp(2), 1, 8, 'periodic')
    assert H.dim == 2
    np.testing.assert_array_equal(H.toarray(), -8 * np.eye(2))


def test_vec_chain_wrong_parity_is_empty():
    H = golden_chain_hamiltonian(vec_zp(2), 1, 8, Boundary.fixed(0, 1))
    assert H.dim == 0 and H.basis.flag


@pytest.mark.parametrize('C,X', [(ising(1), STAR), (ising(1), 1), (vec_zp(3), 1)])
def test_golden_terms_are_scaled_projectors(C, X):
    """-h_i / d_X must square to itself, for every single term."""
    basis = golden_chain_basis(C, X, 4, 'free')
    assert basis.dim > 0
    H = golden_chain_hamiltonian(C, X, 4, 'free')
    d = C.qdim[X].to_complex().real
    # with n_sites = 2 the chain has a single interior edge, i.e. one term
    h = golden_chain_hamiltonian(C, X, 2, 'free').toarray() / -d
    np.testing.assert_allclose(h @ h, h, atol=1e-14)
    assert H.is_hermitian()


def test_unknown_strand_label():
    with pytest.raises(ChainError):
        golden_chain_basis(vec_zp(2), 5, 4, 'free')
