"""Annular diagrams, tube algebras, idempotents and the derived F-symbols."""

import dataclasses
import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from defectchain.bimodule import catalog, vec_zp_bimodule
from defectchain.fusion import STAR, check_pentagon, ising, vec_zp
from defectchain.scalar import Scalar
from defectchain.tube import (AnnularCategory, TubeAlgebra, TubeError, compose, defect_setup,
                              derive_extended_fsymbols, endomorphism_algebra, four_string_covariance,
                              object_classes, primitive_idempotents, transfer_leg, vertex_basis)
from defectchain.tube import candidate_rank

CATALOG = {p: catalog(p) for p in (2, 3)}


@pytest.fixture(scope='module')
def defect():
    C = vec_zp(2)
    F1 = vec_zp_bimodule(2, 'F1')
    return C, F1, defect_setup(C, F1)


@pytest.fixture(scope='module')
def algebra():
    F1 = vec_zp_bimodule(2, 'F1')
    return TubeAlgebra(AnnularCategory(F1, F1, vec_zp_bimodule(2, 'X1')), (STAR, STAR, 0))


def T(A, a, b):
    """T_{a,b}: outer arcs a (left and right sectors), b between the two defect strands."""
    return A.basis_element(A.basis.index((a, b, a)))


# --------------------------------------------------------------------------- composition

@st.composite
def stacks(draw):
    p = draw(st.sampled_from([2, 3]))
    names = sorted(CATALOG[p])
    M, N, P = (CATALOG[p][draw(st.sampled_from(names))] for _ in range(3))
    ann = AnnularCategory(M, N, P)
    inner = draw(st.sampled_from(ann.triples()))
    arcs = [draw(st.sampled_from(ann.all_arcs())) for _ in range(3)]
    return ann, inner, arcs


def _single(diagrams):
    assert len(diagrams) == 1
    return diagrams[0]


@given(stacks())
def test_composition_is_associative(case):
    ann, inner, (a1, a2, a3) = case
    D1 = ann.diagram(inner, a1)
    D2 = ann.diagram(D1.outer, a2)
    D3 = ann.diagram(D2.outer, a3)
    left = _single(compose(_single(compose(D1, D2)), D3))
    right = _single(compose(D1, _single(compose(D2, D3))))
    assert left.arcs == right.arcs and left.inner == right.inner
    assert left.coefficient == right.coefficient


@given(stacks())
def test_identity_diagrams_are_units(case):
    ann, inner, (a1, _, _) = case
    D = ann.diagram(inner, a1, 3)
    for E in (_single(compose(ann.identity(inner), D)), _single(compose(D, ann.identity(D.outer)))):
        assert E.arcs == D.arcs and E.coefficient == D.coefficient


@given(stacks())
def test_stack_phases_are_unimodular(case):
    ann, inner, (a1, a2, _) = case
    phase, _ = ann.stack(inner, a1, a2)
    assert phase * phase.conj() == 1


def test_compose_rejects_mismatched_objects():
    F1 = vec_zp_bimodule(2, 'F1')
    ann = AnnularCategory(F1, F1, vec_zp_bimodule(2, 'X1'))
    D = ann.diagram((STAR, STAR, 0), (0, 0, 1))
    assert D.outer == (STAR, STAR, 1)
    with pytest.raises(TubeError):
        compose(D, ann.diagram((STAR, STAR, 0), (0, 0, 0)))


def test_object_classes_defect_triple():
    F1 = vec_zp_bimodule(2, 'F1')
    X1 = vec_zp_bimodule(2, 'X1')
    C = vec_zp(2)
    classes = object_classes(C, C, C, F1, F1, X1)
    assert classes == [((STAR, STAR, 0), [(STAR, STAR, 0), (STAR, STAR, 1)])]


def test_incompatible_bimodules_rejected():
    with pytest.raises(TubeError):
        AnnularCategory(vec_zp_bimodule(2, 'F1'), vec_zp_bimodule(3, 'F1'), vec_zp_bimodule(2, 'X1'))


def test_nontrivial_associator_not_supported():
    F1 = vec_zp_bimodule(2, 'F1')
    twisted = vec_zp(2).with_fsymbol((1, 1, 1, 1, 0, 0), -1)
    assert check_pentagon(twisted)['ok']
    M = dataclasses.replace(F1, left_cat=twisted, right_cat=twisted)
    with pytest.raises(NotImplementedError):
        AnnularCategory(M, M, M)


# --------------------------------------------------------------------------- the defect tube algebra

def test_defect_algebra_structure(algebra):
    A = algebra
    assert A.dim == 4
    assert A.basis == [(0, 0, 0), (0, 1, 0), (1, 0, 1), (1, 1, 1)]
    assert A.is_commutative() and A.is_associative() and A.is_unital()
    for a, b, c, d in itertools.product((0, 1), repeat=4):
        assert A.mul(T(A, a, b), T(A, c, d)) == T(A, (a + c) % 2, (b + d) % 2)


def test_idempotents_complete_orthogonal(algebra):
    A = algebra
    idems = [it['idempotent'] for it in primitive_idempotents(A)]
    assert len(idems) == 4
    zero = tuple(Scalar(A.order) for _ in range(A.dim))
    total = zero
    for i, e in enumerate(idems):
        assert A.mul(e, e) == e
        for f in idems[i + 1:]:
            assert A.mul(e, f) == zero
        total = A.add(total, e)
    assert total == A.identity()
    assert all(A.dagger(e) == e for e in idems)


def test_idempotents_match_group_characters(algebra):
    A = algebra
    quarter = Scalar.one(A.order) / 4
    expected = set()
    for x, y in itertools.product((0, 1), repeat=2):
        vec = [Scalar(A.order)] * 4
        for a, b in itertools.product((0, 1), repeat=2):
            vec[A.basis.index((a, b, a))] = quarter * (-1) ** (a * x + b * y)
        expected.add(tuple(vec))
    assert {tuple(it['idempotent']) for it in primitive_idempotents(A)} == expected


def test_characters_agree_with_numeric_eigenvalues(algebra):
    """Float oracle: joint eigenvalues of the regular representation."""
    A = algebra
    mats = [np.array([[c.to_complex() for c in row] for row in A.left_matrix(A.basis_element(i))])
            for i in range(A.dim)]
    generic = sum((k + 1.37) * m for k, m in enumerate(mats))
    _, vecs = np.linalg.eig(generic)
    numeric = set()
    for v in vecs.T:
        chars = tuple(int(round((m @ v)[np.argmax(abs(v))].real / v[np.argmax(abs(v))].real)) for m in mats)
        numeric.add(chars)
    exact = {tuple(int(round(c.to_complex().real)) for c in it['character']) for it in primitive_idempotents(A)}
    assert numeric == exact


def test_noncommutative_algebra_raises():
    ann = AnnularCategory(vec_zp_bimodule(2, 'L'), vec_zp_bimodule(2, 'F1'), vec_zp_bimodule(2, 'F1'))
    rep = ann.object_classes()[0][0]
    A = endomorphism_algebra(rep, category=ann)
    assert not A.is_commutative()
    with pytest.raises(NotImplementedError):
        primitive_idempotents(A)


@pytest.mark.parametrize('p', [3, 5])
def test_odd_p_defect_algebra_is_twisted(p):
    """Over Z/p, p odd, T_{a,b} T_{c,d} = ω^{…} T_{c,d} T_{a,b}: a twisted group algebra of Z/p × Z/p."""
    Fq = vec_zp_bimodule(p, 'F1')
    ann = AnnularCategory(Fq, Fq, vec_zp_bimodule(p, 'X1'))
    A = TubeAlgebra(ann, ann.object_classes()[0][0])
    assert A.dim == p * p and A.is_associative() and A.is_unital()
    assert not A.is_commutative()
    for i, j in itertools.product(range(A.dim), repeat=2):
        uv = A.structure_constants[(i, j)]
        vu = A.structure_constants[(j, i)]
        k = next(n for n, c in enumerate(uv) if c)
        ratio = uv[k] / vu[k]
        assert ratio ** p == 1
    with pytest.raises(NotImplementedError):
        primitive_idempotents(A)


# --------------------------------------------------------------------------- vertices

def test_vertex_spaces_rank_one(defect):
    _, _, s = defect
    for it in primitive_idempotents(s.algebra):
        ranks = [candidate_rank(s.algebra, it['idempotent'], a) for a in (0, 1)]
        assert sum(n for n, _ in ranks) == 8
        assert all(r == 1 for _, r in ranks)


def test_vertex_vectors(defect):
    _, _, s = defect
    q = Scalar.one(s.category.order) / 4
    assert s.vertices[0] == {(0, 0, 0): q, (0, 1, 0): q, (1, 0, 1): q, (1, 1, 1): q}
    assert s.vertices[1] == {(0, 0, 1): q, (0, 1, 1): -q, (1, 0, 0): q, (1, 1, 0): -q}
    vb = vertex_basis(s.algebra, s.idempotent, 1)
    assert len(vb) == 1 and vb[0]['vector'] == s.vertices[1]


def test_leg_transfer_preserves_vertex_line(defect):
    _, _, s = defect
    for a, b in itertools.product((0, 1), repeat=2):
        for source in (('P', 'R'), ('P', 'L'), ('M', 'R')):
            moved, outer = transfer_leg(s.category, s.rep, s.vertices[b], a, source)
            assert moved, (a, b, source)
            assert all(c * c.conj() == Scalar.one(s.category.order) / 16 for c in moved.values())


# --------------------------------------------------------------------------- F-symbols

def test_four_string_covariance(defect):
    C, F1, s = defect
    cov = four_string_covariance(s, C, F1)
    assert cov['equations'] == 64 and cov['nullity'] == 1
    assert cov['ratios'] == {(a, b): (-1) ** (a * b) for a in (0, 1) for b in (0, 1)}


def test_trivial_defect_gives_singular_fmatrix():
    """With F0 the covariance forces all four entries equal — not unitary, so F0 is no defect."""
    C = vec_zp(2)
    F0 = vec_zp_bimodule(2, 'F0')
    cov = four_string_covariance(defect_setup(C, F0), C, F0)
    assert cov['nullity'] == 1
    assert set(cov['ratios'].values()) == {1}


@pytest.mark.parametrize('kappa', [1, -1])
def test_derived_table_is_ising(kappa):
    D = derive_extended_fsymbols(vec_zp(2), vec_zp_bimodule(2, 'F1'), kappa)
    assert D.same_data(ising(kappa))
    assert check_pentagon(D)['ok']
    assert len(D.fsymbols) == len(ising(kappa).fsymbols)


def test_derivation_rejects_other_inputs():
    with pytest.raises(TubeError):
        derive_extended_fsymbols(vec_zp(2), vec_zp_bimodule(2, 'F0'), 1)
    with pytest.raises(TubeError):
        derive_extended_fsymbols(vec_zp(3), vec_zp_bimodule(3, 'F1'), 1)
    with pytest.raises(TubeError):
        derive_extended_fsymbols(vec_zp(2), vec_zp_bimodule(2, 'F1'), 2)


def test_algebra_json(algebra):
    data = algebra.to_json()
    assert data['algebra_dim'] == 4 and data['commutative'] is True
