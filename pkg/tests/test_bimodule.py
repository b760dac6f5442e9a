"""Bimodule categories over Vec(Z/pZ) and their coherence identities."""

import cmath
import itertools
import json

import pytest
from hypothesis import given, strategies as st

from defectchain.bimodule import Bimodule, BimoduleError, catalog, check_module_coherence, vec_zp_bimodule
from defectchain.scalar import Scalar, root_of_unity

PRIMES = [2, 3, 5]
IDENTITIES = ('left_pentagon', 'right_pentagon', 'middle_left', 'middle_right', 'unitarity')


@pytest.mark.parametrize('p', PRIMES)
def test_catalog_is_coherent(p):
    cat = catalog(p)
    assert set(cat) == {'T', 'L', 'R', 'F0'} | {f'X{k}' for k in range(p)} | {f'F{k}' for k in range(p)}
    for name, M in cat.items():
        rep = check_module_coherence(M)
        assert rep['ok'], (name, {k: rep[k] for k in IDENTITIES})
        assert all(rep[k] == [] for k in IDENTITIES)


@pytest.mark.parametrize('p', PRIMES)
@pytest.mark.parametrize('q', range(5))
def test_fq_middle_associator_matches_exponential(p, q):
    if q >= p:
        return
    M = vec_zp_bimodule(p, 'F', q)
    for a, b in itertools.product(range(p), repeat=2):
        value = M.Cphase(a, '*', b).to_complex()
        assert abs(value - cmath.exp(2j * cmath.pi * q * a * b / p)) < 1e-12


def test_f1_middle_associator_is_sign():
    M = vec_zp_bimodule(2, 'F1')
    for a, b in itertools.product((0, 1), repeat=2):
        assert M.Cphase(a, '*', b) == (-1) ** (a * b)
        assert M.Lphase(a, b, '*') == 1
        assert M.Rphase('*', a, b) == 1


def test_actions_are_invertible():
    for p in PRIMES:
        for name, M in catalog(p).items():
            assert M.is_invertible_action(), name


def test_x_actions():
    M = vec_zp_bimodule(3, 'X2')
    assert M.act_left(1, 0) == 1
    assert M.act_right(0, 1) == 2
    T = vec_zp_bimodule(2, 'T')
    assert T.act_left(1, (0, 1)) == (1, 1) and T.act_right((0, 1), 1) == (0, 0)


def test_invalid_names():
    with pytest.raises(BimoduleError):
        vec_zp_bimodule(2, 'Q')
    with pytest.raises(BimoduleError):
        vec_zp_bimodule(4, 'F1')
    with pytest.raises(BimoduleError):
        vec_zp_bimodule(2, 'X')


# --------------------------------------------------------------------------- mutations

def test_detected_mutation_of_f1():
    M = vec_zp_bimodule(2, 'F1')
    bad = M.with_entry('C', (0, '*', 1), -1)
    rep = check_module_coherence(bad)
    assert not rep['ok']
    assert rep['middle_left'] or rep['middle_right']


def test_flipping_f1_at_the_sign_entry_gives_f0():
    """C(1,*,1) → +1 is the trivial bimodule F0, itself coherent: this mutation is invisible."""
    M = vec_zp_bimodule(2, 'F1').with_entry('C', (1, '*', 1), Scalar.one(8))
    assert check_module_coherence(M)['ok']
    F0 = vec_zp_bimodule(2, 'F0')
    assert all(M.Cphase(a, '*', b) == F0.Cphase(a, '*', b) for a in (0, 1) for b in (0, 1))


def test_detected_mutation_over_z3():
    M = vec_zp_bimodule(3, 'F1')
    bad = M.with_entry('C', (2, '*', 1), -M.Cphase(2, '*', 1))
    assert not check_module_coherence(bad)['ok']


def test_non_unitary_entry_detected():
    M = vec_zp_bimodule(2, 'X1')
    bad = M.with_entry('L', (1, 1, 0), Scalar.from_rational(2, M.order))
    rep = check_module_coherence(bad)
    assert not rep['ok'] and rep['unitarity']


@given(st.sampled_from(PRIMES), st.data())
def test_single_l_mutation_of_regular_bimodule(p, data):
    """Scaling one left associator of a regular bimodule by a nontrivial root breaks the left pentagon."""
    M = vec_zp_bimodule(p, 'X1')
    a = data.draw(st.integers(1, p - 1))
    b = data.draw(st.integers(1, p - 1))
    m = data.draw(st.integers(0, p - 1))
    k = data.draw(st.integers(1, p - 1))
    bad = M.with_entry('L', (a, b, m), M.Lphase(a, b, m) * root_of_unity(k, p, M.order))
    assert check_module_coherence(bad)['left_pentagon'] != []


@given(st.sampled_from(PRIMES), st.data())
def test_coboundary_twist_of_l_stays_coherent(p, data):
    """L(a,b,m) ↦ L(a,b,m) θ(b,m) θ(a, b▷m) / θ(ab, m) is an equivalent bimodule."""
    M = vec_zp_bimodule(p, 'X1')
    theta = {(a, m): data.draw(st.integers(0, p - 1)) for a in range(p) for m in range(p)}
    for m in range(p):
        theta[(0, m)] = 0
    z = lambda k: root_of_unity(k, p, M.order)
    twisted = M
    for a, b, m in itertools.product(range(p), repeat=3):
        k = theta[(b, m)] + theta[(a, (b + m) % p)] - theta[((a + b) % p, m)]
        twisted = twisted.with_entry('L', (a, b, m), M.Lphase(a, b, m) * z(k))
    # rescaling a ▷ m by θ(a, m) also changes C(a, m, b) by θ(a, m) / θ(a, m ◁ b)
    for a, m, b in itertools.product(range(p), repeat=3):
        k = theta[(a, m)] - theta[(a, (m + b) % p)]
        twisted = twisted.with_entry('C', (a, m, b), M.Cphase(a, m, b) * z(k))
    rep = check_module_coherence(twisted)
    assert rep['left_pentagon'] == [] and rep['ok']


# --------------------------------------------------------------------------- serialization

@pytest.mark.parametrize('name', ['T', 'L', 'R', 'F0', 'X2', 'F1'])
def test_json_round_trip(name):
    M = vec_zp_bimodule(3, name)
    N = Bimodule.from_json(json.loads(json.dumps(M.to_json())))
    assert N.objects == M.objects
    assert dict(N.left_action) == dict(M.left_action) and dict(N.right_action) == dict(M.right_action)
    for a, m, b in itertools.product(range(3), M.objects, range(3)):
        assert N.Cphase(a, m, b) == M.Cphase(a, m, b)
        assert N.Lphase(a, b, m) == M.Lphase(a, b, m)
        assert N.Rphase(m, a, b) == M.Rphase(m, a, b)
    assert check_module_coherence(N)['ok']
