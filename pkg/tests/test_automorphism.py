import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twisted_h1.automorphism import (
    ANTIHOL,
    HOL,
    LATTICE,
    compose,
    conjugation,
    differential,
    identity_automorphism,
    inner_twist,
    is_one_semisimple,
    make_automorphism,
    numerical_rank,
    order_of,
    power,
    rank_tolerance,
)
from twisted_h1.errors import CompositionError, IllConditioned, InvalidAutomorphism
from twisted_h1.group_model import contains, make_group, random_element


def test_antihol_conjugates_entries():
    sigma = conjugation(make_group("U", 3))
    assert np.allclose(sigma(np.diag([1j, 1j, 1])), np.diag([-1j, -1j, 1]))


def test_hol_fixes_identity():
    G = make_group("U", 2)
    B = random_element(G, 1).matrix
    assert np.allclose(make_automorphism(G, HOL, B)(np.eye(2)), np.eye(2))


def test_antihol_is_inverse_transpose_on_unitaries():
    G = make_group("U", 3)
    sigma = conjugation(G)
    rng = np.random.default_rng(0)
    for _ in range(20):
        g = random_element(G, rng).matrix
        assert np.allclose(sigma(g), np.linalg.inv(g.T))


def test_lattice_acts_on_angles():
    T2 = make_group("T", 2)
    sigma = make_automorphism(T2, LATTICE, [[2, 1], [1, 1]])
    th = np.array([0.3, -1.1])
    assert np.allclose(sigma(np.diag(np.exp(1j * th))), np.diag(np.exp(1j * (np.array([[2, 1], [1, 1]]) @ th))))


def test_invalid_automorphisms():
    with pytest.raises(InvalidAutomorphism):
        make_automorphism(make_group("U", 2), HOL, [[1, 1], [0, 1]])
    with pytest.raises(InvalidAutomorphism):
        make_automorphism(make_group("T", 2), LATTICE, [[2, 0], [0, 1]])
    with pytest.raises(InvalidAutomorphism):
        make_automorphism(make_group("U", 2), LATTICE, [[1, 0], [0, 1]])
    with pytest.raises(InvalidAutomorphism):
        # Ad(B) with det(B) = -1 and B not in SO(3) still preserves SO(3); a
        # complex B does not
        make_automorphism(make_group("SO", 3), HOL, np.diag([1j, 1, 1]))


def test_differential_examples():
    assert np.allclose(identity_automorphism(make_group("SU", 2)).differential, np.eye(3))
    T1 = make_group("T", 1)
    assert np.allclose(differential(make_automorphism(T1, ANTIHOL, [[1]])), [[-1]])
    M = [[2, 1], [1, 1]]
    assert np.allclose(make_automorphism(make_group("T", 2), LATTICE, M).differential, M)


def test_order_examples():
    assert order_of(conjugation(make_group("U", 3))) == 2
    assert order_of(identity_automorphism(make_group("SU", 2))) == 1
    T2 = make_group("T", 2)
    assert order_of(make_automorphism(T2, LATTICE, [[2, 1], [1, 1]])) == math.inf
    assert order_of(make_automorphism(T2, LATTICE, [[1, 1], [0, 1]])) == math.inf
    assert order_of(make_automorphism(T2, LATTICE, [[0, -1], [1, 0]])) == 4
    assert order_of(make_automorphism(T2, LATTICE, [[0, 1], [1, 0]])) == 2
    assert order_of(make_automorphism(make_group("U", 2), HOL, np.diag([1, 1j]))) == 4


def test_semisimplicity_examples():
    T2 = make_group("T", 2)
    assert not is_one_semisimple(make_automorphism(T2, LATTICE, [[1, 1], [0, 1]]))
    assert is_one_semisimple(make_automorphism(T2, LATTICE, [[2, 1], [1, 1]]))
    assert is_one_semisimple(conjugation(make_group("SU", 3)))


def test_composition_rules():
    G = make_group("U", 2)
    rng = np.random.default_rng(5)
    B, C = (random_element(G, rng).matrix for _ in range(2))
    g = random_element(G, rng).matrix
    for ks in (HOL, ANTIHOL):
        for kt in (HOL, ANTIHOL):
            s, t = make_automorphism(G, ks, B), make_automorphism(G, kt, C)
            st_ = compose(s, t)
            assert st_.kind == (HOL if ks == kt else ANTIHOL)
            assert np.allclose(st_(g), s(t(g)))
    with pytest.raises(CompositionError):
        compose(identity_automorphism(make_group("T", 1)),
                make_automorphism(make_group("T", 1), ANTIHOL, [[1]]))


def test_power_and_inner_twist():
    G = make_group("U", 2)
    sigma = make_automorphism(G, HOL, np.diag([1, 1j]))
    assert np.allclose(power(sigma, 4).matrix, np.eye(2))
    assert np.allclose(power(sigma, 0).matrix, np.eye(2))
    h = random_element(G, 2).matrix
    g = random_element(G, 3).matrix
    tw = inner_twist(h, sigma)
    assert np.allclose(tw(g), h @ sigma(g) @ h.conj().T)


def test_numerical_rank_refuses_ambiguous_gap():
    assert numerical_rank(np.diag([1.0, 1e-3, 1e-14])) == 2
    with pytest.raises(IllConditioned):
        numerical_rank(np.diag([1.0, 2e-8]))
    with rank_tolerance(1e-4):
        assert numerical_rank(np.diag([1.0, 2e-8])) == 1


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([("U", 2), ("SU", 3), ("SO", 3)]), st.sampled_from([HOL, ANTIHOL]),
       st.integers(0, 2**32 - 1))
def test_automorphism_is_homomorphism(fam, kind, seed):
    G = make_group(*fam)
    if G.family == "SO" and kind == ANTIHOL:
        kind = HOL
    rng = np.random.default_rng(seed)
    B = random_element(G, rng).matrix
    sigma = make_automorphism(G, kind, B, validate=False)
    g, h = (random_element(G, rng).matrix for _ in range(2))
    assert np.allclose(sigma(g @ h), sigma(g) @ sigma(h))
    assert contains(G, sigma(g))[0]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_inner_twists_stay_one_semisimple(seed):
    # dσ is orthogonal for the invariant metric, hence semisimple
    G = make_group("SU", 3)
    h = random_element(G, seed).matrix
    assert is_one_semisimple(inner_twist(h, conjugation(G)))
