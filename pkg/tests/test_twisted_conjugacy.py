import numpy as np
from hypothesis import given, settings, strategies as st

from twisted_h1.automorphism import ANTIHOL, HOL, LATTICE, make_automorphism
from twisted_h1.group_model import exp_map, make_group, random_element
from twisted_h1.twisted_conjugacy import (
    CONJUGATE,
    NOT_CONJUGATE,
    are_sigma_conjugate,
    multiset_distance,
    orbit_dimension,
    orbit_gradient,
    orbit_objective,
    pfaffian,
    special_congruence_invariant,
    twisted_conjugate,
    twisted_spectral_invariant,
    verify_witness,
)


def _sigma(fam, kind, B=None):
    G = make_group(*fam)
    return make_automorphism(G, kind, np.eye(G.ambient_size) if B is None else B)


def test_twisted_action_examples():
    sigma = _sigma(("SU", 2), ANTIHOL)
    h = random_element(sigma.group, 1).matrix
    assert np.allclose(twisted_conjugate(np.eye(2), h, sigma).matrix, h)
    g = random_element(sigma.group, 2).matrix
    assert np.allclose(twisted_conjugate(g, np.eye(2), sigma).matrix, g @ np.linalg.inv(sigma(g)))
    g = np.diag([1j, -1j])
    assert np.allclose(twisted_conjugate(g, np.eye(2), sigma).matrix, -np.eye(2))


def test_spectral_invariant_examples():
    ev = twisted_spectral_invariant(np.diag([1, -1]), _sigma(("U", 2), HOL))
    assert np.allclose(np.sort(ev.real), [-1, 1])
    s = _sigma(("SU", 2), ANTIHOL)
    assert np.allclose(twisted_spectral_invariant(np.eye(2), s), [1, 1])
    assert np.allclose(twisted_spectral_invariant(-np.eye(2), s), [1, 1])


def test_oracle_examples():
    s = _sigma(("SU", 2), ANTIHOL)
    d = are_sigma_conjugate(np.eye(2), -np.eye(2), s)
    assert d.verdict == CONJUGATE and verify_witness(np.eye(2), -np.eye(2), s, d.witness) < 1e-7
    d = are_sigma_conjugate(np.eye(2), -np.eye(2), _sigma(("SU", 2), HOL))
    assert d.verdict == NOT_CONJUGATE and d.certificate["type"] == "spectrum"
    cat = make_automorphism(make_group("T", 2), LATTICE, [[2, 1], [1, 1]])
    t = np.diag(np.exp([0.4j, 2.1j]))
    d = are_sigma_conjugate(t, np.eye(2), cat)
    assert d.verdict == CONJUGATE and verify_witness(t, np.eye(2), cat, d.witness) < 1e-9


def test_reflexive_decision_uses_identity_witness():
    s = _sigma(("U", 3), ANTIHOL)
    t = random_element(s.group, 4).matrix
    d = are_sigma_conjugate(t, t, s)
    assert d.verdict == CONJUGATE and np.allclose(d.witness, np.eye(3))


def test_lattice_obstruction_certificate():
    flip = make_automorphism(make_group("T", 2), LATTICE, [[-1, 0], [0, 1]])
    d = are_sigma_conjugate(np.eye(2), np.diag([1, 1j]), flip)
    assert d.verdict == NOT_CONJUGATE and d.certificate["type"] == "character"


def test_pfaffian_separates_symplectic_pair():
    # on SU(2) with σ = conjugation, τ_g(J) = det(g)·J = J: J and −J are not σ-conjugate,
    # although the spectra of s·s̄ agree
    s = _sigma(("SU", 2), ANTIHOL)
    J = np.array([[0, -1], [1, 0]], dtype=complex)
    assert multiset_distance(twisted_spectral_invariant(J, s),
                             twisted_spectral_invariant(-J, s)) < 1e-12
    d = are_sigma_conjugate(J, -J, s)
    assert d.verdict == NOT_CONJUGATE and d.certificate["type"] == "pfaffian"
    g = random_element(s.group, 9).matrix
    moved = twisted_conjugate(g, J, s).matrix
    assert abs(special_congruence_invariant(moved, s) - special_congruence_invariant(J, s)) < 1e-12


def test_pfaffian_squares_to_determinant():
    rng = np.random.default_rng(0)
    for n in (2, 4, 6):
        X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        A = X - X.T
        assert np.isclose(pfaffian(A) ** 2, np.linalg.det(A))


def test_orbit_dimension_examples():
    s = _sigma(("SU", 2), HOL)
    assert orbit_dimension(np.eye(2), s) == 0
    assert orbit_dimension(exp_map(s.group, [0.3, 0.2, 0.7]).matrix, s) == 2
    u1 = _sigma(("U", 1), ANTIHOL)
    assert orbit_dimension(np.array([[np.exp(0.5j)]]), u1) == 1


def test_multiset_distance():
    assert multiset_distance(np.array([1, 2, 3]), np.array([3, 1, 2.5])) == 0.5


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([(("U", 2), HOL), (("SU", 3), ANTIHOL), (("SO", 3), HOL), (("U", 3), ANTIHOL)]),
       st.integers(0, 2**32 - 1))
def test_spectral_invariant_is_orbit_invariant(case, seed):
    fam, kind = case
    G = make_group(*fam)
    rng = np.random.default_rng(seed)
    s = make_automorphism(G, kind, random_element(G, rng).matrix if fam[0] != "SO" else np.eye(3),
                          validate=False)
    t, g = (random_element(G, rng).matrix for _ in range(2))
    a = twisted_spectral_invariant(t, s)
    b = twisted_spectral_invariant(twisted_conjugate(g, t, s), s)
    assert multiset_distance(a, b) < 1e-9


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([(("U", 2), HOL), (("SU", 2), ANTIHOL), (("U", 3), ANTIHOL)]),
       st.integers(0, 2**32 - 1))
def test_oracle_recovers_planted_orbit(case, seed):
    fam, kind = case
    s = _sigma(fam, kind)
    rng = np.random.default_rng(seed)
    t, g = (random_element(s.group, rng).matrix for _ in range(2))
    t2 = twisted_conjugate(g, t, s).matrix
    d = are_sigma_conjugate(t, t2, s, seed=seed % 1000)
    assert d.verdict == CONJUGATE
    assert verify_witness(t, t2, s, d.witness) <= 1e-7


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_gradient_matches_finite_differences(seed):
    s = _sigma(("U", 3), ANTIHOL)
    G = s.group
    rng = np.random.default_rng(seed)
    g, t1, t2 = (random_element(G, rng).matrix for _ in range(3))
    grad = orbit_gradient(g, t1, t2, s)
    h = 1e-6
    fd = np.array([(orbit_objective(g @ exp_map(G, h * e).matrix, t1, t2, s)
                    - orbit_objective(g @ exp_map(G, -h * e).matrix, t1, t2, s)) / (2 * h)
                   for e in np.eye(G.dim)])
    assert np.linalg.norm(grad - fd) <= 1e-5 * max(np.linalg.norm(fd), 1e-3)
