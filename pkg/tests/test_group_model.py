import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twisted_h1.errors import DimensionMismatch, ProjectionFailed, UnsupportedFamily
from twisted_h1.group_model import (
    algebra_coords,
    algebra_matrix,
    contains,
    exp_map,
    expected_dim,
    make_group,
    project_to_group,
    random_element,
)


@pytest.mark.parametrize("family,n,N,d", [
    ("U", 3, 3, 9), ("SU", 2, 2, 3), ("T", 2, 2, 2), ("SO", 3, 3, 3), ("U", 1, 1, 1),
])
def test_descriptor_shapes(family, n, N, d):
    G = make_group(family, n)
    assert G.ambient_size == N
    assert G.dim == d == expected_dim(G)


def test_torus_basis_is_diagonal():
    G = make_group("T", 2)
    assert np.allclose(G.algebra_basis[0], np.diag([1j, 0]))
    assert np.allclose(G.algebra_basis[1], np.diag([0, 1j]))


def test_aliases_and_unknown_family():
    assert make_group("Unitary", 2).name == make_group("U", 2).name
    with pytest.raises(UnsupportedFamily):
        make_group("Sp", 2)


def test_product_group():
    G = make_group("product", [("SU", 2), ("T", 1)])
    assert G.ambient_size == 3 and G.dim == 4
    ok, _ = contains(G, np.diag([1j, -1j, np.exp(0.3j)]))
    assert ok
    bad = np.eye(3, dtype=complex)
    bad[[0, 2]] = bad[[2, 0]]
    assert not contains(G, bad)[0]


def test_contains_examples():
    assert contains(make_group("U", 3), np.eye(3)) == (True, 0.0)
    ok, r = contains(make_group("SU", 2), np.diag([1j, -1j]))
    assert ok and r < 1e-12
    ok, r = contains(make_group("U", 3), np.diag([2.0, 1, 1]))
    assert not ok and r > 0.1


def test_exp_examples():
    assert np.allclose(exp_map(make_group("SU", 2), np.zeros(3)).matrix, np.eye(2))
    T1 = make_group("T", 1)
    assert np.allclose(exp_map(T1, [2 * np.pi]).matrix, np.eye(1))
    SU2 = make_group("SU", 2)
    assert np.allclose(exp_map(SU2, np.diag([1j * np.pi, -1j * np.pi])).matrix, -np.eye(2))


def test_random_element_determinism_and_membership():
    SU2 = make_group("SU", 2)
    assert np.array_equal(random_element(SU2, 0).matrix, random_element(SU2, 0).matrix)
    rng = np.random.default_rng(0)
    worst = max(contains(SU2, random_element(SU2, rng).matrix)[1] for _ in range(1000))
    assert worst < 1e-9
    t = random_element(make_group("T", 2), 7).matrix
    assert np.allclose(t, np.diag(np.diag(t)))


def test_projection_examples():
    U3 = make_group("U", 3)
    M = np.eye(3, dtype=complex)
    M[0, 1] = 1e-6
    P = project_to_group(U3, M).matrix
    assert contains(U3, P)[0] and np.linalg.norm(P - np.eye(3)) <= 2e-6
    g = random_element(U3, 3).matrix
    assert np.allclose(project_to_group(U3, g).matrix, g)
    assert np.allclose(project_to_group(make_group("SU", 2), 1.1 * np.eye(2)).matrix, np.eye(2))


def test_projection_failure_far_from_group():
    with pytest.raises(ProjectionFailed):
        project_to_group(make_group("SO", 3), np.zeros((3, 3)))


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        algebra_coords(make_group("U", 2), np.zeros((3, 3)))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([("U", 2), ("SU", 3), ("SO", 3), ("T", 2)]), st.integers(0, 2**32 - 1))
def test_algebra_coords_roundtrip(fam, seed):
    G = make_group(*fam)
    x = np.random.default_rng(seed).normal(size=G.dim)
    coords, resid = algebra_coords(G, algebra_matrix(G, x))
    assert resid < 1e-10 and np.allclose(coords, x)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([("U", 3), ("SU", 2), ("SO", 3)]), st.integers(0, 2**32 - 1))
def test_projection_idempotent(fam, seed):
    G = make_group(*fam)
    g = random_element(G, seed).matrix
    noisy = g + 1e-4 * np.random.default_rng(seed).normal(size=g.shape)
    P = project_to_group(G, noisy).matrix
    assert contains(G, P)[0]
    assert np.allclose(project_to_group(G, P).matrix, P, atol=1e-12)
