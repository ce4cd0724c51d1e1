from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twisted_h1.automorphism import HOL, LATTICE, conjugation, identity_automorphism, make_automorphism
from twisted_h1.errors import NotOneSemisimple
from twisted_h1.fixed_torus import (
    centralizer_dimension,
    exponential_lattice,
    fixed_subalgebra,
    maximal_torus_in_fixed,
    torsion_index,
    torsion_points,
    torus_from_basis,
)
from twisted_h1.group_model import make_group


def test_fixed_subalgebra_dimensions():
    assert len(fixed_subalgebra(identity_automorphism(make_group("SU", 2)))) == 3
    basis = fixed_subalgebra(conjugation(make_group("U", 3)))
    assert len(basis) == 3
    for X in basis:  # real antisymmetric
        assert np.allclose(X.matrix.imag, 0) and np.allclose(X.matrix, -X.matrix.T)
    cat = make_automorphism(make_group("T", 2), LATTICE, [[2, 1], [1, 1]])
    assert fixed_subalgebra(cat) == []


def test_fixed_subalgebra_rejects_shear():
    shear = make_automorphism(make_group("T", 2), LATTICE, [[1, 1], [0, 1]])
    with pytest.raises(NotOneSemisimple):
        fixed_subalgebra(shear)


@pytest.mark.parametrize("fam,kind,rank", [
    (("U", 3), "antihol", 1), (("U", 2), "hol", 2), (("SU", 2), "hol", 1),
    (("SU", 3), "antihol", 1), (("SO", 3), "hol", 1), (("U", 1), "antihol", 0),
])
def test_maximal_torus_rank(fam, kind, rank):
    G = make_group(*fam)
    sigma = make_automorphism(G, kind, np.eye(G.ambient_size))
    T = maximal_torus_in_fixed(sigma)
    assert T.rank == rank
    # maximal: the centralizer inside the fixed algebra is t itself
    assert centralizer_dimension(T) == rank


def test_cat_map_torus_is_trivial():
    cat = make_automorphism(make_group("T", 2), LATTICE, [[2, 1], [1, 1]])
    T = maximal_torus_in_fixed(cat)
    assert T.rank == 0
    pts = torsion_points(T, 5)
    assert len(pts) == 1 and np.allclose(pts[0].element.matrix, np.eye(2))


def test_u3_conjugation_torus_is_conjugate_to_block_so2():
    T = maximal_torus_in_fixed(conjugation(make_group("U", 3)))
    H = T.t_basis[0]
    ev = np.sort(np.linalg.eigvals(H).imag)
    # spectrum of a multiple of the SO(2) generator: {-c, 0, c}
    assert abs(ev[1]) < 1e-9 and abs(ev[0] + ev[2]) < 1e-9


def test_lattice_examples():
    T1 = make_group("T", 1)
    lat = exponential_lattice(T1, [np.diag([1j])])
    assert np.allclose(np.abs(lat.lattice_basis), [[2 * np.pi]])
    SU2 = make_group("SU", 2)
    lat = exponential_lattice(SU2, [np.diag([1j, -1j])])
    assert np.allclose(np.abs(lat.lattice_basis), [[2 * np.pi]])
    assert sorted(abs(int(w[0])) for w in lat.weight_matrix) == [1, 1]


def test_torsion_examples():
    SU2 = make_group("SU", 2)
    T = maximal_torus_in_fixed(identity_automorphism(SU2))
    pts = torsion_points(T, 2)
    assert len(pts) == 2
    mats = sorted(np.real(np.trace(p.element.matrix)) for p in pts)
    assert np.allclose(mats, [-2, 2])
    U2 = make_group("U", 2)
    T = maximal_torus_in_fixed(identity_automorphism(U2))
    pts = torsion_points(T, 2)
    diag = sorted(tuple(np.round(np.linalg.eigvals(p.element.matrix).real).astype(int))
                  for p in pts)
    assert len(pts) == 4 and len(set(tuple(sorted(d)) for d in diag)) == 3
    for p in pts:
        assert all(Fraction(c).denominator in (1, 2) for c in p.coords)
    assert len(torsion_points(T, 1)) == 1
    assert pts[0].coords == (Fraction(0), Fraction(0))


def test_block_so2_torus_from_basis():
    sigma = conjugation(make_group("U", 3))
    H = np.zeros((3, 3), dtype=complex)
    H[0, 1], H[1, 0] = 1, -1
    T = torus_from_basis(sigma, [H])
    assert T.rank == 1
    pts = torsion_points(T, 4)
    assert len(pts) == 4
    # the quarter turn is the rotation by π/2 in the first block
    R = np.array([[0, 1, 0], [-1, 0, 0], [0, 0, 1]], dtype=complex)
    assert any(np.allclose(p.element.matrix, R) for p in pts)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([(("U", 2), HOL), (("SU", 3), "antihol"), (("SO", 3), HOL)]),
       st.integers(1, 4))
def test_torsion_points_are_n_torsion_and_indexed(case, n):
    fam, kind = case
    G = make_group(*fam)
    sigma = make_automorphism(G, kind, np.eye(G.ambient_size))
    T = maximal_torus_in_fixed(sigma)
    pts = torsion_points(T, n)
    assert len(pts) == n ** T.rank
    for p in pts:
        M = p.element.matrix
        assert np.allclose(np.linalg.matrix_power(M, n), np.eye(G.ambient_size), atol=1e-9)
        assert np.allclose(sigma(M), M, atol=1e-9)
        idx, resid = torsion_index(T, n, M)
        assert idx == p.index and resid < 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_log_coords_roundtrip(seed):
    T = maximal_torus_in_fixed(identity_automorphism(make_group("U", 3)))
    y = np.random.default_rng(seed).uniform(0, 1, T.rank)
    y2, resid = T.log_coords(T.point(y))
    assert resid < 1e-10
    d = np.abs(y2 - y)
    assert np.all(np.minimum(d, 1 - d) < 1e-9)
