import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twisted_h1.automorphism import ANTIHOL, HOL, LATTICE, make_automorphism
from twisted_h1.cohomology import (
    COMPLETE,
    H1Config,
    classify,
    cocycle_norm_check,
    compute_h1,
    decide_cohomologous_Z,
    torus_class_invariant,
    torus_h1_Z,
)
from twisted_h1.errors import InvalidCocycleOrder, NotOneSemisimple, UnsupportedKind
from twisted_h1.group_model import make_group, random_element
from twisted_h1.twisted_conjugacy import CONJUGATE, NOT_CONJUGATE, twisted_conjugate


def _sigma(fam, kind, B=None):
    G = make_group(*fam)
    if kind == LATTICE:
        return make_automorphism(G, kind, B)
    return make_automorphism(G, kind, np.eye(G.ambient_size) if B is None else B)


def test_cocycle_condition_examples():
    s = _sigma(("SU", 2), ANTIHOL)
    assert cocycle_norm_check(np.eye(2), s, 3)[0]
    assert cocycle_norm_check(-np.eye(2), s, 2)[0]
    # z = diag(i, −i) is a cocycle although it is not in the torus
    ok, r = cocycle_norm_check(np.diag([1j, -1j]), s, 2)
    assert ok and r < 1e-12
    assert not cocycle_norm_check(np.diag([1j, -1j]), _sigma(("SU", 2), HOL), 2)[0]


@pytest.mark.parametrize("fam,kind,B,n,count", [
    (("SU", 2), ANTIHOL, None, 2, 1),
    (("SU", 2), HOL, None, 2, 2),
    (("U", 2), HOL, None, 2, 3),
    (("U", 1), ANTIHOL, None, 2, 1),
    (("SU", 2), ANTIHOL, None, 4, 3),
    (("U", 2), HOL, np.diag([1, 1j]), 4, 10),
])
def test_class_counts(fam, kind, B, n, count):
    R = compute_h1(_sigma(fam, kind, B), n)
    assert R.status == COMPLETE
    assert R.class_count == count
    assert sorted(i for c in R.partition() for i in c) == list(range(len(R.points)))


def test_u1_conjugation_has_rank_zero_torus():
    R = compute_h1(_sigma(("U", 1), ANTIHOL), 2)
    assert R.torus_rank == 0 and len(R.points) == 1


def test_lattice_swap():
    R = compute_h1(_sigma(("T", 2), LATTICE, [[0, 1], [1, 0]]), 2)
    assert R.status == COMPLETE and R.class_count == 1


def test_order_must_divide_n():
    s = _sigma(("U", 2), HOL, np.diag([1, 1j]))
    with pytest.raises(InvalidCocycleOrder):
        compute_h1(s, 2)
    with pytest.raises(InvalidCocycleOrder):
        compute_h1(_sigma(("T", 2), LATTICE, [[2, 1], [1, 1]]))


def test_default_n_is_the_order():
    R = compute_h1(_sigma(("SU", 2), ANTIHOL))
    assert R.n == 2


def test_certificates_and_witnesses_cover_classes():
    R = compute_h1(_sigma(("U", 2), HOL), 2)
    certified = {pair for c in R.classes for pair, _ in c.certificates}
    reps = [c.representative.index for c in R.classes]
    assert certified == {(a, b) for i, a in enumerate(reps) for b in reps[i + 1:]}
    sizes = [len(c.members) for c in R.classes]
    assert sum(len(c.witnesses) >= s - 1 for c, s in zip(R.classes, sizes)) == len(sizes)


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_transported_cocycles_classify_into_their_class(seed):
    s = _sigma(("U", 2), HOL)
    R = compute_h1(s, 2)
    rng = np.random.default_rng(seed)
    p = R.points[int(rng.integers(len(R.points)))]
    g = random_element(s.group, rng)
    z = twisted_conjugate(g, p.element, s).matrix
    assert cocycle_norm_check(z, s, 2)[0]
    k, _ = classify(R, z, H1Config(seed=seed % 100))
    assert p in R.classes[k].members


def test_z_case_cat_map():
    s = _sigma(("T", 2), LATTICE, [[2, 1], [1, 1]])
    assert torus_h1_Z(s) == {"dimension": 0, "characters": []}
    rng = np.random.default_rng(0)
    for _ in range(5):
        t = np.diag(np.exp(1j * rng.uniform(-np.pi, np.pi, 2)))
        assert decide_cohomologous_Z(s, t, np.eye(2)).verdict == CONJUGATE


def test_z_case_reflection_has_invariant():
    s = _sigma(("T", 2), LATTICE, [[-1, 0], [0, 1]])
    assert torus_h1_Z(s)["dimension"] == 1
    t = np.diag([1, 1j])
    assert decide_cohomologous_Z(s, t, np.eye(2)).verdict == NOT_CONJUGATE
    assert np.allclose(torus_class_invariant(s, t), [0.25])


def test_z_case_rejects_shear():
    s = _sigma(("T", 2), LATTICE, [[1, 1], [0, 1]])
    with pytest.raises(NotOneSemisimple):
        decide_cohomologous_Z(s, np.eye(2), np.eye(2))
    with pytest.raises(NotOneSemisimple):
        torus_h1_Z(s)


def test_z_case_reflexive():
    s = _sigma(("U", 2), ANTIHOL)
    t = random_element(s.group, 5).matrix
    d = decide_cohomologous_Z(s, t, t)
    assert d.verdict == CONJUGATE and np.allclose(d.witness, np.eye(2))


def test_exact_torus_classification_needs_lattice():
    with pytest.raises(UnsupportedKind):
        torus_h1_Z(_sigma(("U", 1), ANTIHOL))
