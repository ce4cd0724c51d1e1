import numpy as np
import pytest

from twisted_h1.automorphism import ANTIHOL, HOL, make_automorphism
from twisted_h1.group_model import make_group
from twisted_h1 import verifier as v


def _sigma(fam, kind):
    G = make_group(*fam)
    return make_automorphism(G, kind, np.eye(G.ambient_size))


def test_report_roundtrip():
    r = v.check_remark_fixtures()
    again = v.CheckReport.from_json(r.to_json())
    assert again.to_json() == r.to_json()
    assert again.passed == r.passed and again.residuals == r.residuals


def test_report_roundtrip_with_fractions_and_infinities():
    from fractions import Fraction
    r = v.CheckReport("x", {"config": "c", "q": Fraction(1, 3)}, False,
                      {"a": float("inf")}, [{"m": np.eye(2) * 1j}], 7)
    again = v.CheckReport.from_json(r.to_json())
    assert again.to_json() == r.to_json()
    assert again.residuals["a"] == float("inf")


def test_remark_fixtures_pass():
    assert v.check_remark_fixtures().passed


def test_rank_theorem_examples():
    r = v.check_rank_theorem(_sigma(("U", 3), ANTIHOL), 5)
    assert r.passed and {d["rank"] for d in r.details} == {1}
    r = v.check_rank_theorem(_sigma(("SU", 2), HOL), 5)
    assert r.passed and {d["rank"] for d in r.details} == {1}


def test_rank_theorem_for_u2_twist_by_reflection():
    from twisted_h1.automorphism import inner_twist
    from twisted_h1.fixed_torus import maximal_torus_in_fixed
    s = _sigma(("U", 2), HOL)
    assert maximal_torus_in_fixed(s).rank == 2
    assert maximal_torus_in_fixed(inner_twist(np.diag([1, -1]), s)).rank == 2


def test_orbit_dimension_lemma_examples():
    r = v.check_orbit_dimension_lemma(_sigma(("SU", 2), ANTIHOL), 20)
    assert r.passed and r.details[0] == {"max_orbit_dim": 2, "rank": 1, "dim": 3}
    cat = make_automorphism(make_group("T", 2), "lattice", [[2, 1], [1, 1]])
    r = v.check_orbit_dimension_lemma(cat, 5)
    assert r.passed and r.details[0]["max_orbit_dim"] == 2
    r = v.check_orbit_dimension_lemma(_sigma(("U", 1), HOL), 5)
    assert r.passed and r.details[0]["max_orbit_dim"] == 0


def test_prop32_on_block_torus():
    sigma, T = v.u3_block_torus_fixture()
    assert v.check_prop32(sigma, T).passed


def test_main_theorem_with_expected_count():
    assert v.check_main_theorem(_sigma(("U", 2), HOL), 2, expected_classes=3).passed
    assert not v.check_main_theorem(_sigma(("U", 2), HOL), 2, expected_classes=2).passed


def test_generator_independence():
    r = v.check_generator_independence(v.order_four_fixture(), 4, 3)
    assert r.passed
    with pytest.raises(ValueError):
        v.check_generator_independence(v.order_four_fixture(), 4, 2)


def test_semisimplicity_gate_and_z_case():
    assert v.check_semisimplicity_gate().passed
    assert v.check_z_case(10).passed


def test_finiteness_and_gradient():
    assert v.check_finiteness(_sigma(("SU", 3), HOL), 2).passed
    assert v.check_gradient(_sigma(("U", 1), HOL), 3).passed  # vanishing gradient
    assert v.check_gradient(_sigma(("SO", 3), HOL), 3).passed


def test_builtin_matrix_shape():
    labels = [s.label for s in v.builtin_scenarios()]
    assert len(labels) == len(set(labels)) == 17
    for sc in v.builtin_scenarios():
        assert v.cyclic_orders(sc.build())


def test_suite_dispatch():
    assert [r.check_name for r in v.run_suite("remarks")] == ["remark_fixtures"]
    with pytest.raises(KeyError):
        v.run_suite("nosuch")
