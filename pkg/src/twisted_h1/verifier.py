"""Runnable checks of the structural theorems, one report per check.

Every check uses only the public operations of the package, is deterministic
given its seed, and returns a :class:`CheckReport` whose JSON form
round-trips exactly. Integer statements (ranks, dimensions, class counts) are
compared exactly; only matrix residuals carry tolerances.
"""
from __future__ import annotations

import itertools
import json
import math
import time
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .automorphism import (
    LATTICE,
    Automorphism,
    inner_twist,
    is_one_semisimple,
    make_automorphism,
    order_of,
    power,
)
from .cohomology import (
    COMPLETE,
    H1Config,
    classify,
    cocycle_norm_check,
    compute_h1,
    decide_cohomologous_Z,
)
from .errors import NotOneSemisimple
from .fixed_torus import maximal_torus_in_fixed, torsion_points, torus_from_basis
from .group_model import exp_map, make_group, random_element
from .serialization import to_jsonable
from .twisted_conjugacy import (
    CONJUGATE,
    orbit_dimension,
    orbit_gradient,
    orbit_objective,
    twisted_conjugate,
    verify_witness,
)
from .twisted_weyl import (
    GOLDEN,
    MEMBER_TOL,
    is_in_Nsigma,
    is_in_Zsigma,
    linearized_normalizer_dimension,
)

RESIDUAL_TOL = 1e-7
GRADIENT_RTOL = 1e-5


@dataclass
class CheckReport:
    check_name: str
    inputs: dict
    passed: bool
    residuals: dict = field(default_factory=dict)
    details: list = field(default_factory=list)
    seed: int = 0

    def to_dict(self) -> dict:
        return to_jsonable(asdict(self))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "CheckReport":
        residuals = {k: float(v) for k, v in d.get("residuals", {}).items()}
        return cls(d["check_name"], d["inputs"], bool(d["passed"]), residuals,
                   list(d.get("details", [])), int(d.get("seed", 0)))

    @classmethod
    def from_json(cls, s: str) -> "CheckReport":
        return cls.from_dict(json.loads(s))

    def summary(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        label = self.inputs.get("config", "")
        return f"[{mark}] {self.check_name} {label}".rstrip()


# --------------------------------------------------------------------------
# configuration matrix


@dataclass(frozen=True)
class Scenario:
    label: str
    family: str
    param: int
    kind: str
    matrix: tuple

    def build(self) -> Automorphism:
        G = make_group(self.family, self.param)
        M = np.array(self.matrix, dtype=object if self.kind == LATTICE else complex)
        return make_automorphism(G, self.kind, M)


def _eye(n):
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def _scenario(family, n, kind, matrix=None, tag=None):
    matrix = _eye(n) if matrix is None else matrix
    name = tag or {"hol": "id", "antihol": "conj", "lattice": "lat"}[kind]
    return Scenario(f"{family}({n})+{name}", family, n, kind, matrix)


def builtin_scenarios() -> list[Scenario]:
    """The default configuration matrix over {U(1..3), SU(2..3), SO(3), T(1..2)}."""
    out = []
    for fam, n in [("U", 1), ("U", 2), ("U", 3), ("SU", 2), ("SU", 3)]:
        out.append(_scenario(fam, n, "hol"))
        out.append(_scenario(fam, n, "antihol"))
    out.append(_scenario("U", 2, "hol", ((1, 0), (0, 1j)), tag="Ad(diag(1,i))"))
    out.append(_scenario("SO", 3, "hol"))
    out.append(_scenario("T", 1, "lattice", ((1,),), tag="id"))
    out.append(_scenario("T", 1, "lattice", ((-1,),), tag="inv"))
    out.append(_scenario("T", 2, "lattice", ((1, 0), (0, 1)), tag="id"))
    out.append(_scenario("T", 2, "lattice", ((0, 1), (1, 0)), tag="swap"))
    out.append(_scenario("T", 2, "lattice", ((0, -1), (1, 0)), tag="rot"))
    return out


def rank_scenarios() -> list[Scenario]:
    """{U(2), U(3), SU(2), SU(3), SO(3)} x {identity, conjugation where distinct}."""
    out = []
    for fam, n in [("U", 2), ("U", 3), ("SU", 2), ("SU", 3)]:
        out.append(_scenario(fam, n, "hol"))
        out.append(_scenario(fam, n, "antihol"))
    out.append(_scenario("SO", 3, "hol"))
    return out


def cyclic_orders(sigma: Automorphism, candidates=(1, 2, 3, 4)) -> list[int]:
    order = order_of(sigma)
    if order == math.inf:
        return []
    return [n for n in candidates if n % int(order) == 0]


def _config_label(sigma: Automorphism) -> str:
    return f"{sigma.group.name}/{sigma.kind}"


# --------------------------------------------------------------------------
# checks


def check_rank_theorem(sigma: Automorphism, num_twists: int = 20, seed: int = 0) -> CheckReport:
    """rank T(σ) == rank T(Inn(h)∘σ) for seeded random h."""
    G = sigma.group
    base = maximal_torus_in_fixed(sigma, seed).rank
    details = [{"twist": "none", "rank": base}]
    rng = np.random.default_rng([seed, 0x21])
    for k in range(num_twists):
        if sigma.kind == LATTICE:
            tw = sigma  # inner automorphisms of a torus are trivial
        else:
            h = random_element(G, rng).matrix
            tw = inner_twist(h, sigma)
        details.append({"twist": k, "rank": maximal_torus_in_fixed(tw, seed).rank})
    passed = all(d["rank"] == base for d in details)
    return CheckReport("rank_theorem", {"config": _config_label(sigma), "num_twists": num_twists},
                       passed, {}, details, seed)


def check_orbit_dimension_lemma(sigma: Automorphism, samples: int = 100, seed: int = 0
                                ) -> CheckReport:
    """max orbit dimension + rank T == dim G."""
    G = sigma.group
    rank = maximal_torus_in_fixed(sigma, seed).rank
    rng = np.random.default_rng([seed, 0x22])
    dims = [orbit_dimension(random_element(G, rng).matrix, sigma) for _ in range(samples)]
    top = max(dims) if dims else 0
    passed = top + rank == G.dim
    return CheckReport("orbit_dimension_lemma",
                       {"config": _config_label(sigma), "samples": samples}, passed, {},
                       [{"max_orbit_dim": top, "rank": rank, "dim": G.dim}], seed)


def _zsigma_torus_residual(g, T, sigma, pts) -> float:
    resid = 0.0
    for t in pts:
        resid = max(resid, float(np.linalg.norm(g @ t @ sigma(g).conj().T - t)))
    return resid


def check_prop32(sigma: Automorphism, T=None, seed: int = 0) -> CheckReport:
    """Z_σ(T) ⊆ G^σ on sampled members; Lie(N_σ(T)) has dimension rank T."""
    from .twisted_weyl import find_weyl_generators

    G = sigma.group
    T = T if T is not None else maximal_torus_in_fixed(sigma, seed)
    rng = np.random.default_rng([seed, 0x32])
    details = []
    ok = True
    # every point of T lies in Z_σ(T)
    worst_t = 0.0
    for _ in range(10):
        t = T.point(rng.uniform(0, 1, T.rank))
        worst_t = max(worst_t, is_in_Zsigma(t, T, sigma)[1])
    ok &= worst_t <= MEMBER_TOL
    details.append({"case": "torus_in_Z", "residual": worst_t})

    # (i): anything fixing sampled torus points under τ is σ-fixed
    probe = [T.point(rng.uniform(0, 1, T.rank)) for _ in range(3)]
    probe += [T.point(np.full(T.rank, 1.0 / GOLDEN))] if T.rank else [G.identity()]
    n = 4 if T.rank <= 2 else 2
    pts = torsion_points(T, n)
    gens = find_weyl_generators(sigma, T, pts, n, seed=seed)
    cands = [g.g for g in gens] + [a.g @ b.g for a, b in itertools.product(gens, repeat=2)]
    cands += [p.element.matrix @ g.g for p in pts for g in gens]
    members, worst_fix = 0, 0.0
    for g in cands:
        if _zsigma_torus_residual(g, T, sigma, probe) <= MEMBER_TOL:
            members += 1
            worst_fix = max(worst_fix, float(np.linalg.norm(sigma(g) - g)))
    ok &= worst_fix <= MEMBER_TOL and members > 0
    details.append({"case": "Z_in_fixed_group", "members": members, "residual": worst_fix})

    # (ii)/(iii): linearized normalizer condition
    dim_n = linearized_normalizer_dimension(T, sigma, seed=seed)
    ok &= dim_n == T.rank
    details.append({"case": "lie_algebra", "dim": dim_n, "rank": T.rank})
    return CheckReport("prop32", {"config": _config_label(sigma)}, bool(ok),
                       {"torus_in_Z": worst_t, "Z_fixed": worst_fix}, details, seed)


def u3_block_torus_fixture():
    """U(3), σ(g) = ḡ, T = diag(SO(2), 1)."""
    G = make_group("U", 3)
    sigma = make_automorphism(G, "antihol", np.eye(3))
    H = np.zeros((3, 3), dtype=complex)
    H[0, 1], H[1, 0] = 1.0, -1.0
    return sigma, torus_from_basis(sigma, [H])


def check_remark_fixtures(seed: int = 0) -> CheckReport:
    """diag(1,1,−1) ∈ Z_σ(T) \\ T and diag(i,i,1) ∈ N_σ(T) \\ G^σ for U(3) with conjugation."""
    sigma, T = u3_block_torus_fixture()
    g = np.diag([1, 1, -1]).astype(complex)
    h = np.diag([1j, 1j, 1]).astype(complex)
    z_ok, z_res = is_in_Zsigma(g, T, sigma)
    _, g_in_T = T.contains_point(g)
    n_ok, n_res = is_in_Nsigma(h, T, sigma)
    h_fix = float(np.linalg.norm(sigma(h) - h))
    details = [
        {"case": "g_in_Zsigma", "passed": bool(z_ok and z_res < 1e-9), "residual": z_res},
        {"case": "g_not_in_T", "passed": bool(g_in_T > 1e-3), "distance": g_in_T},
        {"case": "h_in_Nsigma", "passed": bool(n_ok), "residual": n_res},
        {"case": "h_not_fixed", "passed": bool(h_fix > 1e-3), "distance": h_fix},
        {"case": "torus_rank", "passed": T.rank == 1, "rank": T.rank},
    ]
    passed = all(d["passed"] for d in details)
    return CheckReport("remark_fixtures", {"config": "U(3)/antihol, T=diag(SO(2),1)"}, passed,
                       {"Z_residual": z_res, "N_residual": n_res}, details, seed)


def check_main_theorem(sigma: Automorphism, n: int, seed: int = 0,
                       expected_classes: Optional[int] = None, config: Optional[H1Config] = None,
                       transports: int = 3) -> CheckReport:
    """compute_h1 is Complete, and transported cocycles land in their own class."""
    config = config or H1Config(seed=seed)
    R = compute_h1(sigma, n, config)
    details = [{"case": "status", "status": R.status, "classes": R.class_count,
                "partition": R.partition(), "group_order": R.weyl.permutation_group_order}]
    ok = R.status == COMPLETE
    if expected_classes is not None:
        ok &= R.class_count == expected_classes
    worst_cocycle = 0.0
    for c in R.classes:
        worst_cocycle = max(worst_cocycle, cocycle_norm_check(c.representative.element, sigma, n)[1])
    ok &= worst_cocycle <= 1e-8
    worst_witness = 0.0
    for c in R.classes:
        for (i, j), w in c.witnesses:
            worst_witness = max(worst_witness, verify_witness(
                R.points[i].element, R.points[j].element, sigma, w))
    ok &= worst_witness <= config.witness_tol
    rng = np.random.default_rng([seed, 0x42])
    cls_of = {p.index: k for k, c in enumerate(R.classes) for p in c.members}
    for _ in range(transports):
        z = R.points[int(rng.integers(len(R.points)))]
        g = random_element(sigma.group, rng)
        moved = twisted_conjugate(g, z.element, sigma)
        k, _ = classify(R, moved, config)
        same = k == cls_of[z.index]
        details.append({"case": "coboundary_invariance", "point": z.index, "class": k,
                        "expected": cls_of[z.index], "passed": bool(same)})
        ok &= same
    return CheckReport("main_theorem", {"config": _config_label(sigma), "n": n,
                                        "expected_classes": expected_classes},
                       bool(ok), {"cocycle": worst_cocycle, "witness": worst_witness},
                       details, seed)


def _power_index_map(n: int, rank: int, r: int) -> dict:
    def index(k):
        out = 0
        for x in k:
            out = out * n + x
        return out

    return {index(k): index(tuple((r * x) % n for x in k))
            for k in itertools.product(range(n), repeat=rank)}


def check_generator_independence(sigma: Automorphism, n: int, r: int, seed: int = 0,
                                 config: Optional[H1Config] = None) -> CheckReport:
    """Running with σʳ (gcd(r, n) = 1) classifies the same cocycles.

    A cocycle α is recorded as α(σ) = t under σ and as α(σʳ) = tʳ under σʳ,
    so the σ-partition is pushed through t ↦ tʳ before comparing.
    """
    if math.gcd(r, n) != 1:
        raise ValueError("r must be coprime to n")
    config = config or H1Config(seed=seed)
    R1 = compute_h1(sigma, n, config)
    sigma_r = power(sigma, r)
    R2 = compute_h1(sigma_r, n, config, torus=R1.torus)
    mp = _power_index_map(n, R1.torus_rank, r)
    mapped = sorted(sorted(mp[i] for i in c) for c in R1.partition())
    same = mapped == sorted(R2.partition())
    normalizer_same = all(is_in_Nsigma(g.g, R1.torus, sigma_r)[0] for g in R1.weyl.generators)
    normalizer_same &= all(is_in_Nsigma(g.g, R1.torus, sigma)[0] for g in R2.weyl.generators)
    passed = same and normalizer_same and R1.status == COMPLETE and R2.status == COMPLETE
    details = [{"sigma_partition": R1.partition(), "sigma_r_partition": R2.partition(),
                "mapped": mapped, "normalizers_agree": bool(normalizer_same)}]
    return CheckReport("generator_independence",
                       {"config": _config_label(sigma), "n": n, "r": r}, bool(passed), {},
                       details, seed)


def check_semisimplicity_gate(seed: int = 0) -> CheckReport:
    """Finite-order automorphisms pass; the torus shear fails and is rejected."""
    details = []
    ok = True
    for sc in builtin_scenarios():
        sigma = sc.build()
        finite = order_of(sigma) != math.inf
        semi = is_one_semisimple(sigma)
        details.append({"config": sc.label, "finite_order": finite, "one_semisimple": semi})
        if finite and not semi:
            ok = False
    T2 = make_group("T", 2)
    shear = make_automorphism(T2, "lattice", [[1, 1], [0, 1]])
    semi = is_one_semisimple(shear)
    try:
        decide_cohomologous_Z(shear, np.eye(2), np.eye(2))
        rejected = False
    except NotOneSemisimple:
        rejected = True
    details.append({"config": "T(2)+shear", "one_semisimple": semi, "rejected": rejected})
    ok &= (not semi) and rejected
    return CheckReport("semisimplicity_gate", {"config": "builtin + shear"}, bool(ok), {},
                       details, seed)


def check_z_case(samples: int = 100, seed: int = 0) -> CheckReport:
    """Torus(2) with the cat map: every point is cohomologous to e."""
    T2 = make_group("T", 2)
    sigma = make_automorphism(T2, "lattice", [[2, 1], [1, 1]])
    rng = np.random.default_rng([seed, 0x2C])
    worst, verdicts = 0.0, []
    ok = True
    for _ in range(samples):
        theta = rng.uniform(-np.pi, np.pi, 2)
        t = np.diag(np.exp(1j * theta))
        d = decide_cohomologous_Z(sigma, t, np.eye(2))
        verdicts.append(d.verdict)
        if d.verdict != CONJUGATE:
            ok = False
            continue
        worst = max(worst, verify_witness(t, np.eye(2), sigma, d.witness))
    ok &= worst <= RESIDUAL_TOL
    return CheckReport("z_case", {"config": "T(2)/lattice[[2,1],[1,1]]", "samples": samples},
                       bool(ok), {"witness": worst},
                       [{"conjugate": verdicts.count(CONJUGATE), "total": samples}], seed)


def check_finiteness(sigma: Automorphism, n: int, seeds=(0, 1, 2),
                     config: Optional[H1Config] = None) -> CheckReport:
    """W closes to a finite group of the same order, with the same class count, per seed."""
    orders, counts, statuses = [], [], []
    for s in seeds:
        R = compute_h1(sigma, n, replace(config or H1Config(), seed=s))
        orders.append(R.weyl.permutation_group_order)
        counts.append(R.class_count)
        statuses.append(R.status)
    passed = len(set(orders)) == 1 and len(set(counts)) == 1
    return CheckReport("finiteness", {"config": _config_label(sigma), "n": n,
                                      "seeds": list(seeds)}, bool(passed), {},
                       [{"orders": orders, "class_counts": counts, "statuses": statuses}],
                       int(seeds[0]))


def check_gradient(sigma: Automorphism, points: int = 20, seed: int = 0,
                   h: float = 1e-6) -> CheckReport:
    """Closed-form descent gradient vs central finite differences."""
    G = sigma.group
    rng = np.random.default_rng([seed, 0x6D])
    worst = 0.0
    for _ in range(points):
        g, t1, t2 = (random_element(G, rng).matrix for _ in range(3))
        grad = orbit_gradient(g, t1, t2, sigma)
        fd = np.empty(G.dim)
        for i in range(G.dim):
            e = np.zeros(G.dim)
            e[i] = h
            fp = orbit_objective(g @ exp_map(G, e).matrix, t1, t2, sigma)
            fm = orbit_objective(g @ exp_map(G, -e).matrix, t1, t2, sigma)
            fd[i] = (fp - fm) / (2 * h)
        # floor the scale so a vanishing gradient compares absolutely
        denom = max(float(np.linalg.norm(fd)), float(np.linalg.norm(grad)), 1e-3)
        worst = max(worst, float(np.linalg.norm(grad - fd)) / denom)
    return CheckReport("gradient", {"config": _config_label(sigma), "points": points},
                       worst <= GRADIENT_RTOL, {"relative_error": worst}, [], seed)


# --------------------------------------------------------------------------
# suites


def _suite_rank(seed, config):
    return [check_rank_theorem(sc.build(), 20, seed) for sc in rank_scenarios()]


def _suite_orbit(seed, config):
    return [check_orbit_dimension_lemma(sc.build(), 100, seed) for sc in rank_scenarios()]


def _suite_prop32(seed, config):
    reports = [check_prop32(sc.build(), seed=seed) for sc in rank_scenarios()]
    sigma, T = u3_block_torus_fixture()
    reports.append(check_prop32(sigma, T, seed))
    return reports


# derived class counts for the headline fixtures
EXPECTED_CLASSES = {
    ("SU(2)+conj", 2): 1,
    ("SU(2)+id", 2): 2,
    ("U(2)+id", 2): 3,
    ("U(1)+conj", 2): 1,
}


def _suite_main(seed, config):
    reports = []
    for sc in builtin_scenarios():
        sigma = sc.build()
        for n in cyclic_orders(sigma):
            reports.append(check_main_theorem(sigma, n, seed, EXPECTED_CLASSES.get((sc.label, n)),
                                              config))
    return reports


def order_four_fixture() -> Automorphism:
    """U(2) with σ = Ad(diag(1, i)), an automorphism of order 4."""
    G = make_group("U", 2)
    return make_automorphism(G, "hol", np.diag([1, 1j]))


def _suite_independence(seed, config):
    sigma = order_four_fixture()
    return [check_generator_independence(sigma, 4, 3, seed, config),
            check_generator_independence(sigma, 4, 1, seed, config)]


def _suite_finiteness(seed, config):
    reports = []
    seeds = (seed, seed + 1, seed + 2)
    for sc in builtin_scenarios():
        sigma = sc.build()
        for n in cyclic_orders(sigma):
            reports.append(check_finiteness(sigma, n, seeds, config))
    return reports


def _suite_gradient(seed, config):
    return [check_gradient(sc.build(), 20, seed) for sc in builtin_scenarios()
            if sc.kind != LATTICE]


SUITES: dict[str, Callable[[int, Optional[H1Config]], list]] = {
    "remarks": lambda seed, config: [check_remark_fixtures(seed)],
    "semisimple": lambda seed, config: [check_semisimplicity_gate(seed)],
    "rank": _suite_rank,
    "orbit": _suite_orbit,
    "prop32": _suite_prop32,
    "main": _suite_main,
    "independence": _suite_independence,
    "zcase": lambda seed, config: [check_z_case(100, seed)],
    "finiteness": _suite_finiteness,
    "gradient": _suite_gradient,
}


def run_suite(name: str, seed: int = 0, config: Optional[H1Config] = None) -> list[CheckReport]:
    """Run one named suite, or every suite for ``"all"``.

    ``config`` overrides restarts, witness tolerance and budget; its seed is
    replaced by ``seed``.
    """
    config = replace(config, seed=seed) if config is not None else H1Config(seed=seed)
    names = list(SUITES) if name == "all" else [name]
    out = []
    for key in names:
        if key not in SUITES:
            raise KeyError(key)
        out.extend(SUITES[key](seed, config))
    return out


def timed(fn, *args, **kwargs):
    start = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - start
