"""H¹(Z/nZ, G) as the orbit set W\\E_n(T), plus the A ≅ Z decision procedure.

A cocycle of Z/nZ is determined by its value z on the generator σ, subject to
z·σ(z)···σⁿ⁻¹(z) = e; two cocycles are cohomologous iff their values are
σ-conjugate. Every class meets E_n(T), so classifying E_n(T) under W
classifies H¹.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import lattice
from .automorphism import (
    LATTICE,
    Automorphism,
    is_one_semisimple,
    order_of,
)
from .errors import InvalidCocycleOrder, NotOneSemisimple, UnsupportedKind
from .fixed_torus import FixedTorus, TorsionPoint, maximal_torus_in_fixed, torsion_points
from .group_model import MatrixLike, as_matrix
from .twisted_conjugacy import (
    CONJUGATE,
    DEFAULT_RESTARTS,
    DEFAULT_WITNESS_TOL,
    NOT_CONJUGATE,
    ConjugacyDecision,
    are_sigma_conjugate,
)
from .twisted_weyl import TwistedWeylGroup, close_and_partition, find_weyl_generators

COMPLETE = "complete"
INCOMPLETE = "incomplete"
COCYCLE_TOL = 1e-8


@dataclass
class H1Config:
    restarts: int = DEFAULT_RESTARTS
    witness_tol: float = DEFAULT_WITNESS_TOL
    budget: int = 8
    seed: int = 0


@dataclass
class CohomologyClass:
    representative: TorsionPoint
    members: list
    witnesses: list = field(default_factory=list)      # ((src, dst), g)
    certificates: list = field(default_factory=list)   # ((rep, other_rep), certificate)


@dataclass
class CohomologyResult:
    group: object
    automorphism: Automorphism
    n: int
    torus: FixedTorus
    points: list
    classes: list
    status: str
    unresolved: list
    weyl: TwistedWeylGroup

    @property
    def torus_rank(self) -> int:
        return self.torus.rank

    @property
    def class_count(self) -> int:
        return len(self.classes)

    def partition(self) -> list:
        return [[p.index for p in c.members] for c in self.classes]


def cocycle_norm_check(z: MatrixLike, sigma: Automorphism, n: int,
                       tol: float = COCYCLE_TOL) -> tuple[bool, float]:
    """Whether z·σ(z)·σ²(z)···σⁿ⁻¹(z) = e, with the residual."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cur = as_matrix(z)
    acc = np.eye(cur.shape[0], dtype=complex)
    for _ in range(n):
        acc = acc @ cur
        cur = sigma(cur)
    resid = float(np.linalg.norm(acc - np.eye(acc.shape[0])))
    return resid <= tol, resid


def _oracle(sigma: Automorphism, config: H1Config):
    def oracle(a, b) -> ConjugacyDecision:
        return are_sigma_conjugate(a, b, sigma, restarts=config.restarts, seed=config.seed,
                                   witness_tol=config.witness_tol)
    return oracle


def compute_h1(sigma: Automorphism, n: Optional[int] = None, config: Optional[H1Config] = None,
               torus: Optional[FixedTorus] = None) -> CohomologyResult:
    """Classify H¹(Z/nZ, G) for the cyclic action generated by σ.

    ``n`` defaults to the order of σ and must be a multiple of it. A torus
    may be passed in to compare runs on the same E_n(T).
    """
    config = config or H1Config()
    order = order_of(sigma)
    if order == np.inf:
        raise InvalidCocycleOrder("σ has infinite order; use decide_cohomologous_Z")
    n = int(order) if n is None else int(n)
    if n < 1 or n % int(order):
        raise InvalidCocycleOrder(f"n = {n} is not a multiple of the order {order} of σ")
    if not is_one_semisimple(sigma):
        raise NotOneSemisimple("σ is not 1-semisimple")

    T = torus if torus is not None else maximal_torus_in_fixed(sigma, config.seed)
    pts = torsion_points(T, n)
    gens = find_weyl_generators(sigma, T, pts, n, budget=config.budget, seed=config.seed)
    oracle = _oracle(sigma, config)

    def research():
        return find_weyl_generators(sigma, T, pts, n, budget=2 * config.budget,
                                    seed=config.seed + 1)

    W = close_and_partition(gens, pts, oracle, research)
    return _assemble(sigma, n, T, pts, W, oracle)


def _assemble(sigma, n, T, pts, W: TwistedWeylGroup, oracle) -> CohomologyResult:
    partition = W.oracle_partition if W.oracle_partition else W.orbit_partition
    cls_of = {i: c for c, members in enumerate(partition) for i in members}
    classes = [CohomologyClass(pts[m[0]], [pts[i] for i in m]) for m in partition]
    for src, dst, g in W.tree_edges:
        classes[cls_of[src]].witnesses.append(((src, dst), g))
    unresolved = []
    reps = [m[0] for m in partition]
    for (i, j), d in W.oracle_decisions.items():
        if d.verdict == CONJUGATE:
            classes[cls_of[i]].witnesses.append(((i, j), d.witness))
    for a in range(len(reps)):
        for b in range(a + 1, len(reps)):
            key = (reps[a], reps[b])
            d = W.oracle_decisions.get(key)
            if d is None:
                d = oracle(pts[key[0]].element.matrix, pts[key[1]].element.matrix)
            if d.verdict == NOT_CONJUGATE:
                classes[a].certificates.append((key, d.certificate))
            else:
                unresolved.append(key)
    for key, d in W.oracle_decisions.items():
        if d.verdict != NOT_CONJUGATE and key not in unresolved:
            unresolved.append(key)
    status = COMPLETE if W.saturated and not unresolved else INCOMPLETE
    return CohomologyResult(sigma.group, sigma, n, T, pts, classes, status, sorted(unresolved), W)


def classify(result: CohomologyResult, z: MatrixLike, config: Optional[H1Config] = None
             ) -> tuple[Optional[int], list]:
    """Index of the class containing the cocycle value z, via the oracle."""
    config = config or H1Config()
    oracle = _oracle(result.automorphism, config)
    decisions = []
    for k, c in enumerate(result.classes):
        d = oracle(as_matrix(z), c.representative.element.matrix)
        decisions.append(d)
        if d.verdict == CONJUGATE:
            return k, decisions
    return None, decisions


# --------------------------------------------------------------------------
# A ≅ Z


def decide_cohomologous_Z(sigma: Automorphism, t1: MatrixLike, t2: MatrixLike,
                          config: Optional[H1Config] = None) -> ConjugacyDecision:
    """Whether the Z-cocycles with values t₁, t₂ are cohomologous in H¹(Z, G)."""
    if not is_one_semisimple(sigma):
        raise NotOneSemisimple("σ is not 1-semisimple; the Z-case reduction does not apply")
    config = config or H1Config()
    return are_sigma_conjugate(t1, t2, sigma, restarts=config.restarts, seed=config.seed,
                               witness_tol=config.witness_tol)


def torus_h1_Z(sigma: Automorphism) -> dict:
    """H¹(Z, T^k) for a lattice automorphism, exactly.

    The answer is the torus R^k / ((1 − M)R^k + Z^k). Returned as its
    dimension together with the integer characters y (rows) whose values
    y·θ/2π mod 1 are complete invariants of a class.
    """
    if sigma.kind != LATTICE:
        raise UnsupportedKind("exact classification needs a lattice automorphism")
    if not is_one_semisimple(sigma):
        raise NotOneSemisimple("σ is not 1-semisimple")
    k = sigma.group.param
    M = sigma.matrix.tolist()
    A = [[int(i == j) - M[i][j] for j in range(k)] for i in range(k)]
    chars = lattice.left_kernel_basis(A) if k else []
    return {"dimension": len(chars), "characters": chars}


def torus_class_invariant(sigma: Automorphism, t: MatrixLike) -> np.ndarray:
    chars = torus_h1_Z(sigma)["characters"]
    theta = np.angle(np.diag(as_matrix(t))) / (2 * np.pi)
    if not chars:
        return np.zeros(0)
    return np.mod(np.array(chars, dtype=float) @ theta, 1.0)
