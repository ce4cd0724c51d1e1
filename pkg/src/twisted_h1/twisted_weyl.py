"""The twisted Weyl group W = N_σ(T)/Z_σ(T) through its action on E_n(T).

W is never built abstractly. Elements of N_σ(T) are searched for, each one is
reduced to the permutation it induces on the torsion points, and duplicate
permutations are dropped; two elements of N_σ(T) act identically on T exactly
when they differ by Z_σ(T), so this is the quotient.

Search has three phases:

1. a fixed catalog (permutation, signed permutation and {±1, ±i}-diagonal
   matrices, plus the torsion points themselves);
2. for every permutation of the joint eigenspaces of t that preserves the
   weight lattice, a least-squares solve for the remaining diagonal phases
   in the eigenbasis of T;
3. seeded random multi-start least squares over all of G.

Completeness is not claimed by the search. It is certified afterwards by
agreement with the independent σ-conjugacy oracle.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.linalg
from scipy.optimize import least_squares

from . import lattice
from .automorphism import Automorphism
from .errors import ClosureExplosion
from .fixed_torus import FixedTorus, TorsionPoint, torsion_index
from .group_model import (
    GroupDescriptor,
    MatrixLike,
    as_matrix,
    contains,
    membership_penalties,
    random_element,
    realify,
)
from .twisted_conjugacy import CONJUGATE, NOT_CONJUGATE, UNDECIDED, ConjugacyDecision

MEMBER_TOL = 1e-7
GOLDEN = (1 + 5**0.5) / 2
MAX_GROUP_ORDER = 10**6
CATALOG_CAP = 5000
PHASE_STARTS = 6


@dataclass(frozen=True, eq=False)
class WeylGenerator:
    g: np.ndarray
    permutation: tuple
    source: str = ""


@dataclass
class TwistedWeylGroup:
    generators: list
    permutation_group_order: int
    orbit_partition: list          # list of sorted index lists
    saturated: bool
    oracle_partition: list = field(default_factory=list)
    oracle_decisions: dict = field(default_factory=dict)
    tree_edges: list = field(default_factory=list)  # (src, dst, witness) with τ_w(t_src) = t_dst
    researched: bool = False


# --------------------------------------------------------------------------
# membership


def _tau(g, h, sigma):
    return g @ h @ sigma(g).conj().T


def is_in_Zsigma(g: MatrixLike, T: FixedTorus, sigma: Automorphism) -> tuple[bool, float]:
    """τ_g fixes T pointwise: tested on exp(s·H_i), s ∈ {1, 1/φ}, plus σ(g) = g."""
    gm = as_matrix(g)
    resid = float(np.linalg.norm(sigma(gm) - gm))
    for H in T.t_basis:
        for s in (1.0, 1.0 / GOLDEN):
            t = scipy.linalg.expm(s * H)
            resid = max(resid, float(np.linalg.norm(_tau(gm, t, sigma) - t)))
    return resid <= MEMBER_TOL, resid


def is_in_Nsigma(g: MatrixLike, T: FixedTorus, sigma: Automorphism) -> tuple[bool, float]:
    """τ_g maps T onto T.

    Uses τ_g(t) = (g t g⁻¹)·(g σ(g)⁻¹): g σ(g)⁻¹ must lie in T and Ad(g)
    must preserve t.
    """
    gm = as_matrix(g)
    c = gm @ sigma(gm).conj().T
    _, resid = T.contains_point(c)
    gi = gm.conj().T
    for H in T.t_basis:
        scale = max(1.0, float(np.linalg.norm(H)))
        resid = max(resid, T.algebra_residual(gm @ H @ gi) / scale)
    return resid <= MEMBER_TOL, resid


# --------------------------------------------------------------------------
# induced permutations


def induced_permutation(g: np.ndarray, T: FixedTorus, sigma: Automorphism,
                        points: list[TorsionPoint], n: int) -> Optional[tuple]:
    """Permutation k ↦ index of τ_g(t_k), or None if g does not act on E_n(T)."""
    perm = []
    for p in points:
        idx, resid = torsion_index(T, n, _tau(g, p.element.matrix, sigma))
        if resid > MEMBER_TOL:
            return None
        perm.append(idx)
    if len(set(perm)) != len(perm):
        return None
    return tuple(perm)


# --------------------------------------------------------------------------
# search phases


def _coerce(G: GroupDescriptor, M: np.ndarray) -> Optional[np.ndarray]:
    N = G.ambient_size
    if G.family == "SU":
        det = np.linalg.det(M)
        M = M * np.exp(-1j * np.angle(det) / N)
    elif G.family == "SO":
        if np.linalg.norm(M.imag) > 0:
            return None
    return M if contains(G, M)[0] else None


def catalog(G: GroupDescriptor, T: FixedTorus, points: list[TorsionPoint]) -> list[np.ndarray]:
    """Structured candidates: (signed) permutation matrices, {±1, ±i} diagonals, torsion points."""
    N = G.ambient_size
    raw = []
    if N <= 5:
        for perm in itertools.permutations(range(N)):
            P = np.eye(N, dtype=complex)[list(perm)]
            for signs in itertools.product((1, -1), repeat=N):
                raw.append(P * np.array(signs))
        for diag in itertools.product((1, 1j, -1, -1j), repeat=N):
            raw.append(np.diag(np.array(diag, dtype=complex)))
    raw.extend(p.element.matrix for p in points)
    out = []
    for M in raw[:CATALOG_CAP]:
        c = _coerce(G, M)
        if c is not None:
            out.append(c)
    return out


def _torus_residual_vector(T: FixedTorus, c: np.ndarray) -> np.ndarray:
    """Smooth residual vanishing exactly when c ∈ T."""
    V = T.eigvecs
    D = V.conj().T @ c @ V
    off = D - np.diag(np.diag(D))
    d = np.diag(D)
    dn = d / np.maximum(np.abs(d), 1e-300)
    chars = []
    for row in T.lat.char_matrix[T.rank:]:
        chi = np.prod(dn ** np.array(row, dtype=float))
        chars.append(chi - 1.0)
    return np.concatenate([realify(off), realify(np.array(chars, dtype=complex))])


def _block_permutations(T: FixedTorus):
    """Block permutations of the joint eigenspaces that preserve the weight span."""
    blocks = T.lat.blocks
    N = T.group.ambient_size
    K = T.lat.weight_matrix
    r = T.rank
    sizes = [len(b) for b in blocks]
    for perm in itertools.permutations(range(len(blocks))):
        if any(sizes[i] != sizes[perm[i]] for i in range(len(blocks))):
            continue
        amb = [0] * N
        for b, pb in zip(blocks, perm):
            for k, k2 in zip(b, blocks[pb]):
                amb[k2] = k
        if r:
            permuted = [K[amb[k]] for k in range(N)]
            stacked = [K[k] + permuted[k] for k in range(N)]
            if lattice.rank(stacked) != r:
                continue
        Pi = np.zeros((N, N), dtype=complex)
        for k2, k in enumerate(amb):
            Pi[k2, k] = 1.0
        yield Pi


def _phase_search(G, T, sigma, rng, starts):
    V = T.eigvecs
    N = G.ambient_size
    found = []
    if N > 6:
        return found
    for Pi in _block_permutations(T):
        base = V @ Pi

        def residual(psi, base=base):
            g = (base * np.exp(1j * psi)) @ V.conj().T
            c = g @ sigma(g).conj().T
            return np.concatenate([_torus_residual_vector(T, c), membership_penalties(G, g)])

        for _ in range(starts):
            psi0 = rng.uniform(0, 2 * np.pi, N)
            sol = least_squares(residual, psi0, method="trf", xtol=1e-15, ftol=1e-15,
                                gtol=1e-15, max_nfev=400)
            g = (base * np.exp(1j * sol.x)) @ V.conj().T
            found.append(g)
    return found


def _random_search(G, T, sigma, rng, budget):
    found = []
    if G.dim == 0:
        return found

    def residual(x, g0):
        g = g0 @ scipy.linalg.expm(np.tensordot(x, G.algebra_basis, axes=1))
        c = g @ sigma(g).conj().T
        gi = g.conj().T
        parts = [T.project_out(g @ H @ gi) for H in T.t_basis]
        parts.append(_torus_residual_vector(T, c))
        return np.concatenate(parts)

    for _ in range(budget):
        g0 = random_element(G, rng).matrix
        sol = least_squares(residual, np.zeros(G.dim), args=(g0,), method="trf",
                            xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=300)
        g = g0 @ scipy.linalg.expm(np.tensordot(sol.x, G.algebra_basis, axes=1))
        found.append(g)
    return found


def find_weyl_generators(sigma: Automorphism, T: FixedTorus, points: list[TorsionPoint],
                         n: int, *, budget: int = 8, seed: int = 0) -> list[WeylGenerator]:
    """Elements of N_σ(T), one per distinct induced permutation of E_n(T).

    The identity permutation (g = e) is always first. Deterministic for a
    fixed seed.
    """
    G = sigma.group
    rng = np.random.default_rng([int(seed), 0x3E])
    seen: dict[tuple, WeylGenerator] = {}

    def consider(g, source):
        ok, _ = is_in_Nsigma(g, T, sigma)
        if not ok or not contains(G, g)[0]:
            return
        perm = induced_permutation(g, T, sigma, points, n)
        if perm is not None and perm not in seen:
            seen[perm] = WeylGenerator(g, perm, source)

    consider(G.identity(), "identity")
    for M in catalog(G, T, points):
        consider(M, "catalog")
    for g in _phase_search(G, T, sigma, rng, PHASE_STARTS + budget):
        consider(g, "eigenbasis")
    for g in _random_search(G, T, sigma, rng, budget):
        consider(g, "random")
    return list(seen.values())


# --------------------------------------------------------------------------
# closure and partition


def permutation_closure(perms: list[tuple], size: int) -> int:
    """Order of the permutation group generated by perms (BFS over products)."""
    ident = tuple(range(size))
    seen = {ident}
    queue = deque([ident])
    gens = [p for p in perms if p != ident]
    while queue:
        e = queue.popleft()
        for s in gens:
            comp = tuple(s[i] for i in e)
            if comp not in seen:
                seen.add(comp)
                if len(seen) > MAX_GROUP_ORDER:
                    raise ClosureExplosion(f"group order exceeds {MAX_GROUP_ORDER}")
                queue.append(comp)
    return len(seen)


def _orbits_and_tree(generators: list[WeylGenerator], size: int):
    adj: dict[int, list] = {i: [] for i in range(size)}
    for gen in generators:
        ginv = gen.g.conj().T
        for i, j in enumerate(gen.permutation):
            if i != j:
                adj[i].append((j, gen.g))
                adj[j].append((i, ginv))
    orbit_of = [-1] * size
    orbits, edges = [], []
    for start in range(size):
        if orbit_of[start] >= 0:
            continue
        orbit_of[start] = len(orbits)
        members = [start]
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v, w in adj[u]:
                if orbit_of[v] < 0:
                    orbit_of[v] = len(orbits)
                    members.append(v)
                    edges.append((u, v, w))
                    queue.append(v)
        orbits.append(sorted(members))
    return orbits, edges


def _merge(partition: list, pairs: list) -> list:
    parent = list(range(len(partition)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in pairs:
        parent[find(a)] = find(b)
    groups: dict[int, list] = {}
    for i, cls in enumerate(partition):
        groups.setdefault(find(i), []).extend(cls)
    return sorted(sorted(g) for g in groups.values())


Oracle = Callable[[np.ndarray, np.ndarray], ConjugacyDecision]


def close_and_partition(generators: list[WeylGenerator], points: list[TorsionPoint],
                        oracle: Oracle,
                        research: Optional[Callable[[], list[WeylGenerator]]] = None
                        ) -> TwistedWeylGroup:
    """Close the generators, partition E_n(T), and cross-check with the oracle.

    ``saturated`` is True iff every pair of orbit representatives is certified
    non-conjugate by the oracle. If the oracle finds a conjugate pair that the
    generators do not connect, ``research`` (a wider generator search) is run
    once before giving up.
    """
    size = len(points)
    researched = False
    while True:
        order = permutation_closure([g.permutation for g in generators], size)
        orbits, edges = _orbits_and_tree(generators, size)
        decisions = {}
        for a, b in itertools.combinations(range(len(orbits)), 2):
            i, j = orbits[a][0], orbits[b][0]
            decisions[(i, j)] = oracle(points[i].element.matrix, points[j].element.matrix)
        missed = any(d.verdict == CONJUGATE for d in decisions.values())
        if missed and research is not None and not researched:
            extra = research()
            known = {g.permutation for g in generators}
            generators = generators + [g for g in extra if g.permutation not in known]
            researched = True
            continue
        break
    rep_pos = {orbits[a][0]: a for a in range(len(orbits))}
    conj_pairs = [(rep_pos[i], rep_pos[j]) for (i, j), d in decisions.items()
                  if d.verdict == CONJUGATE]
    oracle_partition = _merge(orbits, conj_pairs)
    saturated = all(d.verdict == NOT_CONJUGATE for d in decisions.values())
    return TwistedWeylGroup(generators, order, orbits, saturated, oracle_partition,
                            decisions, edges, researched)


def undecided_pairs(W: TwistedWeylGroup) -> list[tuple]:
    return [k for k, d in W.oracle_decisions.items() if d.verdict == UNDECIDED]


def linearized_normalizer_dimension(T: FixedTorus, sigma: Automorphism, samples: int = 4,
                                    seed: int = 0) -> int:
    """dim {X ∈ 𝔤 : (1 − Ad(t)dσ)X ∈ t for sampled t ∈ T}.

    The Lie algebra of N_σ(T); for compact G it must equal rank(T).
    """
    from .automorphism import apply_algebra, numerical_rank

    G = sigma.group
    if G.dim == 0:
        return 0
    rng = np.random.default_rng([int(seed), 0x4E])
    rows = []
    ts = [T.point(rng.uniform(0, 1, T.rank)) for _ in range(samples)]
    if T.rank:
        ts += [T.point(np.full(T.rank, 1.0 / GOLDEN))]
    else:
        ts = [G.identity()]
    for t in ts:
        ti = t.conj().T
        cols = [T.project_out(X - t @ apply_algebra(sigma, X) @ ti) for X in G.algebra_basis]
        rows.append(np.stack(cols, axis=1))
    A = np.vstack(rows)
    return G.dim - numerical_rank(A)
