"""Maximal torus T of the identity component of G^σ and its torsion points.

The torus is found as the centralizer of a generic element of the fixed
subalgebra. Its Lie algebra t is then simultaneously diagonalized,

    H = V · diag(i·K h) · V*,

with an integer weight matrix K (N x r), so that the exponential lattice
{h : exp(h) = e} becomes 2π·{h : K h ∈ Z^N}, an exact integer problem solved
by Smith normal form. Points of T are addressed by lattice coordinates
y ∈ R^r / Z^r; the n-torsion points are y ∈ (1/n)Z^r / Z^r.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np
import scipy.linalg

from . import lattice
from .automorphism import Automorphism, is_one_semisimple, null_space, numerical_rank
from .errors import (
    EnumerationTooLarge,
    GenericityFailure,
    IllConditioned,
    NotOneSemisimple,
    WeightReconstructionFailed,
)
from .group_model import (
    AlgebraElement,
    GroupDescriptor,
    GroupElement,
    algebra_coords,
    bracket,
    realify,
)

MAX_TORSION_POINTS = 10**6
GENERIC_RETRIES = 10
WEIGHT_TOL = 1e-6
MAX_DENOMINATOR = 10**6


@dataclass(frozen=True, eq=False)
class LatticeData:
    """Output of :func:`exponential_lattice`."""

    t_basis: np.ndarray          # (r, N, N), weights given by weight_matrix
    weight_matrix: list          # N x r integers
    lattice_generators: list     # r x r Fractions; columns generate Λ / 2π
    eigvecs: np.ndarray          # V
    lattice_weights: list        # N x r integers, weights in lattice coordinates
    char_matrix: list            # N x N unimodular, char_matrix @ lattice_weights = [I; 0]
    blocks: list                 # joint eigenspaces of t, as lists of ambient indices

    @property
    def lattice_basis(self) -> np.ndarray:
        r = len(self.lattice_generators)
        if r == 0:
            return np.zeros((0, 0))
        return 2 * np.pi * np.array([[float(x) for x in row] for row in self.lattice_generators])


@dataclass(frozen=True, eq=False)
class FixedTorus:
    group: GroupDescriptor
    sigma: Automorphism
    lat: LatticeData
    t_coords: np.ndarray  # (r, d) algebra coordinates of t_basis

    @property
    def rank(self) -> int:
        return self.lat.t_basis.shape[0]

    @property
    def t_basis(self) -> np.ndarray:
        return self.lat.t_basis

    @property
    def weight_matrix(self) -> list:
        return self.lat.weight_matrix

    @property
    def lattice_basis(self) -> np.ndarray:
        return self.lat.lattice_basis

    @property
    def eigvecs(self) -> np.ndarray:
        return self.lat.eigvecs

    @cached_property
    def _lattice_weights_f(self) -> np.ndarray:
        N = self.group.ambient_size
        return np.array(self.lat.lattice_weights, dtype=float).reshape(N, self.rank)

    @cached_property
    def _char_f(self) -> np.ndarray:
        N = self.group.ambient_size
        return np.array(self.lat.char_matrix, dtype=float).reshape(N, N)

    @cached_property
    def _t_real(self) -> np.ndarray:
        if self.rank == 0:
            return np.zeros((2 * self.group.ambient_size**2, 0))
        return np.stack([realify(H) for H in self.t_basis], axis=1)

    @cached_property
    def lattice_basis_algebra(self) -> np.ndarray:
        """(r, N, N): the Lie algebra elements h_j with exp(2π s h_j) running once around T."""
        V = self.eigvecs
        K = self._lattice_weights_f
        return np.array([V @ np.diag(1j * K[:, j]) @ V.conj().T for j in range(self.rank)]
                        ).reshape(self.rank, *V.shape)

    def point(self, y) -> np.ndarray:
        """exp of lattice coordinates y (a full turn per unit)."""
        y = np.asarray([float(v) for v in y], dtype=float).reshape(self.rank)
        V = self.eigvecs
        phases = self._lattice_weights_f @ y if self.rank else np.zeros(V.shape[0])
        return (V * np.exp(2j * np.pi * phases)) @ V.conj().T

    def log_coords(self, M: np.ndarray) -> tuple[np.ndarray, float]:
        """Lattice coordinates in [0, 1)^r of the torus point nearest M, and ‖point − M‖."""
        V = self.eigvecs
        D = V.conj().T @ np.asarray(M) @ V
        phi = np.angle(np.diag(D)) / (2 * np.pi)
        u = self._char_f @ phi
        y = np.mod(u[: self.rank], 1.0)
        return y, float(np.linalg.norm(self.point(y) - M))

    def contains_point(self, M: np.ndarray, tol: float = 1e-7) -> tuple[bool, float]:
        _, resid = self.log_coords(M)
        return resid <= tol, resid

    def algebra_residual(self, X: np.ndarray) -> float:
        """Distance of an algebra matrix from t (Frobenius)."""
        v = realify(X)
        if self.rank == 0:
            return float(np.linalg.norm(v))
        c, *_ = np.linalg.lstsq(self._t_real, v, rcond=None)
        return float(np.linalg.norm(self._t_real @ c - v))

    def project_out(self, X: np.ndarray) -> np.ndarray:
        """Component of X orthogonal to t, realified."""
        v = realify(X)
        if self.rank == 0:
            return v
        c, *_ = np.linalg.lstsq(self._t_real, v, rcond=None)
        return v - self._t_real @ c


@dataclass(frozen=True, eq=False)
class TorsionPoint:
    index: int
    coords: tuple  # Fractions in [0, 1), denominators dividing n
    element: GroupElement


# --------------------------------------------------------------------------


def fixed_subalgebra(sigma: Automorphism) -> list[AlgebraElement]:
    """Orthonormal (in coordinates) basis of ker(1 - dσ)."""
    if not is_one_semisimple(sigma):
        raise NotOneSemisimple("ker(1 - dσ) != ker((1 - dσ)^2)")
    G = sigma.group
    D = sigma.differential
    if G.dim == 0:
        return []
    ns = null_space(np.eye(G.dim) - D)
    return [AlgebraElement(ns[:, k].real.copy(), np.tensordot(ns[:, k].real, G.algebra_basis, axes=1))
            for k in range(ns.shape[1])]


def _scale(mats) -> float:
    return max([1.0] + [float(np.linalg.norm(m)) for m in mats])


def _normalize_phases(V: np.ndarray) -> np.ndarray:
    V = V.copy()
    for j in range(V.shape[1]):
        col = V[:, j]
        mags = np.round(np.abs(col), 9)
        k = int(np.argmax(mags))
        V[:, j] = col * np.exp(-1j * np.angle(col[k]))
    return V


def _joint_blocks(W: np.ndarray) -> list[list[int]]:
    blocks: list[list[int]] = []
    for k in range(W.shape[0]):
        for b in blocks:
            if np.max(np.abs(W[b[0]] - W[k]), initial=0.0) < WEIGHT_TOL:
                b.append(k)
                break
        else:
            blocks.append([k])
    return blocks


def exponential_lattice(G: GroupDescriptor, t_matrices, seed=0) -> LatticeData:
    """Integer weights and exponential lattice for a commuting family t.

    Raises WeightReconstructionFailed when weights are not rational with
    denominator <= 10^6 (t does not exponentiate to a closed torus).
    """
    N = G.ambient_size
    Hs = [np.asarray(H, dtype=complex) for H in t_matrices]
    r = len(Hs)
    if r == 0:
        return LatticeData(np.zeros((0, N, N), dtype=complex), [[] for _ in range(N)], [],
                           np.eye(N, dtype=complex), [[] for _ in range(N)],
                           lattice.identity(N), [list(range(N))] if N else [])
    rng = np.random.default_rng([int(seed), 0x7A])
    scale = _scale(Hs)
    for _ in range(GENERIC_RETRIES):
        c = rng.standard_normal(r)
        H = sum(ci * Hi for ci, Hi in zip(c, Hs))
        _, V = np.linalg.eigh(-1j * H)
        ok = True
        for Hi in Hs:
            Di = V.conj().T @ Hi @ V
            if np.linalg.norm(Di - np.diag(np.diag(Di))) > 1e-8 * scale:
                ok = False
                break
        if ok:
            break
    else:
        raise GenericityFailure("could not simultaneously diagonalize t")
    V = _normalize_phases(V)
    W = np.array([np.diag(V.conj().T @ Hi @ V).imag for Hi in Hs]).T  # N x r

    _, _, piv = scipy.linalg.qr(W.T, pivoting=True)
    S = sorted(piv[:r])
    WS = W[S]
    if np.linalg.cond(WS) > 1e8:
        raise WeightReconstructionFailed("weights are rank deficient")
    C = W @ np.linalg.inv(WS)
    C_rat = []
    for row in C:
        rat_row = []
        for x in row:
            f = lattice.rational_reconstruct(float(x), MAX_DENOMINATOR, WEIGHT_TOL)
            if f is None:
                raise WeightReconstructionFailed(f"weight ratio {x!r} is not a small rational")
            rat_row.append(f)
        C_rat.append(rat_row)
    den = lattice.lcm([f.denominator for row in C_rat for f in row])
    K0 = [[int(f * den) for f in row] for row in C_rat]

    Dsnf, Pm, Q = lattice.smith_normal_form(K0)
    d = lattice.diagonal(Dsnf)
    if len(d) < r or any(x == 0 for x in d[:r]):
        raise WeightReconstructionFailed("weight matrix is not of full rank")
    gens = [[Fraction(Q[i][j], d[j]) for j in range(r)] for i in range(r)]
    K_red = [[sum(Fraction(K0[k][i]) * gens[i][j] for i in range(r)) for j in range(r)]
             for k in range(N)]
    if any(x.denominator != 1 for row in K_red for x in row):
        raise WeightReconstructionFailed("reduced weights are not integral")
    K_red = [[int(x) for x in row] for row in K_red]

    K0f = np.array(K0, dtype=float)
    basis = np.array([V @ np.diag(1j * K0f[:, m]) @ V.conj().T for m in range(r)])
    return LatticeData(basis, K0, gens, V, K_red, Pm, _joint_blocks(W))


def torus_from_basis(sigma: Automorphism, t_matrices, seed=0, check_maximal: bool = True
                     ) -> FixedTorus:
    """Build a FixedTorus from explicit commuting σ-fixed algebra elements."""
    G = sigma.group
    Hs = [np.asarray(H, dtype=complex) for H in t_matrices]
    scale = _scale(Hs)
    for i, A in enumerate(Hs):
        for B in Hs[i + 1:]:
            if np.linalg.norm(bracket(A, B)) > 1e-10 * scale**2:
                raise GenericityFailure("torus basis does not commute")
    D = sigma.differential
    for H in Hs:
        c, resid = algebra_coords(G, H)
        if resid > 1e-9 or np.linalg.norm(D @ c - c) > 1e-9 * scale:
            raise GenericityFailure("torus basis is not fixed by dσ")
    lat = exponential_lattice(G, Hs, seed)
    t_coords = (np.array([algebra_coords(G, H)[0] for H in lat.t_basis])
                if len(Hs) else np.zeros((0, G.dim)))
    T = FixedTorus(G, sigma, lat, t_coords)
    if check_maximal and centralizer_dimension(T) != T.rank:
        raise GenericityFailure("t is not maximal abelian in the fixed subalgebra")
    return T


def centralizer_dimension(T: FixedTorus) -> int:
    """dim of the centralizer of t inside the fixed subalgebra."""
    F = fixed_subalgebra(T.sigma)
    if not F:
        return 0
    if T.rank == 0:
        return len(F)
    rows = []
    for H in T.t_basis:
        rows.append(np.stack([realify(bracket(H, Y.matrix)) for Y in F], axis=1))
    A = np.vstack(rows)
    return len(F) - numerical_rank(A)


def maximal_torus_in_fixed(sigma: Automorphism, seed=0) -> FixedTorus:
    """Centralizer of a seeded generic element of the fixed subalgebra.

    Retries with a fresh draw when the centralizer is not abelian or a rank
    decision is ambiguous; raises GenericityFailure after 10 attempts.
    """
    G = sigma.group
    F = fixed_subalgebra(sigma)
    if not F:
        return torus_from_basis(sigma, [], seed)
    Fm = [Y.matrix for Y in F]
    rng = np.random.default_rng([int(seed), 0x70])
    for _ in range(GENERIC_RETRIES):
        c = rng.standard_normal(len(F))
        X = sum(ci * Y for ci, Y in zip(c, Fm))
        A = np.stack([realify(bracket(X, Y)) for Y in Fm], axis=1)
        try:
            ns = null_space(A)
        except IllConditioned:
            continue
        cent = [sum(ns[i, k].real * Fm[i] for i in range(len(Fm))) for k in range(ns.shape[1])]
        scale = _scale(cent)
        abelian = all(np.linalg.norm(bracket(a, b)) < 1e-9 * scale**2
                      for i, a in enumerate(cent) for b in cent[i + 1:])
        if not abelian:
            continue
        try:
            return torus_from_basis(sigma, cent, seed)
        except (GenericityFailure, IllConditioned):
            continue
    raise GenericityFailure(f"no generic element found in 𝔤^σ after {GENERIC_RETRIES} draws")


# --------------------------------------------------------------------------
# torsion


def torsion_points(T: FixedTorus, n: int) -> list[TorsionPoint]:
    """All n^r points of E_n(T), lexicographic in lattice coordinates."""
    if n < 1:
        raise ValueError("n must be >= 1")
    r = T.rank
    if n**r > MAX_TORSION_POINTS:
        raise EnumerationTooLarge(f"{n}^{r} torsion points exceed {MAX_TORSION_POINTS}")
    out = []
    for idx, k in enumerate(itertools.product(range(n), repeat=r)):
        coords = tuple(Fraction(kj, n) for kj in k)
        out.append(TorsionPoint(idx, coords, GroupElement(T.point(coords), T.group)))
    return out


def torsion_index(T: FixedTorus, n: int, M: np.ndarray) -> tuple[int, float]:
    """Index in :func:`torsion_points` order of the n-torsion point nearest M."""
    y, _ = T.log_coords(M)
    k = np.mod(np.rint(n * y).astype(int), n)
    idx = 0
    for kj in k:
        idx = idx * n + int(kj)
    resid = float(np.linalg.norm(T.point([Fraction(int(kj), n) for kj in k]) - M))
    return idx, resid
