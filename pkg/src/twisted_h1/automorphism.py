"""Automorphisms of matrix groups in three concrete realizations.

* ``hol``:     σ(g) = B g B⁻¹
* ``antihol``: σ(g) = B ḡ B⁻¹ (entrywise conjugation, then conjugation by B)
* ``lattice``: on a torus T(k), exp(i·diag θ) ↦ exp(i·diag(Mθ)) for M in GL(k, Z)

The differential dσ is a real d x d matrix in the group's algebra basis.
"""
from __future__ import annotations

import contextlib
import contextvars
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import sympy

from . import lattice
from .errors import (
    CompositionError,
    DifferentialNotInAlgebra,
    GroupMismatch,
    IllConditioned,
    InvalidAutomorphism,
    OrderUndetermined,
)
from .group_model import (
    GroupDescriptor,
    GroupElement,
    MatrixLike,
    algebra_coords,
    as_matrix,
    contains,
    random_element,
)

HOL, ANTIHOL, LATTICE = "hol", "antihol", "lattice"
MAX_ORDER = 24
RANK_RTOL = 1e-8
INFINITE = math.inf


@dataclass(frozen=True, eq=False)
class Automorphism:
    kind: str
    matrix: np.ndarray  # B (complex, unitary) or M (integer)
    group: GroupDescriptor

    @property
    def B(self) -> np.ndarray:
        return self.matrix

    def __repr__(self) -> str:
        return f"Automorphism({self.kind}, {self.group.name})"

    @cached_property
    def differential(self) -> np.ndarray:
        return differential(self)

    def __call__(self, g: MatrixLike) -> np.ndarray:
        return _apply_matrix(self, as_matrix(g))

    def __matmul__(self, other: "Automorphism") -> "Automorphism":
        return compose(self, other)


def make_automorphism(G: GroupDescriptor, kind: str, matrix, *, validate: bool = True,
                      seed: int = 0) -> Automorphism:
    kind = kind.lower()
    if kind not in (HOL, ANTIHOL, LATTICE):
        raise InvalidAutomorphism(f"unknown automorphism kind {kind!r}")
    if kind == LATTICE:
        if G.family != "T":
            raise InvalidAutomorphism("lattice automorphisms are defined on tori only")
        M = np.array(lattice.to_int_matrix(matrix) if np.size(matrix) else
                     np.zeros((0, 0), dtype=int), dtype=object)
        if M.shape != (G.param, G.param):
            raise InvalidAutomorphism(f"lattice matrix must be {G.param}x{G.param}")
        if abs(lattice.det(M.tolist())) != 1:
            raise InvalidAutomorphism("lattice matrix must have determinant ±1")
        sigma = Automorphism(LATTICE, M, G)
    else:
        B = np.asarray(matrix, dtype=complex)
        N = G.ambient_size
        if B.shape != (N, N):
            raise InvalidAutomorphism(f"B must be {N}x{N}")
        if np.linalg.norm(B.conj().T @ B - np.eye(N)) > 1e-10:
            raise InvalidAutomorphism("B must be unitary")
        sigma = Automorphism(kind, B, G)
    if validate:
        validate_automorphism(sigma, seed=seed)
    return sigma


def identity_automorphism(G: GroupDescriptor) -> Automorphism:
    if G.family == "T":
        return Automorphism(LATTICE, np.array(lattice.identity(G.param), dtype=object), G)
    return Automorphism(HOL, G.identity(), G)


def conjugation(G: GroupDescriptor, B=None) -> Automorphism:
    """Entrywise complex conjugation, optionally followed by Ad(B)."""
    B = G.identity() if B is None else B
    return make_automorphism(G, ANTIHOL, B)


def validate_automorphism(sigma: Automorphism, samples: int = 50, seed: int = 0) -> None:
    """Check that σ maps sampled elements into G and is multiplicative."""
    G = sigma.group
    rng = np.random.default_rng([seed, 0xA0])
    for _ in range(samples // 2):
        g = random_element(G, rng).matrix
        h = random_element(G, rng).matrix
        sg, sh, sgh = sigma(g), sigma(h), sigma(g @ h)
        for img in (sg, sh):
            ok, resid = contains(G, img)
            if not ok:
                raise InvalidAutomorphism(f"σ leaves {G.name} (residual {resid:.2e})")
        if np.linalg.norm(sgh - sg @ sh) > 1e-9:
            raise InvalidAutomorphism("σ is not a homomorphism on samples")


def _apply_matrix(sigma: Automorphism, g: np.ndarray) -> np.ndarray:
    if sigma.kind == HOL:
        B = sigma.matrix
        return B @ g @ B.conj().T
    if sigma.kind == ANTIHOL:
        B = sigma.matrix
        return B @ g.conj() @ B.conj().T
    theta = np.angle(np.diag(g))
    M = sigma.matrix.astype(float)
    return np.diag(np.exp(1j * (M @ theta))).astype(complex)


def apply(sigma: Automorphism, g: MatrixLike) -> GroupElement:
    if isinstance(g, GroupElement) and g.group is not sigma.group:
        if g.group.ambient_size != sigma.group.ambient_size or g.group.name != sigma.group.name:
            raise GroupMismatch(f"{g.group.name} vs {sigma.group.name}")
    A = as_matrix(g)
    if A.shape != (sigma.group.ambient_size,) * 2:
        raise GroupMismatch("element does not live in the automorphism's group")
    return GroupElement(_apply_matrix(sigma, A), sigma.group)


def apply_algebra(sigma: Automorphism, X: np.ndarray) -> np.ndarray:
    """dσ applied to an algebra matrix."""
    if sigma.kind == HOL:
        B = sigma.matrix
        return B @ X @ B.conj().T
    if sigma.kind == ANTIHOL:
        B = sigma.matrix
        return B @ X.conj() @ B.conj().T
    theta = np.diag(X).imag
    return np.diag(1j * (sigma.matrix.astype(float) @ theta))


def differential(sigma: Automorphism) -> np.ndarray:
    """Real d x d matrix of dσ; column j holds the coordinates of dσ(basis_j)."""
    G = sigma.group
    if sigma.kind == LATTICE:
        return sigma.matrix.astype(float)
    cols = []
    for X in G.algebra_basis:
        c, resid = algebra_coords(G, apply_algebra(sigma, X))
        if resid > 1e-8:
            raise DifferentialNotInAlgebra(f"dσ leaves the algebra (residual {resid:.2e})")
        cols.append(c)
    if not cols:
        return np.zeros((0, 0))
    return np.array(cols).T


# --------------------------------------------------------------------------
# composition and powers


def compose(s: Automorphism, t: Automorphism) -> Automorphism:
    """s ∘ t normalized into a single kind."""
    if s.group is not t.group and s.group.name != t.group.name:
        raise GroupMismatch("automorphisms act on different groups")
    G = s.group
    if s.kind == LATTICE or t.kind == LATTICE:
        if s.kind == LATTICE and t.kind == LATTICE:
            M = np.array(lattice.matmul(s.matrix.tolist(), t.matrix.tolist()), dtype=object)
            return Automorphism(LATTICE, M, G)
        raise CompositionError("cannot compose lattice and matrix automorphisms")
    B, C = s.matrix, t.matrix
    if s.kind == HOL and t.kind == HOL:
        return Automorphism(HOL, B @ C, G)
    if s.kind == HOL and t.kind == ANTIHOL:
        return Automorphism(ANTIHOL, B @ C, G)
    if s.kind == ANTIHOL and t.kind == HOL:
        return Automorphism(ANTIHOL, B @ C.conj(), G)
    return Automorphism(HOL, B @ C.conj(), G)


def power(sigma: Automorphism, r: int) -> Automorphism:
    """σ^r for r >= 0, normalized into a single kind."""
    if r < 0:
        raise ValueError("negative powers are not supported")
    if r == 0:
        if sigma.kind == LATTICE:
            return identity_automorphism(sigma.group)
        return Automorphism(HOL, sigma.group.identity(), sigma.group)
    out = sigma
    for _ in range(r - 1):
        out = compose(sigma, out)
    return out


def inner_twist(h: MatrixLike, sigma: Automorphism) -> Automorphism:
    """Inn(h) ∘ σ."""
    return compose(Automorphism(HOL, as_matrix(h), sigma.group), sigma)


# --------------------------------------------------------------------------
# order


def _cyclotomic_index(factor: sympy.Poly) -> int | None:
    deg = factor.degree()
    x = factor.gen
    for m in range(1, 2 * deg * deg + 3):
        if sympy.totient(m) == deg and sympy.Poly(sympy.cyclotomic_poly(m, x), x) == factor:
            return m
    return None


def _lattice_order(M: list[list[int]]) -> float:
    k = len(M)
    if k == 0:
        return 1
    x = sympy.Symbol("x")
    cp = sympy.Matrix(M).charpoly(x)
    _, factors = sympy.factor_list(cp.as_expr(), x)
    indices = []
    for f, _mult in factors:
        m = _cyclotomic_index(sympy.Poly(f, x))
        if m is None:
            # monic integer factor that is not cyclotomic: by Kronecker some
            # root lies off the unit circle
            return INFINITE
        indices.append(m)
    L = lattice.lcm(indices)
    I = lattice.identity(k)
    P = I
    powers = {0: I}
    for e in range(1, L + 1):
        P = lattice.matmul(M, P)
        powers[e] = P
    if powers[L] != I:
        return INFINITE  # non-diagonalizable: unipotent part
    return min(e for e in range(1, L + 1) if L % e == 0 and powers[e] == I)


def order_of(sigma: Automorphism, samples: int = 20, seed: int = 0) -> float:
    """Smallest n <= 24 with σⁿ = id, or ``math.inf``.

    Lattice maps are decided exactly from the characteristic polynomial.
    Raises OrderUndetermined when no n <= 24 works and nothing certifies
    infinite order.
    """
    if sigma.kind == LATTICE:
        return _lattice_order(sigma.matrix.tolist())
    G = sigma.group
    D = sigma.differential
    rng = np.random.default_rng([seed, 0x0D])
    pts = [random_element(G, rng).matrix for _ in range(samples)]
    P = np.eye(D.shape[0])
    images = list(pts)
    for n in range(1, MAX_ORDER + 1):
        P = D @ P
        images = [sigma(g) for g in images]
        if np.linalg.norm(P - np.eye(D.shape[0])) < 1e-9 and all(
            np.linalg.norm(a - b) < 1e-9 for a, b in zip(images, pts)
        ):
            return n
    raise OrderUndetermined(f"no n <= {MAX_ORDER} with σⁿ = id, and no infinite-order certificate")


# --------------------------------------------------------------------------
# rank decisions


_rank_rtol: contextvars.ContextVar[float] = contextvars.ContextVar("rank_rtol", default=RANK_RTOL)


@contextlib.contextmanager
def rank_tolerance(rtol: float):
    """Change the default relative rank threshold within this context (thread-local)."""
    if not rtol > 0:
        raise ValueError("rank threshold must be positive")
    token = _rank_rtol.set(float(rtol))
    try:
        yield
    finally:
        _rank_rtol.reset(token)


def numerical_rank(A: np.ndarray, rtol: float | None = None) -> int:
    """Rank by singular-value threshold rtol·max(σ_max, 1), refusing ambiguous gaps."""
    rtol = _rank_rtol.get() if rtol is None else rtol
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    smax = s[0] if s.size else 0.0
    # floor the scale at 1 so round-off in a numerically zero map is not rank
    thr = rtol * max(smax, 1.0)
    if np.any((s > thr / 10) & (s < thr * 10)):
        raise IllConditioned(f"singular value within a factor 10 of threshold {thr:.2e}")
    return int(np.sum(s > thr))


def null_space(A: np.ndarray, rtol: float | None = None) -> np.ndarray:
    """Orthonormal columns spanning ker A, with the same rank rule."""
    n = A.shape[1]
    if A.shape[0] == 0 or n == 0:
        return np.eye(n)
    r = numerical_rank(A, rtol)
    _, _, Vh = np.linalg.svd(A)
    return Vh[r:].conj().T


def is_one_semisimple(sigma: Automorphism) -> bool:
    """dim ker(1 - dσ) == dim ker((1 - dσ)^2)."""
    D = sigma.differential
    d = D.shape[0]
    if d == 0:
        return True
    A = np.eye(d) - D
    return d - numerical_rank(A) == d - numerical_rank(A @ A)
