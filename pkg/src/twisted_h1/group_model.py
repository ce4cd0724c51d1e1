"""Concrete compact matrix Lie groups inside a unitary ambient.

Every group is realized by N x N complex matrices. The Lie algebra is carried
as an explicit real basis of anti-Hermitian matrices, so algebra elements are
real coordinate vectors and every map between algebras is a real matrix.

Supported families are ``U(N)``, ``SU(N)``, ``SO(N)``, ``T(k)`` (the diagonal
k-torus) and block-diagonal products of these.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Union

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, ProjectionFailed, UnsupportedFamily

DEFAULT_MEMBERSHIP_TOL = 1e-9
MAX_EXP_NORM = 1e3
PROJECTION_RADIUS = 0.5

_FAMILY_ALIASES = {
    "u": "U",
    "unitary": "U",
    "su": "SU",
    "specialunitary": "SU",
    "so": "SO",
    "specialorthogonal": "SO",
    "t": "T",
    "torus": "T",
    "product": "product",
}


def realify(M: np.ndarray) -> np.ndarray:
    """Flatten a complex array into the real vector (Re, Im)."""
    M = np.asarray(M)
    return np.concatenate([M.real.ravel(), M.imag.ravel()])


@dataclass(frozen=True, eq=False)
class GroupDescriptor:
    """A compact matrix group and its Lie algebra basis.

    ``algebra_basis`` has shape ``(d, N, N)``; each slice is anti-Hermitian.
    For products, ``factors`` lists the blocks in ambient order.
    """

    family: str
    param: int
    ambient_size: int
    algebra_basis: np.ndarray
    membership_tol: float = DEFAULT_MEMBERSHIP_TOL
    factors: tuple["GroupDescriptor", ...] = field(default=())

    @property
    def dim(self) -> int:
        return self.algebra_basis.shape[0]

    @property
    def name(self) -> str:
        if self.family == "product":
            return " x ".join(f.name for f in self.factors)
        return f"{self.family}({self.param})"

    def __repr__(self) -> str:
        return f"GroupDescriptor({self.name}, N={self.ambient_size}, d={self.dim})"

    @cached_property
    def _real_basis(self) -> np.ndarray:
        # columns are realified basis matrices
        if self.dim == 0:
            return np.zeros((2 * self.ambient_size**2, 0))
        return np.stack([realify(X) for X in self.algebra_basis], axis=1)

    @cached_property
    def _coord_solver(self) -> np.ndarray:
        return np.linalg.pinv(self._real_basis)

    @property
    def block_slices(self) -> list[slice]:
        if self.family != "product":
            return [slice(0, self.ambient_size)]
        out, start = [], 0
        for f in self.factors:
            out.append(slice(start, start + f.ambient_size))
            start += f.ambient_size
        return out

    def identity(self) -> np.ndarray:
        return np.eye(self.ambient_size, dtype=complex)


@dataclass(frozen=True, eq=False)
class GroupElement:
    matrix: np.ndarray
    group: GroupDescriptor

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.matrix @ as_matrix(other), self.group)

    def inverse(self) -> "GroupElement":
        return GroupElement(self.matrix.conj().T, self.group)


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    coords: np.ndarray
    matrix: np.ndarray


MatrixLike = Union[np.ndarray, GroupElement, AlgebraElement, Sequence]


def as_matrix(x: MatrixLike) -> np.ndarray:
    if isinstance(x, (GroupElement, AlgebraElement)):
        return x.matrix
    return np.asarray(x, dtype=complex)


# --------------------------------------------------------------------------
# basis construction


def _unit(N: int, j: int, k: int) -> np.ndarray:
    E = np.zeros((N, N), dtype=complex)
    E[j, k] = 1.0
    return E


def _offdiagonal_basis(N: int, real_only: bool) -> list[np.ndarray]:
    out = []
    for j in range(N):
        for k in range(j + 1, N):
            out.append(_unit(N, j, k) - _unit(N, k, j))
            if not real_only:
                out.append(1j * (_unit(N, j, k) + _unit(N, k, j)))
    return out


def _basis_for(family: str, n: int) -> list[np.ndarray]:
    if family == "U":
        return [1j * _unit(n, k, k) for k in range(n)] + _offdiagonal_basis(n, False)
    if family == "SU":
        diag = [1j * (_unit(n, k, k) - _unit(n, k + 1, k + 1)) for k in range(n - 1)]
        return diag + _offdiagonal_basis(n, False)
    if family == "SO":
        return _offdiagonal_basis(n, True)
    if family == "T":
        return [1j * _unit(n, k, k) for k in range(n)]
    raise UnsupportedFamily(family)


def _normalize_family(family: str) -> str:
    key = str(family).replace("_", "").replace(" ", "").lower()
    if key not in _FAMILY_ALIASES:
        raise UnsupportedFamily(f"unsupported group family {family!r}")
    return _FAMILY_ALIASES[key]


def make_group(family: str, params, membership_tol: float = DEFAULT_MEMBERSHIP_TOL
               ) -> GroupDescriptor:
    """Build a group descriptor.

    ``params`` is the integer N (or k for tori); for ``"product"`` it is a
    list of descriptors or ``(family, params)`` pairs.

    >>> make_group("SU", 2).dim
    3
    """
    fam = _normalize_family(family)
    if fam == "product":
        factors = tuple(
            p if isinstance(p, GroupDescriptor) else make_group(p[0], p[1], membership_tol)
            for p in params
        )
        if not factors:
            raise UnsupportedFamily("empty product")
        N = sum(f.ambient_size for f in factors)
        blocks = []
        start = 0
        for f in factors:
            for X in f.algebra_basis:
                Y = np.zeros((N, N), dtype=complex)
                Y[start:start + f.ambient_size, start:start + f.ambient_size] = X
                blocks.append(Y)
            start += f.ambient_size
        basis = np.array(blocks) if blocks else np.zeros((0, N, N), dtype=complex)
        return GroupDescriptor("product", len(factors), N, basis, membership_tol, factors)

    n = int(params)
    if fam == "T":
        if n < 0:
            raise UnsupportedFamily("torus rank must be >= 0")
    elif n < 1:
        raise UnsupportedFamily(f"{fam}(N) needs N >= 1")
    basis = _basis_for(fam, n)
    arr = np.array(basis) if basis else np.zeros((0, n, n), dtype=complex)
    return GroupDescriptor(fam, n, n, arr, membership_tol)


def expected_dim(G: GroupDescriptor) -> int:
    n = G.param
    if G.family == "U":
        return n * n
    if G.family == "SU":
        return n * n - 1
    if G.family == "SO":
        return n * (n - 1) // 2
    if G.family == "T":
        return n
    return sum(expected_dim(f) for f in G.factors)


# --------------------------------------------------------------------------
# algebra coordinates


def algebra_coords(G: GroupDescriptor, X: MatrixLike) -> tuple[np.ndarray, float]:
    """Least-squares coordinates of X in the algebra basis, with the residual."""
    M = as_matrix(X)
    if M.shape != (G.ambient_size, G.ambient_size):
        raise DimensionMismatch(f"expected {G.ambient_size}x{G.ambient_size}, got {M.shape}")
    v = realify(M)
    c = G._coord_solver @ v
    resid = float(np.linalg.norm(G._real_basis @ c - v))
    return c, resid


def algebra_matrix(G: GroupDescriptor, coords) -> np.ndarray:
    c = np.asarray(coords, dtype=float)
    if c.shape != (G.dim,):
        raise DimensionMismatch(f"expected {G.dim} coordinates, got shape {c.shape}")
    if G.dim == 0:
        return np.zeros((G.ambient_size, G.ambient_size), dtype=complex)
    return np.tensordot(c, G.algebra_basis, axes=1)


def algebra_element(G: GroupDescriptor, coords) -> AlgebraElement:
    c = np.asarray(coords, dtype=float)
    return AlgebraElement(c, algebra_matrix(G, c))


def bracket(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    return X @ Y - Y @ X


# --------------------------------------------------------------------------
# membership


def membership_penalties(G: GroupDescriptor, M: np.ndarray) -> np.ndarray:
    """Real vector of family-specific constraint violations (unitarity excluded).

    Smooth in M away from singular matrices, so least-squares solvers can use
    it directly.
    """
    fam = G.family
    if fam == "U":
        return np.zeros(0)
    if fam == "SU":
        d = np.linalg.det(M) - 1.0
        return np.array([d.real, d.imag])
    if fam == "SO":
        d = np.linalg.det(M) - 1.0
        return np.concatenate([M.imag.ravel(), [d.real, d.imag]])
    if fam == "T":
        off = M - np.diag(np.diag(M))
        return realify(off)
    parts = []
    slices = G.block_slices
    mask = np.ones(M.shape, dtype=bool)
    for f, s in zip(G.factors, slices):
        mask[s, s] = False
        parts.append(membership_penalties(f, M[s, s]))
    parts.append(realify(M[mask]))
    return np.concatenate(parts)


def contains(G: GroupDescriptor, M: MatrixLike) -> tuple[bool, float]:
    """Membership test: ``(residual <= G.membership_tol, residual)``."""
    A = as_matrix(M)
    if A.shape != (G.ambient_size, G.ambient_size):
        raise DimensionMismatch(f"expected {G.ambient_size}x{G.ambient_size}, got {A.shape}")
    resid = float(np.linalg.norm(A.conj().T @ A - np.eye(G.ambient_size)))
    resid += float(np.linalg.norm(membership_penalties(G, A)))
    return resid <= G.membership_tol, resid


def element(G: GroupDescriptor, M: MatrixLike, tol: float | None = None) -> GroupElement:
    """Wrap a matrix as a group element after checking membership."""
    A = as_matrix(M).astype(complex)
    ok, resid = contains(G, A)
    if not ok and (tol is None or resid > tol):
        raise ProjectionFailed(f"matrix is not in {G.name} (residual {resid:.3e})")
    return GroupElement(A, G)


# --------------------------------------------------------------------------
# exponential, sampling, projection


def exp_map(G: GroupDescriptor, X) -> GroupElement:
    """Matrix exponential of an algebra element (coordinates or matrix)."""
    if isinstance(X, AlgebraElement):
        M = X.matrix
    else:
        arr = np.asarray(X)
        M = algebra_matrix(G, arr) if arr.ndim == 1 else arr.astype(complex)
    if np.linalg.norm(M) > MAX_EXP_NORM:
        raise ValueError(f"algebra element norm {np.linalg.norm(M):.3e} exceeds {MAX_EXP_NORM}")
    if G.ambient_size == 0:
        return GroupElement(np.zeros((0, 0), dtype=complex), G)
    return GroupElement(scipy.linalg.expm(M), G)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_algebra_coords(G: GroupDescriptor, seed, scale: float = 1.0) -> np.ndarray:
    return scale * _rng(seed).standard_normal(G.dim)


def random_element(G: GroupDescriptor, seed, scale: float = 1.5) -> GroupElement:
    """Seeded sample exp(X1) exp(X2) with Gaussian X1, X2 in the algebra.

    This is not Haar measure; it has full support, which is all multi-start
    search and genericity tests need.
    """
    rng = _rng(seed)
    g = exp_map(G, random_algebra_coords(G, rng, scale)).matrix
    h = exp_map(G, random_algebra_coords(G, rng, scale)).matrix
    return GroupElement(g @ h, G)


def _polar(M: np.ndarray) -> np.ndarray:
    U, _, Vh = np.linalg.svd(M)
    return U @ Vh


def _project_simple(G: GroupDescriptor, M: np.ndarray) -> np.ndarray:
    fam = G.family
    N = G.ambient_size
    if N == 0:
        return M.astype(complex)
    if fam == "T":
        d = np.diag(M)
        if np.any(np.abs(d) < 1e-12):
            raise ProjectionFailed("diagonal entry vanishes; no torus element nearby")
        return np.diag(d / np.abs(d)).astype(complex)
    if fam == "SO":
        U, _, Vh = np.linalg.svd(M.real)
        if np.linalg.det(U @ Vh) < 0:
            U[:, -1] *= -1
        return (U @ Vh).astype(complex)
    P = _polar(M)
    if fam == "SU":
        phase = np.angle(np.linalg.det(P))
        P = P * np.exp(-1j * phase / N)
    return P


def project_to_group(G: GroupDescriptor, M: MatrixLike) -> GroupElement:
    """Nearest-point style retraction onto G.

    Polar factor first, then the family correction (determinant phase for SU,
    realification for SO, diagonal extraction for tori).
    """
    A = as_matrix(M)
    if A.shape != (G.ambient_size, G.ambient_size):
        raise DimensionMismatch(f"expected {G.ambient_size}x{G.ambient_size}, got {A.shape}")
    if G.family == "product":
        P = np.zeros_like(A, dtype=complex)
        for f, s in zip(G.factors, G.block_slices):
            P[s, s] = _project_simple(f, A[s, s])
    else:
        P = _project_simple(G, A)
    dist = float(np.linalg.norm(P - A))
    if dist > PROJECTION_RADIUS:
        raise ProjectionFailed(f"matrix is {dist:.3f} away from {G.name}")
    ok, resid = contains(G, P)
    if not ok:
        raise ProjectionFailed(f"projection left residual {resid:.3e}")
    return GroupElement(P, G)
