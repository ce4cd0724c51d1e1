"""Twisted conjugation τ_g(h) = g·h·σ(g)⁻¹ and an independent σ-conjugacy oracle.

The oracle is deliberately asymmetric:

* a spectral invariant transported exactly along τ-orbits can prove two
  elements are *not* σ-conjugate;
* multi-start descent on f(g) = ‖τ_g(t₁) − t₂‖²_F can produce a witness
  proving they *are*;
* anything else is reported as undecided.

Lattice automorphisms of tori are decided exactly instead: τ acts on angles
by θ ↦ θ + (1 − M)φ, so the question reduces to integer linear algebra.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import lattice
from .automorphism import LATTICE, ANTIHOL, Automorphism, apply_algebra, numerical_rank
from .errors import GroupMismatch, ProjectionFailed, UnsupportedKind
from .group_model import (
    GroupElement,
    MatrixLike,
    as_matrix,
    contains,
    project_to_group,
    random_element,
    realify,
)

CONJUGATE = "conjugate"
NOT_CONJUGATE = "not_conjugate"
UNDECIDED = "undecided"

DEFAULT_RESTARTS = 64
DEFAULT_WITNESS_TOL = 1e-7
SPECTRAL_GAP = 1e-4
MAX_ITER = 500
GRAD_TOL = 1e-12
ARMIJO = 1e-4
MAX_STEP_NORM = 0.4
GN_SWITCH = 1e-3


@dataclass
class ConjugacyDecision:
    verdict: str
    witness: Optional[np.ndarray] = None
    certificate: Optional[dict] = None
    best_residual: float = float("inf")
    restarts_used: int = 0
    method: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def conjugate(self) -> bool:
        return self.verdict == CONJUGATE

    @property
    def decided(self) -> bool:
        return self.verdict != UNDECIDED


def twisted_conjugate(g: MatrixLike, h: MatrixLike, sigma: Automorphism) -> GroupElement:
    G = sigma.group
    for x in (g, h):
        if isinstance(x, GroupElement) and x.group.name != G.name:
            raise GroupMismatch(f"{x.group.name} vs {G.name}")
    gm, hm = as_matrix(g), as_matrix(h)
    if gm.shape != (G.ambient_size,) * 2 or hm.shape != gm.shape:
        raise GroupMismatch("element does not live in the automorphism's group")
    return GroupElement(gm @ hm @ sigma(gm).conj().T, G)


def _tau(g: np.ndarray, h: np.ndarray, sigma: Automorphism) -> np.ndarray:
    return g @ h @ sigma(g).conj().T


# --------------------------------------------------------------------------
# spectral certificates


def twisted_spectral_invariant(t: MatrixLike, sigma: Automorphism) -> np.ndarray:
    """Eigenvalues of t·B (hol) or (t·B)·conj(t·B) (antihol), sorted.

    For hol, τ_g(t)·B = g·(tB)·g⁻¹; for antihol, s = tB transforms as
    s ↦ g s ḡ⁻¹ and s s̄ ↦ g (s s̄) g⁻¹. Both spectra are τ-invariant.
    """
    if sigma.kind == LATTICE:
        raise UnsupportedKind("lattice automorphisms are decided by affine arithmetic")
    s = as_matrix(t) @ sigma.matrix
    if sigma.kind == ANTIHOL:
        s = s @ s.conj()
    ev = np.linalg.eigvals(s)
    return ev[np.lexsort((ev.imag.round(9), ev.real.round(9)))]


def pfaffian(A: np.ndarray) -> complex:
    """Pfaffian of a skew-symmetric matrix by pivoted skew elimination."""
    A = np.array(A, dtype=complex)
    n = A.shape[0]
    if n % 2:
        return 0.0 + 0.0j
    pf = 1.0 + 0.0j
    for k in range(0, n - 1, 2):
        p = k + 1 + int(np.argmax(np.abs(A[k, k + 1:])))
        if p != k + 1:
            A[[k + 1, p]] = A[[p, k + 1]]
            A[:, [k + 1, p]] = A[:, [p, k + 1]]
            pf = -pf
        piv = A[k, k + 1]
        if abs(piv) == 0:
            return 0.0 + 0.0j
        pf *= piv
        if k + 2 < n:
            # Schur complement of the leading 2x2 block stays skew-symmetric
            inv = np.array([[0, -1 / piv], [1 / piv, 0]])
            A[k + 2:, k + 2:] -= A[k + 2:, k:k + 2] @ inv @ A[k:k + 2, k + 2:]
    return pf


def special_congruence_invariant(t: MatrixLike, sigma: Automorphism) -> Optional[complex]:
    """Pf(s − sᵀ) for s = t·B, when σ is antiholomorphic on SU(2m).

    There s transforms by congruence s ↦ g s gᵀ and Pf(g A gᵀ) = det(g)·Pf(A),
    so with det g = 1 the Pfaffian is a τ-invariant the spectrum of s·s̄ misses.
    """
    G = sigma.group
    if sigma.kind != ANTIHOL or G.family != "SU" or G.ambient_size % 2:
        return None
    s = as_matrix(t) @ sigma.matrix
    return pfaffian(s - s.T)


def multiset_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Bottleneck of the optimal matching between two equal-size multisets."""
    a, b = np.asarray(a), np.asarray(b)
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


# --------------------------------------------------------------------------
# objective and gradient


def tangent_images(t: np.ndarray, sigma: Automorphism) -> np.ndarray:
    """(d, N, N): X_i·t − t·dσ(X_i), the differential of g ↦ τ_g(t) at e."""
    G = sigma.group
    N = G.ambient_size
    if G.dim == 0:
        return np.zeros((0, N, N), dtype=complex)
    return np.array([X @ t - t @ apply_algebra(sigma, X) for X in G.algebra_basis])


def orbit_objective(g: np.ndarray, t1: np.ndarray, t2: np.ndarray, sigma: Automorphism) -> float:
    D = _tau(g, t1, sigma) - t2
    return float(np.vdot(D, D).real)


def orbit_gradient(g: np.ndarray, t1: np.ndarray, t2: np.ndarray, sigma: Automorphism,
                   images: np.ndarray | None = None) -> np.ndarray:
    """Closed-form gradient of f(g·exp(Σ x_i X_i)) at x = 0.

    With D = τ_g(t₁) − t₂ and A = g*·D·σ(g), ∂f/∂x_i = 2·Re⟨A, X_i t₁ − t₁ dσ(X_i)⟩.
    """
    L = tangent_images(t1, sigma) if images is None else images
    sg = sigma(g)
    D = g @ t1 @ sg.conj().T - t2
    A = g.conj().T @ D @ sg
    return 2.0 * np.einsum("ij,kij->k", A.conj(), L).real


def _gauss_newton_direction(g, t1, t2, sigma, images) -> np.ndarray:
    sg = sigma(g)
    D = g @ t1 @ sg.conj().T - t2
    J = np.stack([realify(g @ L @ sg.conj().T) for L in images], axis=1)
    x, *_ = np.linalg.lstsq(J, -realify(D), rcond=1e-10)
    return x


def _descend(g0, t1, t2, sigma, images, target, max_iter=MAX_ITER):
    """Backtracking descent from g0; returns (g, f, iterations).

    Steepest descent in algebra coordinates, retracted by polar projection.
    Once f < GN_SWITCH the Gauss-Newton direction is used instead, which
    keeps convergence fast on orbits whose tangent map is ill-conditioned.
    """
    G = sigma.group
    basis = G.algebra_basis
    g = g0
    f = orbit_objective(g, t1, t2, sigma)
    step = 1.0
    it = 0
    for it in range(1, max_iter + 1):
        if f < target:
            break
        grad = orbit_gradient(g, t1, t2, sigma, images)
        gn2 = float(grad @ grad)
        if np.sqrt(gn2) < GRAD_TOL:
            break
        direction = -grad
        if f < GN_SWITCH:
            x = _gauss_newton_direction(g, t1, t2, sigma, images)
            if float(grad @ x) < 0:
                direction = x
                step = 0.5
        slope = float(grad @ direction)
        Xi = np.tensordot(direction, basis, axes=1)
        xi_norm = float(np.linalg.norm(Xi))
        s = min(2.0 * step, MAX_STEP_NORM / xi_norm)
        accepted = False
        while s > 1e-18:
            try:
                cand = project_to_group(G, g @ (np.eye(G.ambient_size) + s * Xi)).matrix
            except ProjectionFailed:
                s *= 0.5
                continue
            fc = orbit_objective(cand, t1, t2, sigma)
            if fc <= f + ARMIJO * s * slope:
                g, f, step, accepted = cand, fc, s, True
                break
            s *= 0.5
        if not accepted:
            break
    return g, f, it


# --------------------------------------------------------------------------
# exact torus decision


def _lattice_decision(t1: np.ndarray, t2: np.ndarray, sigma: Automorphism,
                      witness_tol: float) -> ConjugacyDecision:
    k = sigma.group.param
    M = sigma.matrix.tolist()
    A = [[int(i == j) - M[i][j] for j in range(k)] for i in range(k)]
    delta = (np.angle(np.diag(t2)) - np.angle(np.diag(t1))) / (2 * np.pi)
    Dsnf, P, Q = lattice.smith_normal_form(A) if k else ([], [], [])
    d = lattice.diagonal(Dsnf) if k else []
    r = sum(1 for x in d if x != 0)
    Pf = np.array(P, dtype=float).reshape(k, k)
    u = Pf @ delta
    frac = np.abs(u - np.rint(u))
    obstruction = float(frac[r:].max()) if k > r else 0.0
    if obstruction > 1e-8:
        return ConjugacyDecision(
            NOT_CONJUGATE,
            certificate={"type": "character", "characters": [row for row in P[r:]],
                         "values": [float(x) for x in u[r:]], "distance": obstruction},
            best_residual=obstruction, method="lattice")
    w = np.zeros(k)
    for i in range(r):
        w[i] = u[i] / d[i]
    phi = np.array(Q, dtype=float).reshape(k, k) @ w
    g = np.diag(np.exp(2j * np.pi * phi)).astype(complex)
    resid = float(np.linalg.norm(_tau(g, t1, sigma) - t2))
    if resid <= witness_tol:
        return ConjugacyDecision(CONJUGATE, witness=g, best_residual=resid, method="lattice")
    return ConjugacyDecision(UNDECIDED, best_residual=resid, method="lattice")


# --------------------------------------------------------------------------


def are_sigma_conjugate(t1: MatrixLike, t2: MatrixLike, sigma: Automorphism, *,
                        restarts: int = DEFAULT_RESTARTS, seed: int = 0,
                        witness_tol: float = DEFAULT_WITNESS_TOL,
                        max_iter: int = MAX_ITER) -> ConjugacyDecision:
    """Decide whether t₁ and t₂ lie in one orbit of the twisted action.

    Restart 0 starts at the identity, restart j > 0 at a sample drawn from
    the stream (seed, j). Restarts run in index order and the first one
    reaching ‖τ_g(t₁) − t₂‖ ≤ witness_tol wins, so the result does not depend
    on anything but the inputs and the seed.
    """
    G = sigma.group
    a, b = as_matrix(t1), as_matrix(t2)
    if sigma.kind == LATTICE:
        return _lattice_decision(a, b, sigma, witness_tol)

    sa = twisted_spectral_invariant(a, sigma)
    sb = twisted_spectral_invariant(b, sigma)
    gap = multiset_distance(sa, sb)
    if gap > SPECTRAL_GAP:
        return ConjugacyDecision(
            NOT_CONJUGATE, certificate={"type": "spectrum", "first": sa, "second": sb,
                                        "distance": gap},
            best_residual=gap, method="spectral")
    pa = special_congruence_invariant(a, sigma)
    if pa is not None:
        pb = special_congruence_invariant(b, sigma)
        pgap = float(abs(pa - pb))
        if pgap > SPECTRAL_GAP:
            return ConjugacyDecision(
                NOT_CONJUGATE, certificate={"type": "pfaffian", "first": complex(pa),
                                            "second": complex(pb), "distance": pgap},
                best_residual=pgap, method="pfaffian")

    images = tangent_images(a, sigma)
    target = witness_tol**2
    best = (np.inf, None)
    for j in range(restarts):
        g0 = G.identity() if j == 0 else random_element(G, np.random.default_rng([seed, j])).matrix
        g, f, _ = _descend(g0, a, b, sigma, images, target, max_iter)
        resid = float(np.sqrt(f))
        if resid < best[0]:
            best = (resid, g)
        if resid <= witness_tol and contains(G, g)[0]:
            return ConjugacyDecision(CONJUGATE, witness=g, best_residual=resid,
                                     restarts_used=j + 1, method="descent")
    return ConjugacyDecision(UNDECIDED, best_residual=best[0], restarts_used=restarts,
                             method="descent", extra={"spectral_distance": gap})


def verify_witness(t1: MatrixLike, t2: MatrixLike, sigma: Automorphism, g: MatrixLike) -> float:
    return float(np.linalg.norm(_tau(as_matrix(g), as_matrix(t1), sigma) - as_matrix(t2)))


def orbit_dimension(t: MatrixLike, sigma: Automorphism) -> int:
    """Rank of X ↦ X·t − t·dσ(X), i.e. the dimension of the τ-orbit through t."""
    L = tangent_images(as_matrix(t), sigma)
    if L.shape[0] == 0:
        return 0
    return numerical_rank(np.stack([realify(Y) for Y in L], axis=1))
