"""Exact integer lattice tools: Smith normal form and rational reconstruction.

Matrices are handled as lists of lists of Python ints so that nothing
overflows; helpers convert to and from numpy object arrays.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

import numpy as np

IntMatrix = list[list[int]]


def to_int_matrix(A) -> IntMatrix:
    arr = np.asarray(A)
    if arr.ndim != 2:
        raise ValueError("expected a 2-d integer matrix")
    out = []
    for row in arr.tolist():
        new = []
        for x in row:
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise ValueError(f"non-integer entry {x}")
                x = x.numerator
            elif isinstance(x, float):
                if x != int(x):
                    raise ValueError(f"non-integer entry {x}")
            new.append(int(x))
        out.append(new)
    return out


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: IntMatrix, B: IntMatrix) -> IntMatrix:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    return [[sum(A[i][k] * B[k][j] for k in range(inner)) for j in range(cols)]
            for i in range(len(A))]


def det(A: IntMatrix) -> int:
    """Exact determinant by fraction-free Bareiss elimination."""
    n = len(A)
    if n == 0:
        return 1
    M = [row[:] for row in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k] != 0), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def smith_normal_form(A) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(D, P, Q)`` with ``P @ A @ Q == D``.

    P (m x m) and Q (n x n) are unimodular, D is diagonal with nonnegative
    entries d_1 | d_2 | ... and zeros trailing.
    """
    D = to_int_matrix(A) if not isinstance(A, list) else [row[:] for row in A]
    m = len(D)
    n = len(D[0]) if m else 0
    P = identity(m)
    Q = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        P[i], P[j] = P[j], P[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in Q:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):  # row_dst += c * row_src
        D[dst] = [a + c * b for a, b in zip(D[dst], D[src])]
        P[dst] = [a + c * b for a, b in zip(P[dst], P[src])]

    def add_col(src, dst, c):
        for row in D:
            row[dst] += c * row[src]
        for row in Q:
            row[dst] += c * row[src]

    for t in range(min(m, n)):
        while True:
            entries = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
            if not entries:
                break
            _, i, j = min(entries)
            swap_rows(t, i)
            swap_cols(t, j)
            p = D[t][t]
            done = True
            for i in range(t + 1, m):
                q = D[i][t] // p
                if q:
                    add_row(t, i, -q)
                if D[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = D[t][j] // p
                if q:
                    add_col(t, j, -q)
                if D[t][j]:
                    done = False
            if not done:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if D[i][j] % p), None)
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if t < m and t < n and D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            P[t] = [-x for x in P[t]]
    return D, P, Q


def diagonal(D: IntMatrix) -> list[int]:
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def rank(A) -> int:
    D, _, _ = smith_normal_form(A)
    return sum(1 for x in diagonal(D) if x != 0)


def left_kernel_basis(A) -> IntMatrix:
    """Integer rows y spanning {y in Z^m : y A = 0} as a lattice."""
    D, P, _ = smith_normal_form(A)
    r = sum(1 for x in diagonal(D) if x != 0)
    return [row[:] for row in P[r:]]


def rational_reconstruct(x: float, max_den: int = 10**6, tol: float = 1e-6) -> Fraction | None:
    """Nearest fraction with bounded denominator, or None if x is not one."""
    f = Fraction(x).limit_denominator(max_den)
    if abs(float(f) - x) > tol:
        return None
    return f


def lcm(values: Sequence[int]) -> int:
    out = 1
    for v in values:
        out = out * v // gcd(out, v)
    return out
