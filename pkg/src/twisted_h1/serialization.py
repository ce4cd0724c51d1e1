"""JSON encodings: complex numbers as [re, im], rationals as {num, den}."""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np


def encode_complex_matrix(M) -> list:
    A = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in A]


def decode_complex_matrix(data) -> np.ndarray:
    rows = [[complex(x[0], x[1]) if isinstance(x, (list, tuple)) else complex(x) for x in row]
            for row in data]
    if not rows:
        return np.zeros((0, 0), dtype=complex)
    return np.array(rows, dtype=complex)


def encode_complex_list(values) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex)]


def encode_fraction(f: Fraction) -> dict:
    return {"num": f.numerator, "den": f.denominator}


def decode_fraction(d: dict) -> Fraction:
    return Fraction(int(d["num"]), int(d["den"]))


def encode_float(x: float):
    """JSON-safe float (non-finite values become strings)."""
    x = float(x)
    if math.isfinite(x):
        return x
    return "inf" if x > 0 else ("-inf" if x < 0 else "nan")


def decode_float(x) -> float:
    return float(x)


def to_jsonable(obj):
    """Recursively convert numpy scalars/arrays and Fractions."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return encode_fraction(obj)
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return encode_complex_list(obj) if obj.ndim == 1 else encode_complex_matrix(obj)
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return encode_float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj
