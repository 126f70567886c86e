"""
Exact arithmetic over Z_N.

Roots of unity, the N-point discrete Fourier transform, banded Toeplitz
mixing masks and the unit-determinant invertibility test for integer
matrices modulo N (composite N included).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidModulusError, ShapeError, ValidationError


def check_modulus(N: int) -> int:
    if not isinstance(N, (int, np.integer)) or N < 2:
        raise InvalidModulusError(f"register dimension must be an integer >= 2, got {N!r}")
    return int(N)


def root_of_unity(N: int, e: int) -> complex:
    """Return exp(2*pi*i*e/N)."""
    N = check_modulus(N)
    e = int(e) % N
    # exact values on the axes keep 1, -1, i, -i free of rounding noise
    if 4 * e % N == 0:
        return (1, 1j, -1, -1j)[4 * e // N]
    return cmath.exp(2j * math.pi * e / N)


def root_table(N: int) -> np.ndarray:
    """All N powers of omega_N as a complex array indexed by exponent."""
    N = check_modulus(N)
    return np.array([root_of_unity(N, e) for e in range(N)], dtype=complex)


def dft_matrix(N: int) -> np.ndarray:
    """Unitary N x N transform with entry (m, j) = omega_N^(j*m) / sqrt(N)."""
    table = root_table(N)
    idx = np.outer(np.arange(N), np.arange(N)) % N
    return table[idx] / math.sqrt(N)


def is_prime_power(N: int) -> bool:
    N = check_modulus(N)
    p = next(d for d in range(2, N + 1) if N % d == 0)
    while N % p == 0:
        N //= p
    return N == 1


@dataclass(frozen=True)
class ModMatrix:
    """Integer matrix with every entry reduced modulo ``modulus``."""

    entries: Tuple[Tuple[int, ...], ...]
    modulus: int

    def __post_init__(self):
        N = check_modulus(self.modulus)
        rows = tuple(tuple(int(v) % N for v in row) for row in self.entries)
        if len({len(r) for r in rows}) > 1:
            raise ShapeError("ragged matrix rows")
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "modulus", N)

    @classmethod
    def from_array(cls, array, modulus: int) -> "ModMatrix":
        return cls(tuple(tuple(int(v) for v in row) for row in np.asarray(array)), modulus)

    @classmethod
    def identity(cls, size: int, modulus: int) -> "ModMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(size)) for i in range(size)), modulus)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def to_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64).reshape(self.rows, self.cols)

    def __matmul__(self, other: "ModMatrix") -> "ModMatrix":
        if self.modulus != other.modulus:
            raise ShapeError("moduli differ")
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        out = [
            [sum(a * b for a, b in zip(row, col)) for col in zip(*other.entries)]
            for row in self.entries
        ]
        return ModMatrix(tuple(map(tuple, out)), self.modulus)

    def apply(self, vector: Sequence[int]) -> Tuple[int, ...]:
        if len(vector) != self.cols:
            raise ShapeError(f"vector of length {len(vector)} for {self.cols} columns")
        return tuple(sum(a * int(v) for a, v in zip(row, vector)) % self.modulus for row in self.entries)


@dataclass(frozen=True)
class ToeplitzMask:
    """Taps mu(0), ..., mu(M) of a banded lower-triangular mixing matrix."""

    taps: Tuple[int, ...]

    def __post_init__(self):
        taps = tuple(int(t) for t in self.taps)
        if not taps:
            raise ValidationError("a mask needs at least one tap")
        if any(t < 0 for t in taps):
            raise ValidationError("taps must be non-negative residues")
        object.__setattr__(self, "taps", taps)

    @property
    def memory(self) -> int:
        return len(self.taps) - 1


def expand_mask(mask: ToeplitzMask, L: int, N: int) -> ModMatrix:
    """L x L matrix with entry (i, p) = taps[i - p] inside the band, else 0."""
    N = check_modulus(N)
    if L < 1:
        raise ValidationError(f"truncation length must be >= 1, got {L}")
    taps = mask.taps
    rows = tuple(
        tuple(taps[i - p] % N if 0 <= i - p < len(taps) else 0 for p in range(L))
        for i in range(L)
    )
    return ModMatrix(rows, N)


def mix(mask: ToeplitzMask, message: Sequence[int], N: int) -> Tuple[int, ...]:
    """Apply the mask to a message: y_i = sum_d taps[d] * k_{i-d} mod N, k_m = 0 for m < 0."""
    N = check_modulus(N)
    out = []
    for i in range(len(message)):
        acc = 0
        for d, tap in enumerate(mask.taps):
            if i - d >= 0:
                acc += tap * int(message[i - d])
        out.append(acc % N)
    return tuple(out)


def determinant(matrix: Sequence[Sequence[int]]) -> int:
    """Integer determinant by fraction-free (Bareiss) elimination."""
    a = [[int(v) for v in row] for row in matrix]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ShapeError("determinant of a non-square matrix")
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _adjugate(a: Sequence[Sequence[int]], det: int) -> list:
    """Integer adjugate, computed as det * A^-1 over the rationals."""
    n = len(a)
    aug = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [v / pv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    adj = []
    for row in aug:
        vals = [v * det for v in row[n:]]
        assert all(v.denominator == 1 for v in vals)
        adj.append([int(v) for v in vals])
    return adj


def _inverse_local_ring(a: Sequence[Sequence[int]], N: int) -> Optional[list]:
    """Gauss-Jordan over Z_{p^e}; a column without a unit pivot means singular."""
    n = len(a)
    aug = [[v % N for v in row] + [int(i == j) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if math.gcd(aug[r][col], N) == 1), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = pow(aug[col][col], -1, N)
        aug[col] = [v * inv % N for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [(x - f * y) % N for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def is_invertible_mod(matrix: ModMatrix, N: Optional[int] = None) -> Tuple[bool, Optional[ModMatrix]]:
    """Decide whether ``matrix`` is a unit of the matrix ring over Z_N.

    Returns ``(True, inverse)`` when gcd(det, N) == 1 and ``(False, None)``
    otherwise. Prime-power moduli take a direct elimination path; other
    moduli go through the integer determinant and adjugate.
    """
    N = check_modulus(matrix.modulus if N is None else N)
    if matrix.rows != matrix.cols:
        raise ShapeError(f"invertibility needs a square matrix, got {matrix.rows}x{matrix.cols}")
    a = [list(row) for row in matrix.entries]
    if is_prime_power(N):
        inv = _inverse_local_ring(a, N)
        if inv is None:
            return False, None
        return True, ModMatrix(tuple(map(tuple, inv)), N)
    det = determinant(a)
    if math.gcd(det % N, N) != 1:
        return False, None
    scale = pow(det % N, -1, N)
    adj = _adjugate(a, det)
    return True, ModMatrix(tuple(tuple(scale * v % N for v in row) for row in adj), N)
