"""
Sparse pure states on R registers of dimension N.

A state is a map from basis strings (tuples of residues) to amplitudes.
Amplitudes produced by the code constructors have the closed form
omega_N^phase * N^(-scale_halves/2) and are stored exactly as
:class:`ExactAmplitude`; operators that mix basis strings (the Fourier
transform, arbitrary unitaries) fall back to complex floats.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DomainError, ResourceError, ShapeError, ValidationError
from .modular import check_modulus, root_of_unity, root_table

Basis = Tuple[int, ...]


class ExactAmplitude(NamedTuple):
    """omega_N^phase * N^(-scale_halves / 2)."""

    phase: int
    scale_halves: int

    def times(self, other: "ExactAmplitude", N: int) -> "ExactAmplitude":
        return ExactAmplitude((self.phase + other.phase) % N, self.scale_halves + other.scale_halves)

    def to_complex(self, N: int) -> complex:
        return root_of_unity(N, self.phase) * N ** (-self.scale_halves / 2)


Amplitude = Union[ExactAmplitude, complex]

ONE = ExactAmplitude(0, 0)


def amplitude_value(amp: Amplitude, N: int) -> complex:
    if isinstance(amp, ExactAmplitude):
        return amp.to_complex(N)
    return complex(amp)


@dataclass(frozen=True)
class SingleRegisterOp:
    """One operator acting on register ``target``.

    ``kind`` is one of ``pauli`` (X^a Z^b), ``dft``, ``inverse_dft``,
    ``add_constant`` (|j> -> |j+a>) or ``general`` (an N x N unitary).
    """

    kind: str
    target: int
    a: int = 0
    b: int = 0
    matrix: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in ("pauli", "dft", "inverse_dft", "add_constant", "general"):
            raise ValidationError(f"unknown operator kind {self.kind!r}")
        if self.kind == "general" and self.matrix is None:
            raise ValidationError("general operator needs a matrix")


def pauli(target: int, a: int = 0, b: int = 0) -> SingleRegisterOp:
    return SingleRegisterOp("pauli", target, a, b)


def X(target: int, power: int = 1) -> SingleRegisterOp:
    return SingleRegisterOp("pauli", target, power, 0)


def Z(target: int, power: int = 1) -> SingleRegisterOp:
    return SingleRegisterOp("pauli", target, 0, power)


def dft(target: int) -> SingleRegisterOp:
    return SingleRegisterOp("dft", target)


def inverse_dft(target: int) -> SingleRegisterOp:
    return SingleRegisterOp("inverse_dft", target)


def add_constant(target: int, c: int) -> SingleRegisterOp:
    return SingleRegisterOp("add_constant", target, c)


def general(target: int, matrix) -> SingleRegisterOp:
    return SingleRegisterOp("general", target, matrix=np.asarray(matrix, dtype=complex))


@dataclass(frozen=True)
class ErrorPattern:
    """A placed generalized-Pauli error: ``(register, a, b)`` means X^a Z^b there.

    Components are kept sorted by register; identity components are dropped.
    """

    ops: Tuple[Tuple[int, int, int], ...] = ()

    def __post_init__(self):
        cleaned = tuple(sorted((int(r), int(a), int(b)) for r, a, b in self.ops))
        targets = [r for r, _, _ in cleaned]
        if len(set(targets)) != len(targets):
            raise ValidationError(f"duplicate target registers in pattern {cleaned}")
        if any(r < 0 for r in targets):
            raise ValidationError("register indices must be non-negative")
        object.__setattr__(self, "ops", tuple(op for op in cleaned if op[1] or op[2]))

    @property
    def registers(self) -> Tuple[int, ...]:
        return tuple(r for r, _, _ in self.ops)

    @property
    def weight(self) -> int:
        return len(self.ops)

    def reduced(self, N: int) -> "ErrorPattern":
        return ErrorPattern(tuple((r, a % N, b % N) for r, a, b in self.ops))

    def to_ops(self) -> List[SingleRegisterOp]:
        return [pauli(r, a, b) for r, a, b in self.ops]

    def vectors(self, R: int, N: int) -> Tuple[np.ndarray, np.ndarray]:
        """Dense X-exponent and Z-exponent vectors over R registers."""
        xs = np.zeros(R, dtype=np.int64)
        zs = np.zeros(R, dtype=np.int64)
        for r, a, b in self.ops:
            if r >= R:
                raise ShapeError(f"pattern touches register {r} of a {R}-register state")
            xs[r] = a % N
            zs[r] = b % N
        return xs, zs

    def render(self) -> List[str]:
        return [f"({r},{a},{b})" for r, a, b in self.ops]

    def __str__(self) -> str:
        return "I" if not self.ops else " ".join(self.render())


class SparseState:
    """Immutable sparse state; ``terms`` never holds a zero amplitude."""

    __slots__ = ("_N", "_R", "_terms")

    def __init__(self, N: int, R: int, terms: Mapping[Basis, Amplitude], *, validate: bool = True):
        N = check_modulus(N)
        if R < 0:
            raise ShapeError("negative register count")
        clean: Dict[Basis, Amplitude] = {}
        for basis, amp in terms.items():
            basis = tuple(basis)
            if validate:
                if len(basis) != R:
                    raise ShapeError(f"basis string {basis} does not have {R} registers")
                if any(not 0 <= v < N for v in basis):
                    raise DomainError(f"basis string {basis} leaves Z_{N}")
            if not isinstance(amp, ExactAmplitude):
                amp = complex(amp)
                if amp == 0:
                    continue
            clean[basis] = amp
        self._N = N
        self._R = R
        self._terms = MappingProxyType(clean)

    @property
    def N(self) -> int:
        return self._N

    @property
    def R(self) -> int:
        return self._R

    @property
    def terms(self) -> Mapping[Basis, Amplitude]:
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[Basis]:
        return iter(sorted(self._terms))

    def __repr__(self) -> str:
        return f"SparseState(N={self._N}, R={self._R}, terms={len(self._terms)})"

    @property
    def is_exact(self) -> bool:
        return all(isinstance(a, ExactAmplitude) for a in self._terms.values())

    def amplitude(self, basis: Sequence[int]) -> complex:
        amp = self._terms.get(tuple(basis))
        return 0j if amp is None else amplitude_value(amp, self._N)

    def items(self) -> List[Tuple[Basis, complex]]:
        """Terms as (basis, complex amplitude) pairs in lexicographic order."""
        return [(b, amplitude_value(self._terms[b], self._N)) for b in sorted(self._terms)]

    def to_float(self) -> "SparseState":
        return SparseState(self._N, self._R, dict(self.items()), validate=False)

    def norm(self) -> float:
        return math.sqrt(inner_product(self, self).real)

    def to_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        """Digits (terms x R) and complex amplitudes, lexicographic order."""
        keys = sorted(self._terms)
        digits = np.array(keys, dtype=np.int64).reshape(len(keys), self._R)
        table = root_table(self._N)
        amps = np.empty(len(keys), dtype=complex)
        for i, key in enumerate(keys):
            amp = self._terms[key]
            if isinstance(amp, ExactAmplitude):
                amps[i] = table[amp.phase] * self._N ** (-amp.scale_halves / 2)
            else:
                amps[i] = amp
        return digits, amps

    def scaled(self, factor: complex) -> "SparseState":
        return SparseState(self._N, self._R, {b: factor * v for b, v in self.items()}, validate=False)

    def map_basis(self, fn: Callable[[Basis], Basis], R: Optional[int] = None) -> "SparseState":
        """Relabel basis strings with an injective map, keeping amplitudes."""
        out: Dict[Basis, Amplitude] = {}
        for basis, amp in self._terms.items():
            new = tuple(fn(basis))
            if new in out:
                raise ValidationError("basis relabelling is not injective")
            out[new] = amp
        return SparseState(self._N, self._R if R is None else R, out)

    def allclose(self, other: "SparseState", tol: float = 1e-9) -> bool:
        """Termwise equality within ``tol`` (missing terms count as zero)."""
        if (self._N, self._R) != (other.N, other.R):
            return False
        for basis in set(self._terms) | set(other.terms):
            if abs(self.amplitude(basis) - other.amplitude(basis)) > tol:
                return False
        return True

    def equal_up_to_phase(self, other: "SparseState", tol: float = 1e-9) -> bool:
        """True when the states differ only by one overall unit factor."""
        if (self._N, self._R) != (other.N, other.R):
            return False
        overlap = inner_product(self, other)
        if abs(abs(overlap) - self.norm() * other.norm()) > tol:
            return False
        if abs(overlap) < tol:
            return len(self) == 0 and len(other) == 0
        return self.scaled(overlap / abs(overlap)).allclose(other, tol)

    def to_dict(self) -> dict:
        terms = []
        for basis in sorted(self._terms):
            amp = self._terms[basis]
            if isinstance(amp, ExactAmplitude):
                value = {"phase_exponent": amp.phase, "scale_halves": amp.scale_halves}
            else:
                value = {"re": amp.real, "im": amp.imag}
            terms.append({"basis": list(basis), "amplitude": value})
        return {"n": self._N, "registers": self._R, "terms": terms}

    @classmethod
    def from_dict(cls, data: Mapping) -> "SparseState":
        terms: Dict[Basis, Amplitude] = {}
        for term in data["terms"]:
            amp = term["amplitude"]
            if "phase_exponent" in amp:
                value: Amplitude = ExactAmplitude(int(amp["phase_exponent"]), int(amp["scale_halves"]))
            else:
                value = complex(amp["re"], amp["im"])
            terms[tuple(term["basis"])] = value
        return cls(int(data["n"]), int(data["registers"]), terms)


def basis_state(values: Sequence[int], N: int) -> SparseState:
    N = check_modulus(N)
    values = tuple(int(v) for v in values)
    if any(not 0 <= v < N for v in values):
        raise DomainError(f"{values} has a symbol outside Z_{N}")
    return SparseState(N, len(values), {values: ONE}, validate=False)


def superpose(states: Sequence[SparseState], coefficients: Sequence[complex]) -> SparseState:
    """Linear combination sum_i c_i |states_i> in floating amplitudes."""
    if not states:
        raise ShapeError("empty superposition")
    N, R = states[0].N, states[0].R
    acc: Dict[Basis, complex] = defaultdict(complex)
    for st, c in zip(states, coefficients, strict=True):
        if (st.N, st.R) != (N, R):
            raise ShapeError("superposed states have different shapes")
        for basis, amp in st.terms.items():
            acc[basis] += c * amplitude_value(amp, N)
    return SparseState(N, R, {b: v for b, v in acc.items() if abs(v) > 1e-15}, validate=False)


def tensor(states: Iterable[SparseState]) -> SparseState:
    """Tensor product, preserving exact amplitudes when both factors are exact."""
    states = list(states)
    if not states:
        raise ShapeError("tensor product of nothing")
    N = states[0].N
    acc: Dict[Basis, Amplitude] = {(): ONE}
    R = 0
    for st in states:
        if st.N != N:
            raise ShapeError("tensor factors with different N")
        nxt: Dict[Basis, Amplitude] = {}
        for b1, a1 in acc.items():
            for b2, a2 in st.terms.items():
                if isinstance(a1, ExactAmplitude) and isinstance(a2, ExactAmplitude):
                    nxt[b1 + b2] = a1.times(a2, N)
                else:
                    nxt[b1 + b2] = amplitude_value(a1, N) * amplitude_value(a2, N)
        acc = nxt
        R += st.R
    return SparseState(N, R, acc, validate=False)


def inner_product(lhs: SparseState, rhs: SparseState) -> complex:
    """<lhs|rhs>, conjugate-linear in ``lhs``."""
    if (lhs.N, lhs.R) != (rhs.N, rhs.R):
        raise ShapeError(f"inner product of N={lhs.N},R={lhs.R} with N={rhs.N},R={rhs.R}")
    N = lhs.N
    small, large = (lhs, rhs) if len(lhs) <= len(rhs) else (rhs, lhs)
    total = 0j
    for basis, amp in small.terms.items():
        other = large.terms.get(basis)
        if other is None:
            continue
        if small is lhs:
            total += amplitude_value(amp, N).conjugate() * amplitude_value(other, N)
        else:
            total += amplitude_value(other, N).conjugate() * amplitude_value(amp, N)
    return total


def _check_unitary(matrix: np.ndarray, N: int) -> np.ndarray:
    if matrix.shape != (N, N):
        raise ValidationError(f"expected a {N}x{N} matrix, got {matrix.shape}")
    if not np.allclose(matrix @ matrix.conj().T, np.eye(N), atol=1e-9, rtol=0):
        raise ValidationError("general operator is not unitary within 1e-9")
    return matrix


def apply_op(state: SparseState, op: SingleRegisterOp) -> SparseState:
    N, R = state.N, state.R
    t = op.target
    if not 0 <= t < R:
        raise ShapeError(f"operator target {t} outside 0..{R - 1}")

    if op.kind in ("pauli", "add_constant"):
        a = op.a % N
        b = op.b % N if op.kind == "pauli" else 0
        out: Dict[Basis, Amplitude] = {}
        for basis, amp in state.terms.items():
            j = basis[t]
            new = basis[:t] + ((j + a) % N,) + basis[t + 1:]
            if isinstance(amp, ExactAmplitude):
                out[new] = ExactAmplitude((amp.phase + j * b) % N, amp.scale_halves)
            else:
                out[new] = amp * root_of_unity(N, j * b)
        return SparseState(N, R, out, validate=False)

    if op.kind in ("dft", "inverse_dft"):
        sign = 1 if op.kind == "dft" else -1
        groups: Dict[Basis, List[Tuple[int, Amplitude]]] = defaultdict(list)
        for basis, amp in state.terms.items():
            groups[basis[:t] + basis[t + 1:]].append((basis[t], amp))
        exact = all(len(g) == 1 and isinstance(g[0][1], ExactAmplitude) for g in groups.values())
        out = {}
        if exact:
            # a lone exact term per context transforms in closed form
            for ctx, [(j, amp)] in groups.items():
                for m in range(N):
                    out[ctx[:t] + (m,) + ctx[t:]] = ExactAmplitude(
                        (amp.phase + sign * j * m) % N, amp.scale_halves + 1)
            return SparseState(N, R, out, validate=False)
        matrix = dft_like(N, sign)
    else:
        matrix = _check_unitary(np.asarray(op.matrix, dtype=complex), N)
        groups = defaultdict(list)
        for basis, amp in state.terms.items():
            groups[basis[:t] + basis[t + 1:]].append((basis[t], amp))

    out = {}
    for ctx, entries in groups.items():
        column = np.zeros(N, dtype=complex)
        for j, amp in entries:
            column[j] += amplitude_value(amp, N)
        result = matrix @ column
        for m in range(N):
            if abs(result[m]) > 1e-15:
                out[ctx[:t] + (m,) + ctx[t:]] = complex(result[m])
    return SparseState(N, R, out, validate=False)


def dft_like(N: int, sign: int) -> np.ndarray:
    table = root_table(N)
    idx = (sign * np.outer(np.arange(N), np.arange(N))) % N
    return table[idx] / math.sqrt(N)


def apply_ops(state: SparseState, ops: Iterable[SingleRegisterOp]) -> SparseState:
    for op in ops:
        state = apply_op(state, op)
    return state


def apply_pattern(state: SparseState, pattern: Union[ErrorPattern, Sequence[SingleRegisterOp]]) -> SparseState:
    """Apply every component of a multi-register error; targets must be distinct."""
    if isinstance(pattern, ErrorPattern):
        ops = pattern.to_ops()
    else:
        ops = list(pattern)
        targets = [op.target for op in ops]
        if len(set(targets)) != len(targets):
            raise ValidationError(f"duplicate target registers {sorted(targets)}")
    return apply_ops(state, ops)


def fourier_all(state: SparseState, inverse: bool = False) -> SparseState:
    """Transform every register."""
    make = inverse_dft if inverse else dft
    for r in range(state.R):
        state = apply_op(state, make(r))
    return state


def basis_keys(digits: np.ndarray, N: int) -> np.ndarray:
    """Encode rows of residues as base-N int64 keys (lexicographic order preserved)."""
    digits = np.asarray(digits, dtype=np.int64)
    R = digits.shape[1]
    if N ** R >= 2 ** 63:
        raise ResourceError(f"{R} registers of dimension {N} overflow 64-bit basis keys", N ** R)
    weights = N ** np.arange(R - 1, -1, -1, dtype=np.int64)
    return digits @ weights


def from_exact_arrays(N: int, digits: np.ndarray, phases: np.ndarray, scale_halves: int) -> SparseState:
    """Build an exact state from digit rows and per-row phase exponents."""
    digits = np.asarray(digits, dtype=np.int64)
    R = digits.shape[1]
    phases = np.asarray(phases, dtype=np.int64) % N
    terms: Dict[Basis, Amplitude] = {}
    for row, ph in zip(map(tuple, digits.tolist()), phases.tolist()):
        if row in terms:
            raise ValidationError("duplicate basis string in exact construction")
        terms[row] = ExactAmplitude(ph, scale_halves)
    return SparseState(N, R, terms, validate=False)


def column_matrix(states: Sequence[SparseState]):
    """Stack states as columns of a sparse matrix over their joint support.

    Returns ``(keys, matrix)`` where ``keys`` is the sorted support and
    ``matrix`` a CSC matrix with one column per state.
    """
    from scipy import sparse

    if not states:
        raise ShapeError("no states to stack")
    N, R = states[0].N, states[0].R
    key_parts, amp_parts, col_parts = [], [], []
    for c, st in enumerate(states):
        if (st.N, st.R) != (N, R):
            raise ShapeError("stacked states have different shapes")
        digits, amps = st.to_arrays()
        key_parts.append(basis_keys(digits, N))
        amp_parts.append(amps)
        col_parts.append(np.full(len(amps), c, dtype=np.int64))
    keys, rows = np.unique(np.concatenate(key_parts), return_inverse=True)
    matrix = sparse.csc_matrix(
        (np.concatenate(amp_parts), (rows.ravel(), np.concatenate(col_parts))),
        shape=(len(keys), len(states)),
    )
    return keys, matrix


def gram_matrix(states: Sequence[SparseState]) -> np.ndarray:
    """Dense matrix of pairwise inner products <states[i]|states[j]>."""
    _, m = column_matrix(states)
    return np.asarray((m.conj().T @ m).todense())
