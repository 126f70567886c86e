"""
Quantum encoders on finite truncations.

Every constructor returns a :class:`ConvEncoder`: a message over Z_N of
length L is padded with ``memory`` zeros when flushed and mapped to a
sparse state on ``frame_out * (L + memory)`` registers. Symbols before
the first message position count as zero.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from .classical import ClassicalCode, conv_encode
from .errors import ConstructionError, DomainError, RangeError, ValidationError
from .modular import ToeplitzMask, check_modulus, expand_mask, is_invertible_mod, mix
from .state import (
    ONE,
    Basis,
    ExactAmplitude,
    SingleRegisterOp,
    SparseState,
    apply_ops,
    basis_keys,
    fourier_all,
    from_exact_arrays,
    gram_matrix,
    pauli,
    superpose,
    tensor,
)

FAMILIES = (
    "qbc_derived",
    "spin_flip",
    "fourier_of",
    "pasted",
    "classical_lift",
    "rate_quarter",
    "five_register",
)


@dataclass(frozen=True)
class BlockCode:
    """One register in, ``m`` registers out; ``codewords[k]`` encodes |k>."""

    N: int
    m: int
    codewords: Tuple[SparseState, ...]

    def __post_init__(self):
        check_modulus(self.N)
        if len(self.codewords) != self.N:
            raise ValidationError(f"block code needs {self.N} codewords, got {len(self.codewords)}")
        for cw in self.codewords:
            if (cw.N, cw.R) != (self.N, self.m):
                raise ValidationError("codeword shape does not match the block code")
        gram = gram_matrix(self.codewords)
        if not np.allclose(gram, np.eye(self.N), atol=1e-9, rtol=0):
            raise ValidationError("block codewords are not orthonormal within 1e-9")

    def amplitude(self, k: int, j: Sequence[int]) -> complex:
        return self.codewords[k].amplitude(j)

    def encode(self, k: int) -> SparseState:
        return self.codewords[k % self.N]


@dataclass(frozen=True, eq=False)
class ConvEncoder:
    """Message-to-state map of a truncated convolutional code.

    ``encode_padded`` receives the message after any flush padding.
    ``permute_padded`` is present only for permutation encoders, which map
    each message to a single basis string.
    """

    N: int
    frame_out: int
    memory: int
    family: str
    name: str
    encode_padded: Callable[[Tuple[int, ...]], SparseState] = field(repr=False)
    permute_padded: Optional[Callable[[Tuple[int, ...]], Basis]] = field(default=None, repr=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown family {self.family!r}")

    @property
    def rate(self) -> Fraction:
        return Fraction(1, self.frame_out)

    @property
    def is_permutation(self) -> bool:
        return self.permute_padded is not None

    def register_count(self, L: int, flush: bool = True) -> int:
        return self.frame_out * (L + (self.memory if flush else 0))

    def pad(self, message: Sequence[int], flush: bool = True) -> Tuple[int, ...]:
        msg = tuple(int(s) for s in message)
        bad = [s for s in msg if not 0 <= s < self.N]
        if bad:
            raise DomainError(f"message symbols {bad} outside Z_{self.N}")
        return msg + ((0,) * self.memory if flush else ())

    def encode(self, message: Sequence[int], flush: bool = True) -> SparseState:
        return self.encode_padded(self.pad(message, flush))

    def permute(self, message: Sequence[int], flush: bool = True) -> Basis:
        if self.permute_padded is None:
            raise ConstructionError(f"{self.name} is not a permutation encoder")
        return self.permute_padded(self.pad(message, flush))

    def encode_superposition(self, coefficients: Mapping[Sequence[int], complex], flush: bool = True) -> SparseState:
        """Linear extension: sum_k c_k |k> maps to sum_k c_k enc(k)."""
        items = sorted((tuple(k), c) for k, c in coefficients.items())
        return superpose([self.encode(k, flush) for k, _ in items], [c for _, c in items])


def _empty(N: int) -> SparseState:
    return SparseState(N, 0, {(): ONE}, validate=False)


def _from_permutation(N: int, fn: Callable[[Tuple[int, ...]], Basis]) -> Callable[[Tuple[int, ...]], SparseState]:
    def encode(padded: Tuple[int, ...]) -> SparseState:
        basis = fn(padded)
        return SparseState(N, len(basis), {basis: ONE}, validate=False)

    return encode


def _frame_grid(N: int, count: int) -> np.ndarray:
    """All N**count assignments of ``count`` summation variables, lexicographic."""
    if count == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.indices((N,) * count, dtype=np.int64).reshape(count, -1).T


# ---------------------------------------------------------------- block codes

def five_register_block_code(N: int) -> BlockCode:
    """|k> -> N^(-3/2) sum_{p,q,r} omega^(k(p+q+r) + pr) |p, q, p+r, q+r, p+q+k>."""
    N = check_modulus(N)
    grid = _frame_grid(N, 3)
    p, q, r = grid.T
    words = []
    for k in range(N):
        digits = np.stack([p, q, p + r, q + r, p + q + k], axis=1) % N
        words.append(from_exact_arrays(N, digits, k * (p + q + r) + p * r, 3))
    return BlockCode(N, 5, tuple(words))


def qbc_to_qcc(block: BlockCode, mask: ToeplitzMask) -> ConvEncoder:
    """Mix the message by the Toeplitz mask, then block-encode each mixed symbol."""
    N = block.N
    ok, _ = is_invertible_mod(expand_mask(mask, 1, N))
    if not ok:
        raise ConstructionError(
            f"mask {mask.taps} is singular mod {N} at L=1 (mu(0) is not a unit); "
            "the truncated encoder would not be an isometry")

    @lru_cache(maxsize=None)
    def check(L: int) -> None:
        if not is_invertible_mod(expand_mask(mask, L, N))[0]:
            raise ConstructionError(f"mask {mask.taps} is singular mod {N} at L={L}")

    def encode(padded: Tuple[int, ...]) -> SparseState:
        if not padded:
            return _empty(N)
        check(len(padded))
        return tensor(block.codewords[y] for y in mix(mask, padded, N))

    return ConvEncoder(N, block.m, mask.memory, "qbc_derived",
                       f"qbc[{block.m}]/mask{list(mask.taps)}", encode)


def five_register_encoder(N: int) -> ConvEncoder:
    """Direct closed-form evaluation of the five-register code with k_i + k_{i-1} mixing.

    Sums over every frame's (p, q, r) at once instead of tensoring block
    codewords, so it serves as an independent check of :func:`qbc_to_qcc`.
    """
    N = check_modulus(N)

    def encode(padded: Tuple[int, ...]) -> SparseState:
        F = len(padded)
        if F == 0:
            return _empty(N)
        grid = _frame_grid(N, 3 * F)
        digits, phase = [], np.zeros(len(grid), dtype=np.int64)
        for i in range(F):
            s = padded[i] + (padded[i - 1] if i >= 1 else 0)
            p, q, r = grid[:, 3 * i], grid[:, 3 * i + 1], grid[:, 3 * i + 2]
            phase += s * (p + q + r) + p * r
            digits += [p, q, p + r, q + r, p + q + s]
        return from_exact_arrays(N, np.stack(digits, axis=1) % N, phase, 3 * F)

    return ConvEncoder(N, 5, 1, "five_register", "eq7-direct", encode)


# ------------------------------------------------------- permutation encoders

def spin_flip_encoder(N: int) -> ConvEncoder:
    """Frame i is |k_i + k_{i-2}, k_i + k_{i-1} + k_{i-2}>."""
    N = check_modulus(N)

    def permute(padded: Tuple[int, ...]) -> Basis:
        k = lambda j: padded[j] if j >= 0 else 0  # noqa: E731
        out = []
        for i in range(len(padded)):
            out += [(k(i) + k(i - 2)) % N, (k(i) + k(i - 1) + k(i - 2)) % N]
        return tuple(out)

    return ConvEncoder(N, 2, 2, "spin_flip", "eq8", _from_permutation(N, permute), permute)


def permutation_encoder(code: ClassicalCode, name: str = "lift") -> ConvEncoder:
    """Quantum lift m -> |m> of a classical convolutional code."""

    def permute(padded: Tuple[int, ...]) -> Basis:
        return tuple(conv_encode(padded, code, flush=False))

    return ConvEncoder(code.N, 2, code.memory, "spin_flip", name, _from_permutation(code.N, permute), permute)


def identity_encoder(N: int) -> ConvEncoder:
    """Rate-1 permutation encoder |k> -> |k>; the neutral outer code for pasting."""
    N = check_modulus(N)
    return ConvEncoder(N, 1, 0, "spin_flip", "identity", _from_permutation(N, tuple), tuple)


# ------------------------------------------------------------ derived codes

def fourier_transform_code(inner: ConvEncoder) -> ConvEncoder:
    """Apply the N-point DFT to every physical register of ``inner``."""

    def encode(padded: Tuple[int, ...]) -> SparseState:
        return fourier_all(inner.encode_padded(padded))

    return ConvEncoder(inner.N, inner.frame_out, inner.memory, "fourier_of", f"fourier:{inner.name}", encode)


def paste(phase_code: ConvEncoder, spin_code: ConvEncoder, family: str = "pasted",
          name: Optional[str] = None) -> ConvEncoder:
    """Encode with ``phase_code``, then feed its register stream to ``spin_code``.

    The outer code must be a permutation encoder; it acts coherently on
    every basis term of the inner output and is not flushed again.
    """
    if not spin_code.is_permutation:
        raise ConstructionError(f"outer code {spin_code.name} is not a permutation encoder")
    if phase_code.N != spin_code.N:
        raise ConstructionError("pasted codes must share N")
    outer = spin_code.permute_padded

    def encode(padded: Tuple[int, ...]) -> SparseState:
        inner = phase_code.encode_padded(padded)
        return inner.map_basis(outer, R=spin_code.frame_out * inner.R)

    permute = None
    if phase_code.is_permutation:
        first = phase_code.permute_padded
        permute = lambda padded: outer(first(padded))  # noqa: E731

    return ConvEncoder(
        phase_code.N,
        phase_code.frame_out * spin_code.frame_out,
        phase_code.memory,
        family,
        name or f"paste({phase_code.name},{spin_code.name})",
        encode,
        permute,
    )


def classical_to_quantum(code: ClassicalCode, name: str = "lift") -> ConvEncoder:
    """Lift, Fourier-transform the lift, and paste the two: rate r -> r^2."""
    spin = permutation_encoder(code, name)
    return paste(fourier_transform_code(spin), spin, family="classical_lift", name=f"lift:{name}")


def rate_quarter_encoder(N: int) -> ConvEncoder:
    """Closed-form rate-1/4 code with frames
    |p_i + p_{i-1}, p_i + p_{i-1} + q_{i-1}, q_i + q_{i-1}, q_i + q_{i-1} + p_i>
    weighted by omega^((k_i + k_{i-2}) p_i + (k_i + k_{i-1} + k_{i-2}) q_i) / N.
    """
    N = check_modulus(N)

    def encode(padded: Tuple[int, ...]) -> SparseState:
        F = len(padded)
        if F == 0:
            return _empty(N)
        grid = _frame_grid(N, 2 * F)
        zero = np.zeros(len(grid), dtype=np.int64)
        k = lambda j: padded[j] if j >= 0 else 0  # noqa: E731
        digits, phase = [], zero.copy()
        for i in range(F):
            p, q = grid[:, 2 * i], grid[:, 2 * i + 1]
            p_prev = grid[:, 2 * i - 2] if i else zero
            q_prev = grid[:, 2 * i - 1] if i else zero
            phase += (k(i) + k(i - 2)) * p + (k(i) + k(i - 1) + k(i - 2)) * q
            digits += [p + p_prev, p + p_prev + q_prev, q + q_prev, q + q_prev + p]
        return from_exact_arrays(N, np.stack(digits, axis=1) % N, phase, 2 * F)

    return ConvEncoder(N, 4, 2, "rate_quarter", "eq14", encode)


# ------------------------------------------------------- logical increment

# (frame offset from i, slot within the 4-register frame, Z exponent).
# Frame slots hold A = p_j + p_{j-1}, B = A + q_{j-1}, C = q_j + q_{j-1},
# D = C + p_j, so A_i - B_i + D_i + D_{i+2}
# = p_i + q_i + q_{i+1} + p_{i+2} + q_{i+2}: exactly the phase picked up
# when k_i grows by one. Smallest set valid for every N and every interior
# i found by search_increment_ops; no add_constant set of weight <= 5 works.
INCREMENT_OPS: Tuple[Tuple[int, int, int], ...] = (
    (0, 0, 1),
    (0, 1, -1),
    (0, 3, 1),
    (2, 3, 1),
)


def increment_ops(enc: ConvEncoder, registers: int, i: int,
                  config: Sequence[Tuple[int, int, int]] = INCREMENT_OPS) -> Tuple[SingleRegisterOp, ...]:
    """Physical operators realizing k_i -> k_i + 1 on a state with ``registers`` registers."""
    if enc.family != "rate_quarter":
        raise ValidationError(f"encoded increment is defined for the rate-1/4 code, not {enc.family}")
    frames = registers // enc.frame_out
    span = max((off for off, _, _ in config), default=0)
    if i < 0 or i + span >= frames:
        raise RangeError(f"logical index {i} needs frames {i}..{i + span} but only {frames} are encoded")
    return tuple(pauli(enc.frame_out * (i + off) + slot, 0, power) for off, slot, power in config)


def encoded_increment(enc: ConvEncoder, state: SparseState, i: int,
                      config: Sequence[Tuple[int, int, int]] = INCREMENT_OPS) -> SparseState:
    """Map enc(k) to enc(k + e_i) by acting on a fixed handful of registers."""
    return apply_ops(state, increment_ops(enc, state.R, i, config))


def search_increment_ops(N: int, L: int, i: int, alphabet: str = "phase", max_weight: int = 5,
                         flush: bool = True) -> Optional[Tuple[Tuple[int, int, int], ...]]:
    """Smallest operator set (frames i..i+2) implementing the logical increment.

    ``alphabet="phase"`` tries Z^(+-1) on each chosen register,
    ``alphabet="shift"`` tries add_constant(+-1). Candidates are visited by
    weight, then register subset, then exponents; each is checked against
    every message of length L. Returns the first hit as
    ``(frame offset, slot, exponent)`` triples, or None.
    """
    if alphabet not in ("phase", "shift"):
        raise ValidationError(f"unknown alphabet {alphabet!r}")
    enc = rate_quarter_encoder(N)
    msgs = list(itertools.product(range(N), repeat=L))
    words = {m: enc.encode(m, flush) for m in msgs}
    R = enc.register_count(L, flush)
    if i < 0 or i >= L or i + 2 >= R // 4:
        raise RangeError(f"logical index {i} out of range for L={L}")
    base = 4 * i
    regs = [base + s for s in range(12) if base + s < R]
    powers = sorted({1, N - 1})

    def target(m):
        bumped = list(m)
        bumped[i] = (bumped[i] + 1) % N
        return words[tuple(bumped)]

    # phase candidates reduce to a linear condition on the shared support
    digits = phases = None
    if alphabet == "phase":
        keys = sorted(words[msgs[0]].terms)
        if any(sorted(w.terms) != keys for w in words.values()):
            return None
        digits = np.array(keys, dtype=np.int64)
        phases = []
        for m in msgs:
            src, dst = words[m].terms, target(m).terms
            if any(src[b].scale_halves != dst[b].scale_halves for b in keys):
                return None
            phases.append(np.array([(dst[b].phase - src[b].phase) % N for b in keys]))

    if alphabet == "shift":
        support = np.array(sorted(words[msgs[0]].terms), dtype=np.int64)
        support_keys = basis_keys(support, N)

    for w in range(max_weight + 1):
        for subset in itertools.combinations(regs, w):
            combos = list(itertools.product(powers, repeat=w))
            grid = np.array(combos, dtype=np.int64).reshape(len(combos), w)
            if alphabet == "phase":
                gained = (digits[:, list(subset)] @ grid.T) % N
                ok = np.ones(len(grid), dtype=bool)
                for ph in phases:
                    ok &= (gained == ph[:, None]).all(axis=0)
                hits = np.nonzero(ok)[0]
                if hits.size:
                    chosen = grid[hits[0]]
                    return tuple(((r - base) // 4, (r - base) % 4, int(c) if c <= N // 2 else int(c) - N)
                                 for r, c in zip(subset, chosen))
            else:
                for row in grid:
                    # a shift that moves the support off itself cannot map code to code
                    moved = support.copy()
                    moved[:, list(subset)] = (moved[:, list(subset)] + row) % N
                    if not np.array_equal(np.sort(basis_keys(moved, N)), support_keys):
                        continue
                    ops = [SingleRegisterOp("add_constant", r, int(c)) for r, c in zip(subset, row)]
                    if all(apply_ops(words[m], ops).allclose(target(m)) for m in msgs):
                        return tuple(((r - base) // 4, (r - base) % 4, int(c)) for r, c in zip(subset, row))
    return None
