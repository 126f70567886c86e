"""
Rate-1/2 convolutional codes over Z_N with exhaustive decoding.

The default taps reproduce the binary code b_i = a_i + a_{i-2},
c_i = a_i + a_{i-1} + a_{i-2}, generalized to mod-N addition.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError, ShapeError, ValidationError
from .modular import ToeplitzMask, check_modulus


@dataclass(frozen=True)
class ClassicalCode:
    N: int
    taps_b: ToeplitzMask = field(default_factory=lambda: ToeplitzMask((1, 0, 1)))
    taps_c: ToeplitzMask = field(default_factory=lambda: ToeplitzMask((1, 1, 1)))

    def __post_init__(self):
        check_modulus(self.N)

    @property
    def memory(self) -> int:
        return max(self.taps_b.memory, self.taps_c.memory)

    @property
    def streams(self) -> Tuple[ToeplitzMask, ToeplitzMask]:
        return (self.taps_b, self.taps_c)

    def output_length(self, L: int, flush: bool) -> int:
        return 2 * (L + (self.memory if flush else 0))


def eq2_code(N: int = 2) -> ClassicalCode:
    """Taps (1,0,1) and (1,1,1): the classic memory-2 code, free distance 5 at N=2."""
    return ClassicalCode(N)


@dataclass(frozen=True)
class ErrorWindowPolicy:
    """At most ``max_errors`` errored positions in every ``window`` consecutive ones."""

    window: int
    max_errors: int

    def __post_init__(self):
        if self.window < 1:
            raise ValidationError(f"window must be >= 1, got {self.window}")
        if self.max_errors < 0:
            raise ValidationError(f"max_errors must be >= 0, got {self.max_errors}")

    def admits(self, positions: Sequence[int]) -> bool:
        ps = sorted(positions)
        t, w = self.max_errors, self.window
        return all(ps[i + t] - ps[i] >= w for i in range(len(ps) - t))


def _check_symbols(symbols: Sequence[int], N: int) -> Tuple[int, ...]:
    out = tuple(int(s) for s in symbols)
    bad = [s for s in out if not 0 <= s < N]
    if bad:
        raise DomainError(f"symbols {bad} outside Z_{N}")
    return out


def conv_encode(message: Sequence[int], code: ClassicalCode, flush: bool = True) -> List[int]:
    """Interleaved codeword (b_1, c_1, b_2, c_2, ...); a_m = 0 before the message."""
    N = code.N
    msg = _check_symbols(message, N) + ((0,) * code.memory if flush else ())
    out: List[int] = []
    for i in range(len(msg)):
        for taps in code.streams:
            out.append(sum(t * msg[i - d] for d, t in enumerate(taps.taps) if i - d >= 0) % N)
    return out


def enumerate_positions(R: int, policy: ErrorWindowPolicy) -> List[Tuple[int, ...]]:
    """All 0-based position sets in range(R) admitted by ``policy``, lexicographic."""
    t, w = policy.max_errors, policy.window
    out: List[Tuple[int, ...]] = []

    def extend(prefix: Tuple[int, ...], start: int) -> None:
        out.append(prefix)
        if t == 0:
            return
        for p in range(start, R):
            # sorted prefixes only need the t-th most recent pick checked
            if len(prefix) >= t and p - prefix[-t] < w:
                continue
            extend(prefix + (p,), p + 1)

    extend((), 0)
    return out


def messages(N: int, L: int) -> Iterator[Tuple[int, ...]]:
    """All N**L messages in lexicographic order."""
    return itertools.product(range(N), repeat=L)


@lru_cache(maxsize=64)
def codebook(code: ClassicalCode, L: int, flush: bool) -> np.ndarray:
    """Row i is the codeword of the i-th message in lexicographic order."""
    rows = [conv_encode(m, code, flush) for m in messages(code.N, L)]
    book = np.array(rows, dtype=np.int64).reshape(len(rows), code.output_length(L, flush))
    book.setflags(write=False)
    return book


def window_counts(support: np.ndarray, window: int) -> np.ndarray:
    """Largest number of True entries in any ``window`` consecutive columns, per row."""
    support = np.atleast_2d(support).astype(np.int64)
    n = support.shape[1]
    if n <= window:
        return support.sum(axis=1)
    cs = np.concatenate([np.zeros((support.shape[0], 1), dtype=np.int64), np.cumsum(support, axis=1)], axis=1)
    return (cs[:, window:] - cs[:, :-window]).max(axis=1)


def brute_force_decode(received: Sequence[int], L: int, code: ClassicalCode, flush: bool = True,
                       policy: Optional[ErrorWindowPolicy] = None) -> Tuple[Optional[Tuple[int, ...]], int]:
    """Minimum-Hamming-distance message; ties go to the lexicographically smallest.

    With ``policy`` only messages whose error explanation (received minus
    codeword) is admitted by the policy are candidates; ``(None, -1)`` is
    returned when no message qualifies.
    """
    expected = code.output_length(L, flush)
    if len(received) != expected:
        raise ShapeError(f"received {len(received)} symbols, encoder emits {expected} for L={L}")
    recv = np.array(_check_symbols(received, code.N), dtype=np.int64)
    book = codebook(code, L, flush)
    diff = book != recv
    dist = diff.sum(axis=1)
    if policy is not None:
        ok = window_counts(diff, policy.window) <= policy.max_errors
        if not ok.any():
            return None, -1
        dist = np.where(ok, dist, expected + 1)
    best = int(np.argmin(dist))
    return _index_to_message(best, code.N, L), int(dist[best])


def _index_to_message(index: int, N: int, L: int) -> Tuple[int, ...]:
    digits = []
    for _ in range(L):
        index, d = divmod(index, N)
        digits.append(d)
    return tuple(reversed(digits))


@dataclass
class CorrectabilityReport:
    passed: bool
    L: int
    flush: bool
    policy: ErrorWindowPolicy
    messages_checked: int
    patterns_checked: int
    decoder: str = "window"
    counterexample: Optional[dict] = None

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "length": self.L,
            "flush": self.flush,
            "window": self.policy.window,
            "max_errors": self.policy.max_errors,
            "messages_checked": self.messages_checked,
            "patterns_checked": self.patterns_checked,
            "decoder": self.decoder,
            "counterexample": self.counterexample,
        }


def window_correctability(code: ClassicalCode, L: int, policy: ErrorWindowPolicy,
                          flush: bool = True, decoder: str = "window") -> CorrectabilityReport:
    """Decode every message under every admitted error pattern.

    ``decoder="window"`` restricts decoding to error explanations the
    policy admits, so the verdict is exactly "the admitted error cosets of
    distinct codewords are disjoint". ``decoder="hamming"`` uses plain
    minimum distance, which can fail on admitted patterns heavier than half
    the free distance even when the cosets are disjoint.

    Patterns are visited in enumeration order (positions, then symbol
    values), messages in lexicographic order within each pattern; the
    first failure found in that order is reported.
    """
    if decoder not in ("window", "hamming"):
        raise ValidationError(f"unknown decoder {decoder!r}")
    N = code.N
    book = codebook(code, L, flush)
    n = book.shape[1]
    truth = np.arange(book.shape[0])
    patterns = 0
    for positions in enumerate_positions(n, policy):
        for values in itertools.product(range(1, N), repeat=len(positions)):
            patterns += 1
            err = np.zeros(n, dtype=np.int64)
            err[list(positions)] = values
            received = (book + err) % N
            diff = received[:, None, :] != book[None, :, :]
            dist = diff.sum(axis=2)
            if decoder == "window":
                ok = window_counts(diff.reshape(-1, n), policy.window).reshape(dist.shape) <= policy.max_errors
                dist = np.where(ok, dist, n + 1)
            decoded = np.argmin(dist, axis=1)
            wrong = np.nonzero(decoded != truth)[0]
            if wrong.size:
                i = int(wrong[0])
                return CorrectabilityReport(
                    False, L, flush, policy, book.shape[0], patterns, decoder,
                    {
                        "message": list(_index_to_message(i, N, L)),
                        "positions": list(positions),
                        "values": list(values),
                        "decoded": list(_index_to_message(int(decoded[i]), N, L)),
                        "distance": int(dist[i, decoded[i]]),
                    },
                )
    return CorrectabilityReport(True, L, flush, policy, book.shape[0], patterns, decoder)
