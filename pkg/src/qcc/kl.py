"""
Brute-force Knill-Laflamme certification.

For an encoder truncated at message length L, every admitted error
pattern E is applied to every codeword enc(k). The KL table
<enc(k)|A^dag B|enc(k')> is then the Gram matrix of those images, computed
blockwise from one sparse matrix whose columns are the images E|enc(k)>.
Only generalized Paulis are enumerated; since they span all operators on a
register, the verdict extends by linearity to arbitrary errors supported
on the same register sets.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from .classical import ErrorWindowPolicy, enumerate_positions
from .codes import ConvEncoder, fourier_transform_code
from .errors import ResourceError, ShapeError, UnrecoverableError, ValidationError
from .modular import root_table
from .state import ErrorPattern, SparseState, basis_keys

MODEL_KINDS = ("spin_flip", "phase", "general")

DEFAULT_TOLERANCE = 1e-9
DEFAULT_BUDGET = 400_000_000
DEFAULT_NNZ_BUDGET = 20_000_000
DEFAULT_DENSE_BUDGET = 1 << 24

LINEARITY_NOTE = (
    "patterns are generalized Paulis X^a Z^b; they span every single-register "
    "operator, so the verdict covers arbitrary errors on the same register sets"
)


@dataclass(frozen=True)
class ErrorModel:
    kind: str
    policy: ErrorWindowPolicy

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValidationError(f"model kind must be one of {MODEL_KINDS}, got {self.kind!r}")

    def symbols(self, N: int) -> List[Tuple[int, int]]:
        """Nonzero single-register (a, b) exponents this model allows."""
        if self.kind == "spin_flip":
            return [(a, 0) for a in range(1, N)]
        if self.kind == "phase":
            return [(0, b) for b in range(1, N)]
        return [(a, b) for a in range(N) for b in range(N) if a or b]


def error_model(kind: str, window: int, max_errors: int) -> ErrorModel:
    aliases = {"spin": "spin_flip", "flip": "spin_flip", "x": "spin_flip", "z": "phase"}
    return ErrorModel(aliases.get(kind, kind), ErrorWindowPolicy(window, max_errors))


def enumerate_quantum_errors(R: int, N: int, model: ErrorModel) -> List[ErrorPattern]:
    """Identity first, then every admitted position set with every allowed symbol assignment."""
    symbols = model.symbols(N)
    out: List[ErrorPattern] = []
    for positions in enumerate_positions(R, model.policy):
        for assignment in itertools.product(symbols, repeat=len(positions)):
            out.append(ErrorPattern(tuple((r, a, b) for r, (a, b) in zip(positions, assignment))))
    return out


def count_quantum_errors(R: int, N: int, model: ErrorModel) -> int:
    """Length of ``enumerate_quantum_errors(R, N, model)`` without building it."""
    s = len(model.symbols(N))
    t, w = model.policy.max_errors, model.policy.window

    @lru_cache(maxsize=None)
    def count(start: int, recent: Tuple[int, ...]) -> int:
        total = 1
        if t == 0:
            return total
        for p in range(start, R):
            if len(recent) >= t and p - recent[-t] < w:
                continue
            # only picks still inside the window can block later ones
            kept = tuple(r for r in recent + (p,) if r > p - w)[-t:]
            total += s * count(p + 1, kept)
        return total

    return count(0, ())


def _message_list(N: int, L: int) -> List[Tuple[int, ...]]:
    return list(itertools.product(range(N), repeat=L))


class CodeSpace:
    """Codewords of ``enc`` at length L together with their images under ``patterns``.

    Image column ``p * K + k`` is pattern ``p`` applied to the ``k``-th
    codeword (messages in lexicographic order). Small problems keep every
    image in one sparse matrix over the union of supports. When the images
    are too many for that but the full basis of N**R states is modest (dense
    codewords), images are built lazily as dense blocks over the whole
    basis. Anything larger raises :class:`ResourceError`.
    """

    def __init__(self, enc: ConvEncoder, L: int, patterns: Sequence[ErrorPattern], flush: bool = True,
                 nnz_budget: int = DEFAULT_NNZ_BUDGET, dense_budget: int = DEFAULT_DENSE_BUDGET):
        self.enc = enc
        self.L = L
        self.flush = flush
        self.N = N = enc.N
        self.R = R = enc.register_count(L, flush)
        self.messages = _message_list(N, L)
        self.patterns = list(patterns)
        for pattern in self.patterns:
            for r, _, _ in pattern.ops:
                if r >= R:
                    raise ShapeError(f"pattern {pattern} touches register {r} of {R}")
        self.codewords = [enc.encode(m, flush) for m in self.messages]
        self._table = root_table(N)
        self._weights = N ** np.arange(R - 1, -1, -1, dtype=np.int64)
        self._base = []
        for cw in self.codewords:
            digits, amps = cw.to_arrays()
            self._base.append((np.ascontiguousarray(digits.T), basis_keys(digits, N), amps))
        support = sum(len(b[1]) for b in self._base)
        nnz = support * self.P
        self.dense = nnz > nnz_budget
        if not self.dense:
            key_parts, amp_parts = self._image_parts(0, self.P)
            lengths = np.array([len(k) for k in key_parts], dtype=np.int64)
            self.keys, rows = np.unique(np.concatenate(key_parts), return_inverse=True)
            cols = np.repeat(np.arange(self.P * self.K, dtype=np.int64), lengths)
            self.matrix = sparse.csc_matrix(
                (np.concatenate(amp_parts), (rows.ravel(), cols)), shape=(len(self.keys), self.P * self.K))
            self._adjoint = None
            return
        if R * math.log2(N) > 62 or N ** R > dense_budget:
            raise ResourceError(
                f"{self.P} patterns x {support} codeword terms need {nnz} stored amplitudes "
                f"(budget {nnz_budget}) and the dense basis of {N}^{R} states exceeds {dense_budget}", nnz)
        self.dim = N ** R
        # columns per dense block, keeping one block near dense_budget entries
        self._block_patterns = max(1, dense_budget // (self.dim * self.K))

    @property
    def K(self) -> int:
        return len(self.codewords)

    @property
    def P(self) -> int:
        return len(self.patterns)

    def _image_parts(self, lo: int, hi: int):
        """Basis keys and amplitudes of E_p|enc(k)> for patterns lo..hi-1, column order."""
        N, table, weights = self.N, self._table, self._weights
        key_parts, amp_parts = [], []
        for pattern in self.patterns[lo:hi]:
            for digits, keys, amps in self._base:
                new_keys = keys.copy()
                phase = np.zeros(len(keys), dtype=np.int64)
                for r, a, b in pattern.ops:
                    col = digits[r]
                    if a % N:
                        new_keys += (((col + a) % N) - col) * weights[r]
                    if b % N:
                        phase += b * col
                key_parts.append(new_keys)
                amp_parts.append(amps * table[phase % N])
        return key_parts, amp_parts

    def _dense_images(self, lo: int, hi: int) -> np.ndarray:
        """Row c holds image column lo * K + c over the full basis."""
        keys, amps = self._image_parts(lo, hi)
        out = np.zeros((len(keys), self.dim), dtype=complex)
        for c, (k, a) in enumerate(zip(keys, amps)):
            out[c, k] = a
        return out

    def block(self, lo: int, hi: int, start: int, upper: bool = False) -> np.ndarray:
        """KL entries for patterns lo..hi-1 against patterns start..P-1.

        Shape (hi - lo, P - start, K, K); entry [i, j, k, k'] is
        <enc(k)| E_{lo+i}^dag E_{start+j} |enc(k')>. With ``upper`` only
        entries with lo + i <= start + j are guaranteed; dense storage skips
        sub-blocks lying wholly below that diagonal.
        """
        K = self.K
        if not self.dense:
            left = self.matrix[:, lo * K:hi * K]
            right = self.matrix[:, start * K:]
            g = (left.conj().T @ right).toarray()
        else:
            g = np.zeros(((hi - lo) * K, (self.P - start) * K), dtype=complex)
            step = self._block_patterns
            for a in range(lo, hi, step):
                a2 = min(hi, a + step)
                left = self._dense_images(a, a2).conj()
                for b in range(start, self.P, step):
                    b2 = min(self.P, b + step)
                    if upper and b2 <= a:
                        continue
                    right = left if (a, a2) == (b, b2) else self._dense_images(b, b2)
                    if right is left:
                        prod = left @ left.conj().T
                    else:
                        prod = left @ right.T
                    g[(a - lo) * K:(a2 - lo) * K, (b - start) * K:(b2 - start) * K] = prod
        return g.reshape(hi - lo, K, self.P - start, K).transpose(0, 2, 1, 3)

    def overlaps(self, state: SparseState) -> np.ndarray:
        """Array (P, K) of <E_p enc(k)|state>."""
        if (state.N, state.R) != (self.N, self.R):
            raise ShapeError(f"state shape N={state.N},R={state.R} differs from the code's N={self.N},R={self.R}")
        digits, amps = state.to_arrays()
        keys = basis_keys(digits, self.N)
        if not self.dense:
            if self._adjoint is None:
                self._adjoint = self.matrix.conj().T.tocsr()
            idx = np.minimum(np.searchsorted(self.keys, keys), len(self.keys) - 1)
            hit = self.keys[idx] == keys
            vec = np.zeros(len(self.keys), dtype=complex)
            vec[idx[hit]] = amps[hit]
            return (self._adjoint @ vec).reshape(self.P, self.K)
        order = np.argsort(keys)
        keys, amps = keys[order], amps[order]
        out = np.zeros(self.P * self.K, dtype=complex)
        step = max(1, DEFAULT_NNZ_BUDGET // max(1, sum(len(b[1]) for b in self._base)))
        for lo in range(0, self.P, step):
            hi = min(self.P, lo + step)
            key_parts, amp_parts = self._image_parts(lo, hi)
            for c, (k, a) in enumerate(zip(key_parts, amp_parts)):
                idx = np.minimum(np.searchsorted(keys, k), len(keys) - 1)
                hit = keys[idx] == k
                out[lo * self.K + c] = np.vdot(a[hit], amps[idx[hit]])
        return out.reshape(self.P, self.K)

    def recover(self, corrupted: SparseState, original: Optional[SparseState] = None,
                tolerance: float = DEFAULT_TOLERANCE) -> "RecoveryResult":
        """Undo the first candidate pattern whose coset holds the most weight."""
        ov = self.overlaps(corrupted)
        weight = (np.abs(ov) ** 2).sum(axis=1)
        top = float(weight.max())
        if top <= tolerance:
            raise UnrecoverableError("corrupted state has no overlap with any correctable coset")
        best = int(np.nonzero(weight >= top - tolerance)[0][0])
        coeffs = ov[best] / math.sqrt(weight[best])
        terms: Dict[tuple, complex] = {}
        for c, cw in zip(coeffs, self.codewords):
            if c == 0:
                continue
            for basis, amp in cw.items():
                terms[basis] = terms.get(basis, 0j) + c * amp
        recovered = SparseState(self.N, self.R, terms, validate=False)
        fidelity = None
        if original is not None:
            from .state import inner_product

            fidelity = abs(inner_product(original, recovered))
        return RecoveryResult(recovered, self.patterns[best], weight[best], fidelity)


@dataclass
class RecoveryResult:
    state: SparseState
    pattern: ErrorPattern
    weight: float
    fidelity: Optional[float] = None


@dataclass(frozen=True)
class Violation:
    left: ErrorPattern
    right: ErrorPattern
    k: Tuple[int, ...]
    k_prime: Tuple[int, ...]
    value: complex
    kind: str

    def to_dict(self) -> dict:
        return {
            "pair": [self.left.render(), self.right.render()],
            "k": list(self.k),
            "k_prime": list(self.k_prime),
            "kind": self.kind,
            "value": {"re": self.value.real, "im": self.value.imag},
        }


@dataclass
class KLReport:
    passed: bool
    tolerance: float
    max_offdiagonal: float
    max_lambda_deviation: float
    lambda_table: Dict[Tuple[ErrorPattern, ErrorPattern], complex]
    violations: List[Violation]
    violation_count: int
    pattern_count: int
    pair_count: int
    message_count: int
    registers: int
    code: str
    N: int
    L: int
    flush: bool
    model: str
    window: int
    max_errors: int
    note: str = LINEARITY_NOTE

    @property
    def max_violation(self) -> float:
        return max(self.max_offdiagonal, self.max_lambda_deviation)

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{verdict} {self.code} N={self.N} L={self.L} R={self.registers} model={self.model} "
                f"w={self.window} t={self.max_errors}: {self.pattern_count} patterns, "
                f"{self.pair_count} pairs, max offdiag {self.max_offdiagonal:.3e}, "
                f"max lambda dev {self.max_lambda_deviation:.3e}")

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "code": self.code,
            "n": self.N,
            "len": self.L,
            "flush": self.flush,
            "registers": self.registers,
            "model": self.model,
            "window": self.window,
            "max": self.max_errors,
            "tolerance": self.tolerance,
            "max_offdiagonal": self.max_offdiagonal,
            "max_lambda_deviation": self.max_lambda_deviation,
            "pattern_count": self.pattern_count,
            "pair_count": self.pair_count,
            "message_count": self.message_count,
            "violation_count": self.violation_count,
            "violations": [v.to_dict() for v in self.violations],
            "lambda_table": [
                {"pair": [a.render(), b.render()], "value": {"re": lam.real, "im": lam.imag}}
                for (a, b), lam in self.lambda_table.items()
            ],
            "note": self.note,
        }


def _check_chunk(space: CodeSpace, lo: int, hi: int, tolerance: float):
    blk = space.block(lo, hi, lo, upper=True)
    K = space.K
    n_i, n_j = blk.shape[:2]
    upper = np.arange(n_j)[None, :] >= np.arange(n_i)[:, None]
    eye = np.eye(K, dtype=bool)
    diag = blk[:, :, eye]                        # (n_i, n_j, K)
    lam = diag.mean(axis=2)
    dev = np.abs(diag - lam[:, :, None])
    off = np.abs(np.where(eye, 0, blk))
    off_max = np.where(upper, off.max(axis=(2, 3)), 0.0)
    dev_max = np.where(upper, dev.max(axis=2), 0.0)

    lam_entries = [(lo + i, lo + j, complex(lam[i, j]))
                   for i, j in zip(*np.nonzero(upper & (np.abs(lam) > tolerance)))]
    bad_off = np.argwhere(upper[:, :, None, None] & (off > tolerance))
    bad_dev = np.argwhere(upper[:, :, None] & (dev > tolerance))
    bad = [(lo + i, lo + j, k, kp, complex(blk[i, j, k, kp]), "offdiagonal") for i, j, k, kp in bad_off]
    bad += [(lo + i, lo + j, k, k, complex(diag[i, j, k]), "lambda") for i, j, k in bad_dev]
    return float(off_max.max(initial=0.0)), float(dev_max.max(initial=0.0)), lam_entries, bad


def kl_matrix(enc: ConvEncoder, L: int, model: ErrorModel, tolerance: float = DEFAULT_TOLERANCE,
              flush: bool = True, workers: int = 1, max_violations: int = 100,
              budget: int = DEFAULT_BUDGET, space: Optional[CodeSpace] = None) -> KLReport:
    """Evaluate <enc(k')|E'^dag E|enc(k)> for every unordered pattern pair and message pair.

    Passes when every off-diagonal entry is within ``tolerance`` of zero and
    every pattern pair's diagonal is constant within ``tolerance``.
    ``budget`` caps the number of table cells, P(P+1)/2 * K^2; exceeding it
    raises :class:`ResourceError` before any encoding happens. At most
    ``max_violations`` violations are kept (canonical order), all are counted.
    """
    N = enc.N
    R = enc.register_count(L, flush)
    if space is None:
        P = count_quantum_errors(R, N, model)
        K = N ** L
        cells = P * (P + 1) // 2 * K * K
        if cells > budget:
            raise ResourceError(f"{P} patterns x {K} messages need {cells} table cells (budget {budget})", cells)
        space = CodeSpace(enc, L, enumerate_quantum_errors(R, N, model), flush)
    P, K = space.P, space.K

    per_chunk = max(1, int(4_000_000 // max(1, K * K * P)))
    bounds = [(lo, min(P, lo + per_chunk)) for lo in range(0, P, per_chunk)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda b: _check_chunk(space, b[0], b[1], tolerance), bounds))
    else:
        results = [_check_chunk(space, lo, hi, tolerance) for lo, hi in bounds]

    max_off = max(r[0] for r in results)
    max_dev = max(r[1] for r in results)
    lambda_table = {}
    raw: List[tuple] = []
    for _, _, lams, bad in results:
        for i, j, lam in lams:
            lambda_table[(space.patterns[i], space.patterns[j])] = lam
        raw.extend(bad)
    raw.sort(key=lambda v: (v[0], v[1], v[2], v[3], v[5]))
    msgs = space.messages
    violations = [
        Violation(space.patterns[i], space.patterns[j], msgs[k], msgs[kp], value, kind)
        for i, j, k, kp, value, kind in raw[:max_violations]
    ]
    passed = max_off <= tolerance and max_dev <= tolerance
    return KLReport(
        passed=passed,
        tolerance=tolerance,
        max_offdiagonal=max_off,
        max_lambda_deviation=max_dev,
        lambda_table=lambda_table,
        violations=violations,
        violation_count=len(raw),
        pattern_count=P,
        pair_count=P * (P + 1) // 2,
        message_count=K,
        registers=space.R,
        code=enc.name,
        N=N,
        L=L,
        flush=flush,
        model=model.kind,
        window=model.policy.window,
        max_errors=model.policy.max_errors,
    )


def recover(enc: ConvEncoder, corrupted: SparseState, model: ErrorModel,
            original: Optional[SparseState] = None, tolerance: float = DEFAULT_TOLERANCE) -> RecoveryResult:
    """Project F^dag |corrupted> onto the code for each candidate F and keep the best.

    The message length is read off the register count, assuming a flushed
    encoding. For repeated recoveries build a :class:`CodeSpace` once and
    call its ``recover`` method.
    """
    frames, rem = divmod(corrupted.R, enc.frame_out)
    L = frames - enc.memory
    if rem or L < 0:
        raise ShapeError(f"{corrupted.R} registers is not a flushed {enc.name} encoding")
    space = CodeSpace(enc, L, enumerate_quantum_errors(corrupted.R, enc.N, model))
    return space.recover(corrupted, original, tolerance)


@dataclass
class DualityReport:
    spin: KLReport
    fourier_phase: KLReport
    phase: KLReport
    fourier_spin: KLReport

    @property
    def forward_pass(self) -> bool:
        """Spin flips corrected by the code and phase errors by its transform."""
        return self.spin.passed and self.fourier_phase.passed

    @property
    def consistent(self) -> bool:
        return (self.spin.passed == self.fourier_phase.passed
                and self.phase.passed == self.fourier_spin.passed)

    def to_dict(self) -> dict:
        return {
            "consistent": self.consistent,
            "spin_flip": self.spin.passed,
            "fourier_phase": self.fourier_phase.passed,
            "phase": self.phase.passed,
            "fourier_spin_flip": self.fourier_spin.passed,
        }


def duality_check(enc: ConvEncoder, L: int, policy: ErrorWindowPolicy,
                  tolerance: float = DEFAULT_TOLERANCE, **kwargs) -> DualityReport:
    """Compare the code's spin-flip (phase) verdict with its transform's phase (spin-flip) verdict."""
    dual = fourier_transform_code(enc)
    run = lambda e, kind: kl_matrix(e, L, ErrorModel(kind, policy), tolerance, **kwargs)  # noqa: E731
    return DualityReport(run(enc, "spin_flip"), run(dual, "phase"), run(enc, "phase"), run(dual, "spin_flip"))


@dataclass
class CompositionReport:
    spin: KLReport
    phase: KLReport
    general: KLReport

    @property
    def holds(self) -> bool:
        """Spin and phase correctability imply general correctability."""
        return self.general.passed or not (self.spin.passed and self.phase.passed)

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "spin_flip": self.spin.passed,
            "phase": self.phase.passed,
            "general": self.general.passed,
        }


def composition_check(enc: ConvEncoder, L: int, policy: ErrorWindowPolicy,
                      tolerance: float = DEFAULT_TOLERANCE, **kwargs) -> CompositionReport:
    run = lambda kind: kl_matrix(enc, L, ErrorModel(kind, policy), tolerance, **kwargs)  # noqa: E731
    return CompositionReport(run("spin_flip"), run("phase"), run("general"))
