import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import conv_reference, window_sets
from qcc.classical import (
    ClassicalCode,
    ErrorWindowPolicy,
    brute_force_decode,
    conv_encode,
    enumerate_positions,
    eq2_code,
    messages,
    window_correctability,
)
from qcc.errors import DomainError, ShapeError, ValidationError
from qcc.modular import ToeplitzMask


def test_encode_examples():
    code = eq2_code(2)
    assert conv_encode([0, 0, 0], code) == [0] * 10
    assert conv_encode([1, 1, 0, 1], code, flush=False) == [1, 1, 1, 0, 1, 0, 0, 0]
    word = conv_encode([1], code, flush=True)
    assert word == [1, 1, 0, 1, 1, 1] and sum(word) == 5
    with pytest.raises(DomainError):
        conv_encode([2], code)


@pytest.mark.parametrize("N", [2, 3, 5])
@pytest.mark.parametrize("flush", [True, False])
def test_encode_matches_polynomial_oracle(N, flush):
    code = eq2_code(N)
    for L in range(0, 5):
        for m in messages(N, L):
            assert conv_encode(m, code, flush) == conv_reference(m, N, flush=flush)


def test_custom_taps_match_oracle():
    code = ClassicalCode(3, ToeplitzMask((2, 1)), ToeplitzMask((1, 0, 0, 2)))
    assert code.memory == 3
    for m in messages(3, 3):
        assert conv_encode(m, code) == conv_reference(m, 3, (2, 1), (1, 0, 0, 2))


@pytest.mark.parametrize("N", [2, 3])
def test_encode_is_linear(N):
    code = eq2_code(N)
    for L in range(1, 7):
        rng = np.random.default_rng(L)
        for _ in range(10):
            m1, m2 = rng.integers(0, N, L), rng.integers(0, N, L)
            lhs = conv_encode((m1 + m2) % N, code)
            rhs = (np.array(conv_encode(m1, code)) + conv_encode(m2, code)) % N
            assert lhs == rhs.tolist()


def test_free_distance_witness():
    code = eq2_code(2)
    for L in range(1, 6):
        for pos in range(L):
            m = [0] * L
            m[pos] = 1
            assert sum(conv_encode(m, code)) >= 5


def test_enumerate_positions_examples():
    assert enumerate_positions(4, ErrorWindowPolicy(4, 1)) == [(), (0,), (1,), (2,), (3,)]
    nine = enumerate_positions(9, ErrorWindowPolicy(8, 1))
    assert len(nine) == 11 and (0, 8) in nine
    assert enumerate_positions(7, ErrorWindowPolicy(3, 0)) == [()]
    for R in range(1, 9):
        assert len(enumerate_positions(R, ErrorWindowPolicy(R, 1))) == R + 1


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 9), st.integers(1, 6), st.integers(0, 3))
def test_enumerate_positions_matches_power_set_filter(R, w, t):
    assert enumerate_positions(R, ErrorWindowPolicy(w, t)) == window_sets(R, w, t)


def test_policy_validation():
    with pytest.raises(ValidationError):
        ErrorWindowPolicy(0, 1)
    with pytest.raises(ValidationError):
        ErrorWindowPolicy(3, -1)


def test_decode_examples():
    code = eq2_code(2)
    word = conv_encode([1, 1, 0, 1], code, flush=False)
    word[2] ^= 1
    assert brute_force_decode(word, 4, code, flush=False) == ((1, 1, 0, 1), 1)
    assert brute_force_decode([0] * 12, 4, code) == ((0, 0, 0, 0), 0)
    with pytest.raises(ShapeError):
        brute_force_decode([0] * 5, 4, code)


def _oracle_decode(received, L, code, flush):
    best = None
    for m in itertools.product(range(code.N), repeat=L):
        d = sum(x != y for x, y in zip(conv_encode(m, code, flush), received))
        if best is None or d < best[1]:
            best = (m, d)
    return best


@pytest.mark.parametrize("N,max_L", [(2, 6), (3, 4)])
def test_decode_roundtrip(N, max_L):
    code = eq2_code(N)
    for L in range(1, max_L + 1):
        for m in messages(N, L):
            assert brute_force_decode(conv_encode(m, code), L, code) == (m, 0)


def test_decode_matches_exhaustive_oracle():
    code = eq2_code(3)
    rng = np.random.default_rng(3)
    for _ in range(40):
        received = rng.integers(0, 3, 10).tolist()
        assert brute_force_decode(received, 3, code) == _oracle_decode(received, 3, code, True)


def test_window_correctability_w4_passes():
    rep = window_correctability(eq2_code(2), 5, ErrorWindowPolicy(4, 1))
    assert rep.passed and rep.messages_checked == 32
    assert rep.patterns_checked == len(window_sets(14, 4, 1))
    assert window_correctability(eq2_code(3), 3, ErrorWindowPolicy(4, 1)).passed


def test_window_correctability_trivial_and_dense():
    assert window_correctability(eq2_code(2), 4, ErrorWindowPolicy(3, 0)).passed
    rep = window_correctability(eq2_code(2), 5, ErrorWindowPolicy(2, 1))
    assert not rep.passed and rep.counterexample is not None


def _cosets_disjoint(N, L, w, t):
    """Admitted error cosets of distinct codewords never meet (the exact correctability condition)."""
    code = eq2_code(N)
    book = [tuple(conv_encode(m, code)) for m in messages(N, L)]
    n = len(book[0])
    owner = {}
    for positions in window_sets(n, w, t):
        for values in itertools.product(range(1, N), repeat=len(positions)):
            for i, cw in enumerate(book):
                word = list(cw)
                for p, v in zip(positions, values):
                    word[p] = (word[p] + v) % N
                if owner.setdefault(tuple(word), i) != i:
                    return False
    return True


@pytest.mark.parametrize("w", [2, 3, 4])
def test_window_decoder_verdict_equals_coset_oracle(w):
    rep = window_correctability(eq2_code(2), 4, ErrorWindowPolicy(w, 1))
    assert rep.passed == _cosets_disjoint(2, 4, w, 1)


def test_hamming_decoder_is_stricter_than_window_decoder():
    rep = window_correctability(eq2_code(2), 5, ErrorWindowPolicy(4, 1), decoder="hamming")
    assert not rep.passed
    cx = rep.counterexample
    # four admitted errors tie with a lexicographically smaller codeword
    assert len(cx["positions"]) == 4 and cx["distance"] == 4
    assert tuple(cx["decoded"]) < tuple(cx["message"])


def test_windowed_decode_rejects_inadmissible_explanations():
    code = eq2_code(2)
    policy = ErrorWindowPolicy(4, 1)
    word = conv_encode([1, 0, 0, 0, 0], code)
    for p in (0, 4, 8, 12):
        word[p] ^= 1
    assert brute_force_decode(word, 5, code, policy=policy)[0] == (1, 0, 0, 0, 0)
    assert brute_force_decode([1] * 14, 5, code, policy=ErrorWindowPolicy(14, 0)) == (None, -1)
