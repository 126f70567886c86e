import itertools
import json

import numpy as np
import pytest

from oracles import dense, kl_dense, window_sets
from qcc.classical import ErrorWindowPolicy, eq2_code, window_correctability
from qcc.codes import (
    five_register_encoder,
    fourier_transform_code,
    rate_quarter_encoder,
    spin_flip_encoder,
)
from qcc.errors import ResourceError, ShapeError, UnrecoverableError, ValidationError
from qcc.kl import (
    CodeSpace,
    ErrorModel,
    composition_check,
    count_quantum_errors,
    duality_check,
    enumerate_quantum_errors,
    error_model,
    kl_matrix,
    recover,
)
from qcc.state import ErrorPattern, X, Z, apply_ops, apply_pattern, inner_product, superpose


def test_enumeration_examples():
    assert len(enumerate_quantum_errors(4, 2, error_model("general", 4, 1))) == 13
    assert len(enumerate_quantum_errors(8, 2, error_model("general", 8, 1))) == 25
    assert enumerate_quantum_errors(9, 3, error_model("general", 2, 0)) == [ErrorPattern()]


@pytest.mark.parametrize("kind,per", [("spin_flip", 1), ("phase", 1), ("general", 3)])
def test_enumeration_matches_oracle(kind, per):
    R, w, t = 9, 3, 1
    model = error_model(kind, w, t)
    patterns = enumerate_quantum_errors(R, 2, model)
    expected = sum(per ** len(s) for s in window_sets(R, w, t))
    assert len(patterns) == expected == count_quantum_errors(R, 2, model)
    assert patterns[0] == ErrorPattern()
    assert len(set(patterns)) == len(patterns)
    for p in patterns:
        assert model.policy.admits(p.registers)
        if kind == "spin_flip":
            assert all(b == 0 for _, _, b in p.ops)
        if kind == "phase":
            assert all(a == 0 for _, a, _ in p.ops)


def test_model_validation():
    with pytest.raises(ValidationError):
        ErrorModel("amplitude_damping", ErrorWindowPolicy(2, 1))
    assert error_model("spin", 4, 1).kind == "spin_flip"


def _patterns_as_ops(patterns):
    return [list(p.ops) for p in patterns]


ORACLE_CASES = [
    # (encoder factory, N, L, flush, kind, w, t)
    (spin_flip_encoder, 2, 2, True, "spin_flip", 4, 1),
    (spin_flip_encoder, 2, 2, True, "general", 4, 1),
    (spin_flip_encoder, 2, 2, True, "phase", 4, 1),
    (spin_flip_encoder, 2, 1, True, "spin_flip", 2, 1),
    (spin_flip_encoder, 3, 1, True, "spin_flip", 4, 1),
    (lambda N: fourier_transform_code(spin_flip_encoder(N)), 2, 1, True, "phase", 4, 1),
    (lambda N: fourier_transform_code(spin_flip_encoder(N)), 2, 1, True, "spin_flip", 4, 1),
    (rate_quarter_encoder, 2, 1, False, "general", 1, 1),
    (rate_quarter_encoder, 2, 2, False, "general", 8, 1),
    (five_register_encoder, 2, 1, False, "general", 5, 1),
    (five_register_encoder, 3, 1, False, "general", 5, 1),
]


@pytest.mark.parametrize("factory,N,L,flush,kind,w,t", ORACLE_CASES)
def test_kl_matches_dense_oracle(factory, N, L, flush, kind, w, t):
    enc = factory(N)
    model = error_model(kind, w, t)
    report = kl_matrix(enc, L, model, flush=flush)
    R = enc.register_count(L, flush)
    words = [dense(enc.encode(m, flush)) for m in itertools.product(range(N), repeat=L)]
    patterns = enumerate_quantum_errors(R, N, model)
    passed, off, dev = kl_dense(words, N, R, _patterns_as_ops(patterns))
    assert report.passed == passed
    assert abs(report.max_offdiagonal - off) < 1e-9
    assert abs(report.max_lambda_deviation - dev) < 1e-9
    assert report.pattern_count == len(patterns)
    assert report.pair_count == len(patterns) * (len(patterns) + 1) // 2


def test_kl_examples():
    assert kl_matrix(spin_flip_encoder(2), 2, error_model("spin_flip", 4, 1)).passed
    rep = kl_matrix(spin_flip_encoder(2), 2, error_model("phase", 4, 1))
    assert not rep.passed
    first = rep.violations[0]
    assert first.kind == "lambda" and first.left == ErrorPattern()
    assert all(b for _, _, b in first.right.ops)
    trivial = kl_matrix(spin_flip_encoder(2), 2, error_model("general", 3, 0))
    assert trivial.passed and trivial.lambda_table == {(ErrorPattern(), ErrorPattern()): 1}


def test_phase_lambda_on_permutation_code():
    # <enc(k)|Z_0|enc(k)> = omega^(first register) = (-1)^k_1 for eq8
    rep = kl_matrix(spin_flip_encoder(2), 1, error_model("phase", 6, 1), max_violations=1000)
    z0 = [v for v in rep.violations if v.left == ErrorPattern() and v.right == ErrorPattern(((0, 0, 1),))]
    assert {(v.k, round(v.value.real)) for v in z0} == {((0,), 1), ((1,), -1)}


def test_hermitian_symmetry():
    enc = rate_quarter_encoder(2)
    space = CodeSpace(enc, 1, enumerate_quantum_errors(12, 2, error_model("general", 6, 1)))
    g = space.block(0, space.P, 0)
    assert np.abs(g - g.transpose(1, 0, 3, 2).conj()).max() < 1e-12


def test_report_determinism_across_workers():
    enc = spin_flip_encoder(3)
    model = error_model("general", 3, 1)
    runs = [kl_matrix(enc, 2, model, workers=w, max_violations=50).to_dict() for w in (1, 1, 4)]
    assert json.dumps(runs[0]) == json.dumps(runs[1]) == json.dumps(runs[2])
    assert runs[0]["violation_count"] > 50 and len(runs[0]["violations"]) == 50


def test_dense_storage_agrees_with_sparse():
    enc = fourier_transform_code(spin_flip_encoder(2))
    patterns = enumerate_quantum_errors(8, 2, error_model("general", 3, 1))
    sparse_space = CodeSpace(enc, 2, patterns)
    dense_space = CodeSpace(enc, 2, patterns, nnz_budget=0, dense_budget=4 * 256 * 5)
    assert dense_space.dense and not sparse_space.dense
    assert np.abs(sparse_space.block(0, 30, 0) - dense_space.block(0, 30, 0)).max() < 1e-12
    model = error_model("general", 3, 1)
    a = kl_matrix(enc, 2, model, space=sparse_space).to_dict()
    b = kl_matrix(enc, 2, model, space=dense_space).to_dict()
    assert json.dumps(a) == json.dumps(b)
    psi = apply_pattern(enc.encode((1, 0)), ErrorPattern(((3, 1, 1),)))
    assert np.abs(sparse_space.overlaps(psi) - dense_space.overlaps(psi)).max() < 1e-12


def test_resource_errors_carry_bound():
    with pytest.raises(ResourceError) as err:
        kl_matrix(rate_quarter_encoder(2), 6, error_model("general", 2, 1), budget=10 ** 6)
    assert err.value.bound > 10 ** 6
    with pytest.raises(ResourceError):
        CodeSpace(fourier_transform_code(spin_flip_encoder(2)), 2, [ErrorPattern()], nnz_budget=0, dense_budget=16)


@pytest.mark.parametrize("L,w", [(2, 4), (3, 4), (3, 3), (3, 2), (2, 1)])
def test_spin_verdict_equals_classical_window_verdict(L, w):
    policy = ErrorWindowPolicy(w, 1)
    quantum = kl_matrix(spin_flip_encoder(2), L, ErrorModel("spin_flip", policy)).passed
    classical = window_correctability(eq2_code(2), L, policy).passed
    assert quantum == classical


def test_recover_examples():
    enc = rate_quarter_encoder(2)
    model = error_model("general", 8, 1)
    clean = enc.encode((1, 0))
    result = recover(enc, clean, model, original=clean)
    assert result.pattern == ErrorPattern() and abs(result.fidelity - 1) < 1e-9

    psi = superpose([enc.encode((0, 0)), enc.encode((1, 0))], [2 ** -0.5] * 2)
    result = recover(enc, apply_ops(psi, [X(2)]), model, original=psi)
    assert abs(result.fidelity - 1) < 1e-9

    # two adjacent errors are outside the w=8 policy
    coeffs = np.array([0.5, 0.3 + 0.4j, -0.2, 0.6j])
    psi = superpose([enc.encode(m) for m in itertools.product(range(2), repeat=2)], coeffs / np.linalg.norm(coeffs))
    with pytest.raises(UnrecoverableError):
        recover(enc, apply_ops(psi, [X(5), X(6)]), model, original=psi)
    out = recover(enc, apply_ops(psi, [Z(5), Z(6)]), model, original=psi)
    assert out.fidelity < 0.5


def test_recover_out_of_model_raises():
    enc = spin_flip_encoder(2)
    psi = enc.encode((1, 1))
    bad = apply_ops(psi, [X(0), X(1), X(2)])
    with pytest.raises(UnrecoverableError):
        recover(enc, bad, error_model("spin_flip", 8, 1))
    with pytest.raises(ShapeError):
        recover(enc, enc.encode((1,), flush=False), error_model("spin_flip", 4, 1))


def test_duality_examples():
    enc = spin_flip_encoder(2)
    rep = duality_check(enc, 2, ErrorWindowPolicy(4, 1))
    assert rep.forward_pass and rep.consistent
    dense_errors = duality_check(enc, 2, ErrorWindowPolicy(1, 1))
    assert not dense_errors.spin.passed and not dense_errors.fourier_phase.passed and dense_errors.consistent
    trivial = duality_check(enc, 2, ErrorWindowPolicy(4, 0))
    assert trivial.forward_pass and trivial.consistent


def test_composition_examples():
    rep = composition_check(spin_flip_encoder(2), 2, ErrorWindowPolicy(4, 1))
    assert rep.to_dict() == {"holds": True, "spin_flip": True, "phase": False, "general": False}
    trivial = composition_check(rate_quarter_encoder(2), 1, ErrorWindowPolicy(4, 0))
    assert trivial.spin.passed and trivial.phase.passed and trivial.general.passed


def test_five_register_code_corrects_one_per_five():
    enc = five_register_encoder(2)
    assert kl_matrix(enc, 1, error_model("general", 5, 1)).passed
    assert not kl_matrix(enc, 1, error_model("general", 4, 1)).passed


# Low-weight logical operators of the truncated rate-1/4 code. Registers are
# 0-based; frame j occupies registers 4j..4j+3 as (A, B, C, D).

def test_rate_quarter_head_logical():
    # Z on D_0 and D_2 adds e_0: the head frame has p_{-1} = q_{-1} = 0
    enc = rate_quarter_encoder(2)
    for m in itertools.product(range(2), repeat=2):
        bumped = ((m[0] + 1) % 2, m[1])
        assert apply_ops(enc.encode(m), [Z(3), Z(11)]).allclose(enc.encode(bumped))


def test_rate_quarter_tail_logical():
    # shifting the last frame's q variable multiplies enc(k) by (-1)^k_1
    enc = rate_quarter_encoder(2)
    for m in itertools.product(range(2), repeat=2):
        state = enc.encode(m)
        assert abs(inner_product(state, apply_ops(state, [X(14), X(15)])) - (-1) ** m[1]) < 1e-12


def test_rate_quarter_interior_weight_three_logical_at_n2():
    # Z on A_{j+1}, D_{j+1}, D_{j+4} adds e_j + e_{j+2} when N = 2
    enc = rate_quarter_encoder(2)
    j = 0
    ops = [Z(4 * (j + 1)), Z(4 * (j + 1) + 3), Z(4 * (j + 4) + 3)]
    for m in itertools.product(range(2), repeat=4):
        bumped = list(m)
        bumped[j] ^= 1
        bumped[j + 2] ^= 1
        assert apply_ops(enc.encode(m), ops).allclose(enc.encode(tuple(bumped)))
    # the two halves {4, 19} and {7} are each admitted by the w=8, t=1 policy
    policy = ErrorWindowPolicy(8, 1)
    assert policy.admits((4, 19)) and policy.admits((7,))
