"""Quantum convolutional codes over N-state registers: encoders, states and brute-force verification."""

from .classical import (
    ClassicalCode,
    CorrectabilityReport,
    ErrorWindowPolicy,
    brute_force_decode,
    conv_encode,
    enumerate_positions,
    eq2_code,
    window_correctability,
)
from .codes import (
    BlockCode,
    ConvEncoder,
    classical_to_quantum,
    encoded_increment,
    five_register_block_code,
    five_register_encoder,
    fourier_transform_code,
    paste,
    permutation_encoder,
    qbc_to_qcc,
    rate_quarter_encoder,
    spin_flip_encoder,
)
from .errors import (
    ConstructionError,
    DomainError,
    InvalidModulusError,
    QCCError,
    RangeError,
    ResourceError,
    ShapeError,
    UnrecoverableError,
    ValidationError,
)
from .kl import (
    CodeSpace,
    ErrorModel,
    KLReport,
    composition_check,
    duality_check,
    enumerate_quantum_errors,
    error_model,
    kl_matrix,
    recover,
)
from .modular import ModMatrix, ToeplitzMask, dft_matrix, expand_mask, is_invertible_mod, mix, root_of_unity
from .registry import build
from .state import (
    ErrorPattern,
    ExactAmplitude,
    SingleRegisterOp,
    SparseState,
    apply_op,
    apply_pattern,
    basis_state,
    inner_product,
    superpose,
    tensor,
)

__version__ = "0.1.0"
