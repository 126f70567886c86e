"""
String identifiers for the built-in codes.

Plain ids name concrete codes; ``paste:<id>``, ``fourier:<id>`` and
``lift:<classical id>`` compose them, and may nest (``fourier:paste:eq8``).
"""

from __future__ import annotations

from typing import Callable, Dict

from .classical import ClassicalCode, eq2_code
from .codes import (
    ConvEncoder,
    classical_to_quantum,
    five_register_block_code,
    five_register_encoder,
    fourier_transform_code,
    paste,
    permutation_encoder,
    qbc_to_qcc,
    rate_quarter_encoder,
    spin_flip_encoder,
)
from .errors import ValidationError
from .modular import ToeplitzMask

CLASSICAL: Dict[str, Callable[[int], ClassicalCode]] = {
    "eq2-classical": eq2_code,
}

BASE: Dict[str, Callable[[int], ConvEncoder]] = {
    "eq2-classical": lambda N: permutation_encoder(eq2_code(N), "eq2-classical"),
    "eq7": lambda N: qbc_to_qcc(five_register_block_code(N), ToeplitzMask((1, 1))),
    "eq7-direct": five_register_encoder,
    "eq8": spin_flip_encoder,
    "eq14": rate_quarter_encoder,
}

PREFIXES = ("paste:", "fourier:", "lift:")


def known_ids() -> list:
    return sorted(BASE) + [p + "<id>" for p in PREFIXES]


def build(code_id: str, N: int) -> ConvEncoder:
    """Resolve ``code_id`` to an encoder over Z_N."""
    if code_id in BASE:
        return BASE[code_id](N)
    if code_id.startswith("paste:"):
        inner = build(code_id[len("paste:"):], N)
        return paste(fourier_transform_code(inner), inner, name=code_id)
    if code_id.startswith("fourier:"):
        return fourier_transform_code(build(code_id[len("fourier:"):], N))
    if code_id.startswith("lift:"):
        name = code_id[len("lift:"):]
        if name not in CLASSICAL:
            raise ValidationError(f"unknown classical code {name!r}; known: {sorted(CLASSICAL)}")
        return classical_to_quantum(CLASSICAL[name](N), name)
    raise ValidationError(f"unknown code id {code_id!r}; known: {', '.join(known_ids())}")
