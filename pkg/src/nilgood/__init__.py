"""Exact nil-good, clean and nil-good clean decompositions of matrices over
fields, with verifiable certificates, plus brute-force checks on small finite
rings and banded infinite matrices."""

from .banded import BandedMatrix, banded_nilgood_clean, exchange_witness
from .canonical import fitting_decompose, frobenius_form, reorder_blocks
from .certificates import verify_certificate
from .decompose import clean_decompose, fitting_strategy, nilgood_clean_decompose, nilgood_decompose
from .matrix import Matrix, parse_matrix
from .rings import RingSpec, Scalar

__all__ = [
    "BandedMatrix",
    "Matrix",
    "RingSpec",
    "Scalar",
    "banded_nilgood_clean",
    "clean_decompose",
    "exchange_witness",
    "fitting_decompose",
    "fitting_strategy",
    "frobenius_form",
    "nilgood_clean_decompose",
    "nilgood_decompose",
    "parse_matrix",
    "reorder_blocks",
    "verify_certificate",
]
