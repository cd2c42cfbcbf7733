from compress.compressor import (
    FLOAT_BITS,
    CompressorKind,
    CompressorSpec,
    make_compressor,
    identity_compressor,
    compress,
    compress_rows,
    quantizer_bits,
)
from compress.certify import CertifyReport, certify

__all__ = [
    "FLOAT_BITS",
    "CompressorKind",
    "CompressorSpec",
    "make_compressor",
    "identity_compressor",
    "compress",
    "compress_rows",
    "quantizer_bits",
    "CertifyReport",
    "certify",
]
