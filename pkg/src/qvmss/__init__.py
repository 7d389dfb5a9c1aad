"""Universal-share (n, n+1) visual multi-secret sharing of binary images,
backed by per-pixel statevector circuit simulation."""

from .imaging import (
    BinaryImage,
    PbmParseError,
    PbmVariant,
    ShapeMismatchError,
    make_fixture,
    read_pbm,
    write_pbm,
)
from .metrics import MetricsReport, SsimParams, correlation, intensity_of
from .metrics import mismatch_fraction, mse, psnr, report, ssim_global
from .rng import RngStream
from .scheme import (
    ConfigError,
    PixelOutcome,
    SchemeConfig,
    ShareSet,
    classical_encrypt,
    decode_pixel,
    decrypt,
    decrypt_all,
    encode_pixel,
    encrypt,
    transmitter_state,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryImage",
    "ConfigError",
    "MetricsReport",
    "PbmParseError",
    "PbmVariant",
    "PixelOutcome",
    "RngStream",
    "SchemeConfig",
    "ShapeMismatchError",
    "ShareSet",
    "SsimParams",
    "classical_encrypt",
    "correlation",
    "decode_pixel",
    "decrypt",
    "decrypt_all",
    "encode_pixel",
    "encrypt",
    "intensity_of",
    "make_fixture",
    "mismatch_fraction",
    "mse",
    "psnr",
    "read_pbm",
    "report",
    "ssim_global",
    "transmitter_state",
    "write_pbm",
]
