"""Block-based wavelet-domain image watermarking with attack and BER benchmarks."""
from .engine import (
    DetectionReport,
    InvalidKey,
    WatermarkKey,
    capacity,
    default_key,
    detect,
    embed,
    generate_watermark,
    select_blocks,
    threshold,
)
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DetectionReport",
    "InvalidKey",
    "WatermarkKey",
    "capacity",
    "default_key",
    "detect",
    "embed",
    "generate_watermark",
    "select_blocks",
    "threshold",
]
