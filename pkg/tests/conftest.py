import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


def to_gray(field: np.ndarray) -> np.ndarray:
    """Min-max rescale a float field to uint8 gray levels."""
    lo, hi = field.min(), field.max()
    if hi == lo:
        return np.full(field.shape, 128, dtype=np.uint8)
    return np.clip(np.rint((field - lo) / (hi - lo) * 255), 0, 255).astype(np.uint8)


def pgm_bytes(width: int, height: int, pixels: bytes, maxval: int = 255) -> bytes:
    return f"P5\n{width} {height}\n{maxval}\n".encode() + pixels


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
