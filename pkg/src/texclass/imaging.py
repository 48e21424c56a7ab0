"""Image loading, gray-level quantization, and overlapping segment extraction.

Gray images are plain 2-D ``uint8`` numpy arrays throughout the package.
Segments carry their source position and class label alongside the pixel
window so downstream feature matrices stay traceable to the image they
came from.
"""

from __future__ import annotations

import csv
import dataclasses
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "PgmError",
    "Segment",
    "SegmentationConfig",
    "load_pgm",
    "save_pgm",
    "quantize",
    "segment_image",
    "split_train_test",
    "save_segments",
    "load_segments",
]


class PgmError(ValueError):
    """Raised for any problem reading or writing a PGM file."""


@dataclass(frozen=True, eq=False)
class Segment:
    """A square window cut from a gray image.

    ``origin`` is the (row, col) of the window's top-left corner in the
    source image; ``split`` is None until a train/test partition assigns it.
    """

    pixels: np.ndarray
    origin: tuple[int, int]
    label: str
    split: str | None = None

    @property
    def size(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class SegmentationConfig:
    """Window size, stride and boundary policy for segment extraction.

    ``stride = segment_size // 2`` gives 50% overlapping windows.  With
    ``boundary="wrap"`` windows crossing the image edge continue toroidally;
    with ``"clip"`` only fully interior windows are emitted.
    """

    segment_size: int = 32
    stride: int = 16
    boundary: str = "wrap"

    def __post_init__(self):
        if not 1 <= self.stride <= self.segment_size:
            raise ValueError(
                f"stride must be in [1, segment_size], got {self.stride}"
            )
        if self.boundary not in ("wrap", "clip"):
            raise ValueError(f"boundary must be 'wrap' or 'clip', got {self.boundary!r}")


def _read_pgm_token(data: bytes, pos: int) -> tuple[bytes, int]:
    # Skip whitespace and '#' comment lines between header tokens.
    while pos < len(data):
        c = data[pos : pos + 1]
        if c.isspace():
            pos += 1
        elif c == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
        else:
            break
    start = pos
    while pos < len(data) and not data[pos : pos + 1].isspace():
        pos += 1
    if start == pos:
        raise PgmError("malformed header: unexpected end of file")
    return data[start:pos], pos


def load_pgm(path: str | Path) -> np.ndarray:
    """Read a binary (P5) portable graymap into a 2-D uint8 array.

    Only 8-bit files (maxval <= 255) are supported.  Header problems,
    unsupported depth, and truncated pixel data are reported as distinct
    :class:`PgmError` messages.
    """
    data = Path(path).read_bytes()
    if data[:2] != b"P5":
        raise PgmError(f"malformed header: not a binary PGM (P5) file: {path}")
    pos = 2
    fields = []
    for _ in range(3):
        token, pos = _read_pgm_token(data, pos)
        try:
            fields.append(int(token))
        except ValueError:
            raise PgmError(f"malformed header: non-numeric field {token!r}") from None
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise PgmError(f"malformed header: bad dimensions {width}x{height}")
    if maxval > 255:
        raise PgmError(f"unsupported depth: maxval {maxval} > 255")
    if maxval < 1:
        raise PgmError(f"malformed header: bad maxval {maxval}")
    pos += 1  # single whitespace byte after maxval
    pixels = data[pos : pos + width * height]
    if len(pixels) < width * height:
        raise PgmError(
            f"truncated pixel data: expected {width * height} bytes, got {len(pixels)}"
        )
    return np.frombuffer(pixels, dtype=np.uint8).reshape(height, width).copy()


def save_pgm(pixels: np.ndarray, path: str | Path) -> None:
    """Write a 2-D uint8 array as a binary (P5) PGM file."""
    arr = np.asarray(pixels)
    if arr.ndim != 2:
        raise PgmError(f"expected a 2-D array, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        if arr.min() < 0 or arr.max() > 255:
            raise PgmError("pixel values outside [0, 255]")
        arr = arr.astype(np.uint8)
    height, width = arr.shape
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + arr.tobytes())


def quantize(pixels: np.ndarray, levels: int) -> np.ndarray:
    """Map 8-bit gray values onto ``levels`` bins: floor(v * levels / 256).

    Output values lie in [0, levels - 1] and the mapping is monotone.
    """
    if not 2 <= levels <= 256:
        raise ValueError(f"levels must be in [2, 256], got {levels}")
    arr = np.asarray(pixels)
    return (arr.astype(np.int64) * levels // 256).astype(np.uint8)


def segment_image(pixels: np.ndarray, cfg: SegmentationConfig, label: str) -> list[Segment]:
    """Cut overlapping square windows out of an image, row-major by origin.

    Origins run over every multiple of the stride.  With ``wrap`` boundary
    the window wraps toroidally and the count is exactly
    ceil(H/stride) * ceil(W/stride); with ``clip`` only windows fully inside
    the image are kept.
    """
    img = np.asarray(pixels)
    height, width = img.shape
    size = cfg.segment_size
    if size > min(height, width):
        raise ValueError(
            f"segment size {size} exceeds image dimensions {height}x{width}"
        )
    segments = []
    if cfg.boundary == "wrap":
        row_idx = np.arange(size)
        for r in range(0, height, cfg.stride):
            rows = (row_idx + r) % height
            for c in range(0, width, cfg.stride):
                cols = (row_idx + c) % width
                window = img[np.ix_(rows, cols)]
                segments.append(Segment(window, (r, c), label))
    else:
        for r in range(0, height - size + 1, cfg.stride):
            for c in range(0, width - size + 1, cfg.stride):
                window = img[r : r + size, c : c + size].copy()
                segments.append(Segment(window, (r, c), label))
    return segments


def split_train_test(
    segments: list[Segment], train_count: int, seed: int
) -> tuple[list[Segment], list[Segment]]:
    """Partition segments per class into train/test by a seeded permutation.

    Exactly ``train_count`` segments of every class go to the train set.
    Classes are processed in sorted label order so a fixed seed reproduces
    the split bit-exactly regardless of input grouping.
    """
    if train_count < 1:
        raise ValueError(f"train_count must be >= 1, got {train_count}")
    by_class: dict[str, list[int]] = {}
    for idx, seg in enumerate(segments):
        by_class.setdefault(seg.label, []).append(idx)
    rng = np.random.default_rng(seed)
    train: list[Segment] = []
    test: list[Segment] = []
    for label in sorted(by_class):
        indices = by_class[label]
        if train_count >= len(indices):
            raise ValueError(
                f"train_count {train_count} >= {len(indices)} segments of class {label!r}"
            )
        order = rng.permutation(len(indices))
        chosen = set(order[:train_count].tolist())
        for k, idx in enumerate(indices):
            seg = segments[idx]
            if k in chosen:
                train.append(dataclasses.replace(seg, split="train"))
            else:
                test.append(dataclasses.replace(seg, split="test"))
    return train, test


def save_segments(segments: list[Segment], directory: str | Path) -> Path:
    """Write segments as PGM files plus a manifest CSV.

    Manifest columns: path, class, origin_row, origin_col, split.
    Returns the manifest path.
    """
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    manifest = out / "manifest.csv"
    with open(manifest, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["path", "class", "origin_row", "origin_col", "split"])
        for seg in segments:
            r, c = seg.origin
            name = f"{seg.label}_{r:04d}_{c:04d}.pgm"
            save_pgm(seg.pixels, out / name)
            writer.writerow([name, seg.label, r, c, seg.split or ""])
    return manifest


def load_segments(directory: str | Path) -> list[Segment]:
    """Read back a segment directory written by :func:`save_segments`."""
    root = Path(directory)
    segments = []
    with open(root / "manifest.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            pixels = load_pgm(root / row["path"])
            segments.append(
                Segment(
                    pixels,
                    (int(row["origin_row"]), int(row["origin_col"])),
                    row["class"],
                    row["split"] or None,
                )
            )
    return segments
