"""Color features and distance functions.

Everything downstream (shot segmentation, SOM maps, every search mode) ranks
or compares keyframes through the features computed here: a 216-bin RGB
histogram (6x6x6 cube), per-pixel quantization onto a fixed 12-color palette,
and a 3x3 spatial grid of dominant palette colors.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import EmptyImage, ImageTooSmall, MalformedRow, ScoreOutOfRange, ZeroVector
from .images import Image

HISTOGRAM_BINS = 216

# Fixed palette; index order is part of the contract (ties resolve to the
# lower index everywhere).
PALETTE: tuple[tuple[str, tuple[int, int, int]], ...] = (
    ("black", (0, 0, 0)),
    ("white", (255, 255, 255)),
    ("gray", (128, 128, 128)),
    ("red", (220, 40, 40)),
    ("orange", (240, 140, 30)),
    ("yellow", (240, 220, 40)),
    ("green", (40, 160, 60)),
    ("cyan", (40, 200, 200)),
    ("blue", (40, 70, 220)),
    ("purple", (140, 60, 180)),
    ("pink", (240, 150, 190)),
    ("brown", (130, 80, 40)),
)

PALETTE_NAMES = tuple(name for name, _ in PALETTE)
_ANCHORS = np.array([rgb for _, rgb in PALETTE], dtype=np.int64)

DEFAULT_COVERAGE_THETA = 0.15
MAX_DOMINANT_COLORS = 3


def palette_index(name_or_index) -> int:
    """Resolve a palette color given by name or by index."""
    if isinstance(name_or_index, str):
        try:
            return PALETTE_NAMES.index(name_or_index)
        except ValueError:
            raise ValueError(f"unknown palette color {name_or_index!r}") from None
    idx = int(name_or_index)
    if not 0 <= idx < len(PALETTE):
        raise ValueError(f"palette index out of range: {idx}")
    return idx


def color_histogram(image: Image) -> np.ndarray:
    """L1-normalized 216-bin histogram; bin = 36*(r*6//256) + 6*(g*6//256) + b*6//256."""
    pixels = image.pixels
    if pixels.shape[0] == 0:
        raise EmptyImage("cannot compute a histogram of an empty image")
    p = pixels.astype(np.int64)
    idx = 36 * (p[:, 0] * 6 // 256) + 6 * (p[:, 1] * 6 // 256) + (p[:, 2] * 6 // 256)
    counts = np.bincount(idx, minlength=HISTOGRAM_BINS)
    return counts / pixels.shape[0]


def quantize_pixels(pixels: np.ndarray) -> np.ndarray:
    """Map each (r, g, b) row to its nearest palette index (ties -> lower index)."""
    p = np.asarray(pixels, dtype=np.int64).reshape(-1, 3)
    d2 = ((p[:, None, :] - _ANCHORS[None, :, :]) ** 2).sum(axis=2)
    return d2.argmin(axis=1)  # argmin returns the first (lowest) index on ties


def palette_coverage(image: Image) -> np.ndarray:
    """Fraction of pixels mapped to each of the 12 palette colors (sums to 1)."""
    pixels = image.pixels
    if pixels.shape[0] == 0:
        raise EmptyImage("cannot quantize an empty image")
    counts = np.bincount(quantize_pixels(pixels), minlength=len(PALETTE))
    return counts / pixels.shape[0]


def dominant_from_coverage(
    coverage: np.ndarray, coverage_theta: float = DEFAULT_COVERAGE_THETA
) -> list[tuple[int, float]]:
    """Palette colors with coverage >= theta, descending coverage, at most 3.

    Ties in coverage resolve to the lower palette index.
    """
    entries = [(int(i), float(c)) for i, c in enumerate(coverage) if c >= coverage_theta]
    entries.sort(key=lambda e: (-e[1], e[0]))
    return entries[:MAX_DOMINANT_COLORS]


def dominant_colors(
    image: Image, coverage_theta: float = DEFAULT_COVERAGE_THETA
) -> list[tuple[int, float]]:
    """Dominant palette colors of an image as (palette index, coverage) pairs."""
    return dominant_from_coverage(palette_coverage(image), coverage_theta)


def spatial_color_grid(image: Image) -> np.ndarray:
    """3x3 grid of dominant palette indices, row-major.

    Cell (r, c) covers pixel rows floor(r*H/3)..floor((r+1)*H/3)-1 and the
    analogous columns; a cell's value is the most frequent palette index of
    its pixels (ties -> lower index).
    """
    h, w = image.height, image.width
    if w < 3 or h < 3:
        raise ImageTooSmall(f"spatial grid needs at least 3x3 pixels, got {w}x{h}")
    labels = quantize_pixels(image.pixels).reshape(h, w)
    cells = np.empty(9, dtype=np.int64)
    for r in range(3):
        for c in range(3):
            block = labels[r * h // 3 : (r + 1) * h // 3, c * w // 3 : (c + 1) * w // 3]
            counts = np.bincount(block.ravel(), minlength=len(PALETTE))
            cells[3 * r + c] = counts.argmax()  # first max -> lower index
    return cells


# A 216-bin histogram carries no pixel data, but each bin is an axis-aligned
# RGB box; mapping each box center onto the palette gives a coverage vector
# for keyframes that arrive without an image.
def _bin_center_palette_table() -> np.ndarray:
    bounds = [(-(-256 * k // 6), -(-256 * (k + 1) // 6) - 1) for k in range(6)]
    centers = np.array([(lo + hi) / 2 for lo, hi in bounds])
    r, g, b = np.meshgrid(centers, centers, centers, indexing="ij")
    rgb = np.stack([r.ravel(), g.ravel(), b.ravel()], axis=1)
    d2 = ((rgb[:, None, :] - _ANCHORS[None, :, :]) ** 2).sum(axis=2)
    return d2.argmin(axis=1)


_BIN_TO_PALETTE = _bin_center_palette_table()


def coverage_from_histogram(histogram: np.ndarray) -> np.ndarray:
    """Approximate palette coverage of a keyframe from its histogram alone."""
    hist = np.asarray(histogram, dtype=float)
    cov = np.zeros(len(PALETTE))
    np.add.at(cov, _BIN_TO_PALETTE, hist)
    return cov


def load_concept_scores(path) -> dict[str, dict[str, float]]:
    """Load a concept-score CSV: ``keyframe_id,concept_label,score`` per line.

    Lines starting with '#' are ignored; duplicate (keyframe, label) pairs
    keep the last value.
    """
    scores: dict[str, dict[str, float]] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise MalformedRow(f"line {lineno}: expected 3 fields, got {len(parts)}")
            kf_id, label, score_text = (p.strip() for p in parts)
            if not kf_id or not label:
                raise MalformedRow(f"line {lineno}: empty keyframe id or label")
            try:
                score = float(score_text)
            except ValueError:
                raise MalformedRow(f"line {lineno}: bad score {score_text!r}") from None
            if not 0.0 <= score <= 1.0:
                raise ScoreOutOfRange(f"line {lineno}: score {score} outside [0, 1]")
            scores.setdefault(kf_id, {})[label] = score
    return scores


def l1_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Sum of absolute bin differences; in [0, 2] for unit-sum histograms."""
    return float(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)).sum())


def project_concepts(scores: Mapping[str, float], label_universe: Sequence[str]) -> np.ndarray:
    """Project a label->score mapping onto a fixed label ordering (absent = 0)."""
    return np.array([scores.get(label, 0.0) for label in label_universe], dtype=float)


def cosine_distance(
    a: Mapping[str, float], b: Mapping[str, float], label_universe: Sequence[str]
) -> float:
    """1 - cosine similarity of two concept vectors over a shared label universe."""
    va = project_concepts(a, label_universe)
    vb = project_concepts(b, label_universe)
    na = np.linalg.norm(va)
    nb = np.linalg.norm(vb)
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine distance undefined for an all-zero concept vector")
    return float(1.0 - float(va @ vb) / (na * nb))


def concept_label_universe(concept_maps: Iterable[Mapping[str, float]]) -> list[str]:
    """Sorted union of all concept labels seen across keyframes."""
    labels: set[str] = set()
    for scores in concept_maps:
        labels.update(scores)
    return sorted(labels)
