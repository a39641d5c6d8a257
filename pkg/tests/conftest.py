"""Shared fixtures: tiny handcrafted corpora and synthetic corpus builders."""

import numpy as np
import pytest

from divex.colorfeat import HISTOGRAM_BINS
from divex.corpus import Corpus, corpus_from_manifest


def one_hot_histogram(bin_index: int) -> list[float]:
    hist = [0.0] * HISTOGRAM_BINS
    hist[bin_index] = 1.0
    return hist


def mixed_histogram(parts: dict[int, float]) -> list[float]:
    hist = [0.0] * HISTOGRAM_BINS
    for bin_index, frac in parts.items():
        hist[bin_index] = frac
    return hist


# histogram bins of pure palette-ish colors (see colorfeat bin formula)
BIN_RED = 180  # (255, 0, 0)
BIN_BLUE = 5  # (0, 0, 255)
BIN_GREEN = 18  # (0, 160, 0) -> g bin 3
BIN_BLACK = 0


def manifest_doc(keyframes_by_video: dict[str, list[dict]]) -> dict:
    """Build a consistent manifest: shot k of a video covers frames 10k..10k+9."""
    videos = list(keyframes_by_video)
    shots = []
    keyframes = []
    for video, specs in keyframes_by_video.items():
        for k, spec in enumerate(specs):
            kf_id = spec["id"]
            shots.append(
                {
                    "video": video,
                    "index": k,
                    "start_frame": 10 * k,
                    "end_frame": 10 * k + 9,
                    "keyframe": kf_id,
                }
            )
            entry = {
                "id": kf_id,
                "video": video,
                "shot_index": k,
                "timestamp_s": float(10 * k + 5) / 25.0,
            }
            for key in ("image", "histogram", "spatial_grid", "concepts"):
                if key in spec:
                    entry[key] = spec[key]
            keyframes.append(entry)
    return {"videos": videos, "shots": shots, "keyframes": keyframes}


def build_corpus(keyframes_by_video: dict[str, list[dict]]) -> Corpus:
    return corpus_from_manifest(manifest_doc(keyframes_by_video))


@pytest.fixture
def tiny_corpus() -> Corpus:
    """Five keyframes over two videos with exact, hand-checkable features.

    k1 is 60% red / 40% blue, k2 is solid blue, k3 solid green, k4 solid
    black, k5 solid red; concepts cover the conjunction and threshold cases.
    """
    grid_red_top = [3, 3, 3, 8, 8, 8, 8, 8, 8]
    return build_corpus(
        {
            "v1": [
                {
                    "id": "k1",
                    "histogram": mixed_histogram({BIN_RED: 0.6, BIN_BLUE: 0.4}),
                    "spatial_grid": grid_red_top,
                    "concepts": {"faces": 0.9, "outdoor": 0.6},
                },
                {
                    "id": "k2",
                    "histogram": one_hot_histogram(BIN_BLUE),
                    "spatial_grid": [8] * 9,
                    "concepts": {"faces": 0.2},
                },
                {
                    "id": "k3",
                    "histogram": one_hot_histogram(BIN_GREEN),
                    "spatial_grid": [6] * 9,
                    "concepts": {"texts": 0.8},
                },
            ],
            "v2": [
                {
                    "id": "k4",
                    "histogram": one_hot_histogram(BIN_BLACK),
                    "spatial_grid": [0] * 9,
                    "concepts": {"faces": 0.7, "texts": 0.9},
                },
                {
                    "id": "k5",
                    "histogram": one_hot_histogram(BIN_RED),
                    "spatial_grid": [3] * 9,
                },
            ],
        }
    )


def random_corpus(n_keyframes: int, seed: int, n_labels: int = 20) -> Corpus:
    """Synthetic corpus with random histograms, grids and concept scores."""
    rng = np.random.default_rng(seed)
    labels = [f"concept_{i:04d}" for i in range(n_labels)]
    specs = []
    for i in range(n_keyframes):
        hist = rng.dirichlet(np.full(HISTOGRAM_BINS, 0.05))
        # at least two labels per keyframe: single-label concept vectors make
        # cosine distance scale-invariant, i.e. exact ties that float rounding
        # breaks differently across implementations
        scores = {
            label: round(float(rng.uniform(0.05, 1.0)), 6)
            for label in rng.choice(labels, size=rng.integers(2, 6), replace=False)
        }
        specs.append(
            {
                "id": f"k{i:05d}",
                "histogram": [float(v) / float(hist.sum()) for v in hist],
                "spatial_grid": [int(v) for v in rng.integers(0, 12, size=9)],
                "concepts": scores,
            }
        )
    return build_corpus({"v1": specs})


def concept_count_corpus(member_counts: dict[str, int], score: float = 0.9) -> Corpus:
    """One keyframe pool where each label scores >= 0.5 on exactly N keyframes."""
    total = max(member_counts.values(), default=0)
    specs = []
    for i in range(total):
        concepts = {
            label: score for label, count in member_counts.items() if i < count
        }
        spec = {
            "id": f"k{i:05d}",
            "histogram": one_hot_histogram(i % HISTOGRAM_BINS),
        }
        if concepts:
            spec["concepts"] = concepts
        specs.append(spec)
    return build_corpus({"v1": specs})
