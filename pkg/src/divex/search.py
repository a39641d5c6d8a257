"""Interactive retrieval: concept/map/color/similarity/sketch search and history.

Every operation is a pure function of (corpus, catalog, query) and returns a
ResultSet whose entries are sorted by score descending, ties by keyframe id
ascending. Search history is per-user-session state with a bounded stack and
a sticky similarity tab.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import colorfeat
from .corpus import Corpus
from .errors import (
    BadMinMatch,
    BlankQuery,
    EmptyColorSet,
    EmptySketch,
    UnknownKeyframe,
    UnknownVideo,
    ZeroVector,
)
from .som import MapCatalog

FEATURES = (
    "concept_search",
    "map_search",
    "color_filter",
    "similarity_search",
    "sketch",
    "shot_filter",
)

HISTORY_CAPACITY = 100

DEFAULT_CONCEPT_THETA = 0.5
DEFAULT_K = 20
SPACES = ("color", "concept")


@dataclass(frozen=True)
class QueryDescriptor:
    feature: str
    parameters: tuple[tuple[str, str], ...] = ()
    issued_at_ms: int = 0

    def __post_init__(self):
        if self.feature not in FEATURES:
            raise ValueError(f"unknown search feature {self.feature!r}")

    @property
    def params(self) -> dict[str, str]:
        return dict(self.parameters)


def _descriptor(feature: str, **params) -> QueryDescriptor:
    items = tuple(sorted((k, str(v)) for k, v in params.items()))
    return QueryDescriptor(feature=feature, parameters=items, issued_at_ms=int(time.time() * 1000))


@dataclass(frozen=True)
class ResultSet:
    entries: tuple[tuple[str, float], ...]
    query: QueryDescriptor

    def ids(self) -> list[str]:
        return [kf_id for kf_id, _ in self.entries]


def ranked_result_set(
    scored: Sequence[tuple[str, float]], query: QueryDescriptor, limit: int | None = None
) -> ResultSet:
    """Sort (id, score) pairs into the canonical ResultSet order and truncate."""
    ids = [kf_id for kf_id, _ in scored]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate keyframe id in result entries")
    ordered = sorted(scored, key=lambda e: (-e[1], e[0]))
    if limit is not None:
        ordered = ordered[:limit]
    return ResultSet(entries=tuple((kf_id, float(s)) for kf_id, s in ordered), query=query)


def _tokens(query: str) -> list[str]:
    tokens = query.lower().split()
    if not tokens:
        raise BlankQuery("query is blank")
    return tokens


def concept_search(
    corpus: Corpus,
    query: str,
    theta: float = DEFAULT_CONCEPT_THETA,
    limit: int = DEFAULT_K,
) -> ResultSet:
    """Conjunctive textual concept search.

    A keyframe matches when every query token appears as a case-insensitive
    substring of some concept label scored >= theta; its score is the sum
    over tokens of the best matching label score.
    """
    tokens = _tokens(query)
    if not 0 <= theta <= 1:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    if limit < 1:
        raise ValueError(f"limit must be >= 1, got {limit}")
    scored = []
    for kf in corpus.keyframes.values():
        total = 0.0
        for token in tokens:
            best = max(
                (s for label, s in kf.concepts.items() if s >= theta and token in label.lower()),
                default=None,
            )
            if best is None:
                break
            total += best
        else:
            scored.append((kf.id, total))
    desc = _descriptor("concept_search", query=query, theta=theta, limit=limit)
    return ranked_result_set(scored, desc, limit=limit)


def map_search(catalog: MapCatalog, query: str) -> list[str]:
    """Map ids whose title contains every query token, ordered by title."""
    tokens = _tokens(query)
    hits = [
        (fmap.title, map_id)
        for map_id, fmap in catalog.maps.items()
        if all(token in fmap.title.lower() for token in tokens)
    ]
    hits.sort()
    return [map_id for _, map_id in hits]


def color_filter(
    corpus: Corpus,
    wanted: set[int],
    coverage_theta: float = colorfeat.DEFAULT_COVERAGE_THETA,
) -> ResultSet:
    """Keyframes whose dominant colors include every wanted palette color."""
    if not wanted:
        raise EmptyColorSet("need at least one wanted palette color")
    wanted_idx = {colorfeat.palette_index(c) for c in wanted}
    scored = []
    for kf in corpus.keyframes.values():
        if kf.palette_coverage is None:
            continue
        dominant = dict(colorfeat.dominant_from_coverage(kf.palette_coverage, coverage_theta))
        if wanted_idx <= set(dominant):
            scored.append((kf.id, sum(dominant[i] for i in wanted_idx)))
    desc = _descriptor(
        "color_filter",
        colors=",".join(str(i) for i in sorted(wanted_idx)),
        coverage_theta=coverage_theta,
    )
    return ranked_result_set(scored, desc)


def similarity_search(
    corpus: Corpus, probe_id: str, k: int = DEFAULT_K, space: str = "color"
) -> ResultSet:
    """Exact k-nearest-neighbor query by example.

    Linear scan over the chosen feature space (L1 on histograms for "color",
    cosine on concept vectors for "concept"); the probe itself is excluded
    and scores are negated distances.
    """
    if space not in SPACES:
        raise ValueError(f"space must be one of {SPACES}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if probe_id not in corpus.keyframes:
        raise UnknownKeyframe(f"unknown keyframe {probe_id!r}")

    ids, matrix = corpus.histogram_index if space == "color" else corpus.concept_index
    try:
        probe_row = ids.index(probe_id)
    except ValueError:
        raise ZeroVector(f"keyframe {probe_id!r} has no usable {space} vector") from None
    probe = matrix[probe_row]
    if not probe.any():
        raise ZeroVector(f"keyframe {probe_id!r} has an all-zero {space} vector")

    if space == "color":
        dists = np.abs(matrix - probe).sum(axis=1)
    else:
        norms = np.linalg.norm(matrix, axis=1)
        dists = np.maximum(1.0 - (matrix @ probe) / (norms * np.linalg.norm(probe)), 0.0)
    scored = [
        (kf_id, -float(d)) for kf_id, d in zip(ids, dists) if kf_id != probe_id
    ]
    desc = _descriptor("similarity_search", probe=probe_id, k=k, space=space)
    return ranked_result_set(scored, desc, limit=k)


def sketch_search(
    corpus: Corpus, sketch: Mapping[int, int], min_match: int = 1
) -> ResultSet:
    """Match a partial 3x3 color sketch against keyframe spatial grids.

    ``sketch`` maps cell index (0..8, row-major) to a palette index; a
    keyframe scores one point per set cell that equals its own grid cell and
    is returned when it reaches ``min_match``.
    """
    cells = {int(c): colorfeat.palette_index(p) for c, p in sketch.items()}
    if not cells:
        raise EmptySketch("sketch has no set cells")
    if any(not 0 <= c < 9 for c in cells):
        raise ValueError("sketch cell indices must lie in 0..8")
    if not 1 <= min_match <= len(cells):
        raise BadMinMatch(f"min_match must lie in 1..{len(cells)}, got {min_match}")
    scored = []
    for kf in corpus.keyframes.values():
        if kf.spatial_grid is None:
            continue
        score = sum(1 for c, p in cells.items() if int(kf.spatial_grid[c]) == p)
        if score >= min_match:
            scored.append((kf.id, float(score)))
    desc = _descriptor(
        "sketch",
        cells=";".join(f"{c}={p}" for c, p in sorted(cells.items())),
        min_match=min_match,
    )
    return ranked_result_set(scored, desc)


def shot_filter(corpus: Corpus, results: ResultSet, video_id: str) -> ResultSet:
    """Restrict a result set to keyframes of one video (scores preserved)."""
    if video_id not in corpus.videos:
        raise UnknownVideo(f"unknown video {video_id!r}")
    kept = [
        (kf_id, score)
        for kf_id, score in results.entries
        if corpus.keyframes[kf_id].video_id == video_id
    ]
    desc = _descriptor("shot_filter", video=video_id, source=results.query.feature)
    return ResultSet(entries=tuple(kept), query=desc)


class SearchHistory:
    """Bounded stack of previous result sets plus the sticky similarity tab.

    ``back`` pops the most recent result set but never clears
    ``last_similarity``: the similarity tab keeps showing the results of the
    previous similarity search while the user navigates elsewhere.
    """

    def __init__(self, capacity: int = HISTORY_CAPACITY):
        self.capacity = capacity
        self._stack: list[ResultSet] = []
        self.last_similarity: ResultSet | None = None

    def __len__(self) -> int:
        return len(self._stack)

    def push(self, results: ResultSet) -> None:
        self._stack.append(results)
        if len(self._stack) > self.capacity:
            del self._stack[0]
        if results.query.feature == "similarity_search":
            self.last_similarity = results

    def back(self) -> ResultSet | None:
        if not self._stack:
            return None
        return self._stack.pop()

    def current(self) -> ResultSet | None:
        return self._stack[-1] if self._stack else None
