"""Dataset model: videos, shots, keyframes, and the manifest that carries them.

A corpus is immutable once loaded. Keyframe features come either from the
referenced P6 image files (computed here via colorfeat) or from precomputed
fields in the manifest, so the engine also runs image-free.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from . import colorfeat
from .errors import (
    DanglingReference,
    DimensionMismatch,
    EmptyInput,
    ImageDecodeError,
    MalformedManifest,
    UnknownVideo,
)
from .images import Image, load_ppm

DEFAULT_SHOT_TAU = 0.4


@dataclass(frozen=True)
class Shot:
    video_id: str
    shot_index: int
    start_frame: int
    end_frame: int
    keyframe_id: str


@dataclass(eq=False)
class Keyframe:
    id: str
    video_id: str
    shot_index: int
    timestamp_s: float
    image_ref: str | None = None
    histogram: np.ndarray | None = None
    spatial_grid: np.ndarray | None = None
    concepts: dict[str, float] = field(default_factory=dict)
    palette_coverage: np.ndarray | None = None

    def __eq__(self, other) -> bool:
        if not isinstance(other, Keyframe):
            return NotImplemented
        return (
            self.id == other.id
            and self.video_id == other.video_id
            and self.shot_index == other.shot_index
            and self.timestamp_s == other.timestamp_s
            and self.image_ref == other.image_ref
            and _opt_array_equal(self.histogram, other.histogram)
            and _opt_array_equal(self.spatial_grid, other.spatial_grid)
            and self.concepts == other.concepts
        )


def _opt_array_equal(a, b) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return bool(np.array_equal(a, b))


@dataclass(eq=False)
class Corpus:
    videos: list[str]
    shots: dict[str, list[Shot]]
    keyframes: dict[str, Keyframe]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return (
            self.videos == other.videos
            and self.shots == other.shots
            and self.keyframes == other.keyframes
        )

    @cached_property
    def concept_labels(self) -> list[str]:
        """Sorted universe of concept labels across all keyframes."""
        return colorfeat.concept_label_universe(k.concepts for k in self.keyframes.values())

    @cached_property
    def histogram_index(self) -> tuple[list[str], np.ndarray]:
        """(ids, matrix) over keyframes that carry a histogram."""
        ids = [k.id for k in self.keyframes.values() if k.histogram is not None]
        if not ids:
            return [], np.zeros((0, colorfeat.HISTOGRAM_BINS))
        matrix = np.stack([self.keyframes[i].histogram for i in ids])
        return ids, matrix

    @cached_property
    def concept_index(self) -> tuple[list[str], np.ndarray]:
        """(ids, matrix) over keyframes with a non-zero concept vector."""
        universe = self.concept_labels
        ids = []
        rows = []
        for k in self.keyframes.values():
            if not k.concepts:
                continue
            row = colorfeat.project_concepts(k.concepts, universe)
            if row.any():
                ids.append(k.id)
                rows.append(row)
        if not ids:
            return [], np.zeros((0, len(universe)))
        return ids, np.stack(rows)


# ---------------------------------------------------------------------------
# manifest loading

def load_manifest(path) -> Corpus:
    """Load a corpus from a JSON manifest (see README for the schema)."""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise MalformedManifest(f"manifest not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise MalformedManifest(f"manifest is not valid JSON: {exc}") from None
    return corpus_from_manifest(doc, base_dir=path.parent)


def corpus_from_manifest(doc, base_dir=None) -> Corpus:
    if not isinstance(doc, dict):
        raise MalformedManifest("manifest root must be a JSON object")
    for key in ("videos", "shots", "keyframes"):
        if key not in doc:
            raise MalformedManifest(f"manifest is missing {key!r}")

    videos = _parse_videos(doc["videos"])
    video_set = set(videos)
    shots = _parse_shots(doc["shots"], video_set)
    keyframes = _parse_keyframes(doc["keyframes"], video_set, base_dir)

    shot_for_keyframe = {s.keyframe_id: s for per_video in shots.values() for s in per_video}
    for per_video in shots.values():
        for shot in per_video:
            if shot.keyframe_id not in keyframes:
                raise DanglingReference(
                    f"shot {shot.video_id}/{shot.shot_index} names unknown keyframe "
                    f"{shot.keyframe_id!r}"
                )
    for kf in keyframes.values():
        shot = shot_for_keyframe.get(kf.id)
        if shot is None or shot.video_id != kf.video_id or shot.shot_index != kf.shot_index:
            raise DanglingReference(
                f"keyframe {kf.id!r} does not match a shot at "
                f"({kf.video_id}, {kf.shot_index})"
            )
    return Corpus(videos=videos, shots=shots, keyframes=keyframes)


def _parse_videos(raw) -> list[str]:
    if not isinstance(raw, list) or not all(isinstance(v, str) and v for v in raw):
        raise MalformedManifest("'videos' must be a list of non-empty strings")
    if len(set(raw)) != len(raw):
        raise MalformedManifest("duplicate video id in 'videos'")
    return list(raw)


def _require(entry: dict, key: str, kind, what: str):
    if key not in entry:
        raise MalformedManifest(f"{what} is missing {key!r}")
    value = entry[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise MalformedManifest(f"{what}: {key!r} must be a number")
        return float(value)
    if not isinstance(value, kind) or isinstance(value, bool):
        raise MalformedManifest(f"{what}: {key!r} must be {kind.__name__}")
    return value


def _parse_shots(raw, video_set) -> dict[str, list[Shot]]:
    if not isinstance(raw, list):
        raise MalformedManifest("'shots' must be a list")
    by_video: dict[str, list[Shot]] = {}
    for i, entry in enumerate(raw):
        what = f"shot entry {i}"
        if not isinstance(entry, dict):
            raise MalformedManifest(f"{what} must be an object")
        video = _require(entry, "video", str, what)
        if video not in video_set:
            raise DanglingReference(f"{what} references unknown video {video!r}")
        shot = Shot(
            video_id=video,
            shot_index=_require(entry, "index", int, what),
            start_frame=_require(entry, "start_frame", int, what),
            end_frame=_require(entry, "end_frame", int, what),
            keyframe_id=_require(entry, "keyframe", str, what),
        )
        if shot.shot_index < 0 or shot.start_frame < 0 or shot.end_frame < shot.start_frame:
            raise MalformedManifest(f"{what} has inconsistent frame numbers")
        by_video.setdefault(video, []).append(shot)

    for video, per_video in by_video.items():
        per_video.sort(key=lambda s: s.shot_index)
        for k, shot in enumerate(per_video):
            if shot.shot_index != k:
                raise MalformedManifest(f"video {video!r}: shot indices must be 0..n-1 without gaps")
            if k > 0 and shot.start_frame != per_video[k - 1].end_frame + 1:
                raise MalformedManifest(
                    f"video {video!r}: shot {k} must start at frame "
                    f"{per_video[k - 1].end_frame + 1}"
                )
    return by_video


def _parse_keyframes(raw, video_set, base_dir) -> dict[str, Keyframe]:
    if not isinstance(raw, list):
        raise MalformedManifest("'keyframes' must be a list")
    keyframes: dict[str, Keyframe] = {}
    for i, entry in enumerate(raw):
        what = f"keyframe entry {i}"
        if not isinstance(entry, dict):
            raise MalformedManifest(f"{what} must be an object")
        kf_id = _require(entry, "id", str, what)
        if kf_id in keyframes:
            raise MalformedManifest(f"duplicate keyframe id {kf_id!r}")
        video = _require(entry, "video", str, what)
        if video not in video_set:
            raise DanglingReference(f"{what} references unknown video {video!r}")
        timestamp = _require(entry, "timestamp_s", float, what)
        if timestamp < 0:
            raise MalformedManifest(f"{what}: timestamp_s must be >= 0")

        kf = Keyframe(
            id=kf_id,
            video_id=video,
            shot_index=_require(entry, "shot_index", int, what),
            timestamp_s=timestamp,
            image_ref=entry.get("image"),
            concepts=_parse_concepts(entry.get("concepts"), what),
        )
        if kf.image_ref is not None:
            image = _load_keyframe_image(kf.image_ref, base_dir, what)
            kf.histogram = colorfeat.color_histogram(image)
            kf.spatial_grid = colorfeat.spatial_color_grid(image)
            kf.palette_coverage = colorfeat.palette_coverage(image)
        else:
            kf.histogram = _parse_histogram(entry.get("histogram"), what)
            kf.spatial_grid = _parse_grid(entry.get("spatial_grid"), what)
            if kf.histogram is not None:
                kf.palette_coverage = colorfeat.coverage_from_histogram(kf.histogram)
        keyframes[kf_id] = kf
    return keyframes


def _load_keyframe_image(ref: str, base_dir, what: str) -> Image:
    path = Path(ref)
    if base_dir is not None and not path.is_absolute():
        path = Path(base_dir) / path
    try:
        return load_ppm(path)
    except OSError as exc:
        raise ImageDecodeError(f"{what}: cannot read image {ref!r}: {exc}") from None


def _parse_concepts(raw, what: str) -> dict[str, float]:
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise MalformedManifest(f"{what}: 'concepts' must be an object")
    concepts: dict[str, float] = {}
    for label, score in raw.items():
        if not isinstance(label, str) or not label:
            raise MalformedManifest(f"{what}: concept labels must be non-empty strings")
        if not isinstance(score, (int, float)) or isinstance(score, bool) or not 0 <= score <= 1:
            raise MalformedManifest(f"{what}: concept score for {label!r} outside [0, 1]")
        concepts[label] = float(score)
    return concepts


def _parse_histogram(raw, what: str) -> np.ndarray | None:
    if raw is None:
        return None
    if not isinstance(raw, list) or len(raw) != colorfeat.HISTOGRAM_BINS:
        raise MalformedManifest(f"{what}: 'histogram' must have {colorfeat.HISTOGRAM_BINS} bins")
    hist = np.asarray(raw, dtype=float)
    if (hist < 0).any():
        raise MalformedManifest(f"{what}: histogram bins must be >= 0")
    if abs(hist.sum() - 1.0) > 1e-9:
        raise MalformedManifest(f"{what}: histogram must sum to 1, got {hist.sum()!r}")
    return hist


def _parse_grid(raw, what: str) -> np.ndarray | None:
    if raw is None:
        return None
    ok = (
        isinstance(raw, list)
        and len(raw) == 9
        and all(isinstance(v, int) and not isinstance(v, bool) and 0 <= v < 12 for v in raw)
    )
    if not ok:
        raise MalformedManifest(f"{what}: 'spatial_grid' must be 9 palette indices")
    return np.asarray(raw, dtype=np.int64)


def corpus_to_manifest(corpus: Corpus) -> dict:
    """Serialize a corpus back to manifest form (reload yields an equal corpus)."""
    shots = [
        {
            "video": s.video_id,
            "index": s.shot_index,
            "start_frame": s.start_frame,
            "end_frame": s.end_frame,
            "keyframe": s.keyframe_id,
        }
        for video in corpus.videos
        for s in corpus.shots.get(video, [])
    ]
    keyframes = []
    for kf in corpus.keyframes.values():
        entry: dict = {
            "id": kf.id,
            "video": kf.video_id,
            "shot_index": kf.shot_index,
            "timestamp_s": kf.timestamp_s,
        }
        if kf.image_ref is not None:
            entry["image"] = kf.image_ref
        else:
            if kf.histogram is not None:
                entry["histogram"] = [float(v) for v in kf.histogram]
            if kf.spatial_grid is not None:
                entry["spatial_grid"] = [int(v) for v in kf.spatial_grid]
        if kf.concepts:
            entry["concepts"] = dict(kf.concepts)
        keyframes.append(entry)
    return {"videos": list(corpus.videos), "shots": shots, "keyframes": keyframes}


def save_manifest(corpus: Corpus, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(corpus_to_manifest(corpus), fh)


# ---------------------------------------------------------------------------
# shot segmentation (fallback for corpora that arrive without shot data)

def segment_shots(frames: list[Image], tau: float = DEFAULT_SHOT_TAU) -> list[int]:
    """Frame indices where a new shot starts (always includes 0).

    A boundary is placed at frame i when the L1 distance between the
    normalized color histograms of frames i-1 and i exceeds tau.
    """
    if not frames:
        raise EmptyInput("no frames to segment")
    if not 0 < tau <= 2:
        raise ValueError(f"tau must lie in (0, 2], got {tau}")
    size = (frames[0].width, frames[0].height)
    for f in frames[1:]:
        if (f.width, f.height) != size:
            raise DimensionMismatch(f"expected all frames {size[0]}x{size[1]}")
    hists = [colorfeat.color_histogram(f) for f in frames]
    boundaries = [0]
    for i in range(1, len(frames)):
        if colorfeat.l1_distance(hists[i - 1], hists[i]) > tau:
            boundaries.append(i)
    return boundaries


def shot_spans(boundaries: list[int], frame_count: int) -> list[tuple[int, int, int]]:
    """Expand boundaries to (start_frame, end_frame, keyframe_frame) spans.

    The keyframe of a shot is its middle frame, index (start+end)//2.
    """
    spans = []
    for k, start in enumerate(boundaries):
        end = (boundaries[k + 1] - 1) if k + 1 < len(boundaries) else frame_count - 1
        spans.append((start, end, (start + end) // 2))
    return spans


def shot_view(corpus: Corpus, video_id: str) -> list[tuple[Shot, Keyframe]]:
    """Shots of one video in shot order, each paired with its keyframe."""
    if video_id not in corpus.shots and video_id not in corpus.videos:
        raise UnknownVideo(f"unknown video {video_id!r}")
    return [
        (shot, corpus.keyframes[shot.keyframe_id])
        for shot in corpus.shots.get(video_id, [])
    ]
