"""Self-organizing maps and the feature-map catalog.

The trainer is an sklearn-style estimator so the grid arrangement composes
with the usual ecosystem (get_params/clone, fit/predict/transform). Training
is the classic online Kohonen loop and is fully deterministic for a given
(sample order, parameters, seed); the pinned generator is numpy's default
PCG64 (``np.random.default_rng(seed)``).

A FeatureMap is a fitted map plus the per-cell keyframe assignments; the
catalog holds one color map over the whole corpus and one concept map per
label with enough members.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, clone
from sklearn.utils.validation import check_array, check_is_fitted

from .corpus import Corpus
from .errors import DimensionMismatch, EmptyInput

METRICS = ("l1", "euclidean", "cosine")

COLOR_MAP_ID = "color:all"
COLOR_MAP_TITLE = "all — color"

DEFAULT_MIN_MEMBERS = 576
DEFAULT_CONCEPT_THRESHOLD = 0.5


def _feature_distances(weights: np.ndarray, block: np.ndarray, metric: str) -> np.ndarray:
    """Distance from each row of ``block`` to each weight vector; (n, units)."""
    if metric == "l1":
        return np.abs(block[:, None, :] - weights[None, :, :]).sum(axis=2)
    if metric == "euclidean":
        return np.sqrt(((block[:, None, :] - weights[None, :, :]) ** 2).sum(axis=2))
    if metric == "cosine":
        bn = np.linalg.norm(block, axis=1)
        wn = np.linalg.norm(weights, axis=1)
        sim = np.zeros((block.shape[0], weights.shape[0]))
        ok_b = bn > 0
        ok_w = wn > 0
        if ok_b.any() and ok_w.any():
            sub = block[ok_b] @ weights[ok_w].T / np.outer(bn[ok_b], wn[ok_w])
            rows = np.where(ok_b)[0][:, None]
            sim[rows, np.where(ok_w)[0]] = sub
        return np.maximum(1.0 - sim, 0.0)  # zero-norm vectors sit at max distance
    raise ValueError(f"unknown metric {metric!r}")


def pairwise_unit_distances(
    weights: np.ndarray, X: np.ndarray, metric: str, chunk: int = 256
) -> np.ndarray:
    out = np.empty((X.shape[0], weights.shape[0]))
    for start in range(0, X.shape[0], chunk):
        out[start : start + chunk] = _feature_distances(weights, X[start : start + chunk], metric)
    return out


def quantization_error(weights: np.ndarray, X: np.ndarray, metric: str) -> float:
    """Mean distance from each sample to its best matching unit's weight."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise EmptyInput("quantization error needs at least one sample")
    if X.shape[1] != weights.shape[1]:
        raise DimensionMismatch(f"samples have dim {X.shape[1]}, map has dim {weights.shape[1]}")
    return float(pairwise_unit_distances(weights, X, metric).min(axis=1).mean())


class SelfOrganizingMap(BaseEstimator):
    """Online Kohonen map on a width x height grid.

    Unit u sits at grid coordinates (u % width, u // width). Training runs
    epochs * n_samples steps; the learning rate decays linearly from alpha0
    to alpha_end and the neighborhood radius geometrically from sigma0
    (default max(width, height) / 2) to sigma_end. The best matching unit is
    the argmin of ``metric`` distance in feature space, ties to the lowest
    unit index, and every unit is pulled toward the sample with a Gaussian
    weight in grid distance.

    Parameters are stored verbatim; fitted state lives in ``weights_`` and
    ``initial_weights_`` (the state right after seeded initialization).
    """

    def __init__(
        self,
        width: int = 16,
        height: int = 16,
        epochs: int = 20,
        alpha0: float = 0.5,
        alpha_end: float = 0.01,
        sigma0: float | None = None,
        sigma_end: float = 0.5,
        seed: int = 0,
        metric: str = "l1",
    ):
        self.width = width
        self.height = height
        self.epochs = epochs
        self.alpha0 = alpha0
        self.alpha_end = alpha_end
        self.sigma0 = sigma0
        self.sigma_end = sigma_end
        self.seed = seed
        self.metric = metric

    @property
    def n_units(self) -> int:
        return self.width * self.height

    def grid_position(self, unit: int) -> tuple[int, int]:
        return unit % self.width, unit // self.width

    def _validate_params(self) -> float:
        if self.width < 1 or self.height < 1:
            raise ValueError("grid must be at least 1x1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if not self.alpha0 > self.alpha_end > 0:
            raise ValueError("need alpha0 > alpha_end > 0")
        sigma0 = max(self.width, self.height) / 2 if self.sigma0 is None else self.sigma0
        if not sigma0 >= self.sigma_end > 0:
            raise ValueError("need sigma0 >= sigma_end > 0")
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}")
        return float(sigma0)

    def _grid_sq_distances(self) -> np.ndarray:
        units = np.arange(self.n_units)
        coords = np.stack([units % self.width, units // self.width], axis=1).astype(float)
        diff = coords[:, None, :] - coords[None, :, :]
        return (diff**2).sum(axis=2)

    def _check_X(self, X, *, allow_empty: bool = False) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        if X.ndim != 2:
            raise DimensionMismatch(f"expected a 2d sample array, got ndim={X.ndim}")
        if X.shape[0] == 0:
            if allow_empty:
                return X
            raise EmptyInput("need at least one sample")
        return check_array(X, dtype=float)

    def fit(self, X, y=None):
        sigma0 = self._validate_params()
        X = self._check_X(X)
        n, dim = X.shape
        rng = np.random.default_rng(self.seed)

        weights = rng.uniform(X.min(axis=0), X.max(axis=0), size=(self.n_units, dim))
        self.initial_weights_ = weights.copy()

        grid_d2 = self._grid_sq_distances()
        total = self.epochs * n
        t = 0
        for _ in range(self.epochs):
            for i in rng.permutation(n):
                x = X[i]
                frac = t / (total - 1) if total > 1 else 0.0
                alpha = self.alpha0 + (self.alpha_end - self.alpha0) * frac
                sigma = sigma0 * (self.sigma_end / sigma0) ** frac
                bmu = int(_feature_distances(weights, x[None, :], self.metric)[0].argmin())
                h = np.exp(-grid_d2[bmu] / (2.0 * sigma * sigma))
                weights += alpha * h[:, None] * (x - weights)
                t += 1

        self.weights_ = weights
        self.sigma0_ = sigma0
        self.n_features_in_ = dim
        self.n_iter_ = total
        return self

    def _check_fitted_X(self, X, *, allow_empty: bool = False) -> np.ndarray:
        check_is_fitted(self, "weights_")
        X = self._check_X(X, allow_empty=allow_empty)
        if X.shape[0] and X.shape[1] != self.n_features_in_:
            raise DimensionMismatch(
                f"expected vectors of dim {self.n_features_in_}, got {X.shape[1]}"
            )
        return X

    def transform(self, X) -> np.ndarray:
        """Feature-space distance from each sample to every unit; (n, units)."""
        X = self._check_fitted_X(X, allow_empty=True)
        if X.shape[0] == 0:
            return np.zeros((0, self.n_units))
        return pairwise_unit_distances(self.weights_, X, self.metric)

    def predict(self, X) -> np.ndarray:
        """Best matching unit index per sample (ties -> lowest unit index)."""
        X = self._check_fitted_X(X, allow_empty=True)
        if X.shape[0] == 0:
            return np.zeros(0, dtype=int)
        return pairwise_unit_distances(self.weights_, X, self.metric).argmin(axis=1)

    def quantization_error(self, X) -> float:
        X = self._check_fitted_X(X)
        return quantization_error(self.weights_, X, self.metric)


def best_matching_unit(model: SelfOrganizingMap, vector) -> int:
    """BMU of a single vector; equals an exhaustive scan over all units."""
    return int(model.predict(np.asarray(vector, dtype=float)[None, :])[0])


def assign_keyframes(
    model: SelfOrganizingMap, members: Sequence[tuple[str, np.ndarray]]
) -> list[list[str]]:
    """Place keyframes into their BMU cells.

    Within a cell, members are ordered by distance to the cell weight
    (ties -> id ascending); the first member is the cell representative.
    """
    cells: list[list[str]] = [[] for _ in range(model.n_units)]
    if not members:
        return cells
    ids = [m[0] for m in members]
    X = np.stack([np.asarray(m[1], dtype=float) for m in members])
    dists = model.transform(X)
    units = dists.argmin(axis=1)
    buckets: dict[int, list[tuple[float, str]]] = {}
    for row, (kf_id, unit) in enumerate(zip(ids, units)):
        buckets.setdefault(int(unit), []).append((float(dists[row, unit]), kf_id))
    for unit, entries in buckets.items():
        entries.sort(key=lambda e: (e[0], e[1]))
        cells[unit] = [kf_id for _, kf_id in entries]
    return cells


@dataclass
class FeatureMap:
    id: str
    title: str
    kind: str  # "color" | "concept"
    concept_label: str | None
    model: SelfOrganizingMap
    cells: list[list[str]]

    @property
    def member_count(self) -> int:
        return sum(len(cell) for cell in self.cells)

    def members(self) -> list[str]:
        return [kf_id for cell in self.cells for kf_id in cell]


@dataclass
class MapCatalog:
    maps: dict[str, FeatureMap] = field(default_factory=dict)
    min_members: int = DEFAULT_MIN_MEMBERS
    concept_threshold: float = DEFAULT_CONCEPT_THRESHOLD

    def __len__(self) -> int:
        return len(self.maps)

    def titles(self) -> dict[str, str]:
        return {map_id: fmap.title for map_id, fmap in self.maps.items()}


def build_map_catalog(
    corpus: Corpus,
    som: SelfOrganizingMap | None = None,
    min_members: int = DEFAULT_MIN_MEMBERS,
    concept_threshold: float = DEFAULT_CONCEPT_THRESHOLD,
) -> MapCatalog:
    """Train the full feature-map catalog for a corpus.

    One color map over every keyframe with a histogram (L1 space), then one
    concept map per label whose member set {k : score(k, label) >= threshold}
    reaches ``min_members``, trained on the members' concept vectors (cosine
    space). Construction order and map ids are deterministic: the color map
    first, then concepts in lexicographic label order.
    """
    template = SelfOrganizingMap() if som is None else som
    catalog = MapCatalog(min_members=min_members, concept_threshold=concept_threshold)

    hist_ids, hist_matrix = corpus.histogram_index
    if hist_ids:
        model = clone(template)
        model.set_params(metric="l1")
        model.fit(hist_matrix)
        catalog.maps[COLOR_MAP_ID] = FeatureMap(
            id=COLOR_MAP_ID,
            title=COLOR_MAP_TITLE,
            kind="color",
            concept_label=None,
            model=model,
            cells=assign_keyframes(model, list(zip(hist_ids, hist_matrix))),
        )

    universe = corpus.concept_labels
    if not universe:
        return catalog
    label_pos = {label: i for i, label in enumerate(universe)}
    members_by_label: dict[str, list[str]] = {label: [] for label in universe}
    for kf in corpus.keyframes.values():
        for label, score in kf.concepts.items():
            if score >= concept_threshold:
                members_by_label[label].append(kf.id)

    for label in universe:
        member_ids = members_by_label[label]
        if len(member_ids) < min_members:
            continue
        vectors = np.zeros((len(member_ids), len(universe)))
        for row, kf_id in enumerate(member_ids):
            for lab, score in corpus.keyframes[kf_id].concepts.items():
                vectors[row, label_pos[lab]] = score
        model = clone(template)
        model.set_params(metric="cosine")
        model.fit(vectors)
        map_id = f"concept:{label}"
        catalog.maps[map_id] = FeatureMap(
            id=map_id,
            title=label,
            kind="concept",
            concept_label=label,
            model=model,
            cells=assign_keyframes(model, list(zip(member_ids, vectors))),
        )
    return catalog


# ---------------------------------------------------------------------------
# catalog export / import (one JSON document per map)

def feature_map_to_dict(fmap: FeatureMap, include_weights: bool = True) -> dict:
    doc = {
        "id": fmap.id,
        "title": fmap.title,
        "kind": fmap.kind,
        "concept_label": fmap.concept_label,
        "width": fmap.model.width,
        "height": fmap.model.height,
        "cells": [list(cell) for cell in fmap.cells],
    }
    if include_weights:
        doc["weights"] = [[float(v) for v in w] for w in fmap.model.weights_]
    return doc


def feature_map_from_dict(doc: dict) -> FeatureMap:
    metric = "l1" if doc["kind"] == "color" else "cosine"
    model = SelfOrganizingMap(width=doc["width"], height=doc["height"], metric=metric)
    if doc.get("weights") is not None:
        model.weights_ = np.asarray(doc["weights"], dtype=float)
        model.n_features_in_ = model.weights_.shape[1] if model.weights_.size else 0
        model.initial_weights_ = model.weights_
        model.sigma0_ = max(doc["width"], doc["height"]) / 2
    return FeatureMap(
        id=doc["id"],
        title=doc["title"],
        kind=doc["kind"],
        concept_label=doc.get("concept_label"),
        model=model,
        cells=[list(cell) for cell in doc["cells"]],
    )


def _map_filename(map_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "__", map_id) + ".json"


def save_catalog(catalog: MapCatalog, out_dir, include_weights: bool = True) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    index = {
        "min_members": catalog.min_members,
        "concept_threshold": catalog.concept_threshold,
        "maps": [],
    }
    for map_id, fmap in catalog.maps.items():
        filename = _map_filename(map_id)
        with open(out_dir / filename, "w", encoding="utf-8") as fh:
            json.dump(feature_map_to_dict(fmap, include_weights), fh)
        index["maps"].append({"id": map_id, "file": filename})
    with open(out_dir / "catalog.json", "w", encoding="utf-8") as fh:
        json.dump(index, fh)


def load_catalog(in_dir) -> MapCatalog:
    in_dir = Path(in_dir)
    with open(in_dir / "catalog.json", "r", encoding="utf-8") as fh:
        index = json.load(fh)
    catalog = MapCatalog(
        min_members=index["min_members"], concept_threshold=index["concept_threshold"]
    )
    for entry in index["maps"]:
        with open(in_dir / entry["file"], "r", encoding="utf-8") as fh:
            fmap = feature_map_from_dict(json.load(fh))
        catalog.maps[fmap.id] = fmap
    return catalog
