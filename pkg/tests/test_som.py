import numpy as np
import pytest

from conftest import concept_count_corpus

from divex.errors import DimensionMismatch, EmptyInput
from divex.som import (
    COLOR_MAP_ID,
    COLOR_MAP_TITLE,
    FeatureMap,
    SelfOrganizingMap,
    assign_keyframes,
    best_matching_unit,
    build_map_catalog,
    feature_map_from_dict,
    feature_map_to_dict,
    load_catalog,
    quantization_error,
    save_catalog,
)

DIM = 216


def two_cluster_samples(n_per_cluster=20, seed=7):
    """Well-separated clusters around e0 and e1 in 216 dimensions."""
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.0, 0.05, size=(n_per_cluster, DIM))
    a[:, 0] += 1.0
    b = rng.uniform(0.0, 0.05, size=(n_per_cluster, DIM))
    b[:, 1] += 1.0
    return a, b


def bmu_oracle(weights, vector, metric="l1"):
    """Exhaustive scan in plain Python, independent of the numpy path."""
    best_idx, best_dist = 0, None
    for u, w in enumerate(weights):
        if metric == "l1":
            d = sum(abs(float(wi) - float(vi)) for wi, vi in zip(w, vector))
        else:
            raise NotImplementedError
        if best_dist is None or d < best_dist:
            best_idx, best_dist = u, d
    return best_idx


class TestTraining:
    def test_deterministic_bitwise(self):
        a, b = two_cluster_samples()
        X = np.vstack([a, b])
        params = dict(width=6, height=6, epochs=5, seed=42, metric="l1")
        w1 = SelfOrganizingMap(**params).fit(X).weights_
        w2 = SelfOrganizingMap(**params).fit(X).weights_
        assert np.array_equal(w1, w2)

    def test_single_sample_is_exact_attractor(self):
        # per-dimension min == max for one sample, so the whole map sits on it
        x = np.full((1, DIM), 0.3)
        som = SelfOrganizingMap(width=4, height=4, epochs=20, seed=1).fit(x)
        assert som.quantization_error(x) == 0.0
        assert best_matching_unit(som, x[0]) == 0  # all-tie -> lowest unit

    def test_error_strictly_decreases_with_more_epochs(self):
        a, b = two_cluster_samples()
        X = np.vstack([a, b])
        errors = []
        for epochs in (1, 2, 4, 8, 20):
            som = SelfOrganizingMap(width=8, height=8, epochs=epochs, seed=42).fit(X)
            errors.append(som.quantization_error(X))
        assert all(e1 > e2 for e1, e2 in zip(errors, errors[1:]))

    def test_two_clusters_occupy_disjoint_cells(self):
        a, b = two_cluster_samples()
        som = SelfOrganizingMap(width=8, height=8, epochs=20, seed=42).fit(np.vstack([a, b]))
        cells_a = set(som.predict(a).tolist())
        cells_b = set(som.predict(b).tolist())
        assert cells_a.isdisjoint(cells_b)

    def test_training_reduces_quantization_error(self):
        a, b = two_cluster_samples()
        X = np.vstack([a, b])
        som = SelfOrganizingMap(width=8, height=8, epochs=20, seed=42).fit(X)
        assert som.quantization_error(X) < quantization_error(som.initial_weights_, X, "l1")

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            SelfOrganizingMap().fit(np.zeros((0, DIM)))

    def test_bad_params(self):
        with pytest.raises(ValueError):
            SelfOrganizingMap(alpha0=0.01, alpha_end=0.5).fit(np.ones((2, 3)))
        with pytest.raises(ValueError):
            SelfOrganizingMap(epochs=0).fit(np.ones((2, 3)))

    def test_get_params_round_trip(self):
        som = SelfOrganizingMap(width=4, height=3, seed=9, metric="cosine")
        rebuilt = SelfOrganizingMap(**som.get_params())
        assert rebuilt.get_params() == som.get_params()


class TestBmu:
    @pytest.fixture
    def fitted(self):
        a, b = two_cluster_samples(n_per_cluster=10)
        return SelfOrganizingMap(width=5, height=4, epochs=3, seed=3).fit(np.vstack([a, b]))

    def test_exact_weight_vector(self, fitted):
        assert best_matching_unit(fitted, fitted.weights_[7]) == 7

    def test_matches_exhaustive_oracle(self, fitted):
        rng = np.random.default_rng(17)
        for _ in range(50):
            v = rng.uniform(0.0, 1.2, size=DIM)
            assert best_matching_unit(fitted, v) == bmu_oracle(fitted.weights_, v)

    def test_dimension_mismatch(self, fitted):
        with pytest.raises(DimensionMismatch):
            best_matching_unit(fitted, np.ones(7))

    def test_quantization_error_empty(self, fitted):
        with pytest.raises(EmptyInput):
            fitted.quantization_error(np.zeros((0, DIM)))


class TestAssignKeyframes:
    @pytest.fixture
    def fitted(self):
        rng = np.random.default_rng(5)
        return SelfOrganizingMap(width=3, height=3, epochs=2, seed=5).fit(
            rng.uniform(size=(12, 4))
        )

    def test_no_members(self, fitted):
        cells = assign_keyframes(fitted, [])
        assert cells == [[] for _ in range(9)]

    def test_single_member_is_representative(self, fitted):
        cells = assign_keyframes(fitted, [("kf", np.full(4, 0.5))])
        non_empty = [c for c in cells if c]
        assert non_empty == [["kf"]]

    def test_partition(self, fitted):
        rng = np.random.default_rng(6)
        members = [(f"k{i:03d}", rng.uniform(size=4)) for i in range(100)]
        cells = assign_keyframes(fitted, members)
        flat = [kf for cell in cells for kf in cell]
        assert sorted(flat) == sorted(m[0] for m in members)
        assert len(set(flat)) == 100

    def test_representative_is_closest_and_ties_break_by_id(self):
        som = SelfOrganizingMap(width=2, height=2, epochs=1, seed=0).fit(np.eye(2))
        som.weights_ = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0], [10.0, 10.0]])
        members = [
            ("far", np.array([1.0, 1.0])),
            ("b_exact", np.array([0.0, 0.0])),
            ("a_exact", np.array([0.0, 0.0])),
        ]
        cells = assign_keyframes(som, members)
        assert cells[0] == ["a_exact", "b_exact", "far"]


class TestCatalog:
    def test_gate_includes_only_frequent_concepts(self):
        corpus = concept_count_corpus({"faces": 6, "texts": 5, "cars": 9})
        catalog = build_map_catalog(
            corpus,
            som=SelfOrganizingMap(width=3, height=3, epochs=2, seed=0),
            min_members=6,
        )
        assert set(catalog.maps) == {COLOR_MAP_ID, "concept:cars", "concept:faces"}
        assert list(catalog.maps) == [COLOR_MAP_ID, "concept:cars", "concept:faces"]

    def test_color_map_only_when_no_concepts(self):
        corpus = concept_count_corpus({})
        # corpus helper yields no keyframes for an empty spec; build a small one
        from conftest import build_corpus, one_hot_histogram

        corpus = build_corpus(
            {"v1": [{"id": f"k{i}", "histogram": one_hot_histogram(i)} for i in range(4)]}
        )
        catalog = build_map_catalog(
            corpus, som=SelfOrganizingMap(width=2, height=2, epochs=1, seed=0), min_members=2
        )
        assert list(catalog.maps) == [COLOR_MAP_ID]
        assert catalog.maps[COLOR_MAP_ID].title == COLOR_MAP_TITLE

    def test_concept_maps_partition_their_members(self):
        corpus = concept_count_corpus({"faces": 8})
        catalog = build_map_catalog(
            corpus, som=SelfOrganizingMap(width=3, height=3, epochs=2, seed=1), min_members=5
        )
        fmap = catalog.maps["concept:faces"]
        assert fmap.kind == "concept"
        assert fmap.concept_label == "faces"
        assert fmap.model.metric == "cosine"
        assert sorted(fmap.members()) == [f"k{i:05d}" for i in range(8)]

    def test_member_keyframe_in_exactly_one_cell(self):
        corpus = concept_count_corpus({"faces": 10})
        catalog = build_map_catalog(
            corpus, som=SelfOrganizingMap(width=4, height=4, epochs=2, seed=2), min_members=5
        )
        members = catalog.maps["concept:faces"].members()
        assert len(members) == len(set(members))

    def test_deterministic_catalog(self):
        corpus = concept_count_corpus({"faces": 7, "cars": 7})
        template = SelfOrganizingMap(width=3, height=3, epochs=2, seed=4)
        c1 = build_map_catalog(corpus, som=template, min_members=5)
        c2 = build_map_catalog(corpus, som=template, min_members=5)
        assert list(c1.maps) == list(c2.maps)
        for map_id in c1.maps:
            assert np.array_equal(c1.maps[map_id].model.weights_, c2.maps[map_id].model.weights_)
            assert c1.maps[map_id].cells == c2.maps[map_id].cells


class TestCatalogExport:
    def test_map_dict_round_trip(self):
        corpus = concept_count_corpus({"faces": 6})
        catalog = build_map_catalog(
            corpus, som=SelfOrganizingMap(width=3, height=2, epochs=1, seed=0), min_members=5
        )
        fmap = catalog.maps["concept:faces"]
        doc = feature_map_to_dict(fmap)
        rebuilt = feature_map_from_dict(doc)
        assert rebuilt.id == fmap.id
        assert rebuilt.title == fmap.title
        assert rebuilt.cells == fmap.cells
        assert np.array_equal(rebuilt.model.weights_, fmap.model.weights_)

    def test_save_load_catalog(self, tmp_path):
        corpus = concept_count_corpus({"faces": 6, "cars": 6})
        catalog = build_map_catalog(
            corpus, som=SelfOrganizingMap(width=3, height=2, epochs=1, seed=0), min_members=5
        )
        save_catalog(catalog, tmp_path / "maps")
        loaded = load_catalog(tmp_path / "maps")
        assert list(loaded.maps) == list(catalog.maps)
        assert loaded.min_members == catalog.min_members
        for map_id, fmap in catalog.maps.items():
            assert loaded.maps[map_id].cells == fmap.cells
