import numpy as np
import pytest
from scipy.spatial.distance import cdist

from descriptors import BinaryDescriptor, DescriptorSet, FloatDescriptor
from errors import IncompatibleDescriptorError, InsufficientTrainSetError, InvalidInputError, InvalidParameterError
from matching import (
    KnnCandidate,
    MatchPair,
    distance,
    distance_matrix,
    knn2_match,
    match_descriptors,
    matches_to_csv,
    ratio_filter,
    read_matches_csv,
    write_matches_csv,
)


def float_set(rng, n, kind="sift"):
    dim = 128 if kind == "sift" else 64
    return DescriptorSet(kind, rng.random((n, dim)).astype(np.float32))


def bits(*ones):
    b = np.zeros(512, dtype=bool)
    b[list(ones)] = True
    return BinaryDescriptor(b, "brisk")


class TestDistance:
    def test_hamming(self):
        assert distance(bits(0, 1, 2), bits(2, 3)) == 3.0

    def test_euclidean(self):
        a = np.zeros(64)
        b = np.zeros(64)
        b[0], b[1] = 3.0, 4.0
        assert distance(FloatDescriptor(a, "surf"), FloatDescriptor(b, "surf")) == pytest.approx(5.0)

    def test_incompatible_kinds(self):
        with pytest.raises(IncompatibleDescriptorError):
            distance(bits(0), BinaryDescriptor(np.zeros(512, dtype=bool), "freak"))

    @pytest.mark.parametrize("kind", ["sift", "brisk"])
    def test_metric_axioms(self, kind, rng):
        if kind == "brisk":
            dset = DescriptorSet.from_descriptors(
                [BinaryDescriptor(rng.random(512) < 0.5, "brisk") for _ in range(12)], "brisk")
        else:
            dset = float_set(rng, 12)
        d = distance_matrix(dset, dset)
        assert np.all(d >= 0.0)
        assert np.allclose(np.diag(d), 0.0)
        assert np.allclose(d, d.T)
        # d(i, k) <= d(i, j) + d(j, k) for every triple
        assert np.all(d[:, None, :] <= d[:, :, None] + d[None, :, :] + 1e-9)


class TestKnn2:
    def test_matches_full_sort(self, rng):
        queries = float_set(rng, 200)
        train = float_set(rng, 200)
        got = knn2_match(queries, train)
        d = cdist(queries.data.astype(np.float64), train.data.astype(np.float64))
        order = np.argsort(d, axis=1, kind="stable")
        assert [c.best_index for c in got] == order[:, 0].tolist()
        assert [c.second_index for c in got] == order[:, 1].tolist()
        for c in got:
            assert c.best_distance == pytest.approx(d[c.query_index, c.best_index])
            assert c.best_distance <= c.second_distance

    def test_worker_count_does_not_change_result(self, rng):
        queries = float_set(rng, 300)
        train = float_set(rng, 200)
        assert knn2_match(queries, train, workers=4) == knn2_match(queries, train, workers=1)

    def test_identical_train_rows_break_by_index(self):
        got = knn2_match([bits(0)], [bits(5), bits(1), bits(1)])
        assert (got[0].best_index, got[0].second_index) == (1, 2)

    def test_tie_choice_independent_of_train_order(self):
        a, b, c = bits(1), bits(2), bits(100, 101, 102)
        first = knn2_match([bits(0)], [a, b, c])[0]
        second = knn2_match([bits(0)], [b, a, c])[0]
        picked_first = [a, b, c][first.best_index]
        picked_second = [b, a, c][second.best_index]
        assert picked_first == picked_second
        assert first.best_distance == first.second_distance == 2.0

    def test_database_permutation(self, rng):
        queries = float_set(rng, 20)
        train = float_set(rng, 40)
        perm = rng.permutation(40)
        original = knn2_match(queries, train)
        shuffled = knn2_match(queries, DescriptorSet(train.kind, train.data[perm]))
        for a, b in zip(original, shuffled):
            assert perm[b.best_index] == a.best_index
            assert perm[b.second_index] == a.second_index
            assert (b.best_distance, b.second_distance) == (a.best_distance, a.second_distance)

    def test_binary_database_permutation_with_ties(self, rng):
        rows = [bits(i % 6, 20 + i % 3) for i in range(18)]
        queries = [bits(0), bits(3, 21), bits(5)]
        perm = rng.permutation(len(rows))
        original = knn2_match(queries, rows)
        shuffled = knn2_match(queries, [rows[i] for i in perm])
        for a, b in zip(original, shuffled):
            assert rows[perm[b.best_index]] == rows[a.best_index]
            assert (b.best_distance, b.second_distance) == (a.best_distance, a.second_distance)

    def test_needs_two_train_descriptors(self):
        with pytest.raises(InsufficientTrainSetError):
            knn2_match([bits(0)], [bits(1)])

    def test_empty_queries(self):
        assert knn2_match(DescriptorSet.empty("brisk"), [bits(1), bits(2)]) == []

    def test_incompatible_sets(self, rng):
        with pytest.raises(IncompatibleDescriptorError):
            knn2_match(float_set(rng, 3), float_set(rng, 3, "surf"))


class TestRatioFilter:
    def test_strict_inequality(self):
        candidates = [
            KnnCandidate(0, 4, 3.0, 7, 4.0),
            KnnCandidate(1, 2, 2.9, 3, 4.0),
        ]
        assert ratio_filter(candidates, 0.75) == [MatchPair(1, 2, 2.9)]

    @pytest.mark.parametrize("ratio", [0.0, 1.0, -0.5, 1.5])
    def test_ratio_range(self, ratio):
        with pytest.raises(InvalidParameterError):
            ratio_filter([], ratio)

    def test_monotone_in_ratio(self, rng):
        best = rng.random(200) * 10.0
        candidates = [KnnCandidate(i, 0, float(b), 1, float(b + s))
                      for i, (b, s) in enumerate(zip(best, rng.random(200) * 10.0))]
        kept = [{p.query_index for p in ratio_filter(candidates, r)} for r in (0.2, 0.4, 0.6, 0.75, 0.9, 0.99)]
        for smaller, larger in zip(kept, kept[1:]):
            assert smaller <= larger
        assert len(kept[0]) < len(kept[-1])

    def test_match_descriptors_small_train(self):
        assert match_descriptors([bits(0)], [bits(0)]) == []

    def test_distinct_nearest_survives(self):
        pairs = match_descriptors([bits(0)], [bits(0), bits(200, 201, 202, 203)])
        assert pairs == [MatchPair(0, 0, 0.0)]


class TestMatchCsv:
    def test_round_trip(self, tmp_path):
        pairs = [MatchPair(0, 3, 1.5), MatchPair(2, 1, 12.0)]
        path = tmp_path / "m.csv"
        write_matches_csv(pairs, path)
        assert read_matches_csv(path) == pairs

    def test_header(self):
        assert matches_to_csv([]) == "query_index,train_index,distance\n"

    def test_bad_header(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(InvalidInputError):
            read_matches_csv(path)

    def test_bad_value(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("query_index,train_index,distance\nx,1,2\n")
        with pytest.raises(InvalidInputError):
            read_matches_csv(path)
