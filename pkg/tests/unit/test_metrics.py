"""Tests for clustering metrics and ensemble agreement."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from s3nmf.certify import brute_force_acc
from s3nmf.core import Partition
from s3nmf.exceptions import ParameterError, ShapeError
from s3nmf.metrics import (
    METRIC_NAMES,
    PartitionScores,
    acc,
    anmi,
    ari,
    evaluate,
    f1,
    nmi,
    purity,
    summarize,
)
from tests.utils import partition


class TestNmi:
    def test_relabeling_scores_one(self):
        assert nmi(partition(0, 0, 1, 1), partition(1, 1, 0, 0)) == pytest.approx(1.0)

    def test_independent_partitions_score_zero(self):
        assert nmi(partition(0, 0, 1, 1), partition(0, 1, 0, 1)) == pytest.approx(0.0)

    def test_single_cluster_partitions_score_one(self):
        assert nmi(partition(0, 0, 0), partition(0, 0, 0)) == pytest.approx(1.0)

    def test_hand_computed_value(self):
        # contingency [[2, 0], [1, 1]] over n=4
        mutual = 0.5 * math.log(4 / 3) + 0.25 * math.log(2 / 3) + 0.25 * math.log(2)
        h_p = math.log(2)
        h_q = -(0.75 * math.log(0.75) + 0.25 * math.log(0.25))

        value = nmi(partition(0, 0, 1, 1), partition(0, 0, 0, 1))

        assert value == pytest.approx(mutual / ((h_p + h_q) / 2), abs=1e-12)

    def test_same_grouping_scores_exactly_one(self, rng):
        for _ in range(20):
            labels = rng.integers(0, 4, 25)
            relabel = rng.permutation(4)

            relabeled = Partition.from_labels(relabel[labels])

            assert nmi(Partition.from_labels(labels), relabeled) == 1.0

    def test_size_mismatch(self):
        with pytest.raises(ShapeError, match="different sample counts"):
            nmi(partition(0, 1), partition(0, 1, 1))


class TestAnmi:
    def test_one_disagreeing_member(self):
        members = [partition(0, 0, 1, 1), partition(1, 1, 0, 0), partition(0, 1, 0, 1)]

        # pairwise NMI 1, 0, 0
        assert anmi(members) == pytest.approx(1 / 3)

    def test_identical_members(self):
        members = [partition(0, 1, 2, 2)] * 4

        assert anmi(members) == 1.0

    def test_needs_two_partitions(self):
        with pytest.raises(ParameterError, match="at least 2 partitions"):
            anmi([partition(0, 1)])

    def test_symmetric_in_member_order(self, rng):
        members = [Partition.from_labels(rng.integers(0, 3, 12)) for _ in range(5)]

        assert anmi(members) == pytest.approx(anmi(list(reversed(members))))


class TestAccuracy:
    @pytest.mark.parametrize(
        ("pred", "truth", "expected"),
        [
            ((0, 0, 1, 1), (1, 1, 0, 0), 1.0),
            ((0, 0, 0, 1), (0, 0, 1, 1), 0.75),
            ((0, 0, 0, 0), (0, 0, 1, 1), 0.5),
            ((0, 1, 2, 3), (0, 0, 1, 1), 0.5),
        ],
    )
    def test_examples(self, pred, truth, expected):
        assert acc(partition(*pred), partition(*truth)) == pytest.approx(expected)

    def test_matches_brute_force(self, rng):
        for _ in range(100):
            n = int(rng.integers(2, 20))
            pred = Partition.from_labels(rng.integers(0, rng.integers(1, 6), n))
            truth = Partition.from_labels(rng.integers(0, rng.integers(1, 6), n))

            assert acc(pred, truth) == brute_force_acc(pred, truth)

    def test_split_cluster_example(self):
        assert acc(partition(0, 1, 1), partition(0, 0, 1)) == pytest.approx(2 / 3, abs=1e-12)

    def test_invariant_under_cluster_relabeling(self, rng):
        truth = Partition.from_labels(rng.integers(0, 4, 30))
        pred = Partition.from_labels(rng.integers(0, 4, 30))
        relabel = rng.permutation(pred.n_clusters)

        relabeled = Partition(relabel[pred.labels], pred.n_clusters)

        assert acc(relabeled, truth) == acc(pred, truth)

    def test_purity_bounds_accuracy(self, rng):
        for _ in range(50):
            n = int(rng.integers(2, 30))
            pred = Partition.from_labels(rng.integers(0, 5, n))
            truth = Partition.from_labels(rng.integers(0, 5, n))

            assert purity(pred, truth) >= acc(pred, truth)


class TestPurity:
    def test_singletons_are_pure(self):
        assert purity(partition(0, 1, 2, 3), partition(0, 0, 1, 1)) == 1.0

    def test_single_cluster(self):
        assert purity(partition(0, 0, 0, 0), partition(0, 0, 0, 1)) == 0.75

    def test_one_cluster_over_two_balanced_classes(self):
        value = purity(partition(0, 0, 0, 0), partition(0, 0, 1, 1))

        assert value == pytest.approx(0.5, abs=1e-12)

    def test_split_cluster_example(self):
        assert purity(partition(0, 1, 1), partition(0, 0, 1)) == pytest.approx(2 / 3, abs=1e-12)


class TestAri:
    def test_identical(self):
        assert ari(partition(0, 0, 1, 1), partition(1, 1, 0, 0)) == pytest.approx(1.0)

    def test_crossed_partitions(self):
        assert ari(partition(0, 0, 1, 1), partition(0, 1, 0, 1)) == pytest.approx(-0.5)

    def test_single_cluster_both_sides(self):
        assert ari(partition(0, 0, 0), partition(0, 0, 0)) == pytest.approx(1.0)

    def test_one_exactly_when_grouping_matches(self, rng):
        for _ in range(100):
            n = int(rng.integers(2, 9))
            pred = Partition.from_labels(rng.integers(0, 3, n))
            truth = (
                Partition.from_labels(rng.permutation(3)[pred.labels])
                if rng.random() < 0.3
                else Partition.from_labels(rng.integers(0, 3, n))
            )

            perfect = ari(pred, truth) == pytest.approx(1.0, abs=1e-12)
            assert perfect is pred.same_relation(truth)


@pytest.mark.parametrize("metric", [nmi, purity, ari, f1])
def test_invariant_under_relabeling(metric, rng):
    for _ in range(20):
        pred = rng.integers(0, 4, 20)
        truth = rng.integers(0, 3, 20)
        relabel_pred = rng.permutation(4)
        relabel_truth = rng.permutation(3)

        expected = metric(Partition.from_labels(pred), Partition.from_labels(truth))
        relabeled = metric(
            Partition.from_labels(relabel_pred[pred]), Partition.from_labels(relabel_truth[truth])
        )

        assert relabeled == pytest.approx(expected, abs=1e-12)


class TestF1:
    def test_identical(self):
        assert f1(partition(0, 0, 1, 1), partition(1, 1, 0, 0)) == pytest.approx(1.0)

    def test_one_cluster_prediction(self):
        # 6 predicted pairs, 2 true pairs, both found
        assert f1(partition(0, 0, 0, 0), partition(0, 0, 1, 1)) == pytest.approx(0.5)

    def test_all_singletons_against_singletons(self):
        assert f1(partition(0, 1, 2), partition(0, 1, 2)) == 1.0

    def test_all_singletons_against_groups(self):
        assert f1(partition(0, 1, 2), partition(0, 0, 1)) == 0.0

    def test_no_true_pair_found(self):
        # one predicted pair (1, 2), one true pair (0, 1)
        assert f1(partition(0, 1, 1), partition(0, 0, 1)) == pytest.approx(0.0, abs=1e-12)


class TestEvaluate:
    def test_report_mean_and_population_std(self):
        truth = partition(0, 0, 1, 1)
        members = [partition(0, 0, 1, 1), partition(0, 0, 0, 0)]

        report = evaluate(members, truth)

        assert len(report.members) == 2
        assert report.mean.acc == pytest.approx(0.75)
        assert report.std["acc"] == pytest.approx(0.25)
        assert set(report.std) == set(METRIC_NAMES)

    def test_no_partitions(self):
        with pytest.raises(ParameterError, match="no partitions"):
            evaluate([], partition(0, 1))

    def test_summarize_single_member_has_zero_std(self):
        scores = PartitionScores(acc=0.9, nmi=0.8, pur=0.9, ari=0.7, f1=0.85)

        report = summarize([scores])

        assert report.mean == scores
        assert all(value == 0.0 for value in report.std.values())

    def test_scores_validated(self):
        with pytest.raises(ValidationError):
            PartitionScores(acc=1.5, nmi=0.8, pur=0.9, ari=0.7, f1=0.85)

    def test_scores_in_range_for_random_partitions(self, rng):
        truth = Partition.from_labels(rng.integers(0, 3, 40))
        members = [Partition.from_labels(rng.integers(0, 4, 40)) for _ in range(6)]

        report = evaluate(members, truth)

        for scores in report.members:
            for name in ("acc", "nmi", "pur", "f1"):
                assert 0.0 <= getattr(scores, name) <= 1.0
            assert np.isfinite(scores.ari)
