"""
Tests for the entity tagging demo: data, features, loss, metrics, baselines and training.
"""

import math

import numpy as np
import pytest

from ncg_bench.core.objective import DimensionMismatch, check_gradient
from ncg_bench.core.solver import SolverConfig, solve
from ncg_bench.mlapp.baselines import (
    AdamUpdate,
    MomentumUpdate,
    RMSpropUpdate,
    baseline_adam,
    run_updates,
)
from ncg_bench.mlapp.dataset import (
    ENTITY_CLASSES,
    TAGS,
    DatasetError,
    TokenDataset,
    generate_synthetic,
    validate_bio,
)
from ncg_bench.mlapp.metrics import (
    evaluate,
    metrics_from_counts,
    precision_recall_f1,
    score_tags,
)
from ncg_bench.mlapp.model import (
    HashedFeaturizer,
    LinearTagModel,
    loss_and_grad,
    softmax_objective,
)
from ncg_bench.mlapp.trainer import default_training_config, evals_to_threshold, train

SMALL_BUCKETS = 2**6

# token counts of generate_synthetic(seed=7), 200 sentences
SEED7_HISTOGRAM = {"O": 904, "DISEASE": 218, "ORGAN": 205, "SYMPTOM": 206, "DRUG": 219}


@pytest.fixture(scope="module")
def corpus():
    return generate_synthetic(seed=7)


@pytest.fixture(scope="module")
def tiny_loss():
    data = generate_synthetic(seed=3, num_sentences=10)
    return softmax_objective(data, HashedFeaturizer(SMALL_BUCKETS), l2=1e-3)


@pytest.fixture(scope="module")
def trained_run(corpus):
    return train(corpus.train, featurizer=HashedFeaturizer(2**12))


class TestDataset:
    """Synthetic corpus generation, BIO checks and TSV files."""

    def test_generation_is_deterministic(self, corpus):
        again = generate_synthetic(seed=7)
        assert again.sentences == corpus.sentences
        assert again.labels == corpus.labels
        assert again.split == corpus.split
        assert generate_synthetic(seed=8).sentences != corpus.sentences

    def test_seed_seven_snapshot(self, corpus):
        assert corpus.class_histogram() == SEED7_HISTOGRAM
        assert corpus.num_tokens == 1752
        assert corpus.sentences[0] == [
            "since",
            "atorvastatin",
            "syrup",
            "treated",
            "sclerosis",
            "variant",
            "examined",
            "kidney",
            "examined",
            "treated",
            "headache",
            "onset",
            "also",
        ]
        assert corpus.labels[0] == [
            "O",
            "B-DRUG",
            "I-DRUG",
            "O",
            "B-DISEASE",
            "I-DISEASE",
            "O",
            "B-ORGAN",
            "O",
            "O",
            "B-SYMPTOM",
            "I-SYMPTOM",
            "O",
        ]

    def test_split_sizes(self, corpus):
        assert len(corpus) == 200
        assert len(corpus.test) == 50
        assert len(corpus.train) == 150

    def test_tags_are_valid_bio(self, corpus):
        for tags in corpus.labels:
            assert validate_bio(tags) == []
            assert set(tags) <= set(TAGS)

    @pytest.mark.parametrize("seed", [0, 1, 7, 123])
    def test_every_class_is_represented(self, seed):
        data = generate_synthetic(seed=seed, num_sentences=10)
        histogram = data.class_histogram()
        for cls in ENTITY_CLASSES:
            assert histogram[cls] / data.num_tokens >= 0.05, (seed, cls)

    def test_too_few_sentences(self):
        with pytest.raises(ValueError):
            generate_synthetic(seed=0, num_sentences=5)

    @pytest.mark.parametrize(
        "tags,violations",
        [
            (["O", "B-ORGAN", "I-ORGAN", "I-ORGAN"], 0),
            (["I-DRUG"], 1),
            (["B-DRUG", "I-DISEASE"], 1),
            (["B-FOOD", "I-FOOD"], 2),
        ],
    )
    def test_validate_bio(self, tags, violations):
        assert len(validate_bio(tags)) == violations

    def test_misaligned_tags_raise(self):
        with pytest.raises(DatasetError):
            TokenDataset([["fever", "and"]], [["B-SYMPTOM"]])

    def test_invalid_bio_raises(self):
        with pytest.raises(DatasetError):
            TokenDataset([["syndrome"]], [["I-DISEASE"]])

    def test_unknown_split_raises(self):
        with pytest.raises(DatasetError):
            TokenDataset([["fever"]], [["B-SYMPTOM"]], ["validation"])

    def test_tsv_round_trip(self, corpus, tmp_path):
        path = corpus.test.write_tsv(tmp_path / "test.tsv")
        loaded = TokenDataset.read_tsv(path, split="test")
        assert loaded.sentences == corpus.test.sentences
        assert loaded.labels == corpus.test.labels

    def test_tsv_bad_line(self):
        with pytest.raises(DatasetError, match="line 2"):
            TokenDataset.from_tsv("fever\tB-SYMPTOM\nbroken line\n")

    def test_concat_keeps_splits(self, corpus):
        merged = TokenDataset.concat([corpus.train, corpus.test])
        assert len(merged) == len(corpus)
        assert merged.split.count("test") == 50


class TestFeaturizer:
    def test_rows_and_bias(self):
        featurizer = HashedFeaturizer(SMALL_BUCKETS)
        X = featurizer.transform([["the", "fever"], ["insulin"]])
        assert X.shape == (3, SMALL_BUCKETS + 1)
        np.testing.assert_array_equal(X[:, SMALL_BUCKETS].toarray().ravel(), [1.0, 1.0, 1.0])
        assert X.max() == 1.0

    def test_hashing_is_deterministic(self):
        first = HashedFeaturizer(SMALL_BUCKETS).transform([["hepatitis", "onset"]])
        second = HashedFeaturizer(SMALL_BUCKETS).transform([["hepatitis", "onset"]])
        assert (first != second).nnz == 0

    def test_previous_token_changes_features(self):
        featurizer = HashedFeaturizer()
        X = featurizer.transform([["the", "fever"], ["a", "fever"]])
        assert (X[1] != X[3]).nnz > 0

    def test_bucket_count_must_be_positive(self):
        with pytest.raises(ValueError):
            HashedFeaturizer(0)


class TestSoftmaxLoss:
    """Value, gradient and convexity of the tagger objective."""

    def test_zero_weights_give_log_num_tags(self, tiny_loss):
        assert tiny_loss.value(np.zeros(tiny_loss.size)) == pytest.approx(math.log(9), rel=1e-14)
        assert len(TAGS) == 9

    def test_gradient_matches_finite_differences(self, tiny_loss):
        rng = np.random.default_rng(0)
        problem = tiny_loss.problem()
        w = 0.1 * rng.normal(size=tiny_loss.size)
        assert check_gradient(problem, w) <= 1e-6

    def test_convexity_along_random_chords(self, tiny_loss, fuzz_seed):
        rng = np.random.default_rng(fuzz_seed)
        for _ in range(5):
            a, b = rng.normal(size=(2, tiny_loss.size))
            mid = tiny_loss.value(0.5 * (a + b))
            assert mid <= 0.5 * (tiny_loss.value(a) + tiny_loss.value(b)) + 1e-12

    def test_cached_gradient_is_not_aliased(self, tiny_loss):
        w = np.zeros(tiny_loss.size)
        g = tiny_loss.grad(w)
        g[:] = 0.0
        assert np.any(tiny_loss.grad(w) != 0.0)

    def test_wrong_weight_count(self, tiny_loss):
        with pytest.raises(DimensionMismatch):
            tiny_loss.value(np.zeros(3))

    def test_loss_and_grad_checks_shape(self, corpus):
        model = LinearTagModel(np.zeros((9, 5)), HashedFeaturizer(4))
        loss, grad = loss_and_grad(model, corpus.test)
        assert loss == pytest.approx(math.log(9))
        assert grad.shape == (45,)
        with pytest.raises(DimensionMismatch):
            LinearTagModel(np.zeros((9, 4)), HashedFeaturizer(4))


class TestMetrics:
    @pytest.mark.parametrize(
        "counts,expected",
        [
            ((0, 0, 0), (0.0, 0.0, 0.0)),
            ((1, 0, 0), (1.0, 1.0, 1.0)),
            ((3, 1, 2), (0.75, 0.6, 2 * 0.75 * 0.6 / 1.35)),
        ],
    )
    def test_precision_recall_f1(self, counts, expected):
        assert precision_recall_f1(*counts) == pytest.approx(expected)

    def test_token_level_scoring(self):
        gold = [["B-DISEASE", "I-DISEASE", "O"]]
        pred = [["B-DISEASE", "O", "B-DRUG"]]
        metrics = score_tags(gold, pred)
        disease = metrics.per_class["DISEASE"]
        assert (disease.tp, disease.fp, disease.fn) == (1, 0, 1)
        drug = metrics.per_class["DRUG"]
        assert (drug.tp, drug.fp, drug.fn) == (0, 1, 0)
        assert disease.f1 == pytest.approx(2 / 3)
        assert metrics.macro_f1 == pytest.approx(1 / 6)

    def test_prefix_mismatch_is_an_error(self):
        metrics = score_tags([["B-ORGAN"]], [["I-ORGAN"]])
        organ = metrics.per_class["ORGAN"]
        assert (organ.tp, organ.fp, organ.fn) == (0, 1, 1)

    def test_metrics_dict(self):
        metrics = metrics_from_counts({"DRUG": (2, 0, 0)})
        data = metrics.to_dict(wall_time=1.5)
        assert data["DRUG"]["f1"] == 1.0
        assert data["ORGAN"]["f1"] == 0.0
        assert data["macro_f1"] == 0.25
        assert data["wall_time_seconds"] == 1.5
        assert "macro_f1=0.2500" in str(metrics)

    def test_unknown_class(self):
        with pytest.raises(ValueError):
            metrics_from_counts({"FOOD": (1, 0, 0)})

    def test_evaluate_empty_raises(self):
        with pytest.raises(ValueError):
            evaluate(LinearTagModel.zeros(HashedFeaturizer(4)), TokenDataset([], []))

    def test_zero_model_scores_zero(self, corpus):
        # all-zero scores predict TAGS[0] == "O" everywhere
        metrics = evaluate(LinearTagModel.zeros(HashedFeaturizer(4)), corpus.test)
        assert metrics.macro_f1 == 0.0


class TestBaselines:
    """Update rules on hand-computed steps."""

    def test_adam_with_zero_rate_is_identity(self):
        w = np.array([1.0, -2.0])
        update = AdamUpdate(lr=0.0)
        for _ in range(3):
            w = update.step(w, np.array([0.5, 0.5]))
        np.testing.assert_array_equal(w, [1.0, -2.0])

    def test_adam_first_steps(self):
        update = AdamUpdate(lr=0.1)
        w = update.step(np.zeros(1), np.ones(1))
        assert w[0] == pytest.approx(-0.1 / (1.0 + 1e-8), rel=1e-12)
        # constant gradient keeps m_hat / sqrt(v_hat) at one
        w = update.step(w, np.ones(1))
        assert w[0] == pytest.approx(-0.2, rel=1e-7)

    def test_adam_on_one_dimensional_quadratic(self):
        # f(w) = w^2 / 2 from w = 1, so g = w
        expected = [
            0.90000000099999999,
            0.80041222971233816,
            0.70158627450441502,
            0.60393906268210795,
            0.50796366192722098,
        ]
        update = AdamUpdate(lr=0.1)
        w = np.ones(1)
        for value in expected:
            w = update.step(w, w.copy())
            assert w[0] == pytest.approx(value, rel=1e-12)

    def test_momentum_steps(self):
        update = MomentumUpdate(lr=0.1, momentum=0.9)
        w = update.step(np.zeros(1), np.ones(1))
        w = update.step(w, np.ones(1))
        assert w[0] == pytest.approx(-0.29)

    def test_rmsprop_first_step(self):
        update = RMSpropUpdate(lr=0.01, alpha=0.99)
        w = update.step(np.zeros(1), np.ones(1))
        assert w[0] == pytest.approx(-0.1, rel=1e-6)

    @pytest.mark.parametrize("kwargs", [{"lr": -1.0}, {"betas": (1.0, 0.999)}])
    def test_invalid_adam(self, kwargs):
        with pytest.raises(ValueError):
            AdamUpdate(**kwargs)

    def test_minibatches_are_seeded(self, tiny_loss):
        first = run_updates(tiny_loss, AdamUpdate(0.05), 10, batch_size=7, seed=4)
        second = run_updates(tiny_loss, AdamUpdate(0.05), 10, batch_size=7, seed=4)
        np.testing.assert_array_equal(first, second)

    def test_adam_baseline_reduces_loss(self, corpus):
        featurizer = HashedFeaturizer(2**10)
        model, wall_time = baseline_adam(corpus.train, steps=30, featurizer=featurizer)
        loss, _ = loss_and_grad(model, corpus.train)
        assert loss < math.log(9)
        assert wall_time > 0


class TestTraining:
    """Conjugate gradient training of the tagger."""

    def test_losses_decrease(self, trained_run):
        losses = trained_run.losses
        assert losses[0] == pytest.approx(math.log(9))
        assert all(b < a for a, b in zip(losses, losses[1:]))

    def test_trace_matches_iterations(self, trained_run):
        assert len(trained_run.trace) == trained_run.result.iterations
        assert trained_run.result.method == "awhm"

    def test_heldout_macro_f1(self, trained_run, corpus):
        metrics = evaluate(trained_run.model, corpus.test)
        assert metrics.macro_f1 >= 0.9, str(metrics)

    def test_separable_toy_is_fit_exactly(self):
        # every token carries one tag
        data = TokenDataset(
            [
                ["fever", "and", "insulin"],
                ["liver", "then", "fever"],
                ["gastritis", "syndrome", "and", "heparin"],
            ],
            [
                ["B-SYMPTOM", "O", "B-DRUG"],
                ["B-ORGAN", "O", "B-SYMPTOM"],
                ["B-DISEASE", "I-DISEASE", "O", "B-DRUG"],
            ],
        )
        run = train(data)
        assert run.model.predict(data.sentences) == data.labels
        assert score_tags(data.labels, run.model.predict(data.sentences)).macro_f1 == 1.0

    def test_default_training_config(self):
        config = default_training_config("nhs")
        assert config.method.value == "nhs"
        assert config.max_iter == 500

    def test_threshold_at_start_costs_one_evaluation(self, tiny_loss):
        assert evals_to_threshold(tiny_loss, default_training_config(), 10.0) == 1

    @pytest.mark.slow
    def test_hybrid_reaches_threshold_before_steepest_descent(self, corpus):
        loss = softmax_objective(corpus.train, HashedFeaturizer(2**12))
        optimum = solve(loss.problem(), SolverConfig(epsilon=1e-9, max_iter=5000)).f_final
        threshold = optimum + 1e-4
        hybrid = evals_to_threshold(loss, SolverConfig(method="awhm", max_iter=500), threshold)
        steepest = evals_to_threshold(loss, SolverConfig(method="sd", max_iter=500), threshold)
        assert hybrid is not None
        assert steepest is not None
        assert hybrid <= steepest
