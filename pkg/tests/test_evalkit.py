import numpy as np
import pytest

from botforest.errors import (
    DegenerateResample,
    LengthMismatch,
    NoPositiveLabels,
    SingleClassInput,
    ZeroVariance,
)
from botforest.evalkit import (
    AdaptationCurve,
    EscTrainer,
    MonolithicTrainer,
    adaptation_experiment,
    average_ranks,
    bootstrap_ci,
    cross_domain_matrix,
    kfold_cv,
    kfold_cv_table,
    loco_experiment_table,
    matrix_to_csv,
    precision_recall_f1,
    roc_auc,
    spearman_rho,
)
from botforest.forest import TrainParams
from botforest.seeds import spawn_rng
from oracles import pairwise_auc


def test_prf_perfect():
    scores = np.array([0.9, 0.8, 0.1, 0.2])
    labels = np.array([1, 1, 0, 0])
    assert precision_recall_f1(scores, labels) == (1.0, 1.0, 1.0)


def test_prf_harmonic_mean():
    # every account predicted bot: P = 0.5, R = 1.0 -> F1 = 2/3
    scores = np.full(4, 0.9)
    labels = np.array([1, 1, 0, 0])
    p, r, f1 = precision_recall_f1(scores, labels)
    assert (p, r) == (0.5, 1.0)
    assert f1 == pytest.approx(2 / 3)


def test_prf_no_predictions():
    scores = np.array([0.1, 0.2, 0.3])
    labels = np.array([1, 1, 0])
    p, r, f1 = precision_recall_f1(scores, labels)
    assert (p, r, f1) == (0.0, 0.0, 0.0)


def test_prf_requires_positives():
    with pytest.raises(NoPositiveLabels):
        precision_recall_f1(np.array([0.9]), np.array([0]))


def test_auc_examples():
    assert roc_auc([0.9, 0.8, 0.1, 0.2], [1, 1, 0, 0]) == 1.0
    assert roc_auc([0.5, 0.5, 0.5, 0.5], [1, 1, 0, 0]) == 0.5
    assert roc_auc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == 0.75


def test_auc_single_class():
    with pytest.raises(SingleClassInput):
        roc_auc([0.5, 0.6], [1, 1])


def test_auc_matches_pairwise_oracle():
    rng = spawn_rng(61)
    for _ in range(40):
        n = int(rng.integers(4, 51))
        scores = np.round(rng.random(n), 1)  # coarse grid forces plenty of ties
        labels = rng.integers(0, 2, n)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]
        assert roc_auc(scores, labels) == pytest.approx(
            pairwise_auc(scores, labels), abs=1e-12)


def test_auc_invariant_under_monotone_transform():
    rng = spawn_rng(62)
    scores = rng.random(60)
    labels = (scores + rng.normal(0, 0.3, 60) > 0.5).astype(int)
    labels[:2] = (0, 1)
    transformed = 1.0 / (1.0 + np.exp(-(7.0 * scores - 2.0)))
    assert roc_auc(scores, labels) == roc_auc(transformed, labels)


def test_average_ranks_ties():
    assert average_ranks([10.0, 20.0, 20.0, 30.0]).tolist() == [1.0, 2.5, 2.5, 4.0]


def test_spearman_examples():
    assert spearman_rho([1, 2, 3], [10, 20, 30]) == pytest.approx(1.0)
    assert spearman_rho([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)
    assert spearman_rho([1, 2, 3], [1, 3, 2]) == pytest.approx(0.5)
    with pytest.raises(LengthMismatch):
        spearman_rho([1, 2], [1, 2, 3])
    with pytest.raises(ZeroVariance):
        spearman_rho([1, 1, 1], [1, 2, 3])


def test_bootstrap_ci_deterministic_and_zero_variance():
    scores = np.concatenate([np.ones(30), np.zeros(30)])
    labels = np.concatenate([np.ones(30, int), np.zeros(30, int)])
    metric = lambda s, l: roc_auc(s, l)
    a = bootstrap_ci(scores, labels, metric, seed=3)
    b = bootstrap_ci(scores, labels, metric, seed=3)
    assert a == b
    point, low, high = a
    assert point == 1.0 and low == high == 1.0  # zero variance across resamples


def test_bootstrap_ci_width_shrinks_with_fraction():
    rng = spawn_rng(64)
    scores = rng.random(200)
    labels = (scores + rng.normal(0, 0.35, 200) > 0.5).astype(int)
    metric = lambda s, l: roc_auc(s, l)
    _, lo1, hi1 = bootstrap_ci(scores, labels, metric, fraction=0.5, seed=11)
    _, lo2, hi2 = bootstrap_ci(scores, labels, metric, fraction=0.95, seed=11)
    assert (hi2 - lo2) < (hi1 - lo1)


def test_bootstrap_ci_degenerate_resample():
    scores = np.array([0.9] + [0.1] * 40)
    labels = np.array([1] + [0] * 40)
    with pytest.raises(DegenerateResample):
        bootstrap_ci(scores, labels, lambda s, l: roc_auc(s, l), fraction=0.02, seed=0)


def test_kfold_cv_deterministic_and_separable(small_corpus, fast_params):
    trainer = MonolithicTrainer(fast_params)
    a = kfold_cv(small_corpus, trainer, k=5, seed=9)
    b = kfold_cv(small_corpus, trainer, k=5, seed=9)
    assert a.to_obj() == b.to_obj()
    assert a.auc >= 0.99
    assert a.experiment_meta["trainer"] == "monolithic"
    assert a.ci["auc"][0] <= a.auc


def test_esc_trainer_cv(small_table, synth_partition, fast_params):
    report, oof = kfold_cv_table(small_table, EscTrainer(synth_partition, fast_params),
                                 k=5, seed=9)
    assert report.auc >= 0.95
    assert oof.shape == (len(small_table),)


def test_cross_domain_matrix_protocol(small_corpus, fast_params):
    from botforest.accounts import Corpus

    half = len(small_corpus.examples) // 2
    # interleave so both halves keep all classes
    a = Corpus(examples=small_corpus.examples[0::2])
    b = Corpus(examples=small_corpus.examples[1::2])
    matrix = cross_domain_matrix([a, b], MonolithicTrainer(fast_params), seed=5)
    assert matrix[0][0].experiment_meta["protocol"] == "cv"
    assert matrix[0][1].experiment_meta["protocol"] == "cross"
    # identical content in both corpora: diagonal cells nearly agree
    assert abs(matrix[0][0].auc - matrix[1][1].auc) < 0.05
    csv = matrix_to_csv(matrix, "recall")
    assert csv.splitlines()[0] == "train\\test,0,1"
    assert len(csv.splitlines()) == 3


def test_loco_reports_medians(small_table, synth_partition, fast_params):
    result = loco_experiment_table(small_table, synth_partition, "simple_spambot",
                                   fast_params, seed=1)
    assert result.held_class == "simple_spambot"
    obj = result.to_obj()
    assert obj["esc"]["experiment_meta"]["held_class"] == "simple_spambot"
    for value in obj["median_scores"].values():
        assert 0.0 <= value <= 1.0


def test_adaptation_zero_point_is_base_model(small_corpus, synth_partition, fast_params):
    from botforest.accounts import Corpus
    from botforest.ensemble import esc_score_batch, train_esc_rows
    from botforest.evalkit import precision_recall_f1 as prf
    from botforest.features import featurize_corpus
    from botforest.seeds import derive_seed
    from botforest.synthgen import BOT_PROFILES, SynthConfig, generate_dataset, partition_for_tag

    base_classes = [n for n in BOT_PROFILES if n != "astroturf"]
    base = Corpus(examples=[ex for ex in small_corpus.examples
                            if ex.bot_class != "astroturf"])
    hold = generate_dataset(SynthConfig(
        profiles=((BOT_PROFILES["astroturf"], 60),), humans_count=60,
        seed=19, dataset_tag="synth-holdout", overlap=0.25))
    partition = partition_for_tag("synth-default", base_classes)
    retrain, add = adaptation_experiment(base, hold, partition, "astroturf",
                                         fast_params, step=50, budget=100, seed=7)
    assert [n for n, _ in retrain.points] == [0, 50, 100]
    assert retrain.mode == "retrain_monolithic" and add.mode == "add_specialist"
    # reproduce the n=0 add-mode point independently: it is the base ensemble
    base_table = featurize_corpus(base)
    hold_table = featurize_corpus(hold)
    from botforest.evalkit import _merge_tables

    table = _merge_tables(base_table, hold_table)
    base_esc = train_esc_rows(table, np.arange(len(base_table)), partition,
                              fast_params, derive_seed(7, 301))
    hold_rows = np.arange(len(base_table), len(table))
    rng = spawn_rng(7, 300)
    perm = hold_rows[rng.permutation(hold_rows.size)]
    test_rows = np.sort(perm[100:])
    scores = esc_score_batch(base_esc, table.X[test_rows])[0]
    _, _, f1 = prf(scores, table.y[test_rows])
    assert add.points[0][1] == pytest.approx(f1, abs=1e-12)
    # determinism
    retrain2, add2 = adaptation_experiment(base, hold, partition, "astroturf",
                                           fast_params, step=50, budget=100, seed=7)
    assert retrain2.points == retrain.points and add2.points == add.points


def test_adaptation_curve_helpers():
    curve = AdaptationCurve(points=[(0, 0.1), (50, 0.5), (100, 0.9), (150, 0.88)],
                            mode="add_specialist")
    assert curve.plateau() == 0.9
    assert curve.n_to_reach(0.85) == 100
    assert curve.n_to_reach(0.95) is None
    assert curve.to_csv().splitlines()[0] == "n_added,f1"
