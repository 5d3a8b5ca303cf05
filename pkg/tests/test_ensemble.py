import json

import numpy as np
import pytest

from botforest.accounts import Corpus
from botforest.calibrate import apply_platt
from botforest.ensemble import (
    BotClass,
    BotClassPartition,
    ClassSelector,
    EscModel,
    add_specialist,
    esc_score,
    esc_score_batch,
    load_model,
    model_digest,
    model_from_obj,
    model_to_json,
    monolithic_scores,
    save_model,
    train_esc_rows,
    train_monolithic_rows,
    stratified_folds,
    vote_max_rule,
)
from botforest.errors import (
    DuplicateClass,
    EmptyClass,
    EmptyNewData,
    NoHumans,
    PartitionError,
    TooFewExamples,
)
from botforest.forest import TrainParams, forest_score, forest_to_obj
from botforest.seeds import spawn_rng
from oracles import max_rule_ref


def test_vote_max_rule_examples():
    assert vote_max_rule(0.2, [0.9, 0.4]) == (1, 0.9)
    assert vote_max_rule(0.1, [0.3, 0.2]) == (0, 0.1)
    assert vote_max_rule(0.5, [0.5]) == (0, 0.5)


def test_vote_max_rule_matches_reference():
    rng = spawn_rng(41)
    for _ in range(1000):
        n = int(rng.integers(1, 8))
        s0 = float(rng.random())
        scores = rng.random(n).tolist()
        assert vote_max_rule(s0, scores) == max_rule_ref(s0, scores)


def test_partition_validation():
    sel = (ClassSelector(dataset="d"),)
    with pytest.raises(PartitionError):
        BotClassPartition((BotClass("a", sel), BotClass("a", sel)))
    with pytest.raises(PartitionError):
        BotClassPartition((BotClass("human", sel),))


def test_partition_assignment_exactly_one():
    partition = BotClassPartition((
        BotClass("spam", (ClassSelector("d1"), ClassSelector("d2", "spam"))),
        BotClass("fake", (ClassSelector("d2", "fake"),)),
    ))
    assert partition.assign("d1", "anything") == "spam"
    assert partition.assign("d2", "fake") == "fake"
    with pytest.raises(PartitionError):
        partition.assign("d3", None)  # no match
    overlapping = BotClassPartition((
        BotClass("a", (ClassSelector("d"),)),
        BotClass("b", (ClassSelector("d", "x"),)),
    ))
    with pytest.raises(PartitionError):
        overlapping.assign("d", "x")  # two matches


def test_partition_round_trip(synth_partition):
    again = BotClassPartition.from_obj(synth_partition.to_obj())
    assert again == synth_partition
    reduced = synth_partition.without("astroturf")
    assert "astroturf" not in reduced.class_names()
    with pytest.raises(PartitionError):
        synth_partition.without("nope")


def test_stratified_folds_small():
    labels = np.array([0, 0, 1, 1])
    folds = stratified_folds(labels, 2, spawn_rng(0))
    assert sorted(f.size for f in folds) == [2, 2]
    for f in folds:
        assert set(labels[f]) == {0, 1}
    with pytest.raises(TooFewExamples):
        stratified_folds(np.array([0, 0, 0, 1]), 2, spawn_rng(0))


def _balanced_table(n_per_class, n_humans, d=6, seed=0):
    from botforest.features import FeatureTable

    rng = spawn_rng(seed)
    rows = []
    y, tags, classes = [], [], []
    for name, count in n_per_class.items():
        for _ in range(count):
            rows.append(rng.normal(size=d) + hash(name) % 5)
            y.append(1)
            tags.append("t")
            classes.append(name)
    for _ in range(n_humans):
        rows.append(rng.normal(size=d) - 2.0)
        y.append(0)
        tags.append("t")
        classes.append(None)
    return FeatureTable(
        X=np.asarray(rows), y=np.asarray(y, dtype=np.int8),
        user_ids=[f"u{i}" for i in range(len(rows))],
        dataset_tags=tags, bot_classes=classes, registry_hash="",
    )


def _partition(names):
    return BotClassPartition(tuple(
        BotClass(n, (ClassSelector("t", n),)) for n in names
    ))


def test_specialist_balance_exact():
    # bootstrap off so the root counts expose the exact training multiset
    table = _balanced_table({"a": 10, "b": 10}, 100)
    params = TrainParams(n_trees=1, bootstrap=False)
    model = train_esc_rows(table, np.arange(len(table)), _partition(["a", "b"]), params, seed=1)
    for name, rf in model.specialists:
        counts = rf.trees[0].counts[0]
        assert counts[0] == 10 and counts[1] == 10  # equal humans and bots


def test_specialist_balance_with_replacement():
    table = _balanced_table({"a": 150}, 100)
    params = TrainParams(n_trees=1, bootstrap=False)
    model = train_esc_rows(table, np.arange(len(table)), _partition(["a"]), params, seed=1)
    counts = model.specialists[0][1].trees[0].counts[0]
    assert counts[1] == 150 and counts[0] == 150  # 300 total, humans resampled


def test_empty_class_and_no_humans():
    table = _balanced_table({"a": 10}, 50)
    with pytest.raises(EmptyClass):
        train_esc_rows(table, np.arange(len(table)), _partition(["a", "ghost"]),
                       TrainParams(n_trees=1), seed=0)
    bots_only = np.nonzero(table.y == 1)[0]
    with pytest.raises(NoHumans):
        train_esc_rows(table, bots_only, _partition(["a"]), TrainParams(n_trees=1), seed=0)


def test_esc_training_deterministic(small_table, synth_partition, fast_params):
    a = train_esc_rows(small_table, np.arange(len(small_table)), synth_partition,
                       fast_params, seed=5)
    b = train_esc_rows(small_table, np.arange(len(small_table)), synth_partition,
                       fast_params, seed=5)
    assert model_digest(a) == model_digest(b)


def test_esc_score_identity_and_human_path(tiny_esc, small_table):
    X = small_table.X[:40]
    bot_scores, raw, widx, s0, S = esc_score_batch(tiny_esc, X)
    names = tiny_esc.class_names()
    for i in range(X.shape[0]):
        result = esc_score(tiny_esc, X[i], user_id=f"u{i}")
        # single-account path equals the batch path
        assert result.s0 == s0[i]
        assert result.raw_winner_score == raw[i]
        assert abs(result.bot_score - bot_scores[i]) < 1e-12
        # winner consistent with an independent restatement of the rule
        specialist_scores = [result.class_scores[n] for n in names]
        w_ref, raw_ref = max_rule_ref(result.s0, specialist_scores)
        assert result.winning_class == ("human" if w_ref == 0 else names[w_ref - 1])
        assert result.raw_winner_score == raw_ref
        # calibrated winner score definition
        assert result.bot_score == apply_platt(tiny_esc.calibrator, result.raw_winner_score)
        # rf0 is exactly the embedded general model
        assert result.s0 == forest_score(tiny_esc.rf0, X[i])


def test_max_monotonicity(tiny_esc, small_table):
    X = small_table.X[:20]
    _, raw, widx, s0, S = esc_score_batch(tiny_esc, X)
    base_max = np.maximum(1 - s0, S.max(axis=1) if S.size else 0)
    rng = spawn_rng(2)
    extra = rng.random(X.shape[0])
    new_max = np.maximum(base_max, extra)
    assert np.all(new_max >= base_max)


def test_add_specialist_contracts(tiny_esc, small_corpus):
    new_bots = [ex for ex in small_corpus.examples if ex.bot_class == "astroturf"][:10]
    renamed = [type(ex)(account=ex.account, label=ex.label, bot_class=ex.bot_class,
                        dataset_tag="new-domain") for ex in new_bots]
    humans = [ex for ex in small_corpus.examples if ex.label == "human"][:30]
    with pytest.raises(DuplicateClass):
        add_specialist(tiny_esc, "astroturf", renamed, humans, seed=0)
    with pytest.raises(EmptyNewData):
        add_specialist(tiny_esc, "fresh", [], humans, seed=0)
    before_rf0 = json.dumps(forest_to_obj(tiny_esc.rf0))
    before_specialists = [json.dumps(forest_to_obj(rf)) for _, rf in tiny_esc.specialists]
    extended = add_specialist(tiny_esc, "fresh", renamed, humans, seed=0)
    assert extended.class_names() == tiny_esc.class_names() + ["fresh"]
    # prior components are bit-identical (same objects, same serialization)
    assert extended.rf0 is tiny_esc.rf0
    assert json.dumps(forest_to_obj(extended.rf0)) == before_rf0
    for (name, rf), blob in zip(extended.specialists[:-1], before_specialists):
        assert json.dumps(forest_to_obj(rf)) == blob
    assert extended.calibrator == tiny_esc.calibrator
    assert "fresh" in extended.partition.class_names()


def test_add_specialist_preserves_old_winners(tiny_esc, small_corpus, small_table):
    new_bots = [ex for ex in small_corpus.examples if ex.bot_class == "astroturf"][:10]
    renamed = [type(ex)(account=ex.account, label=ex.label, bot_class=ex.bot_class,
                        dataset_tag="new-domain") for ex in new_bots]
    humans = [ex for ex in small_corpus.examples if ex.label == "human"][:30]
    extended = add_specialist(tiny_esc, "fresh", renamed, humans, seed=0)
    X = small_table.X[:30]
    base = esc_score_batch(tiny_esc, X)
    ext = esc_score_batch(extended, X)
    new_scores = ext[4][:, -1]
    for i in range(X.shape[0]):
        if new_scores[i] <= base[1][i]:  # new specialist did not beat the old winner
            assert ext[0][i] == base[0][i]
            assert ext[2][i] == base[2][i]


def test_model_save_load_round_trip(tiny_esc, tmp_path):
    path = tmp_path / "model.json"
    save_model(tiny_esc, str(path))
    loaded = load_model(str(path))
    assert isinstance(loaded, EscModel)
    assert model_digest(loaded) == model_digest(tiny_esc)
    again = model_from_obj(json.loads(model_to_json(loaded)))
    assert model_digest(again) == model_digest(tiny_esc)


def test_monolithic_round_trip(small_table, fast_params, tmp_path):
    mono = train_monolithic_rows(small_table, np.arange(len(small_table)), fast_params, seed=4)
    path = tmp_path / "mono.json"
    save_model(mono, str(path))
    loaded = load_model(str(path))
    probe = small_table.X[:25]
    assert np.array_equal(monolithic_scores(mono, probe), monolithic_scores(loaded, probe))
    assert model_digest(mono) == model_digest(loaded)
