"""Specialist ensemble: a general human/bot forest (rf0) plus one balanced
forest per bot class, combined by the maximum rule.

The winner is argmax over (1 - s0, s1, ..., sn) with ties going to the
lowest index (human first, then registration order); the reported bot score
is the winner's raw forest score passed through one shared Platt calibrator
fit on out-of-fold winner scores. rf0 alone, plus the same calibrator
protocol, is the monolithic baseline.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .accounts import Corpus, LabeledAccount, atomic_write_text
from .calibrate import PlattCalibrator, apply_platt, apply_platt_batch, fit_platt
from .errors import (
    DuplicateClass,
    EmptyClass,
    EmptyNewData,
    NoHumans,
    PartitionError,
    RegistryMismatch,
    TooFewExamples,
)
from .features import FeatureTable, FeatureVector, featurize_corpus
from .forest import (
    RandomForest,
    TrainParams,
    forest_from_obj,
    forest_max_depth,
    forest_scores,
    forest_to_obj,
    recursion_headroom,
    train_forest,
)
from .seeds import derive_seed, spawn_rng

MODEL_FORMAT_VERSION = 1
CALIBRATION_FOLDS = 5

# sub-stream tags under a training seed
_TAG_RF0 = 0
_TAG_SPECIALIST = 1
_TAG_HUMAN_SAMPLE = 2
_TAG_FOLD_SPLIT = 3
_TAG_FOLD_MODEL = 4


@dataclass(frozen=True)
class ClassSelector:
    """Matches bot examples by dataset tag and optionally by bot_class."""

    dataset: str
    bot_class: str | None = None

    def matches(self, dataset_tag: str, bot_class: str | None) -> bool:
        return self.dataset == dataset_tag and (
            self.bot_class is None or self.bot_class == bot_class
        )


@dataclass(frozen=True)
class BotClass:
    name: str
    selectors: tuple[ClassSelector, ...]


@dataclass(frozen=True)
class BotClassPartition:
    classes: tuple[BotClass, ...]

    def __post_init__(self):
        names = [c.name for c in self.classes]
        if len(names) != len(set(names)):
            raise PartitionError("duplicate class names in partition")
        if "human" in names:
            raise PartitionError("'human' is a reserved class name")

    def class_names(self) -> list[str]:
        return [c.name for c in self.classes]

    def assign(self, dataset_tag: str, bot_class: str | None) -> str:
        """Class of a bot example; every bot must match exactly one class."""
        hits = [
            c.name
            for c in self.classes
            if any(s.matches(dataset_tag, bot_class) for s in c.selectors)
        ]
        if len(hits) != 1:
            raise PartitionError(
                f"bot example (dataset={dataset_tag!r}, bot_class={bot_class!r}) "
                f"matches {len(hits)} classes: {hits}"
            )
        return hits[0]

    def without(self, name: str) -> "BotClassPartition":
        if name not in self.class_names():
            raise PartitionError(f"no class named {name!r} to remove")
        return BotClassPartition(tuple(c for c in self.classes if c.name != name))

    def to_obj(self) -> dict:
        return {
            "classes": [
                {
                    "name": c.name,
                    "selectors": [
                        {"dataset": s.dataset}
                        if s.bot_class is None
                        else {"dataset": s.dataset, "bot_class": s.bot_class}
                        for s in c.selectors
                    ],
                }
                for c in self.classes
            ]
        }

    @staticmethod
    def from_obj(obj: dict) -> "BotClassPartition":
        classes = tuple(
            BotClass(
                name=c["name"],
                selectors=tuple(
                    ClassSelector(dataset=s["dataset"], bot_class=s.get("bot_class"))
                    for s in c["selectors"]
                ),
            )
            for c in obj["classes"]
        )
        return BotClassPartition(classes)


def load_partition(path: str) -> BotClassPartition:
    with open(path, "r", encoding="utf-8") as f:
        return BotClassPartition.from_obj(json.load(f))


@dataclass(eq=False)
class EscModel:
    rf0: RandomForest
    specialists: list                      # [(class_name, RandomForest), ...]
    calibrator: PlattCalibrator
    registry_hash: str
    partition: BotClassPartition

    def class_names(self) -> list[str]:
        return [name for name, _ in self.specialists]


@dataclass(eq=False)
class MonolithicModel:
    """rf0 with the calibrated 0.5-threshold pipeline; the baseline scorer."""

    forest: RandomForest
    calibrator: PlattCalibrator
    registry_hash: str


@dataclass(frozen=True)
class ScoreResult:
    user_id: str
    bot_score: float           # calibrated winner score
    raw_winner_score: float
    winning_class: str         # "human" when rf0 wins
    class_scores: dict         # specialist class -> raw forest score
    s0: float

    def raw_scores(self) -> dict:
        return {"human": self.s0, **self.class_scores}


def vote_max_rule(s0: float, specialist_scores) -> tuple[int, float]:
    """Winner index and raw winner score under the maximum rule.

    The vote compares (1 - s0, s1, ..., sn); exact ties go to the lowest
    index, so a tied human wins, then specialists in registration order.
    The raw winner score is s0 itself (not 1 - s0) when index 0 wins.
    """
    best_i = 0
    best_v = 1.0 - s0
    for i, s in enumerate(specialist_scores, start=1):
        if s > best_v:
            best_i = i
            best_v = s
    raw = s0 if best_i == 0 else float(specialist_scores[best_i - 1])
    return best_i, raw


def esc_score(model: EscModel, x: FeatureVector | np.ndarray, user_id: str = "") -> ScoreResult:
    """Score one feature vector through the full ensemble."""
    if isinstance(x, FeatureVector):
        if model.registry_hash and x.registry_hash != model.registry_hash:
            raise RegistryMismatch(
                f"vector registry {x.registry_hash} != model registry {model.registry_hash}"
            )
        x = x.values
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    s0 = float(forest_scores(model.rf0, x)[0])
    names = []
    scores = []
    for name, rf in model.specialists:
        names.append(name)
        scores.append(float(forest_scores(rf, x)[0]))
    winner, raw = vote_max_rule(s0, scores)
    return ScoreResult(
        user_id=user_id,
        bot_score=apply_platt(model.calibrator, raw),
        raw_winner_score=raw,
        winning_class="human" if winner == 0 else names[winner - 1],
        class_scores=dict(zip(names, scores)),
        s0=s0,
    )


def esc_score_batch(model: EscModel, X: np.ndarray):
    """Vectorized scoring: (bot_scores, raw_winner, winner_idx, s0, S).

    winner_idx 0 means rf0 won; S holds raw specialist scores column-wise in
    registration order. Ties resolve to the lowest index (argmax keeps the
    first maximum).
    """
    X = np.asarray(X, dtype=np.float64)
    s0 = forest_scores(model.rf0, X)
    if model.specialists:
        S = np.column_stack([forest_scores(rf, X) for _, rf in model.specialists])
        transformed = np.column_stack([1.0 - s0, S])
    else:
        S = np.empty((X.shape[0], 0))
        transformed = (1.0 - s0).reshape(-1, 1)
    winner = np.argmax(transformed, axis=1)
    raw = np.where(winner == 0, s0, S[np.arange(X.shape[0]), np.maximum(winner - 1, 0)])
    return apply_platt_batch(model.calibrator, raw), raw, winner, s0, S


def stratified_folds(labels, k: int, rng: np.random.Generator) -> list:
    """k disjoint index arrays with per-label round-robin assignment."""
    labels = np.asarray(labels)
    folds = [[] for _ in range(k)]
    for value in (0, 1):
        idx = np.nonzero(labels == value)[0]
        if idx.size < k:
            raise TooFewExamples(
                f"label {value} has {idx.size} examples; need >= {k} for {k} folds"
            )
        idx = idx[rng.permutation(idx.size)]
        for pos, row in enumerate(idx):
            folds[pos % k].append(int(row))
    return [np.sort(np.asarray(f, dtype=np.int64)) for f in folds]


def _class_rows(table: FeatureTable, rows: np.ndarray, partition: BotClassPartition):
    """Split `rows` into human rows and per-class bot rows (order preserved)."""
    humans = []
    per_class = {name: [] for name in partition.class_names()}
    for r in rows:
        r = int(r)
        if table.y[r] == 0:
            humans.append(r)
        else:
            name = partition.assign(table.dataset_tags[r], table.bot_classes[r])
            per_class[name].append(r)
    return (
        np.asarray(humans, dtype=np.int64),
        {k: np.asarray(v, dtype=np.int64) for k, v in per_class.items()},
    )


def _balanced_human_rows(need: int, preferred: np.ndarray, others: np.ndarray,
                         rng: np.random.Generator) -> np.ndarray:
    """Draw `need` human rows: `preferred` first, then `others`, both without
    replacement; if the pool is smaller than `need`, draw with replacement
    over the union instead."""
    union_size = preferred.size + others.size
    if union_size == 0:
        raise NoHumans("no human examples available for balancing")
    if union_size < need:
        union = np.concatenate([preferred, others])
        return np.sort(rng.choice(union, size=need, replace=True))
    if preferred.size >= need:
        return np.sort(rng.choice(preferred, size=need, replace=False))
    rest = rng.choice(others, size=need - preferred.size, replace=False)
    return np.sort(np.concatenate([preferred, rest]))


def _train_components(table: FeatureTable, rows: np.ndarray, partition: BotClassPartition,
                      params: TrainParams, seed: int, require_all_classes: bool = True):
    """rf0 on everything plus one balanced specialist per class."""
    human_rows, per_class = _class_rows(table, rows, partition)
    if human_rows.size == 0:
        raise NoHumans("ensemble training requires human examples")
    rf0 = train_forest(
        table.X[rows], table.y[rows], params, derive_seed(seed, _TAG_RF0),
        registry_hash=table.registry_hash,
    )
    specialists = []
    for i, name in enumerate(partition.class_names(), start=1):
        bot_rows = per_class[name]
        if bot_rows.size == 0:
            if require_all_classes:
                raise EmptyClass(name)
            continue  # calibration folds may lose a tiny class; skip it there
        rng = spawn_rng(seed, _TAG_HUMAN_SAMPLE, i)
        sampled = _balanced_human_rows(
            bot_rows.size, np.empty(0, dtype=np.int64), human_rows, rng
        )
        train_rows = np.concatenate([bot_rows, sampled])
        rf = train_forest(
            table.X[train_rows], table.y[train_rows], params,
            derive_seed(seed, _TAG_SPECIALIST, i), registry_hash=table.registry_hash,
        )
        specialists.append((name, rf))
    return rf0, specialists


def _winner_raw_scores(rf0, specialists, X) -> np.ndarray:
    s0 = forest_scores(rf0, X)
    if specialists:
        S = np.column_stack([forest_scores(rf, X) for _, rf in specialists])
        transformed = np.column_stack([1.0 - s0, S])
        winner = np.argmax(transformed, axis=1)
        return np.where(winner == 0, s0, S[np.arange(X.shape[0]), np.maximum(winner - 1, 0)])
    return s0


def train_esc_rows(table: FeatureTable, rows: np.ndarray, partition: BotClassPartition,
                   params: TrainParams = TrainParams(), seed: int = 0) -> EscModel:
    """Train the full ensemble on the given table rows.

    The calibrator is fit on out-of-fold winner scores from a stratified
    5-fold split of the training pool, so calibration never sees in-sample
    scores.
    """
    rows = np.asarray(rows, dtype=np.int64)
    rf0, specialists = _train_components(table, rows, partition, params, seed)
    oof_scores, oof_labels = [], []
    folds = stratified_folds(table.y[rows], CALIBRATION_FOLDS, spawn_rng(seed, _TAG_FOLD_SPLIT))
    for f, val_local in enumerate(folds):
        train_local = np.setdiff1d(np.arange(rows.size), val_local)
        fold_rows = rows[train_local]
        fold_rf0, fold_specialists = _train_components(
            table, fold_rows, partition, params,
            derive_seed(seed, _TAG_FOLD_MODEL, f), require_all_classes=False,
        )
        val_rows = rows[val_local]
        oof_scores.append(_winner_raw_scores(fold_rf0, fold_specialists, table.X[val_rows]))
        oof_labels.append(table.y[val_rows])
    calibrator = fit_platt(np.concatenate(oof_scores), np.concatenate(oof_labels))
    return EscModel(
        rf0=rf0,
        specialists=specialists,
        calibrator=calibrator,
        registry_hash=table.registry_hash,
        partition=partition,
    )


def train_esc(corpus: Corpus, partition: BotClassPartition,
              params: TrainParams = TrainParams(), seed: int = 0) -> EscModel:
    table = featurize_corpus(corpus)
    return train_esc_rows(table, np.arange(len(table)), partition, params, seed)


def train_monolithic_rows(table: FeatureTable, rows: np.ndarray,
                          params: TrainParams = TrainParams(), seed: int = 0) -> MonolithicModel:
    """Single merged-bots forest plus a Platt calibrator (same fold protocol)."""
    rows = np.asarray(rows, dtype=np.int64)
    forest = train_forest(
        table.X[rows], table.y[rows], params, derive_seed(seed, _TAG_RF0),
        registry_hash=table.registry_hash,
    )
    folds = stratified_folds(table.y[rows], CALIBRATION_FOLDS, spawn_rng(seed, _TAG_FOLD_SPLIT))
    oof_scores, oof_labels = [], []
    for f, val_local in enumerate(folds):
        train_local = np.setdiff1d(np.arange(rows.size), val_local)
        fold_forest = train_forest(
            table.X[rows[train_local]], table.y[rows[train_local]], params,
            derive_seed(seed, _TAG_FOLD_MODEL, f), registry_hash=table.registry_hash,
        )
        oof_scores.append(forest_scores(fold_forest, table.X[rows[val_local]]))
        oof_labels.append(table.y[rows[val_local]])
    calibrator = fit_platt(np.concatenate(oof_scores), np.concatenate(oof_labels))
    return MonolithicModel(forest=forest, calibrator=calibrator, registry_hash=table.registry_hash)


def train_monolithic(corpus: Corpus, params: TrainParams = TrainParams(),
                     seed: int = 0) -> MonolithicModel:
    table = featurize_corpus(corpus)
    return train_monolithic_rows(table, np.arange(len(table)), params, seed)


def monolithic_scores(model: MonolithicModel, X) -> np.ndarray:
    return apply_platt_batch(model.calibrator, forest_scores(model.forest, X))


def monolithic_score_result(model: MonolithicModel, x: FeatureVector | np.ndarray,
                            user_id: str = "") -> ScoreResult:
    """ScoreResult shape for the baseline model (single human/bot axis)."""
    if isinstance(x, FeatureVector):
        if model.registry_hash and x.registry_hash != model.registry_hash:
            raise RegistryMismatch("feature vector registry does not match model")
        x = x.values
    s0 = float(forest_scores(model.forest, x)[0])
    bot = apply_platt(model.calibrator, s0)
    return ScoreResult(
        user_id=user_id,
        bot_score=bot,
        raw_winner_score=s0,
        winning_class="bot" if bot >= 0.5 else "human",
        class_scores={},
        s0=s0,
    )


def _new_domain_split(human_rows, tags, new_tags) -> tuple[np.ndarray, np.ndarray]:
    preferred = np.asarray([r for r in human_rows if tags[r] in new_tags], dtype=np.int64)
    others = np.asarray([r for r in human_rows if tags[r] not in new_tags], dtype=np.int64)
    return preferred, others


def add_specialist_rows(model: EscModel, class_name: str, table: FeatureTable,
                        bot_rows: np.ndarray, human_rows: np.ndarray, seed: int = 0) -> EscModel:
    """Append one specialist trained on bot_rows vs balanced humans.

    Existing forests and the calibrator are reused as-is (the returned model
    shares them), honoring adaptation-without-retraining.
    """
    if class_name in model.class_names():
        raise DuplicateClass(f"specialist {class_name!r} already exists")
    bot_rows = np.asarray(bot_rows, dtype=np.int64)
    human_rows = np.asarray(human_rows, dtype=np.int64)
    if bot_rows.size == 0:
        raise EmptyNewData("add_specialist requires at least one new bot example")
    new_tags = {table.dataset_tags[int(r)] for r in bot_rows}
    preferred, others = _new_domain_split(human_rows, table.dataset_tags, new_tags)
    sampled = _balanced_human_rows(bot_rows.size, preferred, others, spawn_rng(seed, _TAG_HUMAN_SAMPLE))
    train_rows = np.concatenate([bot_rows, sampled])
    rf = train_forest(
        table.X[train_rows], table.y[train_rows], model.rf0.params,
        derive_seed(seed, _TAG_SPECIALIST), registry_hash=model.registry_hash,
    )
    selectors = tuple(
        sorted(
            {
                ClassSelector(dataset=table.dataset_tags[int(r)], bot_class=table.bot_classes[int(r)])
                for r in bot_rows
            },
            key=lambda s: (s.dataset, s.bot_class or ""),
        )
    )
    partition = BotClassPartition(
        model.partition.classes + (BotClass(name=class_name, selectors=selectors),)
    )
    return EscModel(
        rf0=model.rf0,
        specialists=model.specialists + [(class_name, rf)],
        calibrator=model.calibrator,
        registry_hash=model.registry_hash,
        partition=partition,
    )


def add_specialist(model: EscModel, class_name: str, new_bots, human_pool,
                   seed: int = 0, refit_calibrator: bool = False) -> EscModel:
    """Account-level adaptation entry point.

    new_bots / human_pool are LabeledAccounts; balancing humans prefer the
    new domain's dataset tags before the global pool. With
    refit_calibrator=True the Platt scaler is refit on out-of-fold winner
    scores of the extended ensemble over (new_bots + human_pool); existing
    forests are never retrained either way.
    """
    new_bots = list(new_bots)
    human_pool = list(human_pool)
    if not new_bots:
        raise EmptyNewData("add_specialist requires at least one new bot example")
    if any(ex.label != "bot" for ex in new_bots):
        raise EmptyNewData("new_bots must all be labeled bot")
    corpus = Corpus(examples=new_bots + [ex for ex in human_pool if ex.label == "human"])
    table = featurize_corpus(corpus)
    bot_rows = np.arange(len(new_bots), dtype=np.int64)
    human_rows = np.arange(len(new_bots), len(table), dtype=np.int64)
    extended = add_specialist_rows(model, class_name, table, bot_rows, human_rows, seed)
    if refit_calibrator:
        rows = np.arange(len(table), dtype=np.int64)
        folds = stratified_folds(table.y, CALIBRATION_FOLDS, spawn_rng(seed, _TAG_FOLD_SPLIT))
        oof_scores, oof_labels = [], []
        for f, val in enumerate(folds):
            train = np.setdiff1d(rows, val)
            fold_bots = np.asarray([r for r in train if table.y[r] == 1], dtype=np.int64)
            fold_humans = np.asarray([r for r in train if table.y[r] == 0], dtype=np.int64)
            fold_model = add_specialist_rows(
                model, class_name, table, fold_bots, fold_humans,
                seed=derive_seed(seed, _TAG_FOLD_MODEL, f),
            )
            oof_scores.append(_winner_raw_scores(fold_model.rf0, fold_model.specialists, table.X[val]))
            oof_labels.append(table.y[val])
        calibrator = fit_platt(np.concatenate(oof_scores), np.concatenate(oof_labels))
        extended = EscModel(
            rf0=extended.rf0,
            specialists=extended.specialists,
            calibrator=calibrator,
            registry_hash=extended.registry_hash,
            partition=extended.partition,
        )
    return extended


# --- model serialization ---


def model_to_obj(model) -> dict:
    if isinstance(model, EscModel):
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "kind": "esc",
            "registry_hash": model.registry_hash,
            "partition": model.partition.to_obj(),
            "rf0": forest_to_obj(model.rf0),
            "specialists": [
                {"name": name, "forest": forest_to_obj(rf)} for name, rf in model.specialists
            ],
            "calibrator": {"A": model.calibrator.A, "B": model.calibrator.B},
        }
    if isinstance(model, MonolithicModel):
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "kind": "monolithic",
            "registry_hash": model.registry_hash,
            "forest": forest_to_obj(model.forest),
            "calibrator": {"A": model.calibrator.A, "B": model.calibrator.B},
        }
    raise TypeError(f"cannot serialize {type(model).__name__}")


def _model_depth(model) -> int:
    if isinstance(model, EscModel):
        forests = [model.rf0] + [rf for _, rf in model.specialists]
    else:
        forests = [model.forest]
    return max(forest_max_depth(rf) for rf in forests)


def model_to_json(model) -> str:
    with recursion_headroom(_model_depth(model) + 8):
        return json.dumps(model_to_obj(model), separators=(",", ":"), ensure_ascii=False)


def model_digest(model) -> str:
    return hashlib.sha256(model_to_json(model).encode("utf-8")).hexdigest()


def save_model(model, path: str) -> None:
    atomic_write_text(path, model_to_json(model))


def model_from_obj(obj: dict):
    kind = obj.get("kind")
    cal = PlattCalibrator(A=float(obj["calibrator"]["A"]), B=float(obj["calibrator"]["B"]))
    if kind == "esc":
        return EscModel(
            rf0=forest_from_obj(obj["rf0"]),
            specialists=[
                (s["name"], forest_from_obj(s["forest"])) for s in obj["specialists"]
            ],
            calibrator=cal,
            registry_hash=obj["registry_hash"],
            partition=BotClassPartition.from_obj(obj["partition"]),
        )
    if kind == "monolithic":
        return MonolithicModel(
            forest=forest_from_obj(obj["forest"]),
            calibrator=cal,
            registry_hash=obj["registry_hash"],
        )
    raise ValueError(f"unknown model kind {kind!r}")


def load_model(path: str):
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    with recursion_headroom(10000):
        obj = json.loads(text)
    return model_from_obj(obj)
