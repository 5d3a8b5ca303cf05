"""Metrics and experiment protocols: in-domain CV, cross-domain matrix,
leave-one-class-out, bootstrap confidence intervals, and adaptation curves.

Point metrics binarize calibrated scores at 0.5. Confidence intervals use a
t-interval over a handful of 80% subsamples (df = n_samples - 1), which is
honest for the default five resamples; the choice is recorded in each
report's experiment_meta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateResample,
    InsufficientHoldout,
    LengthMismatch,
    NoPositiveLabels,
    SingleClassInput,
    ZeroVariance,
)
from .features import FeatureTable, featurize_corpus
from .forest import TrainParams, forest_scores
from .ensemble import (
    BotClassPartition,
    add_specialist_rows,
    esc_score_batch,
    monolithic_scores,
    stratified_folds,
    train_esc_rows,
    train_monolithic_rows,
)
from .seeds import derive_seed, spawn_rng

# Student-t 97.5th percentile by degrees of freedom (two-sided 95% interval)
T_975 = {
    1: 12.706204736432095, 2: 4.302652729911275, 3: 3.182446305284263,
    4: 2.7764451051977987, 5: 2.5705818366147395, 6: 2.4469118487916806,
    7: 2.3646242510102993, 8: 2.306004135033371, 9: 2.2621571627409915,
    10: 2.2281388519649385, 11: 2.2009851600829489, 12: 2.1788128296634177,
    13: 2.1603686564610127, 14: 2.1447866879169273, 15: 2.131449545559323,
    16: 2.1199052992210112, 17: 2.1098155778331806, 18: 2.100922040241039,
    19: 2.0930240544082634,
}


@dataclass
class EvalReport:
    precision: float
    recall: float
    f1: float
    auc: float
    ci: dict = field(default_factory=dict)      # metric -> (low, high)
    n_test: int = 0
    experiment_meta: dict = field(default_factory=dict)

    def to_obj(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "auc": self.auc,
            "ci": {k: list(v) for k, v in self.ci.items()},
            "n_test": self.n_test,
            "experiment_meta": self.experiment_meta,
        }


@dataclass
class AdaptationCurve:
    points: list            # [(n_added, f1), ...] in steps of `step`
    mode: str               # "retrain_monolithic" | "add_specialist"

    def to_csv(self) -> str:
        lines = ["n_added,f1"]
        lines += [f"{n},{f1:.6f}" for n, f1 in self.points]
        return "\n".join(lines) + "\n"

    def plateau(self) -> float:
        return max(f1 for _, f1 in self.points)

    def n_to_reach(self, target: float) -> int | None:
        for n, f1 in self.points:
            if f1 >= target:
                return n
        return None


def precision_recall_f1(scores, labels, threshold: float = 0.5) -> tuple[float, float, float]:
    """Standard P/R/F1 with binarization at `threshold` (bot iff >=)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if not np.any(labels == 1):
        raise NoPositiveLabels("precision/recall need at least one positive label")
    pred = scores >= threshold
    pos = labels == 1
    tp = int(np.sum(pred & pos))
    fp = int(np.sum(pred & ~pos))
    fn = int(np.sum(~pred & pos))
    precision = tp / (tp + fp) if (tp + fp) > 0 else 0.0
    recall = tp / (tp + fn)
    f1 = 2 * precision * recall / (precision + recall) if (precision + recall) > 0 else 0.0
    return precision, recall, f1


def average_ranks(values) -> np.ndarray:
    """1-based ranks with ties assigned their average rank."""
    v = np.asarray(values, dtype=np.float64)
    order = np.argsort(v, kind="stable")
    ranks = np.empty(v.size, dtype=np.float64)
    i = 0
    while i < v.size:
        j = i
        while j + 1 < v.size and v[order[j + 1]] == v[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def roc_auc(scores, labels) -> float:
    """Mann-Whitney AUC with average-rank tie handling."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    n_pos = int(np.sum(labels == 1))
    n_neg = int(labels.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise SingleClassInput("AUC needs both labels present")
    ranks = average_ranks(scores)
    rank_sum = float(ranks[labels == 1].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def spearman_rho(x, y) -> float:
    """Pearson correlation of average ranks."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size != y.size:
        raise LengthMismatch(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 2:
        raise LengthMismatch("need at least two paired observations")
    rx = average_ranks(x)
    ry = average_ranks(y)
    rx = rx - rx.mean()
    ry = ry - ry.mean()
    sx = float(np.sqrt(np.dot(rx, rx)))
    sy = float(np.sqrt(np.dot(ry, ry)))
    if sx == 0.0 or sy == 0.0:
        raise ZeroVariance("rank correlation undefined for constant input")
    return float(np.dot(rx, ry) / (sx * sy))


def bootstrap_ci(scores, labels, metric, n_samples: int = 5, fraction: float = 0.8,
                 seed: int = 0) -> tuple[float, float, float]:
    """(point, low, high): metric on the full set plus a t-interval over
    `n_samples` subsamples of `fraction` of the data, drawn without
    replacement. Resamples that lose a label class are redrawn (20 tries)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    point = float(metric(scores, labels))
    rng = spawn_rng(seed)
    size = int(math.floor(fraction * scores.size))
    vals = []
    for _ in range(n_samples):
        for _attempt in range(20):
            idx = rng.choice(scores.size, size=size, replace=False)
            sub = labels[idx]
            if np.any(sub == 1) and np.any(sub == 0):
                break
        else:
            raise DegenerateResample(
                f"could not draw a {fraction:.0%} subsample retaining both labels"
            )
        vals.append(float(metric(scores[idx], labels[idx])))
    arr = np.asarray(vals)
    mean = float(arr.mean())
    sd = float(arr.std(ddof=1)) if n_samples > 1 else 0.0
    half = T_975[n_samples - 1] * sd / math.sqrt(n_samples)
    return point, mean - half, mean + half


# --- trainers ---


class MonolithicTrainer:
    """Merged-bots forest + Platt pipeline; scores are calibrated."""

    name = "monolithic"

    def __init__(self, params: TrainParams = TrainParams()):
        self.params = params

    def train(self, table: FeatureTable, rows: np.ndarray, seed: int):
        model = train_monolithic_rows(table, rows, self.params, seed)
        return _MonoScorer(model)


class _MonoScorer:
    def __init__(self, model):
        self.model = model

    def scores(self, X) -> np.ndarray:
        return monolithic_scores(self.model, X)


class EscTrainer:
    """Specialist-ensemble trainer; scores are calibrated winner scores."""

    name = "esc"

    def __init__(self, partition: BotClassPartition, params: TrainParams = TrainParams()):
        self.partition = partition
        self.params = params

    def train(self, table: FeatureTable, rows: np.ndarray, seed: int):
        model = train_esc_rows(table, rows, self.partition, self.params, seed)
        return _EscScorer(model)


class _EscScorer:
    def __init__(self, model):
        self.model = model

    def scores(self, X) -> np.ndarray:
        return esc_score_batch(self.model, X)[0]


def _report_from_scores(scores, labels, seed: int, meta: dict) -> EvalReport:
    p, r, f1 = precision_recall_f1(scores, labels)
    auc = roc_auc(scores, labels)
    ci = {}
    for name, metric in (
        ("f1", lambda s, l: precision_recall_f1(s, l)[2]),
        ("auc", roc_auc),
        ("precision", lambda s, l: precision_recall_f1(s, l)[0]),
        ("recall", lambda s, l: precision_recall_f1(s, l)[1]),
    ):
        _, low, high = bootstrap_ci(scores, labels, metric, seed=derive_seed(seed, 9))
        ci[name] = (low, high)
    meta = dict(meta)
    meta.setdefault("ci_method", "t-interval, df=4, 5 subsamples of 80%")
    return EvalReport(
        precision=p, recall=r, f1=f1, auc=auc, ci=ci,
        n_test=int(np.asarray(labels).size), experiment_meta=meta,
    )


def kfold_cv_table(table: FeatureTable, trainer, k: int = 5, seed: int = 0,
                   meta: dict | None = None):
    """Stratified k-fold CV; returns (report, oof_scores) with metrics pooled
    over the concatenated out-of-fold scores."""
    rows = np.arange(len(table))
    folds = stratified_folds(table.y, k, spawn_rng(seed, 100))
    oof = np.empty(len(table), dtype=np.float64)
    for f, val in enumerate(folds):
        train_rows = np.setdiff1d(rows, val)
        scorer = trainer.train(table, train_rows, derive_seed(seed, 102, f))
        oof[val] = scorer.scores(table.X[val])
    base_meta = {"experiment": "kfold_cv", "k": k, "seed": seed, "trainer": trainer.name}
    if meta:
        base_meta.update(meta)
    report = _report_from_scores(oof, table.y, seed, base_meta)
    return report, oof


def kfold_cv(corpus, trainer, k: int = 5, seed: int = 0) -> EvalReport:
    table = featurize_corpus(corpus)
    report, _ = kfold_cv_table(table, trainer, k, seed)
    return report


def cross_domain_matrix(corpora, trainer, k: int = 5, seed: int = 0):
    """Train on corpus i, test on corpus j, for every (i, j).

    Both corpora are stratified into k folds; cell (i, j) trains on corpus
    i minus its fold f and tests on fold f of corpus j, averaging metrics
    over folds (the diagonal is therefore plain CV). Returns a nested list
    of EvalReports.
    """
    tables = [featurize_corpus(c) for c in corpora]
    fold_sets = [
        stratified_folds(t.y, k, spawn_rng(derive_seed(seed, 110, i), 100))
        for i, t in enumerate(tables)
    ]
    n = len(tables)
    matrix = []
    for i in range(n):
        row = []
        rows_i = np.arange(len(tables[i]))
        for j in range(n):
            per_fold = {"precision": [], "recall": [], "f1": [], "auc": []}
            for f in range(k):
                train_rows = np.setdiff1d(rows_i, fold_sets[i][f])
                scorer = trainer.train(tables[i], train_rows, derive_seed(seed, 111, i, f))
                test_rows = fold_sets[j][f]
                scores = scorer.scores(tables[j].X[test_rows])
                labels = tables[j].y[test_rows]
                p, r, f1 = precision_recall_f1(scores, labels)
                per_fold["precision"].append(p)
                per_fold["recall"].append(r)
                per_fold["f1"].append(f1)
                per_fold["auc"].append(roc_auc(scores, labels))
            means = {m: float(np.mean(v)) for m, v in per_fold.items()}
            tq = T_975[k - 1]
            ci = {}
            for m, v in per_fold.items():
                sd = float(np.std(v, ddof=1)) if k > 1 else 0.0
                half = tq * sd / math.sqrt(k)
                ci[m] = (means[m] - half, means[m] + half)
            row.append(EvalReport(
                precision=means["precision"], recall=means["recall"],
                f1=means["f1"], auc=means["auc"], ci=ci,
                n_test=sum(len(fold_sets[j][f]) for f in range(k)),
                experiment_meta={
                    "experiment": "cross_domain", "train_corpus": i, "test_corpus": j,
                    "protocol": "cv" if i == j else "cross", "k": k, "seed": seed,
                    "ci_method": f"t-interval over {k} folds",
                },
            ))
        matrix.append(row)
    return matrix


def matrix_to_csv(matrix, metric: str) -> str:
    """One metric of a cross-domain matrix as CSV (rows = train corpus)."""
    n = len(matrix)
    lines = ["train\\test," + ",".join(str(j) for j in range(n))]
    for i in range(n):
        vals = ",".join(f"{getattr(matrix[i][j], metric):.6f}" for j in range(n))
        lines.append(f"{i},{vals}")
    return "\n".join(lines) + "\n"


@dataclass
class LocoResult:
    held_class: str
    esc: EvalReport
    monolithic: EvalReport
    median_bot_esc: float
    median_bot_mono: float
    median_human_esc: float
    median_human_mono: float

    def to_obj(self) -> dict:
        return {
            "held_class": self.held_class,
            "esc": self.esc.to_obj(),
            "monolithic": self.monolithic.to_obj(),
            "median_scores": {
                "held_bots_esc": self.median_bot_esc,
                "held_bots_monolithic": self.median_bot_mono,
                "humans_esc": self.median_human_esc,
                "humans_monolithic": self.median_human_mono,
            },
        }


def loco_experiment(corpus, partition: BotClassPartition, held_class: str,
                    params: TrainParams = TrainParams(), seed: int = 0,
                    human_test_fraction: float = 0.3) -> LocoResult:
    """Leave-one-class-out: train both models without `held_class`, then test
    on the held-out bots plus a disjoint human split."""
    table = featurize_corpus(corpus)
    return loco_experiment_table(table, partition, held_class, params, seed, human_test_fraction)


def loco_experiment_table(table: FeatureTable, partition: BotClassPartition, held_class: str,
                          params: TrainParams = TrainParams(), seed: int = 0,
                          human_test_fraction: float = 0.3) -> LocoResult:
    names = partition.class_names()
    if held_class not in names:
        raise InsufficientHoldout(f"no class named {held_class!r} in the partition")
    held_bots, other_bots, humans = [], [], []
    for r in range(len(table)):
        if table.y[r] == 0:
            humans.append(r)
        elif partition.assign(table.dataset_tags[r], table.bot_classes[r]) == held_class:
            held_bots.append(r)
        else:
            other_bots.append(r)
    if not held_bots:
        raise InsufficientHoldout(f"class {held_class!r} has no examples to hold out")
    humans = np.asarray(humans, dtype=np.int64)
    rng = spawn_rng(seed, 200)
    perm = humans[rng.permutation(humans.size)]
    n_test = max(1, int(round(human_test_fraction * humans.size)))
    test_humans, train_humans = perm[:n_test], perm[n_test:]
    train_rows = np.sort(np.concatenate([np.asarray(other_bots, dtype=np.int64), train_humans]))
    test_rows = np.sort(np.concatenate([np.asarray(held_bots, dtype=np.int64), test_humans]))
    test_labels = table.y[test_rows]

    mono = MonolithicTrainer(params).train(table, train_rows, derive_seed(seed, 201))
    esc = EscTrainer(partition.without(held_class), params).train(
        table, train_rows, derive_seed(seed, 202)
    )
    mono_scores = mono.scores(table.X[test_rows])
    esc_scores = esc.scores(table.X[test_rows])
    meta = {
        "experiment": "leave_one_class_out", "held_class": held_class, "seed": seed,
        "n_train": int(train_rows.size), "human_test_fraction": human_test_fraction,
    }
    bots_mask = test_labels == 1
    return LocoResult(
        held_class=held_class,
        esc=_report_from_scores(esc_scores, test_labels, derive_seed(seed, 203),
                                {**meta, "trainer": "esc"}),
        monolithic=_report_from_scores(mono_scores, test_labels, derive_seed(seed, 204),
                                       {**meta, "trainer": "monolithic"}),
        median_bot_esc=float(np.median(esc_scores[bots_mask])),
        median_bot_mono=float(np.median(mono_scores[bots_mask])),
        median_human_esc=float(np.median(esc_scores[~bots_mask])),
        median_human_mono=float(np.median(mono_scores[~bots_mask])),
    )


def _merge_tables(a: FeatureTable, b: FeatureTable) -> FeatureTable:
    return FeatureTable(
        X=np.vstack([a.X, b.X]),
        y=np.concatenate([a.y, b.y]),
        user_ids=a.user_ids + b.user_ids,
        dataset_tags=a.dataset_tags + b.dataset_tags,
        bot_classes=a.bot_classes + b.bot_classes,
        registry_hash=a.registry_hash,
    )


def adaptation_experiment(base_corpus, holdout_corpus, partition: BotClassPartition,
                          new_class_name: str, params: TrainParams = TrainParams(),
                          step: int = 50, budget: int = 800, seed: int = 0):
    """Compare how fast the two architectures absorb a new domain.

    A fixed pool of `budget` hold-out examples is revealed in chunks of
    `step`. Retrain mode refits the whole monolithic pipeline on
    base + revealed examples; add mode keeps the base ensemble and trains
    only one new specialist on the revealed bots (balanced per the usual
    rule, preferring new-domain humans). Both curves report F1 on the same
    fixed hold-out test split. Returns (retrain_curve, add_curve).
    """
    base_table = featurize_corpus(base_corpus)
    hold_table = featurize_corpus(holdout_corpus)
    table = _merge_tables(base_table, hold_table)
    n_base = len(base_table)
    hold_rows = np.arange(n_base, len(table))
    if hold_rows.size < budget + 2:
        raise InsufficientHoldout(
            f"hold-out has {hold_rows.size} examples; need > {budget} plus a test split"
        )
    rng = spawn_rng(seed, 300)
    perm = hold_rows[rng.permutation(hold_rows.size)]
    pool, test_rows = perm[:budget], np.sort(perm[budget:])
    test_labels = table.y[test_rows]
    if not (np.any(test_labels == 1) and np.any(test_labels == 0)):
        raise InsufficientHoldout("hold-out test split must retain both labels")

    base_rows = np.arange(n_base)
    base_esc = train_esc_rows(table, base_rows, partition, params, derive_seed(seed, 301))
    base_humans = base_rows[table.y[base_rows] == 0]

    retrain_points, add_points = [], []
    for n_added in range(0, budget + 1, step):
        revealed = pool[:n_added]
        mono = train_monolithic_rows(
            table, np.sort(np.concatenate([base_rows, revealed])),
            params, derive_seed(seed, 302, n_added),
        )
        _, _, f1_mono = precision_recall_f1(monolithic_scores(mono, table.X[test_rows]), test_labels)
        retrain_points.append((n_added, f1_mono))

        new_bots = revealed[table.y[revealed] == 1]
        if new_bots.size:
            new_humans = revealed[table.y[revealed] == 0]
            model = add_specialist_rows(
                base_esc, new_class_name, table, np.sort(new_bots),
                np.sort(np.concatenate([new_humans, base_humans])),
                seed=derive_seed(seed, 303, n_added),
            )
        else:
            model = base_esc
        scores = esc_score_batch(model, table.X[test_rows])[0]
        _, _, f1_esc = precision_recall_f1(scores, test_labels)
        add_points.append((n_added, f1_esc))
    return (
        AdaptationCurve(points=retrain_points, mode="retrain_monolithic"),
        AdaptationCurve(points=add_points, mode="add_specialist"),
    )


def add_specialist_curve(model, holdout_corpus, class_name: str, step: int = 50,
                         budget: int = 800, seed: int = 0) -> AdaptationCurve:
    """Add-mode adaptation of an already-trained ensemble to a new corpus.

    Splits the corpus into a `budget` training pool and a fixed test split,
    then reports F1 as the revealed pool grows. Balancing humans come from
    the revealed pool (new domain first by construction).
    """
    table = featurize_corpus(holdout_corpus)
    rows = np.arange(len(table))
    if rows.size < budget + 2:
        raise InsufficientHoldout(
            f"corpus has {rows.size} examples; need > {budget} plus a test split"
        )
    rng = spawn_rng(seed, 300)
    perm = rows[rng.permutation(rows.size)]
    pool, test_rows = perm[:budget], np.sort(perm[budget:])
    test_labels = table.y[test_rows]
    if not (np.any(test_labels == 1) and np.any(test_labels == 0)):
        raise InsufficientHoldout("test split must retain both labels")
    points = []
    for n_added in range(0, budget + 1, step):
        revealed = pool[:n_added]
        new_bots = revealed[table.y[revealed] == 1]
        if new_bots.size:
            humans = revealed[table.y[revealed] == 0]
            extended = add_specialist_rows(
                model, class_name, table, np.sort(new_bots), np.sort(humans),
                seed=derive_seed(seed, 303, n_added),
            )
        else:
            extended = model
        scores = esc_score_batch(extended, table.X[test_rows])[0]
        _, _, f1 = precision_recall_f1(scores, test_labels)
        points.append((n_added, f1))
    return AdaptationCurve(points=points, mode="add_specialist")
