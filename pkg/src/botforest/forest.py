"""From-scratch CART trees and bagged random forests.

A trained forest scores an account as the fraction of trees voting bot
(leaf-majority vote, ties count as bot), so scores live on a 1/B grid.
Training is reproducible bit-for-bit: tree i consumes its own rng stream
derived from (seed, i), regardless of execution order.
"""

from __future__ import annotations

import math
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyNode, RegistryMismatch, SingleClassCorpus
from .features import FeatureVector
from .seeds import spawn_rng

try:
    from . import _kernels as K

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via _kernels_py tests
    from . import _kernels_py as K

    HAVE_NUMBA = False

from . import _kernels_py

FORMAT_VERSION = 1


@dataclass(frozen=True)
class TrainParams:
    """Forest hyperparameters; defaults follow standard random-forest practice.

    max_features_per_split None means ceil(sqrt(d)); max_depth None means
    unlimited; bootstrap draws n samples with replacement per tree.
    """

    n_trees: int = 100
    max_features_per_split: int | None = None
    min_samples_split: int = 2
    max_depth: int | None = None
    bootstrap: bool = True

    def resolved_mtry(self, d: int) -> int:
        if self.max_features_per_split is not None:
            return min(self.max_features_per_split, d)
        return min(int(math.ceil(math.sqrt(d))), d)

    def to_obj(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "max_features_per_split": self.max_features_per_split,
            "min_samples_split": self.min_samples_split,
            "max_depth": self.max_depth,
            "bootstrap": self.bootstrap,
        }

    @staticmethod
    def from_obj(obj: dict) -> "TrainParams":
        return TrainParams(
            n_trees=obj["n_trees"],
            max_features_per_split=obj["max_features_per_split"],
            min_samples_split=obj["min_samples_split"],
            max_depth=obj["max_depth"],
            bootstrap=obj["bootstrap"],
        )


@dataclass(eq=False)
class Tree:
    """Flat-array CART tree; feature < 0 marks leaves.

    counts[i] = (n_human, n_bot) training samples that reached node i;
    children always carry larger ids than their parent (pre-order growth).
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.feature.size)

    def max_depth(self) -> int:
        depth = np.zeros(self.n_nodes, dtype=np.int64)
        for i in range(self.n_nodes):
            if self.feature[i] >= 0:
                depth[self.left[i]] = depth[i] + 1
                depth[self.right[i]] = depth[i] + 1
        return int(depth.max()) if self.n_nodes else 0


@dataclass(eq=False)
class RandomForest:
    trees: list
    params: TrainParams
    feature_count: int
    seed: int
    registry_hash: str = ""
    _packed: tuple | None = field(default=None, init=False, repr=False)

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    def packed(self) -> tuple:
        """Concatenated node arrays over all trees, for batch application."""
        if self._packed is None:
            offsets = np.zeros(len(self.trees) + 1, dtype=np.int64)
            for i, t in enumerate(self.trees):
                offsets[i + 1] = offsets[i] + t.n_nodes
            total = int(offsets[-1])
            feat = np.empty(total, np.int32)
            thr = np.empty(total, np.float64)
            left = np.empty(total, np.int64)
            right = np.empty(total, np.int64)
            vote = np.empty(total, np.uint8)
            for i, t in enumerate(self.trees):
                o = offsets[i]
                sl = slice(o, o + t.n_nodes)
                feat[sl] = t.feature
                thr[sl] = t.threshold
                left[sl] = np.where(t.left >= 0, t.left + o, -1)
                right[sl] = np.where(t.right >= 0, t.right + o, -1)
                vote[sl] = (t.counts[:, 1] >= t.counts[:, 0]).astype(np.uint8)
            self._packed = (feat, thr, left, right, vote, offsets[:-1])
        return self._packed


def gini_impurity(class_counts) -> float:
    """1 - sum((c_i/n)^2); 0 for pure nodes, 0.5 for a balanced binary node."""
    total = 0
    for c in class_counts:
        if c < 0:
            raise EmptyNode("class counts must be non-negative")
        total += c
    if total <= 0:
        raise EmptyNode("gini impurity of an empty node is undefined")
    g = 1.0
    for c in class_counts:
        p = c / total
        g = g - p * p
    return g


def best_split(X, y, candidate_features):
    """Best (feature, threshold, gain) over candidates x midpoint thresholds.

    Thresholds are midpoints between consecutive distinct sorted values of a
    candidate feature; ties break to the lowest feature index, then the
    lowest threshold. Returns None when no split has positive gain (also
    for degenerate inputs: < 2 samples or a single class).
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    m = X.shape[0]
    if m < 2 or len(set(y.tolist())) < 2:
        return None
    cand = np.asarray(list(candidate_features), dtype=np.int64)
    XT = np.ascontiguousarray(X.T)
    sorted_rows = np.empty((cand.size, m), dtype=np.int32)
    for j, f in enumerate(cand):
        sorted_rows[j] = np.argsort(X[:, f], kind="stable")
    f, t, gain = K.scan_best_split(XT, y, sorted_rows, cand)
    if f < 0:
        return None
    return int(f), float(t), float(gain)


def train_tree(X, y, params: TrainParams, rng: np.random.Generator) -> Tree:
    """Grow one CART tree on the given samples, consuming `rng` per node."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, d = X.shape
    if n == 0:
        raise EmptyNode("train_tree requires at least one sample")
    XT = np.ascontiguousarray(X.T)
    smat = np.ascontiguousarray(np.argsort(X, axis=0).T.astype(np.int32))
    max_depth = -1 if params.max_depth is None else params.max_depth
    arrays = K.grow_tree(XT, y, smat, rng, params.resolved_mtry(d), params.min_samples_split, max_depth)
    return Tree(*arrays)


# Thread count used when train_forest is called with n_jobs=None; trees own
# independent rng streams, so results are identical at any thread count.
_DEFAULT_JOBS = 1


def set_default_jobs(n: int) -> None:
    global _DEFAULT_JOBS
    _DEFAULT_JOBS = max(1, int(n))


def train_forest(X, y, params: TrainParams = TrainParams(), seed: int = 0,
                 registry_hash: str = "", n_jobs: int | None = None) -> RandomForest:
    """Train a bagged forest; tree i uses the rng stream (seed, i)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, d = X.shape
    if n < 2 or y.min() == y.max():
        raise SingleClassCorpus("forest training needs both labels present")
    XT = np.ascontiguousarray(X.T)
    gs = np.ascontiguousarray(np.argsort(X, axis=0).T.astype(np.int32))
    max_depth = -1 if params.max_depth is None else params.max_depth
    mtry = params.resolved_mtry(d)

    def build(i: int) -> Tree:
        rng = spawn_rng(seed, i)
        if params.bootstrap:
            boot = rng.integers(0, n, size=n)
            smat = K.bootstrap_orders(gs, boot)
            XbT = np.ascontiguousarray(XT[:, boot])
            yb = np.ascontiguousarray(y[boot])
        else:
            smat = gs.copy()
            XbT, yb = XT, y
        return Tree(*K.grow_tree(XbT, yb, smat, rng, mtry, params.min_samples_split, max_depth))

    jobs = _DEFAULT_JOBS if n_jobs is None else max(1, n_jobs)
    if jobs > 1 and HAVE_NUMBA and params.n_trees > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            trees = list(pool.map(build, range(params.n_trees)))
    else:
        trees = [build(i) for i in range(params.n_trees)]
    return RandomForest(trees=trees, params=params, feature_count=d, seed=seed,
                        registry_hash=registry_hash)


def _check_registry(model: RandomForest, registry_hash: str | None) -> None:
    if registry_hash and model.registry_hash and registry_hash != model.registry_hash:
        raise RegistryMismatch(
            f"vector registry {registry_hash} != model registry {model.registry_hash}"
        )


def forest_scores(model: RandomForest, X, registry_hash: str | None = None) -> np.ndarray:
    """Vote-fraction scores in {0, 1/B, ..., 1} for a batch of rows."""
    _check_registry(model, registry_hash)
    X = np.ascontiguousarray(np.asarray(X, dtype=np.float64))
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.shape[1] != model.feature_count:
        raise RegistryMismatch(
            f"expected {model.feature_count} features, got {X.shape[1]}"
        )
    feat, thr, left, right, vote, roots = model.packed()
    votes = K.apply_packed(feat, thr, left, right, vote, roots, X)
    return votes / model.n_trees


def forest_score(model: RandomForest, x) -> float:
    """Score one account: fraction of trees voting bot."""
    if isinstance(x, FeatureVector):
        _check_registry(model, x.registry_hash)
        x = x.values
    return float(forest_scores(model, x)[0])


def binarize(score: float, threshold: float = 0.5) -> str:
    """Label a score: bot iff score >= threshold."""
    return "bot" if score >= threshold else "human"


def _gain_from_counts(parent, left, right) -> float:
    n = float(parent[0] + parent[1])
    nl = float(left[0] + left[1])
    nr = float(right[0] + right[1])
    g = gini_impurity(parent)
    return g - (nl / n) * gini_impurity(left) - (nr / n) * gini_impurity(right)


def feature_importance(model: RandomForest):
    """Gini importance: sum over split nodes of (node fraction x gain).

    Normalized to sum 1 over features; returned as (feature, importance)
    pairs in descending order, ties broken by feature index.
    """
    imp = np.zeros(model.feature_count, dtype=np.float64)
    for tree in model.trees:
        root_n = float(tree.counts[0].sum())
        for i in range(tree.n_nodes):
            f = int(tree.feature[i])
            if f < 0:
                continue
            parent = tree.counts[i]
            l, r = int(tree.left[i]), int(tree.right[i])
            gain = _gain_from_counts(parent, tree.counts[l], tree.counts[r])
            imp[f] += (float(parent.sum()) / root_n) * gain
    total = imp.sum()
    if total > 0:
        imp = imp / total
    order = sorted(range(model.feature_count), key=lambda f: (-imp[f], f))
    return [(f, float(imp[f])) for f in order]


@contextmanager
def recursion_headroom(depth: int):
    """Temporarily raise the recursion limit for deep nested (de)serialization."""
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * depth + 500))
    try:
        yield
    finally:
        sys.setrecursionlimit(old)


def _tree_to_obj(tree: Tree) -> dict:
    objs = [None] * tree.n_nodes
    for i in range(tree.n_nodes - 1, -1, -1):
        if tree.feature[i] < 0:
            objs[i] = {"counts": [int(tree.counts[i, 0]), int(tree.counts[i, 1])]}
        else:
            objs[i] = {
                "f": int(tree.feature[i]),
                "t": float(tree.threshold[i]),
                "l": objs[int(tree.left[i])],
                "r": objs[int(tree.right[i])],
            }
    return objs[0]


def _tree_from_obj(obj: dict) -> Tree:
    feature, threshold, left, right, leaf_counts = [], [], [], [], []
    # (node obj, parent id, is_left); left pushed last to recreate pre-order ids
    stack = [(obj, -1, False)]
    while stack:
        node, parent, is_left = stack.pop()
        node_id = len(feature)
        if parent >= 0:
            if is_left:
                left[parent] = node_id
            else:
                right[parent] = node_id
        if "counts" in node:
            feature.append(-1)
            threshold.append(float("nan"))
            left.append(-1)
            right.append(-1)
            leaf_counts.append((int(node["counts"][0]), int(node["counts"][1])))
        else:
            feature.append(int(node["f"]))
            threshold.append(float(node["t"]))
            left.append(-1)
            right.append(-1)
            leaf_counts.append(None)
            stack.append((node["r"], node_id, False))
            stack.append((node["l"], node_id, True))
    n = len(feature)
    counts = np.zeros((n, 2), dtype=np.int64)
    for i in range(n - 1, -1, -1):
        if leaf_counts[i] is not None:
            counts[i] = leaf_counts[i]
        else:
            counts[i] = counts[left[i]] + counts[right[i]]
    return Tree(
        feature=np.asarray(feature, dtype=np.int32),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int32),
        right=np.asarray(right, dtype=np.int32),
        counts=counts,
    )


def forest_to_obj(model: RandomForest) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "forest",
        "seed": model.seed,
        "params": model.params.to_obj(),
        "feature_count": model.feature_count,
        "registry_hash": model.registry_hash,
        "trees": [_tree_to_obj(t) for t in model.trees],
    }


def forest_from_obj(obj: dict) -> RandomForest:
    return RandomForest(
        trees=[_tree_from_obj(t) for t in obj["trees"]],
        params=TrainParams.from_obj(obj["params"]),
        feature_count=obj["feature_count"],
        seed=obj["seed"],
        registry_hash=obj["registry_hash"],
    )


def forest_max_depth(model: RandomForest) -> int:
    return max((t.max_depth() for t in model.trees), default=0)
