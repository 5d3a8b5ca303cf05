"""Behavioral social-bot scoring with specialist random-forest ensembles."""

__version__ = "0.1.0"

from .accounts import Corpus, LabeledAccount, RawAccount, load_corpus, parse_account
from .calibrate import PlattCalibrator, apply_platt, fit_platt
from .ensemble import (
    BotClassPartition,
    EscModel,
    MonolithicModel,
    ScoreResult,
    add_specialist,
    esc_score,
    load_model,
    model_digest,
    save_model,
    train_esc,
    train_monolithic,
    vote_max_rule,
)
from .features import REGISTRY, FeatureVector, extract_features, shannon_entropy
from .forest import (
    RandomForest,
    TrainParams,
    best_split,
    binarize,
    feature_importance,
    forest_score,
    gini_impurity,
    train_forest,
)
from .synthgen import SynthConfig, default_config, generate_account, generate_dataset
