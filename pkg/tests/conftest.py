import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # makes `oracles` importable

from botforest.features import featurize_corpus
from botforest.forest import TrainParams
from botforest.synthgen import SynthConfig, BOT_PROFILES, default_config, generate_dataset, partition_for_tag

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture(scope="session")
def small_corpus():
    """25 bots per class + 120 humans; quick enough for unit tests."""
    return generate_dataset(default_config(per_class=25, humans=120, seed=11))


@pytest.fixture(scope="session")
def small_table(small_corpus):
    return featurize_corpus(small_corpus)


@pytest.fixture(scope="session")
def synth_partition():
    return partition_for_tag("synth-default")


@pytest.fixture(scope="session")
def fast_params():
    return TrainParams(n_trees=30)


@pytest.fixture(scope="session")
def tiny_esc(small_table, synth_partition, fast_params):
    from botforest.ensemble import train_esc_rows

    return train_esc_rows(small_table, np.arange(len(small_table)), synth_partition,
                          fast_params, seed=3)


@pytest.fixture(scope="session")
def tiny_model_path(tiny_esc, tmp_path_factory):
    from botforest.ensemble import save_model

    path = tmp_path_factory.mktemp("models") / "tiny_esc.json"
    save_model(tiny_esc, str(path))
    return str(path)


@pytest.fixture(scope="session")
def small_corpus_path(small_corpus, tmp_path_factory):
    from botforest.accounts import write_corpus

    path = tmp_path_factory.mktemp("corpora") / "small.jsonl"
    write_corpus(small_corpus, str(path))
    return str(path)
