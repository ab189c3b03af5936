import pytest

from wktembed.build import build
from wktembed.model import EmbeddingEngine, ProviderConfig


@pytest.fixture(scope="session")
def model_dirs(tmp_path_factory):
    root = tmp_path_factory.mktemp("checkpoints")
    gpt2_dir = build("gpt2-class", root / "gpt2c", layers=2, vocab_size=1000, seed=0)
    bert_dir = build("bert-class", root / "bertc", layers=2, vocab_size=1000, seed=0)
    return {"gpt2-class": gpt2_dir, "bert-class": bert_dir}


@pytest.fixture(scope="session")
def gpt2_engine(model_dirs):
    return EmbeddingEngine(ProviderConfig(model_dir=str(model_dirs["gpt2-class"])))


@pytest.fixture(scope="session")
def bert_engine(model_dirs):
    return EmbeddingEngine(ProviderConfig(model_dir=str(model_dirs["bert-class"])))
