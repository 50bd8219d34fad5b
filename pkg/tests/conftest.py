import json
from pathlib import Path

import pytest

from reldistill.corpus import ingest_corpus
from reldistill.features import FeatureConfig
from reldistill.kb import load_concept_seeds, load_schema, load_triples

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def schema():
    return load_schema(str(DATA / "schema.json"))


@pytest.fixture(scope="session")
def triples(schema):
    return load_triples(str(DATA / "triples.tsv"), schema)


@pytest.fixture(scope="session")
def concept_seeds(schema):
    return load_concept_seeds(str(DATA / "concept_seeds.tsv"), schema)


@pytest.fixture(scope="session")
def structured_docs():
    return ingest_corpus(str(DATA / "structured.jsonl"), "structured")


@pytest.fixture(scope="session")
def target_docs():
    return ingest_corpus(str(DATA / "target.jsonl"), "target")


@pytest.fixture(scope="session")
def feature_config():
    return FeatureConfig()


@pytest.fixture()
def run_config_file(tmp_path, data_dir):
    """A complete run config over the committed toy fixture."""
    cfg = {
        "structured_corpus": str(data_dir / "structured.jsonl"),
        "target_corpus": str(data_dir / "target.jsonl"),
        "eval_corpus": str(data_dir / "target.jsonl"),
        "schema": str(data_dir / "schema.json"),
        "triples": str(data_dir / "triples.tsv"),
        "concept_seeds": str(data_dir / "concept_seeds.tsv"),
        "gold": str(data_dir / "gold.tsv"),
        "variant": ["Rs", "Rt"],
        "training": {"n": 3, "rng_seed": 7},
        "sweep_n": [1, 2, 3],
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path
