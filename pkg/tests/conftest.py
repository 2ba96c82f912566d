from pathlib import Path

import numpy as np
import pytest

from answer_forge.embeddings import EmbeddingTable

FIXTURE_DIR = Path(__file__).parent / "data" / "fixture"


@pytest.fixture
def fixture_dir():
    return FIXTURE_DIR


@pytest.fixture
def fixture_config():
    return FIXTURE_DIR / "config.txt"


@pytest.fixture
def tiny_table():
    return EmbeddingTable({"a": (1.0, 0.0), "b": (0.9, 0.1), "c": (0.0, 1.0)})


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
