import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from distpriv.dataio import load_adult, split_dataset

ADULT_ENV = "DISTPRIV_ADULT_DIR"
ADULT_SKIP_MSG = (
    "canonical Adult dataset not present; set DISTPRIV_ADULT_DIR or place "
    "adult.data and adult.test under data/ (see README)"
)


def adult_data_path():
    candidates = []
    env = os.environ.get(ADULT_ENV)
    if env:
        candidates.append(Path(env))
    candidates.append(Path(__file__).resolve().parent.parent / "data")
    for cand in candidates:
        if cand.is_file():
            return cand
        if cand.is_dir() and (cand / "adult.data").exists() and (cand / "adult.test").exists():
            return cand
    return None


@pytest.fixture(scope="session")
def adult_path():
    path = adult_data_path()
    if path is None:
        pytest.skip(ADULT_SKIP_MSG)
    return path


@pytest.fixture(scope="session")
def adult_table(adult_path):
    return load_adult(adult_path)


@pytest.fixture(scope="session")
def adult_splits(adult_table):
    return split_dataset(adult_table, seed=20260808)
