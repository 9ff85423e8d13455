import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for the oracle helper module

from secready.demo import sample_answers
from secready.scoring import aggregate
from secready.sessions import AssessmentStore
from secready.taxonomy import builtin_iso27001


@pytest.fixture(scope="session")
def iso():
    return builtin_iso27001()


@pytest.fixture(scope="session")
def iso_sample_answers(iso):
    return sample_answers(iso)


@pytest.fixture(scope="session")
def iso_sample_result(iso, iso_sample_answers):
    return aggregate(iso, iso_sample_answers, "strict")


@pytest.fixture
def store(tmp_path, iso):
    s = AssessmentStore(tmp_path / "data", [iso])
    yield s
    s.close()
