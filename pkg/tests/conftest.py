from pathlib import Path

import pytest

from cuta2bpmn.generate import generate_random_workflow

# Same parameter mixture the acceptance suite uses: seeds 1..500 with
# depths 1..4 and fanouts 2..4.
CORPUS_SPECS = [(seed, (seed % 4) + 1, (seed % 3) + 2) for seed in range(1, 501)]

GOLDEN_DIR = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def corpus():
    return [generate_random_workflow(s, d, f) for s, d, f in CORPUS_SPECS]


@pytest.fixture(scope="session")
def small_corpus(corpus):
    """First hundred corpus workflows, enough for structural audits."""
    return corpus[:100]
