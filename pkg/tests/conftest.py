import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from structmap import GIBSON_RULES, SME_RULES, generate_matches, parse_corpus  # noqa: E402
from structmap.corpora import corpus_path, load_classics  # noqa: E402

CLASSIC_PAIRS = [("water-flow", "heat-flow"), ("solar-system", "rutherford-atom")]


@pytest.fixture(scope="session")
def classics():
    return load_classics()


@pytest.fixture(scope="session")
def classics_path():
    return corpus_path()


@pytest.fixture(scope="session")
def flow_sme(classics):
    return generate_matches(classics["water-flow"], classics["heat-flow"], SME_RULES)


@pytest.fixture(scope="session")
def flow_gibson(classics):
    return generate_matches(classics["water-flow"], classics["heat-flow"], GIBSON_RULES)


def domain(text: str):
    """Parse a single-domain snippet, failing loudly on diagnostics."""
    result = parse_corpus(text)
    assert result.ok, [str(d) for d in result.diagnostics]
    (d,) = result.domains.values()
    return d


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
