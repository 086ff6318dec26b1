import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from zomat.classify import classify_up_to  # noqa: E402

# compiled kernels make the first example of a run slow
settings.register_profile("zomat", deadline=None)
settings.load_profile("zomat")


@pytest.fixture(scope="session")
def levels():
    """Classification of orders 1..6, computed once per session."""
    return classify_up_to(6)


# PASS/FAIL lines from the acceptance suite, repeated in the terminal summary
VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(VERDICTS):
            terminalreporter.write_line(line)
