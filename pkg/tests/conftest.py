import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from affilnorm.gazetteers import default_gazetteers  # noqa: E402

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def gaz():
    return default_gazetteers()


@pytest.fixture
def data_dir():
    return DATA


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    lines = getattr(acceptance, "VERDICTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
