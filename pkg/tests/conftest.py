import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from exprnet.core import ExpressionMatrix  # noqa: E402

# filled by test_acceptance.py, printed once at the end of the run
ACCEPTANCE_LINES = {}


@pytest.fixture
def make_matrix():
    def build(columns, names=None):
        return ExpressionMatrix.from_array(np.column_stack(columns).astype(float), names)
    return build


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
