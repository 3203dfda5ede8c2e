import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

CORPUS = Path(__file__).resolve().parent.parent / "src" / "streamlogic" / "corpus"

# criterion number -> (passed, seconds, note); filled by test_acceptance
ACCEPTANCE: dict = {}


@pytest.fixture
def corpus() -> Path:
    return CORPUS


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, secs, note = ACCEPTANCE[n]
        terminalreporter.write_line(
            f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  ({secs:.2f}s){'  ' + note if note else ''}")
