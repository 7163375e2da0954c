import numpy as np
import pytest

# (criterion, passed, summary, seconds) filled in by the acceptance tests
ACCEPTANCE: list = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k, ok, text, secs in sorted(ACCEPTANCE):
        tr.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {text}  ({secs:.1f} s)")
