import os
import warnings

import pytest

# numba probes for TBB at import; single-threaded use does not need it
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")
warnings.filterwarnings("ignore", message=".*TBB.*")

_ACCEPTANCE = []


@pytest.fixture
def record_criterion():
    """Register one pass/fail line for the acceptance summary."""
    def record(label, passed, detail=""):
        _ACCEPTANCE.append((label, passed, detail))
        print(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")
