import pytest

from psmzi.model import SchemeConfig


@pytest.fixture
def std():
    """alpha = 1, r = 1, no subtraction, lossless."""
    return SchemeConfig(alpha_mag=1.0, r=1.0)


def cfg(**kw):
    return SchemeConfig(**kw)


# acceptance lines collected by tests/test_acceptance.py and printed at the end
ACCEPTANCE = []


@pytest.fixture
def accept():
    def record(criterion, what, ok, detail=""):
        ACCEPTANCE.append((criterion, what, bool(ok), detail))
        return bool(ok)
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, what, ok, detail in ACCEPTANCE:
        tag = "PASS" if ok else ("INFO" if criterion.endswith("info") else "FAIL")
        terminalreporter.write_line(f"[{tag}] {criterion}: {what}" + (f"  ({detail})" if detail else ""))
