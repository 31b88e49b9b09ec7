import pytest

from starnoma.channel import REFERENCE_FITS
from starnoma.scenario import default_config

# (criterion, passed, detail) lines collected by the acceptance suite
ACCEPTANCE_LINES = []


@pytest.fixture
def cfg():
    return default_config()


@pytest.fixture(params=sorted(REFERENCE_FITS), ids=lambda n: f"N{n}")
def table_fit(request):
    return REFERENCE_FITS[request.param]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_LINES:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
