import pytest

from deaforge.actuator import DeaAssembly
from deaforge.config import load_config


@pytest.fixture
def asm():
    return DeaAssembly()


@pytest.fixture(scope="session")
def cfg():
    return load_config()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        title, ok = RESULTS[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {n}. {title}")
