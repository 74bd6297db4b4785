import sys

import pytest
from hypothesis import settings

from hyplattice.field import FieldSpec

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def Z():
    return FieldSpec.rational()


@pytest.fixture(scope="session")
def F5():
    return FieldSpec.quadratic(5)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(results, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)
