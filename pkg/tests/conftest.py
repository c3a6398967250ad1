from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("qline", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("qline")

QS = [Fraction(3, 2), Fraction(2), Fraction(10, 9)]


@pytest.fixture(params=QS, ids=lambda q: f"q={q}")
def q(request):
    return request.param


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
