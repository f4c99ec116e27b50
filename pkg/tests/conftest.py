import pytest
from hypothesis import HealthCheck, settings

from bipartite_mf.model import ReducedParams

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# (criterion number, passed, detail) lines collected by the acceptance module
ACCEPTANCE_LINES: list[tuple[int, bool, str]] = []


def reduced(t, b, a=None):
    """Symmetric model at reduced temperature ``t`` with ``a = 1 - |b|`` unless given."""
    return ReducedParams.from_abt(1.0 - abs(b) if a is None else a, b, t)


def symmetric_params(t, b, a=None, h1=0.0, h2=0.0):
    return reduced(t, b, a).to_model_params(h1, h2)


@pytest.fixture
def acceptance_report():
    def record(number: int, passed: bool, detail: str = "") -> None:
        ACCEPTANCE_LINES.append((number, passed, detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
