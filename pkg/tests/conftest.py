import pytest

from kerrsense import CavityParams

# gamma units; the working point of the sensing analysis (U/2pi = 1 Hz at gamma/2pi = 1 GHz)
OPERATING_POINT = CavityParams(gamma=1.0, delta=0.0, u_kerr=1e-9, eps=1e-3, g2=0.25)

_ACCEPTANCE_LINES = []


@pytest.fixture
def op_point():
    return OPERATING_POINT


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion; shown in the summary."""

    def record(tag, ok, detail):
        line = f"{tag} {'PASS' if ok else 'FAIL'}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
