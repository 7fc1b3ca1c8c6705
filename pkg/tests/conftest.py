import numpy as np
import pytest

from cqedgate import DeviceParams, PolarizationPair

ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def device():
    return DeviceParams.from_ghz()


@pytest.fixture(scope="session")
def resonant_device():
    """Reference device with the QD tuned onto the cavity."""
    dev = DeviceParams.from_ghz()
    return DeviceParams.from_ghz(nu_cavity=dev.nu_cavity, nu_qd=dev.nu_cavity)


@pytest.fixture(scope="session")
def vh():
    return PolarizationPair.parse("VH")


@pytest.fixture
def rng():
    return np.random.default_rng(20260101)


@pytest.fixture
def acceptance(request):
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def record(number, title, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {title}: {detail}"
        print(line)
        lines.append((number, line))
        return passed

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
