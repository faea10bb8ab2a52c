import pytest
from hypothesis import HealthCheck, settings

from resurge import acceptance, germ

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def ctx():
    """Acceptance context shared by every test that needs a full residua run."""
    return acceptance.Context()


@pytest.fixture(scope="session")
def rho0_data():
    return germ.germ_data(germ.preset("rho0"), 64, 160)


@pytest.fixture(scope="session")
def quad_data():
    return germ.germ_data(germ.preset("quad"), 64, 160)


_CHECK_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_CHECK_LINES] = []


@pytest.fixture
def report_check(request):
    """Print an acceptance line now and repeat it in the terminal summary."""
    lines = request.config.stash[_CHECK_LINES]

    def report(line):
        print(line)
        lines.append(line)
    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash[_CHECK_LINES]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion")[1].split()[0])):
            terminalreporter.write_line(line)
