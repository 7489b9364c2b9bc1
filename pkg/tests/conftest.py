import os

import pytest
from hypothesis import HealthCheck, settings

from heuniso.complex_core import Path
from heuniso.painleve import PainleveKind, integrate_painleve, scan_trajectories

settings.register_profile(
    "heuniso",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "heuniso"))

# P1 from y(0) = y'(0) = 0: first two poles and Laurent coefficients b,
# frozen from a 40-digit mpmath integration matched to a sympy Laurent series
P1_POLES = [(2.6155712098823738, -0.05309200884410), (5.8532132619332, -0.2274053992)]


@pytest.fixture(scope="session")
def p1_traj():
    return integrate_painleve(PainleveKind("P1"), (0, 0, 0), Path.line(0, 7))


@pytest.fixture(scope="session")
def p1_scan():
    return scan_trajectories(PainleveKind("P1"), (0, 0, 0), (0, 15))


@pytest.fixture
def store_dir(tmp_path, monkeypatch):
    d = tmp_path / "store"
    monkeypatch.setenv("HEUNISO_STORE", str(d))
    return d


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
