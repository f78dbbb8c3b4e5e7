import os

import pytest

from eulerblow import pipeline
from eulerblow.config import load_config, set_dotted

CONFIGS = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "configs")


def config_path(name):
    return os.path.join(CONFIGS, name)


@pytest.fixture(scope="session")
def reference_cfg():
    return load_config(config_path("reference_gamma2.yaml"))


@pytest.fixture(scope="session")
def reference_run(reference_cfg):
    """Isentropic gamma=2 compressive pulse on 1024 cells (blows up near t = 1.59)."""
    return pipeline.simulate(reference_cfg)


@pytest.fixture(scope="session")
def entropy_cfg():
    """gamma=2 with a weak tanh entropy step: N > 0 but inf y0 < -(1+eps) N."""
    return load_config(config_path("tanh_synthetic_N.yaml"))


@pytest.fixture(scope="session")
def entropy_run(entropy_cfg):
    return pipeline.simulate(entropy_cfg)


@pytest.fixture
def small_cfg(reference_cfg):
    c = set_dotted(reference_cfg, "grid.cells", 128)
    return set_dotted(c, "horizon_time", 0.5)


ACCEPTANCE_KEY = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """Record one verdict line per acceptance criterion for the terminal summary."""
    store = request.config.stash.setdefault(ACCEPTANCE_KEY, {})

    def record(number, title, passed, detail):
        line = f"criterion {number} {'PASS' if passed else 'FAIL'}: {title} ({detail})"
        store[number] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(ACCEPTANCE_KEY, {})
    if store:
        terminalreporter.section("acceptance criteria")
        for number in sorted(store):
            terminalreporter.write_line(store[number])
