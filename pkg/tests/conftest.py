import numpy as np
import pytest

from datassim.testgen import base_field


def random_pair(seed, shape=(32, 32), nan_frac=0.0):
    """Correlated random pair with a shared NaN pattern sprinkled in."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, 1.0, size=shape)
    y = 0.6 * x + 0.4 * rng.uniform(0.0, 1.0, size=shape)
    if nan_frac:
        x[rng.random(shape) < nan_frac] = np.nan
        y[rng.random(shape) < nan_frac] = np.nan
    return x, y


@pytest.fixture(scope="session")
def ts_like():
    return base_field(192, 288, 0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results, key=lambda k: int(k.split()[0])):
        terminalreporter.write_line(results[key])
