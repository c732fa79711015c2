import numpy as np
import pytest

from affcorr import SimConfig, generate_scene


def random_rotation(rng, max_angle=np.pi):
    from affcorr import RotationMatrix

    axis = rng.normal(size=3)
    return RotationMatrix.from_axis_angle(axis, rng.uniform(0, max_angle))


def scenes(n, seed=1, **kw):
    cfg = SimConfig(seed=seed, scenes=n, **kw)
    return [generate_scene(cfg, i) for i in range(n)]


@pytest.fixture(scope="session")
def scene_pool():
    """A few hundred valid scenes with several points each."""
    return scenes(300, seed=2024, points=4)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
