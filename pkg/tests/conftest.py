import numpy as np
import pytest

from mom_tournament import kernels
from mom_tournament.core import CandidatePool, Dataset, RngSpec, TournamentConfig
from mom_tournament.datagen import ProblemSpec, generate

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(params=sorted(kernels.backends()))
def backend(request):
    return kernels.backends()[request.param]


def e1(d):
    t = np.zeros(d)
    t[0] = 1.0
    return t


@pytest.fixture
def noiseless_problem():
    return ProblemSpec(n_dim=3, n_per_part=240, t0=np.array([1.0, -0.5, 0.25]), noise="none")


@pytest.fixture
def noisy_dataset():
    spec = ProblemSpec(5, 400, e1(5), noise="student_t", noise_param=5.0)
    return spec, generate(spec, RngSpec(11, 3))


def shell_pool(t0, r, rng, shells=(0.5, 1, 2, 8), per_shell=5):
    """``t0`` (id 0) followed by random decoys on spheres of radius ``s * r``."""
    rows = [t0]
    for s in shells:
        g = rng.standard_normal((per_shell, t0.size))
        rows.extend(t0 + s * r * g / np.linalg.norm(g, axis=1, keepdims=True))
    return CandidatePool.from_vectors(rows)
