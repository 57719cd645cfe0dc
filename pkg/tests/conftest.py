import math

import numpy as np
import pytest

from thetafourier.core import GridSpec, ThetaSpec
from thetafourier.fourier import band_limited_table, synthesize

# acceptance tests append "criterion N: PASS/FAIL ..." lines here
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def random_field(rng, spec, N, cutoff, modes=None):
    return synthesize(band_limited_table(rng, spec, cutoff, modes), GridSpec(spec.n, N))


def random_theta(rng, n, mods=(1 / 3, 1.0, math.e, 2.0)):
    return tuple(complex(rng.choice(mods) * np.exp(1j * rng.uniform(-math.pi, math.pi))) for _ in range(n))


def random_spec(rng, n, T=None):
    return ThetaSpec(random_theta(rng, n), float(rng.uniform(0.5, 7.0)) if T is None else T)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
