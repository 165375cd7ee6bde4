import numpy as np
import pytest

from generic_integrators import Potential, State


class Free(Potential):
    """Zero potential; force-free motion."""

    def u(self, q):
        return 0.0 * q

    def du(self, q):
        return 0.0 * q

    def d2u(self, q):
        return 0.0 * q

    def d3u(self, q):
        return 0.0 * q

    def hessian_constant(self):
        return 0.0


class Linear(Potential):
    """Tilted potential U = c*q; constant force, zero Hessian."""

    def __init__(self, c=1.0):
        self.c = c

    def u(self, q):
        return self.c * q

    def du(self, q):
        return self.c + 0.0 * q

    def d2u(self, q):
        return 0.0 * q

    def d3u(self, q):
        return 0.0 * q

    def hessian_constant(self):
        return 0.0


@pytest.fixture
def free_potential():
    return Free()


@pytest.fixture
def linear_potential():
    return Linear(0.7)


def random_states(n, seed, q_range=10.0, p_range=10.0, s_range=2.0):
    rng = np.random.default_rng(seed)
    qs = rng.uniform(-q_range, q_range, n)
    ps = rng.uniform(-p_range, p_range, n)
    ss = rng.uniform(0.0, s_range, n)
    return [State(float(q), float(p), float(s)) for q, p, s in zip(qs, ps, ss)]
