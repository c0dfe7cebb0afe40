import random

import mpmath
import pytest

from eightvsos.theta import ThetaContext


def mp_theta(x, p, terms=50, dps=30):
    """[x] summed directly at extended precision."""
    with mpmath.workdps(dps):
        x = mpmath.mpc(x)
        p = mpmath.mpf(p)
        tot = mpmath.mpc(0)
        for n in range(terms):
            tot += (-1) ** n * p ** ((n + mpmath.mpf(1) / 2) ** 2) * mpmath.sinh((2 * n + 1) * x)
        return 2 * tot


@pytest.fixture
def ctx():
    return ThetaContext(0.1)


@pytest.fixture
def rng():
    return random.Random(1234)


def rand_c(r, re=1.0, im=0.5):
    return complex(r.uniform(-re, re), r.uniform(-im, im))
