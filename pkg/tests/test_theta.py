import cmath
import math
import random

import mpmath
import pytest

from conftest import mp_theta, rand_c
from eightvsos.errors import InvalidContext, NonConvergent
from eightvsos.theta import ThetaContext, theta_eval, theta_raw, theta_series


def test_zero_is_exact(ctx):
    assert theta_eval(0, ctx) == 0


def test_odd_at_point(ctx):
    a, b = theta_eval(0.3, ctx), theta_eval(-0.3, ctx)
    assert abs(a + b) <= 1e-15 * abs(a)


def test_four_term_partial_sum(ctx):
    p = 0.1
    ref = 2 * (p ** 0.25 * math.sinh(0.3) - p ** 2.25 * math.sinh(0.9)
               + p ** 6.25 * math.sinh(1.5) - p ** 12.25 * math.sinh(2.1))
    assert abs(theta_eval(0.3, ctx) - ref) <= 1e-12 * abs(ref)


@pytest.mark.parametrize("p", [0.05, 0.1, 0.3, 0.6])
def test_matches_extended_precision_series(p):
    ctx = ThetaContext(p)
    r = random.Random(int(p * 1000))
    for _ in range(40):
        x = rand_c(r, 2.0, 1.5)
        ref = complex(mp_theta(x, p))
        assert abs(theta_eval(x, ctx) - ref) <= 1e-12 * max(abs(ref), ctx.floor)


def test_matches_jacobi_theta1():
    # [x] = -i theta_1(i x, p)
    ctx = ThetaContext(0.2)
    r = random.Random(9)
    for _ in range(40):
        x = rand_c(r, 1.5, 1.0)
        with mpmath.workdps(30):
            ref = complex(-1j * mpmath.jtheta(1, 1j * mpmath.mpc(x), 0.2))
        assert abs(theta_eval(x, ctx) - ref) <= 1e-12 * max(abs(ref), ctx.floor)


def test_reduction_agrees_with_direct_series(ctx):
    direct = ThetaContext(0.1, reduce=False)
    r = random.Random(5)
    for _ in range(100):
        x = rand_c(r, 3.0, 1.0)
        a, b = theta_eval(x, ctx), theta_series(x, direct)
        assert abs(a - b) <= 1e-12 * max(abs(b), ctx.floor)


def test_far_arguments_match_oracle(ctx):
    for x in (7.3 + 0.2j, -9.1 - 0.4j, 12.0 + 1j):
        ref = complex(mp_theta(x, 0.1, terms=80, dps=60))
        assert abs(theta_eval(x, ctx) - ref) <= 1e-11 * abs(ref)


def test_oddness_random(ctx):
    r = random.Random(1)
    for _ in range(1000):
        x = rand_c(r, 2.0, 2.0)
        t = theta_eval(x, ctx)
        assert abs(t + theta_eval(-x, ctx)) <= 1e-14 * max(abs(t), ctx.floor)


def test_quasi_periodicity(ctx):
    r = random.Random(2)
    lnp = math.log(ctx.nome)
    for _ in range(1000):
        x = rand_c(r, 1.0, 1.0)
        t = theta_eval(x, ctx)
        assert abs(theta_eval(x + 1j * math.pi, ctx) + t) <= 1e-12 * abs(t)
        rhs = -cmath.exp(-2 * x) * t / ctx.nome
        assert abs(theta_eval(x + lnp, ctx) - rhs) <= 1e-10 * abs(rhs)


def test_deterministic(ctx):
    assert theta_eval(0.7 - 0.2j, ctx) == theta_eval(0.7 - 0.2j, ThetaContext(0.1))


def test_scale_multiplies_values(ctx):
    c = 2.5 - 0.5j
    x = 0.4 + 0.1j
    assert theta_eval(x, ctx.scaled(c)) == pytest.approx(c * theta_eval(x, ctx), rel=1e-15)
    assert theta_raw(x, ctx.scaled(c)) == theta_raw(x, ctx)


@pytest.mark.parametrize("p", [0.0, 1.0, -0.2, 1.5])
def test_invalid_nome(p):
    with pytest.raises(InvalidContext):
        ThetaContext(p)


def test_invalid_fields():
    with pytest.raises(InvalidContext):
        ThetaContext(0.1, truncation_tol=0)
    with pytest.raises(InvalidContext):
        ThetaContext(0.1, max_terms=0)


def test_term_cap_raises():
    with pytest.raises(NonConvergent):
        theta_eval(0.5, ThetaContext(0.9, max_terms=2))
    with pytest.raises(NonConvergent):
        theta_series(40.0, ThetaContext(0.1, max_terms=4, reduce=False))
