import itertools
import random
import time

import numpy as np
import pytest

from conftest import rand_c
from eightvsos.errors import ForbiddenFace, SingularDenominator, SizeTooLarge
from eightvsos.lattice import (ModelParams, _enumerate, classify, enumerate_heights,
                               face_weight, partition_at, partition_enum)
from eightvsos.theta import ThetaContext
from eightvsos.verification import sample_params


def rel(a, b):
    return abs(a - b) / abs(b)


def test_single_configuration_L1():
    (n,) = enumerate_heights(1)
    assert n.tolist() == [[1, 0], [0, 1]]


def test_L2_differs_only_at_centre():
    confs = enumerate_heights(2)
    assert len(confs) == 2
    assert [int(n[1, 1]) for n in confs] == [0, 2]
    assert np.array_equal(np.delete(confs[0].ravel(), 4), np.delete(confs[1].ravel(), 4))


def test_counts_match_alternating_sign_matrices():
    assert [len(enumerate_heights(L)) for L in range(1, 6)] == [1, 2, 7, 42, 429]


def _transfer_count(L):
    # independent count: rows of heights as states, boundary rows fixed
    first = tuple(L - j for j in range(L + 1))
    last = tuple(range(L + 1))

    def rows(prev, i):
        # row i has ends L - i and i
        out = []

        def grow(row):
            j = len(row)
            if j == L:
                if abs(row[-1] - i) == 1 and abs(prev[L] - i) == 1:
                    out.append(tuple(row) + (i,))
                return
            for h in (prev[j] - 1, prev[j] + 1):
                if abs(h - row[-1]) == 1:
                    grow(row + [h])

        grow([L - i])
        return out

    layer = {first: 1}
    for i in range(1, L + 1):
        nxt = {}
        for prev, c in layer.items():
            for row in rows(prev, i):
                nxt[row] = nxt.get(row, 0) + c
        layer = nxt
    return layer.get(last, 0)


@pytest.mark.parametrize("L", [1, 2, 3, 4, 5])
def test_counts_cross_checked_by_transfer(L):
    assert len(enumerate_heights(L)) == _transfer_count(L)


@pytest.mark.parametrize("L", [1, 2, 3, 4])
def test_every_configuration_is_valid_and_unique(L):
    confs = enumerate_heights(L)
    seen = set()
    for n in confs:
        for j in range(L + 1):
            assert n[0, j] == n[j, 0] == L - j
            assert n[L, j] == n[j, L] == j
        assert np.all(np.abs(np.diff(n, axis=0)) == 1)
        assert np.all(np.abs(np.diff(n, axis=1)) == 1)
        for i in range(L):
            for j in range(L):
                classify(n[i + 1, j], n[i + 1, j + 1], n[i, j], n[i, j + 1])
        seen.add(n.tobytes())
    assert len(seen) == len(confs)


def test_lexicographic_interior_order():
    confs = enumerate_heights(4)
    keys = [tuple(n[1:4, 1:4].ravel()) for n in confs]
    assert keys == sorted(keys)


def test_results_are_read_only():
    with pytest.raises(ValueError):
        enumerate_heights(2)[0][1, 1] = 5


@pytest.mark.parametrize("L", [0, 7])
def test_size_cap(L):
    with pytest.raises(SizeTooLarge):
        enumerate_heights(L)


def test_L5_enumeration_time():
    _enumerate.cache_clear()
    t0 = time.perf_counter()
    assert len(enumerate_heights(5)) == 429
    assert time.perf_counter() - t0 <= 5.0


@pytest.fixture
def params():
    return ModelParams(1, 0.4, 0.3 + 0.1j, [0.2 - 0.1j], [-0.5 + 0.2j], 0.7, -0.6 + 0.3j)


def test_face_weight_patterns(params):
    th = params.theta_ctx
    g, tau = params.gamma, params.tau
    s = params.x[0] - params.mu[0]
    # lower-sign c-type face at corner offset 2: reference height tau + 2 gamma
    H = tau + 2 * g
    assert face_weight(1, 2, 2, 1, 1, 1, params) == pytest.approx(th(H - s) * th(g) / th(H))
    # upper-sign b-type face at corner offset 0 reads its height from h_{i+1,j} + gamma
    H = tau + 2 * g
    assert face_weight(1, 2, 0, 1, 1, 1, params) == pytest.approx(th(H + g) * th(s) / th(H))
    assert face_weight(1, 0, 0, -1, 1, 1, params) == pytest.approx(th(s + g))
    assert face_weight(-1, 0, 0, 1, 1, 1, params) == pytest.approx(th(s + g))


def test_literal_reading_uses_corner_c(params):
    th = params.theta_ctx
    g, tau = params.gamma, params.tau
    s = params.x[0] - params.mu[0]
    w = face_weight(1, 2, 0, 1, 1, 1, params, reading="literal")
    assert w == pytest.approx(th(tau + g) * th(s) / th(tau))


def test_forbidden_face(params):
    with pytest.raises(ForbiddenFace):
        face_weight(1, 0, 0, 0, 1, 1, params)
    with pytest.raises(ForbiddenFace):
        classify(1, 1, 0, 1)


def test_L1_closed_form(params):
    th = params.theta_ctx
    g, tau = params.gamma, params.tau
    ref = th(g) * th(tau + g - params.x[0] + params.mu[0]) / th(tau + g)
    assert rel(partition_enum(params), ref) <= 1e-14


def test_L2_manual_expansion():
    p = sample_params(2, 4)
    th, g, tau = p.theta_ctx, p.gamma, p.tau
    s = [[p.x[i] - p.mu[j] for j in range(2)] for i in range(2)]
    a = lambda s_: th(s_ + g)

    def c(H, sign, s_):
        return th(H + sign * s_) * th(g) / th(H)

    def b(H, sign, s_):
        return th(H + sign * g) * th(s_) / th(H)

    # centre offset 0: diagonal faces are b-type (lower at (1,1), upper at
    # (2,2), both at height tau + 2 gamma), off-diagonal lower c at tau + gamma
    z0 = (b(tau + 2 * g, -1, s[0][0]) * c(tau + g, -1, s[0][1])
          * c(tau + g, -1, s[1][0]) * b(tau + 2 * g, 1, s[1][1]))
    # centre offset 2: diagonal lower c at tau + 2 gamma, off-diagonal a-type
    z2 = c(tau + 2 * g, -1, s[0][0]) * a(s[0][1]) * a(s[1][0]) * c(tau + 2 * g, -1, s[1][1])
    assert rel(partition_enum(p), z0 + z2) <= 1e-13


@pytest.mark.parametrize("L", [2, 3])
def test_x_symmetry(L):
    p = sample_params(L, 11)
    ref = partition_enum(p)
    for perm in itertools.permutations(range(L)):
        q = p.replace(x=[p.x[k] for k in perm])
        assert rel(partition_enum(q), ref) <= 1e-12


@pytest.mark.parametrize("L", [2, 3])
def test_mu_symmetry(L):
    p = sample_params(L, 12)
    ref = partition_enum(p)
    for perm in itertools.permutations(range(L)):
        q = p.replace(mu=[p.mu[k] for k in perm])
        assert rel(partition_enum(q), ref) <= 1e-12


def test_literal_reading_is_not_symmetric():
    p = sample_params(2, 3)
    q = p.replace(x=p.x[::-1])
    a, b = partition_enum(p, "literal"), partition_enum(q, "literal")
    assert rel(a, b) > 1e-3


@pytest.mark.parametrize("L", [1, 2, 3])
def test_kernel_rescaling_homogeneity(L):
    p = sample_params(L, 2)
    c = 1.7 - 0.4j
    q = p.replace(theta_ctx=p.theta_ctx.scaled(c))
    assert rel(partition_enum(q), c ** (L * L) * partition_enum(p)) <= 1e-12


def test_tau_shift_reuses_configurations():
    p = sample_params(2, 8)
    z = partition_at(p.x, p.mu, p.tau + p.gamma, p.gamma, p.theta_ctx)
    assert rel(z, partition_enum(p.replace(tau=p.tau + p.gamma))) == 0


def test_model_params_validation():
    with pytest.raises(ValueError):
        ModelParams(2, 0.4, 0.1, [0.1], [0.2, 0.3], 0, 0.5)
    with pytest.raises(ValueError):
        ModelParams(0, 0.4, 0.1, [], [], 0, 0.5)


def test_guard_detects_collision():
    p = sample_params(2, 1)
    assert p.guard_margin() >= 1
    with pytest.raises(SingularDenominator):
        p.replace(x0=p.x[0]).check_guard()
    with pytest.raises(SingularDenominator):
        p.replace(x0bar=p.mu[1] - p.gamma).check_guard()
