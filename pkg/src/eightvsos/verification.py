"""Random parameter draws, residuals of every identity, and suite reports."""

from __future__ import annotations

import cmath
import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from . import coeffs as _coeffs
from . import determinant as _det
from .closed_forms import golden_check
from .coeffs import (CoeffRole, EquationType, M0_MOD, M0_ORIG, N_MOD, NBAR_MOD,
                     N_ORIG, all_slots, equation_pairs, modified_set,
                     original_coeff, slot_arguments, substituted, unfolded_row)
from .determinant import build_W, det, fundamental_all, hz_system, rep_partition
from .errors import (SamplingExhausted, SingularDenominator,
                     SingularNormalization, SingularSystem, SOSError)
from .lattice import MAX_ENUM_L, ModelParams, partition_at
from .theta import ThetaContext

DEFAULT_THRESHOLDS = {
    "identity": 1e-8,
    "ratio": 1e-8,
    "golden": 1e-10,
    "theta": 1e-12,
    "symmetry": 1e-12,
}

FAMILIES = ("eqA", "eqD", "modA", "modD", "unfolded", "hz", "hzsys", "ztoz",
            "repA", "repD", "golden", "theta_props", "symmetry")

CHECK_CLASS = {
    "eqA": "identity", "eqD": "identity", "modA": "identity", "modD": "identity",
    "unfolded": "identity", "hz": "identity", "hzsys": "identity",
    "ztoz": "ratio", "repA": "ratio", "repD": "ratio",
    "golden": "golden", "theta_props": "theta", "symmetry": "symmetry",
}

MAX_REJECTIONS = 1000


class CheckId(NamedTuple):
    """One identity instance, e.g. CheckId("hzsys", ("A", 2))."""

    family: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.family
        inner = ",".join("0bar" if a == _coeffs.BAR else str(a) for a in self.args)
        return f"{self.family}({inner})"

    @property
    def check_class(self) -> str:
        return CHECK_CLASS[self.family]


def checks_for(L: int, families: Iterable[str] | None = None) -> list:
    """Every check instance for lattice size L, in a fixed order."""
    wanted = set(FAMILIES if families is None else families)
    unknown = wanted - set(FAMILIES)
    if unknown:
        raise ValueError(f"unknown check families: {sorted(unknown)}")
    out = []
    for fam in FAMILIES:
        if fam not in wanted:
            continue
        if fam == "unfolded":
            out += [CheckId(fam, lm) for lm in equation_pairs(L)]
        elif fam == "hz":
            out += [CheckId(fam, (T,)) for T in "AD"]
        elif fam == "hzsys":
            out += [CheckId(fam, (T, j)) for T in "AD" for j in range(1, L + 1)]
        elif fam == "ztoz":
            out += [CheckId(fam, (T, i)) for T in "AD" for i in range(1, L + 1)]
        elif fam in ("repA", "repD"):
            out += [CheckId(fam, (i,)) for i in range(L + 1)]
        elif fam == "golden":
            if L in (1, 2):
                out += [CheckId(fam, (L, T)) for T in "AD"]
        else:
            out.append(CheckId(fam))
    return out


def _w_guard(params: ModelParams) -> None:
    v = params.variables()
    for T in EquationType:
        build_W(T, v)
        for i in range(params.L + 1):
            _det._normalised_W(T, i, v)


def sample_params(L: int, seed: int, ctx: ThetaContext | None = None) -> ModelParams:
    """Deterministic guard-passing parameter draw for (L, seed)."""
    if L < 1:
        raise ValueError("L must be >= 1")
    ctx = ThetaContext(0.1) if ctx is None else ctx
    rng = np.random.default_rng([seed, L])

    def cplx(n):
        re = rng.uniform(-1.0, 1.0, n)
        im = rng.uniform(-0.5, 0.5, n)
        return [complex(a, b) for a, b in zip(re, im)]

    for _ in range(MAX_REJECTIONS):
        x, mu = cplx(L), cplx(L)
        x0, x0bar, tau = cplx(3)
        gamma = float(rng.uniform(0.2, 0.8))
        params = ModelParams(L, gamma, tau, x, mu, x0, x0bar, ctx)
        try:
            params.check_guard()
            _w_guard(params)
        except (SingularDenominator, SingularSystem, SingularNormalization):
            continue
        return params
    raise SamplingExhausted(f"no guard-passing draw for L={L}, seed={seed}")


class _Oracle:
    """Enumeration values memoised per (arguments, tau) for one draw."""

    def __init__(self, params: ModelParams):
        self.p = params
        self._memo = {}

    def __call__(self, xs, tau=None) -> complex:
        tau = self.p.tau if tau is None else complex(tau)
        key = (tuple(xs), tau)
        out = self._memo.get(key)
        if out is None:
            p = self.p
            out = self._memo[key] = partition_at(xs, p.mu, tau, p.gamma, p.theta_ctx)
        return out


def relative_residual(terms) -> float:
    """|sum t| / max |t|; 0 for an all-zero combination."""
    terms = [complex(t) for t in terms]
    big = max((abs(t) for t in terms), default=0.0)
    if big == 0.0:
        return 0.0
    return abs(sum(terms)) / big


def _rel(a, b) -> float:
    return float(abs(a - b) / max(abs(b), 1e-300))


def _original_terms(T, params, Z):
    v = params.variables()
    L, g = params.L, params.gamma
    shifted = params.tau - g if T is EquationType.A else params.tau + g
    terms = [original_coeff(T, CoeffRole(M0_ORIG), v) * Z(params.x, shifted)]
    for i in range(L + 1):
        terms.append(original_coeff(T, CoeffRole(N_ORIG, i), v) * Z(substituted(v, i)))
    return terms


def _modified_terms(T, params, Z):
    v = params.variables()
    c = modified_set(T, v)
    terms = [c[CoeffRole(M0_MOD)] * Z(params.x)]
    for i in range(1, params.L + 1):
        terms.append(c[CoeffRole(N_MOD, i)] * Z(slot_arguments(_coeffs.Q(i), v)))
        terms.append(c[CoeffRole(NBAR_MOD, i)] * Z(slot_arguments(_coeffs.Qbar(i), v)))
    return terms


def _unfolded_terms(T, l, m, params, Z):
    v = params.variables()
    row = unfolded_row(T, l, m, v)
    return [row[s] * Z(slot_arguments(s, v)) for s in all_slots(params.L)]


def _theta_props(params: ModelParams) -> float:
    ctx = params.theta_ctx
    th = ctx
    lnp = math.log(ctx.nome)
    pts = list(params.spectral) + list(params.mu) + [params.tau, params.gamma]
    worst = 0.0
    for x in pts:
        t = th(x)
        worst = max(worst, abs(t + th(-x)) / max(abs(t), ctx.floor))
        worst = max(worst, _rel(th(x + 1j * math.pi), -t))
        worst = max(worst, _rel(th(x + lnp), -cmath.exp(-2 * x) * t / ctx.nome))
    return worst


def _symmetry(params: ModelParams, Z) -> float:
    """Coefficients of both modified equations under x_i <-> x_j, and Z."""
    v = params.variables()
    L = params.L
    worst = 0.0
    for i in range(1, L + 1):
        for j in range(i + 1, L + 1):
            w = v.swap(i, j)
            xs = tuple(w.x)
            worst = max(worst, _rel(Z(xs), Z(params.x)))
            relabel = {i: j, j: i}
            for T in EquationType:
                a, b = modified_set(T, v), modified_set(T, w)
                for role, val in a.items():
                    k = role.index
                    other = role if k is None else CoeffRole(role.kind, relabel.get(k, k))
                    worst = max(worst, _rel(b[other], val))
    return worst


def residual(check: CheckId, params: ModelParams, _Z: _Oracle | None = None) -> float:
    """Relative residual of one identity at ``params``."""
    Z = _Oracle(params) if _Z is None else _Z
    fam, args = check.family, check.args
    v = params.variables()
    if fam in ("eqA", "eqD"):
        return relative_residual(_original_terms(EquationType(fam[-1]), params, Z))
    if fam in ("modA", "modD"):
        return relative_residual(_modified_terms(EquationType(fam[-1]), params, Z))
    if fam == "unfolded":
        l, m = args
        worst = 0.0
        for T in EquationType:
            worst = max(worst, relative_residual(_unfolded_terms(T, l, m, params, Z)))
        return worst
    if fam == "hz":
        h = fundamental_all(args[0], v)
        return relative_residual(h[i] * Z(substituted(v, i)) for i in range(params.L + 1))
    if fam == "hzsys":
        T, j = args
        h = hz_system(T, v)[j]
        return relative_residual(h[i] * Z(substituted(v, i)) for i in range(params.L + 1))
    if fam == "ztoz":
        T, i = args
        mats = build_W(T, v)
        lhs = det(mats[i]) / det(mats[0])
        return _rel(lhs, Z(substituted(v, i)) / Z(params.x))
    if fam in ("repA", "repD"):
        (i,) = args
        return _rel(rep_partition(fam[-1], i, v), Z(substituted(v, i)))
    if fam == "golden":
        L, T = args
        return golden_check(L, T, v).deviation
    if fam == "theta_props":
        return _theta_props(params)
    if fam == "symmetry":
        return _symmetry(params, Z)
    raise ValueError(f"unknown check {check}")


@dataclass
class CheckResult:
    check: str
    L: int
    draw: int
    residual: float
    threshold: float
    passed: bool
    millis: float = 0.0
    error: str | None = None


@dataclass
class VerificationReport:
    seed: int
    draws: int
    L_list: tuple
    theta_ctx: ThetaContext
    thresholds: dict
    results: list = field(default_factory=list)
    params: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list:
        return [r for r in self.results if not r.passed]

    def worst(self) -> dict:
        """Largest residual per check family."""
        out = {}
        for r in self.results:
            fam = r.check.split("(")[0]
            out[fam] = max(out.get(fam, 0.0), r.residual)
        return out


def run_suite(L_list, draws: int, seed: int, checks=None,
              thresholds: dict | None = None,
              ctx: ThetaContext | None = None) -> VerificationReport:
    """Evaluate the selected check families at ``draws`` points per L.

    ``checks`` is an iterable of family names (see FAMILIES); None selects
    every family. Draw k at size L uses sample_params(L, seed + k). Errors
    are recorded as failed checks rather than raised.
    """
    ctx = ThetaContext(0.1) if ctx is None else ctx
    th = dict(DEFAULT_THRESHOLDS)
    th.update(thresholds or {})
    families = FAMILIES if checks is None else tuple(checks)
    report = VerificationReport(seed, draws, tuple(L_list), ctx, th)
    if not families:
        return report
    for L in L_list:
        if not 1 <= L <= MAX_ENUM_L:
            raise ValueError(f"L={L} is outside the enumeration cap")
        ids = checks_for(L, families)
        for k in range(draws):
            params = sample_params(L, seed + k, ctx)
            report.params[(L, k)] = params
            Z = _Oracle(params)
            for cid in ids:
                limit = th[cid.check_class]
                t0 = time.perf_counter()
                err = None
                try:
                    res = float(residual(cid, params, Z))
                    ok = math.isfinite(res) and res <= limit
                except (SOSError, ArithmeticError, ValueError, IndexError) as exc:
                    res, ok, err = math.inf, False, f"{type(exc).__name__}: {exc}"
                ms = 1e3 * (time.perf_counter() - t0)
                report.results.append(CheckResult(str(cid), L, k, res, limit, ok, ms, err))
    return report


def family_spread(T, params: ModelParams, draws: int = 5, seed: int = 0, i: int = 0) -> float:
    """Largest relative change of rep_partition over fresh (x0, x0bar) draws.

    X, mu, tau, gamma and the nome stay fixed; the auxiliary variables are
    resampled from the usual box and must pass the guards.
    """
    rng = np.random.default_rng([seed, params.L, 7])
    values = []
    tries = 0
    while len(values) < draws:
        tries += 1
        if tries > MAX_REJECTIONS:
            raise SamplingExhausted("no guard-passing auxiliary draw")
        x0, xb = (complex(rng.uniform(-1, 1), rng.uniform(-0.5, 0.5)) for _ in range(2))
        p = params.replace(x0=x0, x0bar=xb)
        try:
            p.check_guard()
            values.append(rep_partition(T, i, p.variables()))
        except (SingularDenominator, SingularSystem, SingularNormalization):
            continue
    ref = values[0]
    return max(_rel(val, ref) for val in values)


def clear_caches() -> None:
    _det._w_system.cache_clear()


@contextmanager
def corrupted_coefficient(T, kind: str, factor: complex = 1.001):
    """Test hook: multiply one modified coefficient family by ``factor``."""
    T = EquationType.parse(T)
    original = _coeffs._modified

    def bad(T_, kind_, i, v, k):
        val = original(T_, kind_, i, v, k)
        return val * factor if (T_ is T and kind_ == kind) else val

    _coeffs._modified = bad
    clear_caches()
    try:
        yield
    finally:
        _coeffs._modified = original
        clear_caches()
