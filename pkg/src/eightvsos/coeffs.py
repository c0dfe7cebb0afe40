"""Coefficients of the functional equations and the permutation action on them.

Spectral variables live in slots 0..L+1 of a :class:`VariableTuple`:
slot 0 is x0, slots 1..L are x1..xL and slot L+1 is x0bar. The constant
:data:`BAR` may be passed wherever a slot index is expected and always means
the x0bar slot.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, NamedTuple

from .errors import IndexOutOfRange, SingularDenominator
from .theta import ThetaContext, theta_raw

BAR = -1


class EquationType(enum.Enum):
    A = "A"
    D = "D"

    @classmethod
    def parse(cls, value) -> "EquationType":
        if isinstance(value, cls):
            return value
        return cls(str(value).upper())


class CoeffRole(NamedTuple):
    kind: str
    index: int | None = None


M0_ORIG = "M0_orig"
N_ORIG = "N_orig"
M0_MOD = "M0_mod"
N_MOD = "N_mod"
NBAR_MOD = "Nbar_mod"


@dataclass(frozen=True)
class VariableTuple:
    values: tuple
    mu: tuple
    tau: complex
    gamma: complex
    ctx: ThetaContext

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(complex(v) for v in self.values))
        object.__setattr__(self, "mu", tuple(complex(v) for v in self.mu))
        object.__setattr__(self, "tau", complex(self.tau))
        object.__setattr__(self, "gamma", complex(self.gamma))
        if len(self.values) != len(self.mu) + 2:
            raise ValueError("values must hold x0, x1..xL, x0bar with L = len(mu)")

    @property
    def L(self) -> int:
        return len(self.mu)

    @property
    def x(self) -> tuple:
        return self.values[1:-1]

    def slot(self, k: int) -> int:
        k = self.L + 1 if k == BAR else k
        if not 0 <= k <= self.L + 1:
            raise IndexOutOfRange(f"slot {k} outside 0..{self.L + 1}")
        return k

    def __getitem__(self, k: int) -> complex:
        return self.values[self.slot(k)]

    def permuted(self, sigma) -> "VariableTuple":
        if sorted(sigma) != list(range(self.L + 2)):
            raise ValueError(f"{sigma!r} is not a permutation of the {self.L + 2} slots")
        vals = tuple(self.values[sigma[k]] for k in range(self.L + 2))
        return VariableTuple(vals, self.mu, self.tau, self.gamma, self.ctx)

    def swap(self, i: int, j: int) -> "VariableTuple":
        return self.permuted(transposition(i, j, self.L))

    def with_tau(self, tau) -> "VariableTuple":
        return VariableTuple(self.values, self.mu, tau, self.gamma, self.ctx)

    def with_ctx(self, ctx: ThetaContext) -> "VariableTuple":
        return VariableTuple(self.values, self.mu, self.tau, self.gamma, ctx)


def identity(L: int) -> tuple:
    return tuple(range(L + 2))


def transposition(i: int, j: int, L: int) -> tuple:
    """Slot permutation of the 2-cycle exchanging x_i and x_j."""
    i = L + 1 if i == BAR else i
    j = L + 1 if j == BAR else j
    for k in (i, j):
        if not 0 <= k <= L + 1:
            raise IndexOutOfRange(f"slot {k} outside 0..{L + 1}")
    sigma = list(range(L + 2))
    sigma[i], sigma[j] = sigma[j], sigma[i]
    return tuple(sigma)


def compose(outer, inner) -> tuple:
    """The permutation ``outer o inner``: ``inner`` acts first."""
    return tuple(inner[outer[k]] for k in range(len(outer)))


def permute_eval(f: Callable, sigma, v: VariableTuple):
    """Evaluate ``f`` on ``v`` with its slots permuted by ``sigma``."""
    return f(v.permuted(sigma))


class _Kernel:
    """Memoised theta evaluation bound to one VariableTuple."""

    def __init__(self, v: VariableTuple):
        self.v = v
        self.ctx = v.ctx
        self.delta = 1e-3 * v.ctx.floor
        self._memo = {}

    def _raw(self, x):
        out = self._memo.get(x)
        if out is None:
            out = self._memo[x] = theta_raw(x, self.ctx)
        return out

    def __call__(self, x) -> complex:
        return self._raw(x) * self.ctx.scale

    def inv(self, x) -> complex:
        """1/[x], refusing arguments within the singularity guard."""
        raw = self._raw(x)
        if abs(raw) < self.delta:
            raise SingularDenominator(f"|[{x:.6g}]| = {abs(raw):.3g} below guard")
        return 1.0 / (raw * self.ctx.scale)


# -- equation type A / D in their original, tau-shifting form ---------------

def _original(T, kind, i, v: VariableTuple, k: _Kernel, printed: bool):
    L, g, tau, X, mu = v.L, v.gamma, v.tau, v.values, v.mu
    x0 = X[0]
    if T is EquationType.A:
        if kind == M0_ORIG:
            out = k(tau) * k.inv(tau + L * g)
            for m in mu:
                out *= k(x0 - m)
            return out
        if i == 0:
            out = -k(tau + g) * k.inv(tau + (L + 1) * g)
            for j in range(1, L + 1):
                out *= k(x0 - mu[j - 1] + g) * k(X[j] - x0 + g) * k.inv(X[j] - x0)
            return out
        xi = X[i]
        # the printed coefficient carries [tau - gamma]; [gamma] is what the
        # equation (and pole cancellation at x0 = x_i) requires
        lead = k(tau - g) if printed else k(g)
        out = k(tau + g + x0 - xi) * lead * k.inv(xi - x0) * k.inv(tau + (L + 1) * g)
        for m in mu:
            out *= k(xi - m + g)
        for j in range(1, L + 1):
            if j != i:
                out *= k(X[j] - xi + g) * k.inv(X[j] - xi)
        return out
    if kind == M0_ORIG:
        out = 1 + 0j
        for m in mu:
            out *= k(x0 - m + g)
        return out
    if i == 0:
        out = -1 + 0j
        for j in range(1, L + 1):
            out *= k(x0 - mu[j - 1]) * k(x0 - X[j] + g) * k.inv(x0 - X[j])
        return out
    xi = X[i]
    out = k(g) * k(tau + (L + 1) * g + x0 - xi) * k.inv(x0 - xi) * k.inv(tau + (L + 1) * g)
    for m in mu:
        out *= k(xi - m)
    for j in range(1, L + 1):
        if j != i:
            out *= k(xi - X[j] + g) * k.inv(xi - X[j])
    return out


def original_coeff(T, role: CoeffRole, v: VariableTuple, printed: bool = False) -> complex:
    """M0 or N_i of equation type A or D (the tau-shifting equations).

    ``printed=True`` reproduces a misprinted factor in N_i of type A; it only
    exists so the discrepancy can be demonstrated.
    """
    T = EquationType.parse(T)
    kind, i = role
    if kind == N_ORIG:
        if i is None or not 0 <= i <= v.L:
            raise IndexOutOfRange(f"N_i needs 0 <= i <= {v.L}, got {i}")
    elif kind != M0_ORIG:
        raise ValueError(f"{kind!r} is not an original-equation role")
    return _original(T, kind, i, v, _Kernel(v), printed)


# -- modified equations (tau fixed, extra variable x0bar) --------------------

def _modified(T, kind, i, v: VariableTuple, k: _Kernel):
    L, g, tau, X, mu = v.L, v.gamma, v.tau, v.values, v.mu
    x0, xb = X[0], X[L + 1]
    if kind == M0_MOD:
        def side(y):
            out = 1 + 0j
            for j in range(1, L + 1):
                m, xj = mu[j - 1], X[j]
                if T is EquationType.A:
                    out *= k(y - m + g) * k(xj - y + g) * k.inv(y - m) * k.inv(xj - y)
                else:
                    out *= k(y - m) * k(y - xj + g) * k.inv(y - m + g) * k.inv(y - xj)
            return out
        return side(xb) - side(x0)

    y = x0 if kind == N_MOD else xb
    xi = X[i]
    if T is EquationType.A:
        den = xi - y if kind == N_MOD else y - xi
        out = k(g) * k(tau + g + y - xi) * k.inv(tau + g) * k.inv(den)
        for m in mu:
            out *= k(xi - m + g) * k.inv(y - m)
        for j in range(1, L + 1):
            if j != i:
                out *= k(X[j] - xi + g) * k.inv(X[j] - xi)
        return out
    den = y - xi if kind == N_MOD else xi - y
    shift = tau + (L + 1) * g
    out = k(g) * k(shift + y - xi) * k.inv(shift) * k.inv(den)
    for m in mu:
        out *= k(xi - m) * k.inv(y - m + g)
    for j in range(1, L + 1):
        if j != i:
            out *= k(xi - X[j] + g) * k.inv(xi - X[j])
    return out


def modified_coeff(T, role: CoeffRole, v: VariableTuple) -> complex:
    """M0, N_i or Nbar_i of the modified equation of type A or D."""
    T = EquationType.parse(T)
    kind, i = role
    if kind in (N_MOD, NBAR_MOD):
        if i is None or not 1 <= i <= v.L:
            raise IndexOutOfRange(f"{kind} needs 1 <= i <= {v.L}, got {i}")
    elif kind != M0_MOD:
        raise ValueError(f"{kind!r} is not a modified-equation role")
    return _modified(T, kind, i, v, _Kernel(v))


def modified_set(T, v: VariableTuple) -> dict:
    """Every modified coefficient at ``v``, keyed by :class:`CoeffRole`."""
    T = EquationType.parse(T)
    k = _Kernel(v)
    out = {CoeffRole(M0_MOD): _modified(T, M0_MOD, None, v, k)}
    for i in range(1, v.L + 1):
        out[CoeffRole(N_MOD, i)] = _modified(T, N_MOD, i, v, k)
        out[CoeffRole(NBAR_MOD, i)] = _modified(T, NBAR_MOD, i, v, k)
    return out


# -- unfolding under Pi_{0bar,m} o Pi_{0,l} ----------------------------------

class Slot(NamedTuple):
    """Term of an unfolded equation: P0, Q(j), Qbar(j) or R(i, j)."""

    kind: str
    i: int | None = None
    j: int | None = None


def P0() -> Slot:
    return Slot("P0")


def Q(j: int) -> Slot:
    return Slot("Q", j)


def Qbar(j: int) -> Slot:
    return Slot("Qbar", j)


def R(i: int, j: int) -> Slot:
    return Slot("R", i, j)


def equation_pairs(L: int) -> list:
    """(l, m) labels in row order: (0, BAR) first, then 0 <= l < m <= L."""
    return [(0, BAR)] + [(l, m) for l in range(L + 1) for m in range(l + 1, L + 1)]


def all_slots(L: int) -> list:
    out = [P0()]
    out += [Q(j) for j in range(1, L + 1)]
    out += [Qbar(j) for j in range(1, L + 1)]
    out += [R(i, j) for i in range(1, L + 1) for j in range(i + 1, L + 1)]
    return out


def _check_pair(l, m, L):
    if m == BAR:
        if l != 0:
            raise IndexOutOfRange("the base equation is labelled (0, BAR)")
    elif not 0 <= l < m <= L:
        raise IndexOutOfRange(f"need 0 <= l < m <= {L}, got ({l}, {m})")


def _check_slot(slot: Slot, L):
    if slot.kind == "P0":
        return
    if slot.kind in ("Q", "Qbar"):
        if slot.i is None or not 1 <= slot.i <= L:
            raise IndexOutOfRange(f"{slot.kind} index must be in 1..{L}")
        return
    if slot.kind == "R":
        if slot.i is None or slot.j is None or not 1 <= slot.i < slot.j <= L:
            raise IndexOutOfRange(f"R(i, j) needs 1 <= i < j <= {L}")
        return
    raise ValueError(f"unknown slot kind {slot.kind!r}")


def unfold_source(l: int, m: int, slot: Slot, L: int):
    """The modified coefficient feeding ``slot`` of equation (l, m), or None.

    None marks a structural zero.
    """
    _check_pair(l, m, L)
    _check_slot(slot, L)
    kind = slot.kind
    if m == BAR:
        if kind == "P0":
            return CoeffRole(M0_MOD)
        if kind == "Q":
            return CoeffRole(N_MOD, slot.i)
        if kind == "Qbar":
            return CoeffRole(NBAR_MOD, slot.i)
        return None
    if l == 0:
        if kind == "P0":
            return CoeffRole(NBAR_MOD, m)
        if kind == "Q":
            return CoeffRole(N_MOD, m) if slot.i == m else None
        if kind == "Qbar":
            return CoeffRole(M0_MOD) if slot.i == m else CoeffRole(NBAR_MOD, slot.i)
        i, j = slot.i, slot.j
        if j == m:
            return CoeffRole(N_MOD, i)
        if i == m:
            return CoeffRole(N_MOD, j)
        return None
    if kind == "P0":
        return None
    if kind == "Qbar":
        if slot.i == l:
            return CoeffRole(NBAR_MOD, l)
        if slot.i == m:
            return CoeffRole(N_MOD, l)
        return None
    if kind == "Q":
        if slot.i == l:
            return CoeffRole(NBAR_MOD, m)
        if slot.i == m:
            return CoeffRole(N_MOD, m)
        return None
    i, j = slot.i, slot.j
    if i == l and j == m:
        return CoeffRole(M0_MOD)
    if i == l:
        return CoeffRole(NBAR_MOD, j)
    if i == m:
        return CoeffRole(N_MOD, j)
    if j == l:
        return CoeffRole(NBAR_MOD, i)
    if j == m:
        return CoeffRole(N_MOD, i)
    return None


def unfolding_permutation(l: int, m: int, L: int) -> tuple:
    """Pi_{0bar,m} o Pi_{0,l}; identity for the base equation (0, BAR)."""
    _check_pair(l, m, L)
    if m == BAR:
        return identity(L)
    return compose(transposition(BAR, m, L), transposition(0, l, L))


def unfolded_coeff(T, l: int, m: int, slot: Slot, v: VariableTuple) -> complex:
    """Coefficient of ``slot`` in the unfolded equation labelled (l, m)."""
    role = unfold_source(l, m, slot, v.L)
    if role is None:
        return 0j
    return modified_coeff(T, role, v.permuted(unfolding_permutation(l, m, v.L)))


def unfolded_row(T, l: int, m: int, v: VariableTuple) -> dict:
    """All coefficients of equation (l, m), keyed by :class:`Slot`."""
    coeffs = modified_set(T, v.permuted(unfolding_permutation(l, m, v.L)))
    out = {}
    for slot in all_slots(v.L):
        role = unfold_source(l, m, slot, v.L)
        out[slot] = 0j if role is None else coeffs[role]
    return out


def slot_arguments(slot: Slot, v: VariableTuple) -> tuple:
    """Spectral arguments of the partition function multiplying ``slot``.

    P0 -> X, Q(j) -> X_j^0, Qbar(j) -> X_j^0bar, R(i, j) -> X_{i,j}^{0,0bar}.
    The partition function is symmetric, so where the substituted variable
    sits does not matter.
    """
    xs = list(v.x)
    if slot.kind == "Q":
        xs[slot.i - 1] = v.values[0]
    elif slot.kind == "Qbar":
        xs[slot.i - 1] = v.values[-1]
    elif slot.kind == "R":
        xs[slot.i - 1] = v.values[0]
        xs[slot.j - 1] = v.values[-1]
    return tuple(xs)


def substituted(v: VariableTuple, i: int) -> tuple:
    """X_i^0 as a tuple (X itself for i = 0)."""
    xs = list(v.x)
    if i:
        xs[i - 1] = v.values[0]
    return tuple(xs)
