"""Closed-form W-matrices for L = 1 and L = 2, written out entry by entry,
used as golden fixtures for the general assembler."""

from __future__ import annotations

from dataclasses import dataclass
from math import prod

import numpy as np

from .coeffs import BAR, EquationType, VariableTuple, transposition
from .determinant import build_omega, build_W, det
from .theta import theta_raw


@dataclass(frozen=True)
class GoldenReport:
    L: int
    T: str
    entry_deviation: float
    det_deviation: float
    ratio_deviation: float

    @property
    def deviation(self) -> float:
        return max(self.entry_deviation, self.det_deviation, self.ratio_deviation)


def _theta(v: VariableTuple):
    ctx = v.ctx
    return lambda z: theta_raw(z, ctx) * ctx.scale


def omega_L1(T, v: VariableTuple) -> np.ndarray:
    """The 2x2 matrix whose determinant is the single entry of W0 at L = 1."""
    T = EquationType.parse(T)
    if v.L != 1:
        raise ValueError("omega_L1 needs L = 1")
    th = _theta(v)
    g, tau = v.gamma, v.tau
    x0, x1, xb = v.values
    u = v.mu[0]
    if T is EquationType.A:
        a = (th(x0 - xb + g) * th(xb - u + g) / (th(x0 - xb) * th(xb - u))
             - th(x0 - x1 + g) * th(x1 - u + g) / (th(x0 - x1) * th(x1 - u)))
        b = th(g) * th(xb - x0 + tau + g) * th(x0 - u + g) / (th(tau + g) * th(xb - x0) * th(xb - u))
        c = th(g) * th(x0 - xb + tau + g) * th(xb - u + g) / (th(tau + g) * th(x0 - xb) * th(x0 - u))
        d = (th(xb - x0 + g) * th(x0 - u + g) / (th(xb - x0) * th(x0 - u))
             - th(xb - x1 + g) * th(x1 - u + g) / (th(xb - x1) * th(x1 - u)))
    else:
        a = (th(xb - x0 + g) * th(xb - u) / (th(xb - x0) * th(xb - u + g))
             - th(x1 - x0 + g) * th(x1 - u) / (th(x1 - x0) * th(x1 - u + g)))
        b = th(g) * th(xb - x0 + tau + 2 * g) * th(x0 - u) / (th(tau + 2 * g) * th(x0 - xb) * th(xb - u + g))
        c = th(g) * th(x0 - xb + tau + 2 * g) * th(xb - u) / (th(tau + 2 * g) * th(xb - x0) * th(x0 - u + g))
        d = (th(x0 - xb + g) * th(x0 - u) / (th(x0 - xb) * th(x0 - u + g))
             - th(x1 - xb + g) * th(x1 - u) / (th(x1 - xb) * th(x1 - u + g)))
    return np.array([[a, b], [c, d]], dtype=complex)


def k_blocks_L2(T, v: VariableTuple) -> tuple:
    """The four 4x4 blocks K1..K4 built from the U/V helper functions."""
    T = EquationType.parse(T)
    if v.L != 2:
        raise ValueError("k_blocks_L2 needs L = 2")
    th = _theta(v)
    g, tau, mu = v.gamma, v.tau, v.mu
    X = v.__getitem__

    def U(i, j, k, l):
        return (th(g) * th(X(i) - X(k) + g) * th(X(j) - X(k) + tau + g)
                / (th(tau + g) * th(X(i) - X(k)) * th(X(j) - X(k)))
                * prod(th(X(k) - m + g) / th(X(l) - m) for m in mu))

    def Ubar(i, j, k, l):
        return (-th(g) * th(X(k) - X(i) + g) * th(X(j) - X(k) + tau + 3 * g)
                / (th(tau + 3 * g) * th(X(k) - X(i)) * th(X(j) - X(k)))
                * prod(th(X(k) - m) / th(X(l) - m + g) for m in mu))

    def V(i, j, k, l):
        def part(a):
            return (prod(th(X(s) - X(a) + g) / th(X(s) - X(a)) for s in (k, l))
                    * prod(th(X(a) - m + g) / th(X(a) - m) for m in mu))
        return part(i) - part(j)

    def Vbar(i, j, k, l):
        def part(a):
            return (prod(th(X(a) - X(s) + g) / th(X(a) - X(s)) for s in (k, l))
                    * prod(th(X(a) - m) / th(X(a) - m + g) for m in mu))
        return part(i) - part(j)

    u, w = (U, V) if T is EquationType.A else (Ubar, Vbar)
    b = BAR
    K1 = [[w(b, 1, 0, 2), u(2, b, 0, b), u(0, b, 2, b), 0],
          [u(2, 0, b, 0), w(0, 1, b, 2), u(b, 0, 2, 0), -u(b, 1, 2, 1)],
          [u(0, 2, b, 2), u(b, 2, 0, 2), w(2, 1, 0, b), -u(b, 1, 0, 1)],
          [0, u(b, 2, 1, 2), -u(b, 0, 1, 0), w(2, 0, b, 1)]]
    K2 = [[-u(0, 1, 2, 1), u(2, b, 0, b), u(0, b, 2, b), 0],
          [0, w(0, 1, b, 2), u(b, 0, 2, 0), -u(b, 1, 2, 1)],
          [-u(0, 1, b, 1), u(b, 2, 0, 2), w(2, 1, 0, b), -u(b, 1, 0, 1)],
          [-u(1, 0, b, 0), u(b, 2, 1, 2), -u(b, 0, 1, 0), w(2, 0, b, 1)]]
    K3 = [[-u(0, 2, 1, 2), u(0, b, 1, b), u(1, b, 0, b), 0],
          [-u(0, 2, b, 2), w(1, 2, 0, b), u(b, 1, 0, 1), -u(b, 2, 0, 2)],
          [0, u(b, 0, 1, 0), w(0, 2, b, 1), -u(b, 2, 1, 2)],
          [u(2, 0, b, 0), u(b, 0, 2, 0), -u(b, 1, 2, 1), w(0, 1, b, 2)]]
    K4 = [[w(b, 2, 0, 1), u(0, b, 1, b), u(1, b, 0, b), 0],
          [u(0, 1, b, 1), w(1, 2, 0, b), u(b, 1, 0, 1), -u(b, 2, 0, 2)],
          [u(1, 0, b, 0), u(b, 0, 1, 0), w(0, 2, b, 1), -u(b, 2, 1, 2)],
          [0, u(b, 0, 2, 0), -u(b, 1, 2, 1), w(0, 1, b, 2)]]
    return tuple(np.array(K, dtype=complex) for K in (K1, K2, K3, K4))


def closed_form_W0(T, v: VariableTuple) -> np.ndarray:
    """W0 from the closed forms, in the (alpha, beta) layout of build_W.

    The closed forms arrange the blocks as [[K1, K2], [K3, K4]], which is the
    transpose of that layout.
    """
    if v.L == 1:
        return np.array([[det(omega_L1(T, v))]])
    if v.L == 2:
        d = [det(K) for K in k_blocks_L2(T, v)]
        return np.array([[d[0], d[1]], [d[2], d[3]]]).T
    raise ValueError("closed forms exist only for L = 1 and L = 2")


def _rel(a, b) -> float:
    return float(abs(a - b) / max(abs(b), 1e-300))


def golden_check(L: int, T, v: VariableTuple) -> GoldenReport:
    """Compare the closed forms against the general assembler.

    Reports the worst relative deviation of W0 entries, of det(W0), and of
    det(W_i)/det(W0) when the closed-form W0 replaces the assembled one.
    At L = 1 the 2x2 matrix is also compared with the assembled Omega_0 of
    the x0 <-> x1 swapped variables.
    """
    T = EquationType.parse(T)
    if L not in (1, 2) or v.L != L:
        raise ValueError("golden_check needs L in {1, 2} matching the variables")
    mats = build_W(T, v)
    w0 = mats[0]
    gold = closed_form_W0(T, v)
    entry = max(_rel(gold.flat[k], w0.flat[k]) for k in range(w0.size))
    if L == 1:
        om = build_omega(T, 0, v.permuted(transposition(0, 1, 1)))
        lit = omega_L1(T, v)
        entry = max(entry, max(_rel(lit.flat[k], om.flat[k]) for k in range(4)))
    det_dev = _rel(det(gold), det(w0))
    ratio_dev = 0.0
    for i in range(1, L + 1):
        gi = gold.copy()
        gi[i - 1, :] = mats[i][i - 1, :]
        ratio_dev = max(ratio_dev, _rel(det(gi) / det(gold), det(mats[i]) / det(w0)))
    return GoldenReport(L, T.value, entry, det_dev, ratio_dev)
