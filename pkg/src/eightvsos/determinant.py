"""Omega matrices, the fundamental coefficients H_i, Cramer matrices W_i and
the two determinant representations of the partition function."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .coeffs import (BAR, EquationType, Slot, VariableTuple, equation_pairs,
                     substituted, transposition, unfolded_row)
from .errors import IndexOutOfRange, SingularNormalization, SingularSystem
from .theta import theta_raw

SUBSTITUTIONS = ("alpha", "beta")

# Hadamard-normalised determinant floor for W0 and the normalisation matrices
DET_GUARD = 1e-7


def row_index(L: int, i: int, j: int) -> int:
    """1-based row m(i, j) of equation (i, j); (0, BAR) is row 1."""
    if j == BAR:
        if i != 0:
            raise IndexOutOfRange("only (0, BAR) carries the bar label")
        j = 0
    elif not 0 <= i < j <= L:
        raise IndexOutOfRange(f"need 0 <= i < j <= {L}, got ({i}, {j})")
    return L * i - i * (i + 1) // 2 + j + 1


def col_index(L: int, k: int, l: int) -> int:
    """1-based position n(k, l) of R_{k,l} inside the R block."""
    if not 1 <= k < l <= L:
        raise IndexOutOfRange(f"need 1 <= k < l <= {L}, got ({k}, {l})")
    return L * (k - 1) - k * (k + 1) // 2 + l


def omega_size(L: int) -> int:
    return (L * (L + 1) + 2) // 2


@dataclass(frozen=True)
class RepConstants:
    L: int

    @property
    def p(self) -> int:
        return self.L * self.L * (self.L + 1) // 2

    @property
    def q(self) -> int:
        return (self.L - 1) * (self.L * self.L + 2) // 2


def _rows(T, v: VariableTuple) -> list:
    return [((l, m), unfolded_row(T, l, m, v)) for l, m in equation_pairs(v.L)]


def _assemble(rows, k: int, L: int) -> np.ndarray:
    S = omega_size(L)
    om = np.zeros((S, S), dtype=complex)
    for (l, m), row in rows:
        r = row_index(L, l, m) - 1
        om[r, 0] = row[Slot("P0")] if k == 0 else row[Slot("Q", k)]
        for q in range(1, L + 1):
            om[r, q] = row[Slot("Qbar", q)]
        for a in range(1, L + 1):
            for b in range(a + 1, L + 1):
                om[r, L + col_index(L, a, b)] = row[Slot("R", a, b)]
    return om


def build_omega(T, k: int, v: VariableTuple) -> np.ndarray:
    """Omega_k: first column P0 (k = 0) or Q_k, then Qbar_1..Qbar_L, then R."""
    T = EquationType.parse(T)
    if not 0 <= k <= v.L:
        raise IndexOutOfRange(f"k must lie in 0..{v.L}, got {k}")
    return _assemble(_rows(T, v), k, v.L)


def det(m) -> complex:
    """Determinant by LU factorisation with partial pivoting."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("det needs a square matrix")
    if m.shape[0] == 0:
        return 1 + 0j
    return complex(np.linalg.det(m))


def fundamental_H(T, i: int, v: VariableTuple) -> complex:
    return det(build_omega(T, i, v))


def fundamental_all(T, v: VariableTuple) -> list:
    """[H_0, ..., H_L] sharing one evaluation of the unfolded rows."""
    T = EquationType.parse(T)
    rows = _rows(T, v)
    return [det(_assemble(rows, k, v.L)) for k in range(v.L + 1)]


def hz_system(T, v: VariableTuple) -> dict:
    """{beta: [H_0^(beta), ..., H_L^(beta)]} obtained by swapping x0 and x_beta."""
    T = EquationType.parse(T)
    out = {}
    for beta in range(1, v.L + 1):
        h = fundamental_all(T, v.permuted(transposition(0, beta, v.L)))
        row = list(h)
        row[0], row[beta] = h[beta], h[0]
        out[beta] = row
    return out


def hadamard_ratio(m: np.ndarray) -> float:
    """|det m| / prod of row norms, in [0, 1]."""
    norms = np.linalg.norm(m, axis=1)
    if m.size == 0:
        return 1.0
    if not np.all(norms > 0):
        return 0.0
    return float(abs(det(m)) / np.prod(norms))


@lru_cache(maxsize=512)
def _w_system(T: EquationType, v: VariableTuple, substitution: str) -> tuple:
    if substitution not in SUBSTITUTIONS:
        raise ValueError(f"substitution must be one of {SUBSTITUTIONS}")
    L = v.L
    hs = hz_system(T, v)
    w0 = np.array([[hs[b][a] for b in range(1, L + 1)] for a in range(1, L + 1)])
    rhs = np.array([-hs[b][0] for b in range(1, L + 1)])
    mats = [w0]
    for i in range(1, L + 1):
        wi = w0.copy()
        if substitution == "alpha":
            wi[i - 1, :] = rhs
        else:
            wi[:, i - 1] = rhs
        mats.append(wi)
    for m in mats:
        m.setflags(write=False)
    return tuple(mats)


def build_W(T, v: VariableTuple, substitution: str = "alpha") -> tuple:
    """(W0, W1, ..., WL) with (W0)[alpha, beta] = H_alpha^(beta).

    W_i replaces row alpha = i of W0 by -H_0^(beta). ``substitution="beta"``
    replaces column beta = i instead; that variant only exists for
    comparison and fails the Cramer identity for L >= 2.
    """
    T = EquationType.parse(T)
    mats = _w_system(T, v, substitution)
    if hadamard_ratio(mats[0]) < DET_GUARD:
        raise SingularSystem("det(W0) is below the guard")
    return mats


def z_ratio(T, i: int, v: VariableTuple, substitution: str = "alpha") -> complex:
    """det(W_i) / det(W_0), which equals Z(X_i^0) / Z(X)."""
    mats = build_W(T, v, substitution)
    if not 1 <= i <= v.L:
        raise IndexOutOfRange(f"i must lie in 1..{v.L}")
    return det(mats[i]) / det(mats[0])


def normalization_tau(T, v: VariableTuple) -> complex:
    T = EquationType.parse(T)
    return -(v.L + 1) * v.gamma if T is EquationType.A else -v.gamma


def _normalised_W(T, i, v):
    """W_i at the normalisation value of tau, X, mu, x0, x0bar unchanged."""
    mats = _w_system(T, v.with_tau(normalization_tau(T, v)), "alpha")
    wi = mats[i]
    if hadamard_ratio(wi) < DET_GUARD:
        raise SingularNormalization(f"det(W_{i}) vanishes at the normalisation point")
    return wi


def rep_prefactor(T, i: int, v: VariableTuple) -> complex:
    """Everything in the representation except the determinant ratio."""
    T = EquationType.parse(T)
    ctx = v.ctx

    def th(z):
        return theta_raw(z, ctx) * ctx.scale

    L, g, tau, mu = v.L, v.gamma, v.tau, v.mu
    c = RepConstants(L)
    sig = sum(x - m for x, m in zip(v.x, mu))
    xs = substituted(v, i)
    chain = 1 + 0j
    for k in range(1, L):
        chain *= (th(k * g) / th(tau + (k + 1) * g)) ** L
    if T is EquationType.A:
        out = -(th(tau + g) / th(L * g)) ** c.p * (th((L + 1) * g) / th(tau)) ** c.q * chain
        for x in xs:
            for m in mu:
                out *= th(x - m + g)
        return out * th(sig - g) / th(sig + tau + L * g)
    out = (-1) ** L * th(tau + (L + 1) * g) / th(tau + g)
    out *= (th(tau + (L + 1) * g) / th(L * g)) ** c.p
    out *= (th((L + 1) * g) / th(tau + (L + 2) * g)) ** c.q * chain
    out *= th(sig + (L + 1) * g) / th(sig + tau + (L + 2) * g)
    for x in xs:
        for m in mu:
            out *= th(x - m)
    return out


def rep_partition(T, i: int, v: VariableTuple) -> complex:
    """Z_tau(X_i^0) from the type A or type D determinant representation.

    For i = 0 this is Z_tau(X). The sum sigma = sum_l (x_l - mu_l) runs over
    the original X for every i; the double product runs over X_i^0.
    """
    T = EquationType.parse(T)
    if not 0 <= i <= v.L:
        raise IndexOutOfRange(f"i must lie in 0..{v.L}, got {i}")
    wi = build_W(T, v)[i]
    return rep_prefactor(T, i, v) * det(wi) / det(_normalised_W(T, i, v))
