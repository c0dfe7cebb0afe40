"""Domain-wall height configurations and the brute-force partition function.

Heights are stored as integer offsets n[i][j], h_{i,j} = tau + n[i][j] * gamma,
on an (L+1) x (L+1) grid of sites. Indices in this module are 0-based; site
(i, j) here is site (i+1, j+1) in the usual 1-based labelling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import ForbiddenFace, SizeTooLarge, SingularDenominator
from .theta import ThetaContext, theta_raw

MAX_ENUM_L = 6

# (a - c, b - c, d - c) for the corners a = h_{i+1,j}, b = h_{i+1,j+1},
# c = h_{i,j}, d = h_{i,j+1}
PATTERNS = {
    (1, 0, -1): ("a", 1),
    (-1, 0, 1): ("a", -1),
    (1, 2, 1): ("b", 1),
    (-1, -2, -1): ("b", -1),
    (1, 0, 1): ("c", 1),
    (-1, 0, -1): ("c", -1),
}

READINGS = ("shifted", "literal")


@dataclass(frozen=True)
class ModelParams:
    L: int
    gamma: complex
    tau: complex
    x: tuple
    mu: tuple
    x0: complex
    x0bar: complex
    theta_ctx: ThetaContext = field(default_factory=lambda: ThetaContext(0.1))

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(complex(v) for v in self.x))
        object.__setattr__(self, "mu", tuple(complex(v) for v in self.mu))
        for name in ("gamma", "tau", "x0", "x0bar"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.L < 1:
            raise ValueError("L must be a positive integer")
        if len(self.x) != self.L:
            raise ValueError(f"x has length {len(self.x)}, expected L={self.L}")
        if len(self.mu) != self.L:
            raise ValueError(f"mu has length {len(self.mu)}, expected L={self.L}")

    @property
    def spectral(self) -> tuple:
        """The extended spectral tuple (x0, x1, ..., xL, x0bar)."""
        return (self.x0,) + self.x + (self.x0bar,)

    def variables(self):
        from .coeffs import VariableTuple

        return VariableTuple(self.spectral, self.mu, self.tau, self.gamma, self.theta_ctx)

    def replace(self, **changes) -> "ModelParams":
        data = dict(L=self.L, gamma=self.gamma, tau=self.tau, x=self.x, mu=self.mu,
                    x0=self.x0, x0bar=self.x0bar, theta_ctx=self.theta_ctx)
        data.update(changes)
        return ModelParams(**data)

    def guarded_arguments(self) -> list:
        """Every theta argument that must stay away from a zero of [.]."""
        L, g, tau = self.L, self.gamma, self.tau
        ext = self.spectral
        out = []
        for a in range(len(ext)):
            for b in range(a + 1, len(ext)):
                out.append(ext[a] - ext[b])
        for y in ext:
            for m in self.mu:
                out.append(y - m)
                out.append(y - m + g)
        out.extend(tau + k * g for k in range(L + 3))
        out.extend(k * g for k in range(1, L + 2))
        s = sum(xi - mi for xi, mi in zip(self.x, self.mu))
        out.extend([s - g, s + (L + 1) * g, s + tau + L * g, s + tau + (L + 2) * g])
        return out

    def guard_margin(self) -> float:
        """Smallest |[v]| / delta_guard over the guarded set (>= 1 passes)."""
        ctx = self.theta_ctx
        delta = 1e-3 * ctx.floor
        return min(abs(theta_raw(v, ctx)) for v in self.guarded_arguments()) / delta

    def check_guard(self) -> None:
        if self.guard_margin() < 1.0:
            raise SingularDenominator("parameters violate the nonsingularity guard")


@lru_cache(maxsize=None)
def _enumerate(L: int) -> tuple:
    n = [[0] * (L + 1) for _ in range(L + 1)]
    for j in range(L + 1):
        n[0][j] = n[j][0] = L - j
        n[L][j] = n[j][L] = j
    interior = [(i, j) for i in range(1, L) for j in range(1, L)]
    found = []

    def place(k):
        if k == len(interior):
            # right and bottom neighbours of the last interior row/column
            # are boundary sites; check those links explicitly
            for i in range(1, L):
                if abs(n[i][L - 1] - n[i][L]) != 1 or abs(n[L - 1][i] - n[L][i]) != 1:
                    return
            found.append(np.array(n, dtype=np.int64))
            return
        i, j = interior[k]
        up, left = n[i - 1][j], n[i][j - 1]
        for v in (up - 1, up + 1):
            if abs(v - left) == 1:
                n[i][j] = v
                place(k + 1)

    place(0)
    for arr in found:
        arr.setflags(write=False)
    return tuple(found)


def enumerate_heights(L: int) -> tuple:
    """All domain-wall height matrices for an L x L lattice.

    Interior sites are filled row by row, smaller offset first, so the order
    is lexicographic in the interior entries. The result is cached.
    """
    if not 1 <= L <= MAX_ENUM_L:
        raise SizeTooLarge(f"enumeration supports 1 <= L <= {MAX_ENUM_L}, got {L}")
    return _enumerate(L)


def classify(a: int, b: int, c: int, d: int) -> tuple:
    try:
        return PATTERNS[(a - c, b - c, d - c)]
    except KeyError:
        raise ForbiddenFace(f"corner offsets {(a, b, c, d)} form no allowed face") from None


def reference_offset(a: int, c: int, reading: str = "shifted") -> int:
    """Height offset that replaces tau in the displayed weight formulas."""
    if reading == "shifted":
        return a + 1
    if reading == "literal":
        return c
    raise ValueError(f"unknown reading {reading!r}")


def face_weight(a, b, c, d, i, j, params: ModelParams, reading: str = "shifted") -> complex:
    """Boltzmann weight of face (i, j) with corner offsets a, b, c, d.

    ``i`` and ``j`` are 1-based row/column labels selecting x_i and mu_j. The
    corners are a = h_{i+1,j}, b = h_{i+1,j+1}, c = h_{i,j}, d = h_{i,j+1}.
    """
    kind, sign = classify(a, b, c, d)
    th = params.theta_ctx
    g = params.gamma
    s = params.x[i - 1] - params.mu[j - 1]
    if kind == "a":
        return th(s + g)
    H = params.tau + reference_offset(a, c, reading) * g
    if kind == "b":
        return th(H + sign * g) * th(s) / th(H)
    return th(H + sign * s) * th(g) / th(H)


@lru_cache(maxsize=None)
def _face_table(L: int, reading: str) -> tuple:
    """Per configuration: ((kind, sign, ref_offset) for every face), row-major."""
    tables = []
    for n in enumerate_heights(L):
        faces = []
        for i in range(L):
            for j in range(L):
                a, b, c, d = n[i + 1, j], n[i + 1, j + 1], n[i, j], n[i, j + 1]
                kind, sign = classify(a, b, c, d)
                faces.append((kind, sign, reference_offset(int(a), int(c), reading)))
        tables.append(tuple(faces))
    return tuple(tables)


def partition_at(x: Sequence, mu: Sequence, tau, gamma, ctx: ThetaContext,
                 reading: str = "shifted") -> complex:
    """Z_tau(x | mu) by summing over every domain-wall configuration."""
    L = len(x)
    if len(mu) != L:
        raise ValueError("x and mu must have equal length")
    tables = _face_table(L, reading)
    tau, gamma = complex(tau), complex(gamma)
    s = [complex(x[i]) - complex(mu[j]) for i in range(L) for j in range(L)]
    memo = {}

    def th(v):
        # configurations share most theta arguments
        out = memo.get(v)
        if out is None:
            out = memo[v] = ctx(v)
        return out

    def weight(kind, sign, ref, sk):
        if kind == "a":
            return th(sk + gamma)
        H = tau + ref * gamma
        if kind == "b":
            return th(H + sign * gamma) * th(sk) / th(H)
        return th(H + sign * sk) * th(gamma) / th(H)

    total = 0j
    for faces in tables:
        prod = 1 + 0j
        for k, face in enumerate(faces):
            prod *= weight(*face, s[k])
        total += prod
    return total


def partition_enum(params: ModelParams, reading: str = "shifted") -> complex:
    """Domain-wall partition function Z_tau(X) by exhaustive enumeration."""
    enumerate_heights(params.L)
    return partition_at(params.x, params.mu, params.tau, params.gamma, params.theta_ctx, reading)
