"""Odd Jacobi theta function used for every Boltzmann weight.

The kernel is

    [x] = 2 * sum_{n>=0} (-1)^n p^{(n+1/2)^2} sinh((2n+1) x),

a fixed constant multiple of theta_1(ix). Every identity checked by the
package is homogeneous in [.] with matching degree on all of its terms, so
the constant never matters: an equation type A/D term has degree L^2 + L, and
both sides of a determinant representation have degree L^2.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import InvalidContext, NonConvergent


@dataclass(frozen=True)
class ThetaContext:
    """Evaluation environment for the theta kernel.

    Attributes:
        nome: elliptic nome p, 0 < p < 1.
        truncation_tol: relative cutoff for the series tail bound.
        max_terms: hard cap on the number of series terms.
        scale: constant multiplying every kernel value. Only used to test
            homogeneity; guards always look at the unscaled series.
        reduce: shift arguments into the strip |Re x| <= |ln p|/2 using
            quasi-periodicity before summing.
    """

    nome: float
    truncation_tol: float = 1e-16
    max_terms: int = 64
    scale: complex = 1.0
    reduce: bool = True

    def __post_init__(self):
        if not (0.0 < self.nome < 1.0):
            raise InvalidContext(f"nome must lie in (0, 1), got {self.nome!r}")
        if not self.truncation_tol > 0:
            raise InvalidContext("truncation_tol must be positive")
        if self.max_terms < 1:
            raise InvalidContext("max_terms must be >= 1")

    @property
    def floor(self) -> float:
        """Magnitude floor 2 p^{1/4} (the leading series coefficient)."""
        return 2.0 * self.nome ** 0.25

    def __call__(self, x) -> complex:
        return theta_eval(x, self)

    def scaled(self, c) -> "ThetaContext":
        return ThetaContext(self.nome, self.truncation_tol, self.max_terms,
                            self.scale * c, self.reduce)


def theta_series(x: complex, ctx: ThetaContext) -> complex:
    """Sum the series directly, without argument reduction or scaling."""
    x = complex(x)
    p = ctx.nome
    ax = abs(x.real)
    log_p = math.log(p)
    total = 0j
    for n in range(ctx.max_terms):
        coeff = p ** ((n + 0.5) ** 2)
        term = coeff * cmath.sinh((2 * n + 1) * x)
        total += term if n % 2 == 0 else -term
        # bound on |term n+1| and the ratio between consecutive bounds;
        # once the ratio drops below one the tail is a geometric series
        nxt = (n + 1.5) ** 2 * log_p + (2 * n + 3) * ax
        ratio = (2 * n + 4) * log_p + 2 * ax
        if ratio < 0.0:
            tail = math.exp(nxt) / (1.0 - math.exp(ratio))
            if tail < ctx.truncation_tol * max(abs(total), 0.5 * ctx.floor):
                return 2.0 * total
    raise NonConvergent(
        f"theta series did not converge within {ctx.max_terms} terms at x={x!r}"
    )


def theta_raw(x, ctx: ThetaContext) -> complex:
    """Unscaled kernel value, with quasi-periodic reduction if enabled."""
    x = complex(x)
    if not ctx.reduce:
        return theta_series(x, ctx)
    log_p = math.log(ctx.nome)  # negative
    k = round(x.real / log_p)
    if k == 0:
        return theta_series(x, ctx)
    # [y + k ln p] = (-1)^k p^{-k^2} e^{-2ky} [y]
    y = x - k * log_p
    factor = cmath.exp(-k * k * log_p - 2 * k * y)
    if k % 2:
        factor = -factor
    return factor * theta_series(y, ctx)


def theta_eval(x, ctx: ThetaContext) -> complex:
    """Evaluate the kernel [x] for a complex argument.

    Raises:
        NonConvergent: the tail bound was not met within ``ctx.max_terms``.
    """
    value = theta_raw(x, ctx)
    if ctx.scale != 1.0:
        value = value * ctx.scale
    return value
