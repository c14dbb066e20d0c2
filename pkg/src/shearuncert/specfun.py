"""Gamma/digamma and the sharp constants of the weighted-norm inequalities.

Self-contained implementations: gamma via the 9-coefficient Lanczos
approximation (g = 7), digamma via upward recurrence into the asymptotic
region plus the Bernoulli series through B12.  Positive arguments only;
that covers every constant needed here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

# Lanczos g=7, 9 coefficients (Godfrey's set).
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)


def gamma(x: float) -> float:
    """Euler gamma function for x > 0, relative accuracy ~1e-13."""
    if x <= 0.0:
        raise ValueError(f"gamma requires x > 0, got {x}")
    # keep the Lanczos series in its sweet spot; the recurrence is exact
    if x < 0.5:
        return gamma(x + 1.0) / x
    z = x - 1.0
    acc = _LANCZOS_COEF[0]
    for i in range(1, 9):
        acc += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _SQRT_TWO_PI * t ** (z + 0.5) * math.exp(-t) * acc


def digamma(x: float) -> float:
    """Logarithmic derivative of gamma for x > 0, absolute accuracy ~1e-12."""
    if x <= 0.0:
        raise ValueError(f"digamma requires x > 0, got {x}")
    acc = 0.0
    while x < 6.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    # ln x - 1/(2x) - sum B_{2k}/(2k x^{2k}), k = 1..6
    series = inv2 * (1.0 / 12.0
                     - inv2 * (1.0 / 120.0
                               - inv2 * (1.0 / 252.0
                                         - inv2 * (1.0 / 240.0
                                                   - inv2 * (1.0 / 132.0
                                                             - inv2 * 691.0 / 32760.0)))))
    return acc + math.log(x) - 0.5 / x - series


def pitt_constant(lam: float, n: int) -> float:
    """Sharp constant pi^lam * [Gamma((n-lam)/4) / Gamma((n+lam)/4)]^2.

    Defined for 0 <= lam < 1; equals 1 at lam = 0.
    """
    if not 0.0 <= lam < 1.0:
        raise ValueError(f"lambda must lie in [0, 1), got {lam}")
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    ratio = gamma((n - lam) / 4.0) / gamma((n + lam) / 4.0)
    return math.pi**lam * ratio * ratio


def pitt_derivative_at_zero(n: int) -> float:
    """d/dlam of pitt_constant at lam = 0: ln(pi) - digamma(n/4).

    Positive for n <= 8, so the constant is increasing in lam there.
    """
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    return math.log(math.pi) - digamma(n / 4.0)


@dataclass(frozen=True)
class UncertaintyConstants:
    """Sharp lower-bound constants for the log-moment inequalities in R^n."""

    n: int
    beckner: float             # digamma(n/4) - ln(pi)
    sobolev: float             # digamma(n/2)
    heisenberg_digamma: float  # exp(beckner)
    heisenberg_paper: float | None  # 1/(4*pi), recorded for n = 2 only


def uncertainty_constants(n: int) -> UncertaintyConstants:
    if n < 2:
        raise ValueError(f"dimension must be >= 2, got {n}")
    beckner = digamma(n / 4.0) - math.log(math.pi)
    return UncertaintyConstants(
        n=n,
        beckner=beckner,
        sobolev=digamma(n / 2.0),
        heisenberg_digamma=math.exp(beckner),
        heisenberg_paper=1.0 / (4.0 * math.pi) if n == 2 else None,
    )
