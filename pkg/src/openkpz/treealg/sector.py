"""Sector exponents of the fixed-point spaces, in exact Q + Q*kappa arithmetic.

Starting data: regularity gamma = 3/2 + kappa, initial-condition exponent
eta = kappa, boundary exponent sigma = 1/2 + 2*kappa, and the input sector
regularities alpha_0..alpha_5.  Each input i produces an output triple
(eta_i, sigma_i, mu_i) by the fixed-point arithmetic below; every gamma_i
equals kappa.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List

from openkpz.treealg.degree import ExactDegree


def _d(rational, kappa=0) -> ExactDegree:
    return ExactDegree(Fraction(rational), Fraction(kappa))


GAMMA = _d(Fraction(3, 2), 1)
ETA = _d(0, 1)
SIGMA = _d(Fraction(1, 2), 2)

ALPHAS: List[ExactDegree] = [
    _d(0, -4),                    # alpha_0
    _d(Fraction(-1, 2), -3),      # alpha_1
    _d(-1, -2),                   # alpha_2
    _d(0, -2),                    # alpha_3
    _d(Fraction(-1, 2), -1),      # alpha_4
    _d(0, 0),                     # alpha_5
]


@dataclass(frozen=True)
class SectorRow:
    index: int
    alpha: ExactDegree
    gamma: ExactDegree
    eta: ExactDegree
    sigma: ExactDegree
    mu: ExactDegree


def sector_exponents() -> List[SectorRow]:
    """The six output sectors (gamma_i, eta_i, sigma_i, mu_i) for i = 0..5."""
    one = _d(1)
    two = _d(2)
    gamma_i = _d(0, 1)  # kappa, for every i

    def row(i, eta_i, sigma_i, mu_i):
        return SectorRow(i, ALPHAS[i], gamma_i, eta_i, sigma_i, mu_i)

    a4 = ALPHAS[4]
    return [
        # squares of the rough derivative: exponents double and drop by 2
        row(0, (ETA - one) * 2, (SIGMA - one) * 2, (ETA - one) * 2),
        # cross terms with the derivative remainder
        row(1, ETA - one + a4, SIGMA - one + a4, ETA - one + a4),
        # the purely rough square keeps its own regularity everywhere
        row(2, ALPHAS[2], ALPHAS[2], ALPHAS[2]),
        # linear terms in the derivative of the remainder
        row(3, ETA - one, SIGMA - one, ETA - one),
        # linear terms in the rough derivative
        row(4, a4, a4, a4),
        # constant (unit) contributions
        row(5, ALPHAS[5], ALPHAS[5], ALPHAS[5]),
    ]


def sector_table() -> Dict[str, ExactDegree]:
    """Flat name -> exponent map, convenient for reporting and tests."""
    out: Dict[str, ExactDegree] = {"gamma": GAMMA, "eta": ETA, "sigma": SIGMA}
    for r in sector_exponents():
        out[f"alpha_{r.index}"] = r.alpha
        out[f"gamma_{r.index}"] = r.gamma
        out[f"eta_{r.index}"] = r.eta
        out[f"sigma_{r.index}"] = r.sigma
        out[f"mu_{r.index}"] = r.mu
    return out
