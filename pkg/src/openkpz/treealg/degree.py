"""Exact degrees of the form q + r*kappa with q, r rational.

kappa is the small regularity-loss parameter; it is constrained to the open
interval (0, 1/10).  Degrees are compared by substituting kappa at both ends
of a probe pair inside that interval; if the two substitutions disagree in
sign the comparison is ambiguous and an error is raised (this never happens
for the degrees generated by the basis trees).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

_KAPPA_PROBES = (Fraction(1, 100), Fraction(9, 100))

RationalLike = Union[int, Fraction]


class AmbiguousDegreeError(ValueError):
    """Comparison depends on the choice of kappa in (0, 1/10)."""


@dataclass(frozen=True, order=False)
class ExactDegree:
    rational: Fraction
    kappa: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "rational", Fraction(self.rational))
        object.__setattr__(self, "kappa", Fraction(self.kappa))

    def __add__(self, other: "ExactDegree") -> "ExactDegree":
        return ExactDegree(self.rational + other.rational, self.kappa + other.kappa)

    def __sub__(self, other: "ExactDegree") -> "ExactDegree":
        return ExactDegree(self.rational - other.rational, self.kappa - other.kappa)

    def __mul__(self, scalar: RationalLike) -> "ExactDegree":
        scalar = Fraction(scalar)
        return ExactDegree(self.rational * scalar, self.kappa * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "ExactDegree":
        return ExactDegree(-self.rational, -self.kappa)

    def at(self, kappa_value: Fraction) -> Fraction:
        return self.rational + self.kappa * kappa_value

    def _sign(self) -> int:
        """Sign of this degree, constant over kappa in (0, 1/10)."""
        signs = set()
        for probe in _KAPPA_PROBES:
            value = self.at(probe)
            signs.add(0 if value == 0 else (1 if value > 0 else -1))
        if len(signs) != 1:
            raise AmbiguousDegreeError(
                f"sign of {self} changes over kappa in (0, 1/10)"
            )
        return signs.pop()

    def __lt__(self, other: "ExactDegree") -> bool:
        return (self - other)._sign() < 0

    def __le__(self, other: "ExactDegree") -> bool:
        return (self - other)._sign() <= 0

    def __gt__(self, other: "ExactDegree") -> bool:
        return (self - other)._sign() > 0

    def __ge__(self, other: "ExactDegree") -> bool:
        return (self - other)._sign() >= 0

    def __str__(self) -> str:
        parts = []
        if self.rational != 0 or self.kappa == 0:
            parts.append(str(self.rational))
        if self.kappa != 0:
            if self.kappa == 1:
                term = "k"
            elif self.kappa == -1:
                term = "-k"
            else:
                term = f"{self.kappa}*k"
            if parts and not term.startswith("-"):
                parts.append("+" + term)
            else:
                parts.append(term)
        return "".join(parts)


def degree_from_string(text: str) -> ExactDegree:
    """Parse strings like ``-3/2-k``, ``1``, ``-2*k``, ``3/2-3*k``."""
    text = text.replace(" ", "")
    rational = Fraction(0)
    kappa = Fraction(0)
    # Split into signed monomials.
    chunks = []
    current = ""
    for ch in text:
        if ch in "+-" and current not in ("", "+", "-"):
            chunks.append(current)
            current = ch
        else:
            current += ch
    if current:
        chunks.append(current)
    for chunk in chunks:
        if chunk.endswith("k"):
            body = chunk[:-1].rstrip("*")
            if body in ("", "+"):
                kappa += 1
            elif body == "-":
                kappa -= 1
            else:
                kappa += Fraction(body)
        else:
            rational += Fraction(chunk)
    return ExactDegree(rational, kappa)
