import logging
from dataclasses import dataclass
from typing import Iterable, Optional

from gamelogic.errors import ClockOverflowError

logger = logging.getLogger(name=__name__)


@dataclass(frozen=True)
class PolyTerm:
    """
    A polynomial in the domain size `n`.

    `coefficients` holds `(c, e)` pairs standing for `c * n^e`, with strictly
    decreasing exponents. Zero coefficients are kept so that the written form
    survives a render/parse round trip.
    """

    coefficients: tuple[tuple[int, int], ...]

    def __post_init__(self):
        exponents = [e for _, e in self.coefficients]
        if any(c < 0 or e < 0 for c, e in self.coefficients):
            raise ValueError("Polynomial coefficients and exponents must be natural.")
        if any(a <= b for a, b in zip(exponents, exponents[1:])):
            raise ValueError("Polynomial exponents must be strictly decreasing.")
        if not self.coefficients:
            raise ValueError("A polynomial needs at least one term.")

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[int, int]]) -> "PolyTerm":
        """Merge terms with equal exponents and sort them by decreasing exponent."""
        merged: dict[int, int] = {}
        for c, e in terms:
            merged[e] = merged.get(e, 0) + c
        return cls(tuple((merged[e], e) for e in sorted(merged, reverse=True)))

    @classmethod
    def constant(cls, value: int) -> "PolyTerm":
        return cls(((value, 0),))

    def degree(self) -> int:
        return max((e for c, e in self.coefficients if c), default=0)

    def evaluate(self, n: int) -> int:
        return sum(c * n**e for c, e in self.coefficients)


@dataclass(frozen=True)
class ClockTerm:
    """`c * tower(k, poly) + d`; a tower of height 0 is the polynomial itself."""

    c: int
    k: int
    poly: PolyTerm
    d: int = 0

    def __post_init__(self):
        if self.c < 0 or self.k < 0 or self.d < 0:
            raise ValueError("Clock term constants must be natural numbers.")

    @classmethod
    def polynomial(cls, poly: PolyTerm) -> "ClockTerm":
        return cls(c=1, k=0, poly=poly, d=0)

    @property
    def is_bare_polynomial(self) -> bool:
        return self.k == 0 and self.c == 1 and self.d == 0


def eval_clock_term(t: ClockTerm, n: int, max_bits: Optional[int] = None) -> int:
    """
    Evaluate `t` at domain size `n`.

    `max_bits` caps the bit length of every intermediate tower level, so that
    hopeless evaluations (say `exp(3, n)` at n = 40) fail fast with
    `ClockOverflowError` instead of exhausting memory.
    """
    if n < 0:
        raise ValueError("Domain sizes are natural numbers.")
    value = t.poly.evaluate(n)
    for _ in range(t.k):
        if max_bits is not None and value > max_bits:
            raise ClockOverflowError(
                f"Clock term exceeds the cap of {max_bits} bits at n = {n}."
            )
        value = 2**value
    result = t.c * value + t.d
    if max_bits is not None and result.bit_length() > max_bits:
        raise ClockOverflowError(
            f"Clock term exceeds the cap of {max_bits} bits at n = {n}."
        )
    return result
