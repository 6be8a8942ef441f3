"""Polarization types (e_1, ..., e_g) and their quotient data d_i."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import gcd, prod
from typing import Sequence

from paramod.errors import InvalidInputError, InvalidPolarizationError


def is_square_free(n: int) -> bool:
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        if n % p == 0:
            n //= p
        p += 1
    return True


def prime_factors(n: int) -> tuple[int, ...]:
    """Distinct prime divisors by trial division (polarization-sized inputs)."""
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return tuple(out)


@dataclass(frozen=True)
class PolarizationType:
    """A normalized polarization type, e_1 = 1 and e_i | e_{i+1}.

    Build instances with :func:`make_polarization`, which checks and
    normalizes the chain.
    """

    e: tuple[int, ...]

    @property
    def g(self) -> int:
        return len(self.e)

    @cached_property
    def d(self) -> tuple[int, ...]:
        """Quotients d_i = e_{i+1}/e_i, i = 1..g-1 (stored 0-based)."""
        return tuple(self.e[i + 1] // self.e[i] for i in range(self.g - 1))

    def di(self, i: int) -> int:
        """d_i with the 1-based index used throughout the theory."""
        if not 1 <= i <= self.g - 1:
            raise InvalidInputError(f"d_{i} undefined for g={self.g}")
        return self.d[i - 1]

    def dsum(self, i: int, j: int) -> int:
        """Product d_i * ... * d_j, and 1 for an empty range (i > j)."""
        if not (1 <= i <= self.g and 0 <= j <= self.g - 1):
            raise InvalidInputError(f"dsum({i},{j}) needs 1 <= i <= {self.g}, 0 <= j <= {self.g - 1}")
        if i > j:
            return 1
        return self.e[j] // self.e[i - 1]

    @property
    def total(self) -> int:
        """dsum(1, g-1) = e_g."""
        return self.e[-1]

    @cached_property
    def square_free(self) -> bool:
        return all(is_square_free(x) for x in self.d)

    @cached_property
    def coprime(self) -> bool:
        d = self.d
        return all(gcd(d[i], d[j]) == 1 for i in range(len(d)) for j in range(i + 1, len(d)))

    def classify(self) -> tuple[bool, bool]:
        return self.square_free, self.coprime

    def sub(self, start: int) -> "PolarizationType":
        """Induced type on coordinates start..g (1-based), renormalized."""
        if not 1 <= start <= self.g:
            raise InvalidInputError(f"sub-block start {start} outside 1..{self.g}")
        return make_polarization(self.e[start - 1:])

    def restrict(self, indices: Sequence[int]) -> "PolarizationType":
        """Induced type on an increasing set of 1-based coordinate indices."""
        return make_polarization([self.e[i - 1] for i in indices])

    def __str__(self) -> str:
        return ",".join(map(str, self.e))


def make_polarization(e: Sequence[int]) -> PolarizationType:
    e = tuple(e)
    if not e:
        raise InvalidPolarizationError("polarization type must be nonempty")
    for x in e:
        if isinstance(x, bool) or not isinstance(x, int):
            raise InvalidPolarizationError(f"entry {x!r} is not an integer")
        if x <= 0:
            raise InvalidPolarizationError(f"entry {x} is not positive")
    for a, b in zip(e, e[1:]):
        if b % a:
            raise InvalidPolarizationError(f"divisibility chain broken: {a} does not divide {b}")
    return PolarizationType(tuple(x // e[0] for x in e))


def parse_polarization(text: str) -> PolarizationType:
    """Parse the comma-separated form used on the command line, e.g. '1,4,24'."""
    try:
        e = [int(tok) for tok in text.replace(" ", "").split(",") if tok]
    except ValueError as exc:
        raise InvalidPolarizationError(f"cannot parse polarization {text!r}") from exc
    return make_polarization(e)


def from_quotients(d: Sequence[int]) -> PolarizationType:
    """The type (1, d_1, d_1 d_2, ...)."""
    e = [1]
    for x in d:
        e.append(e[-1] * x)
    return make_polarization(e)


def prod_range(values: Sequence[int], i: int, j: int) -> int:
    """Product of values[i..j] for 1-based inclusive bounds, 1 when i > j."""
    return prod(values[i - 1:j]) if i <= j else 1
