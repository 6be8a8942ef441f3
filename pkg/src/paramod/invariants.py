"""Divisor invariants D_i of primitive vectors and the ideal (v, L)."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as cartesian
from math import gcd, prod
from typing import Iterator, Sequence

from paramod.arith import gcd_all, require_primitive
from paramod.errors import (
    InfeasibleTupleError,
    InvalidInputError,
    InvalidProductError,
)
from paramod.polarization import PolarizationType


@dataclass(frozen=True)
class DivisorTuple:
    pol: PolarizationType
    D: tuple[int, ...]

    @property
    def product(self) -> int:
        return prod(self.D)

    def range_product(self, i: int, j: int) -> int:
        """D_i * ... * D_j (1-based, inclusive), 1 for an empty range."""
        return prod(self.D[i - 1:j]) if i <= j else 1

    def to_json(self) -> dict:
        return {"D": list(self.D), "product": self.product}


def check_length(v: Sequence[int], pol: PolarizationType) -> tuple[int, ...]:
    v = tuple(int(x) for x in v)
    if len(v) != 2 * pol.g:
        raise InvalidInputError(f"vector length {len(v)} != 2g = {2 * pol.g}")
    return v


def pair_gcds(v: Sequence[int], g: int) -> tuple[int, ...]:
    """v_{j|g+j} = gcd(v_j, v_{g+j}) for j = 1..g (returned 0-based)."""
    return tuple(gcd(v[j], v[g + j]) for j in range(g))


def divisors(v: Sequence[int], pol: PolarizationType) -> DivisorTuple:
    v = require_primitive(check_length(v, pol))
    g = pol.g
    pairs = pair_gcds(v, g)
    D: list[int] = []
    for i in range(1, g):
        acc = pol.di(i)
        for j in range(1, i + 1):
            div = prod(D[j - 1:i - 1])
            q, r = divmod(pairs[j - 1], div)
            if r:
                raise AssertionError(f"D_{j}..D_{i - 1} = {div} does not divide v_{j}|{g + j}")
            acc = gcd(acc, q)
        D.append(acc)
    return DivisorTuple(pol, tuple(D))


def ideal_generator(v: Sequence[int], pol: PolarizationType) -> int:
    """Positive generator of {<v, l> : l in Z^{2g}}."""
    v = check_length(v, pol)
    if not any(v):
        raise InvalidInputError("zero vector")
    g = pol.g
    gen = gcd_all(pol.e[j] * x for j, x in enumerate(pair_gcds(v, g)))
    if gcd_all(v) == 1:
        D = divisors(v, pol)
        for i in range(1, g):
            if gcd(pol.di(i), gen // D.range_product(1, i - 1)) != D.D[i - 1]:
                raise AssertionError(f"ideal identity fails at i={i} for v={v}")
    return gen


def tuple_feasible(D: Sequence[int], pol: PolarizationType) -> bool:
    D = tuple(D)
    if len(D) != pol.g - 1:
        raise InvalidInputError(f"expected {pol.g - 1} divisors, got {len(D)}")
    if any(x <= 0 for x in D):
        raise InvalidInputError("divisors must be positive")
    d = pol.d
    if any(d[i] % D[i] for i in range(len(D))):
        return False
    return all(
        gcd(d[i] // D[i], D[j]) == 1 for i in range(len(D)) for j in range(i + 1, len(D))
    )


def witness_vector(D: Sequence[int], pol: PolarizationType) -> tuple[int, ...]:
    """(D_{1..g-1}, D_{2..g-1}, ..., D_{g-1}, 1, 0, ..., 0)."""
    D = tuple(D)
    if not tuple_feasible(D, pol):
        raise InfeasibleTupleError(f"{D} cannot occur for type {pol}")
    g = pol.g
    v = tuple(prod(D[i:]) for i in range(g)) + (0,) * g
    got = divisors(v, pol).D
    if got != D:
        raise AssertionError(f"witness {v} has divisors {got}, wanted {D}")
    return v


def tuple_from_product(total: int, pol: PolarizationType) -> DivisorTuple:
    if total <= 0 or pol.total % total:
        raise InvalidProductError(f"{total} does not divide dsum(1, g-1) = {pol.total}")
    D = []
    rest = total
    for di in pol.d:
        Di = gcd(di, rest)
        D.append(Di)
        rest //= Di
    if rest != 1:
        raise InvalidProductError(f"{total} is not the product of a feasible tuple for {pol}")
    out = DivisorTuple(pol, tuple(D))
    assert tuple_feasible(out.D, pol)
    return out


def feasible_tuples(pol: PolarizationType) -> Iterator[DivisorTuple]:
    """All feasible tuples, in lexicographic order of (D_1, ..., D_{g-1})."""
    choices = [[x for x in range(1, di + 1) if di % x == 0] for di in pol.d]
    for D in cartesian(*choices):
        if tuple_feasible(D, pol):
            yield DivisorTuple(pol, tuple(D))
