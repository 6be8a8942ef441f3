"""Orbits of primitive vectors (isotropic lines) under the paramodular groups.

Every reduction returns a witness matrix ``W`` with ``input @ W == canonical``
that is re-checked for group membership before it is handed out.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as cartesian
from math import gcd, prod
from typing import Iterator, NamedTuple, Sequence

from paramod import matrix as mx
from paramod.arith import gcd_all, gcd_combine, require_primitive, xgcd
from paramod.errors import InvalidInputError
from paramod.group import (
    GroupElement,
    GroupKind,
    elem_a,
    elem_b,
    elem_c,
    plane,
    translation,
)
from paramod.invariants import (
    check_length,
    divisors,
    feasible_tuples,
    tuple_from_product,
    witness_vector,
)
from paramod.polarization import PolarizationType


@dataclass(frozen=True)
class WitnessedReduction:
    input: tuple[int, ...]
    canonical: tuple[int, ...]
    witness: GroupElement
    sign: int = 1

    def verify(self) -> bool:
        image = self.witness.act(self.input)
        target = tuple(self.sign * x for x in self.canonical)
        return image == target and bool(self.witness.verify())

    def to_json(self) -> dict:
        out = {
            "input": list(self.input),
            "canonical": list(self.canonical),
            "witness": self.witness.to_json(),
        }
        if self.sign != 1:
            out["sign"] = self.sign
        return out


@dataclass(frozen=True)
class LevCanonical:
    pol: PolarizationType
    product: int
    vector: tuple[int, ...]

    @property
    def residues(self) -> tuple[int, ...]:
        """a_2..a_g, a_{g+2}..a_{2g}: entry i divided by D_{i..g-1}."""
        g = self.pol.g
        D = tuple_from_product(self.product, self.pol).D
        out = []
        for half in (0, g):
            for i in range(2, g + 1):
                out.append(self.vector[half + i - 1] // prod(D[i - 1:]))
        return tuple(out)


@dataclass(frozen=True)
class PolCanonical:
    pol: PolarizationType
    vhat: tuple[int, ...]

    @property
    def product(self) -> int:
        return self.vhat[0]


class NotEquivalent(NamedTuple):
    v_canonical: tuple[int, ...]
    w_canonical: tuple[int, ...]

    def __bool__(self) -> bool:
        return False


class Equivalence(NamedTuple):
    equivalent: bool
    witness: GroupElement | None = None


# ---------------------------------------------------------------------------
# reduction engine

class _Walk:
    """Current vector plus the accumulated product of applied matrices."""

    def __init__(self, v, pol):
        self.v = tuple(v)
        self.pol = pol
        self.m = mx.identity(2 * pol.g)

    def apply(self, gen):
        self.v = mx.vecmat(self.v, gen)
        self.m = mx.matmul(self.m, gen)


def _bootstrap(walk: _Walk, i: int) -> None:
    """Make coordinate g+i nonzero without touching settled coordinates."""
    pol, g = walk.pol, walk.pol.g
    p, q = i - 1, g + i - 1
    v = walk.v
    if v[q] != 0:
        return
    if v[p] != 0:
        walk.apply(plane(pol, i, 0, 1, -1, 0))
        return
    if i > 1:
        # coordinate i-1 already holds vhat_{i-1} > 0 and v_i = 0
        walk.apply(elem_b(pol, i - 1, i, 1))
        return
    for k in range(2, g + 1):
        if v[k - 1] != 0:
            walk.apply(elem_b(pol, k, 1, pol.e[k - 1]))
            return
    for k in range(2, g + 1):
        if v[g + k - 1] != 0:
            walk.apply(elem_c(pol, k, 1, pol.e[k - 1]))
            walk.apply(plane(pol, 1, 0, 1, -1, 0))
            return
    raise InvalidInputError("zero vector")


def _settle(walk: _Walk, i: int) -> int:
    """Bring coordinate i to the pair gcd target and clear coordinate g+i.

    Coordinates j < i are assumed settled (v_j = vhat_j, v_{g+j} = 0) and
    stay so. Returns the value left in coordinate i.
    """
    pol, g = walk.pol, walk.pol.g
    p, q = i - 1, g + i - 1
    _bootstrap(walk, i)
    v = walk.v
    x1, x2 = v[q], v[p]
    terms = []
    for k in range(1, i):
        terms.append(("below", k, v[k - 1]))
    for k in range(i + 1, g + 1):
        scale = pol.e[k - 1] // pol.e[i - 1]
        terms.append(("a", k, scale * v[k - 1]))
        terms.append(("c", k, scale * v[g + k - 1]))
    alphas = gcd_combine(x1, x2, [t[2] for t in terms])
    for (what, k, _), alpha in zip(terms, alphas):
        if alpha == 0:
            continue
        if what == "below":
            vhat_k = walk.v[k - 1]
            walk.apply(elem_a(pol, k, i, alpha))
            spill = -walk.v[g + k - 1]
            if spill % vhat_k:
                raise AssertionError(f"vhat_{k} does not divide the spill {spill}")
            walk.apply(elem_b(pol, k, k, spill // vhat_k))
        elif what == "a":
            walk.apply(elem_a(pol, k, i, alpha * pol.e[k - 1] // pol.e[i - 1]))
        else:
            walk.apply(elem_c(pol, k, i, alpha * pol.e[k - 1] // pol.e[i - 1]))
    v = walk.v
    h, t1, t2 = xgcd(v[p], v[q])
    walk.apply(plane(pol, i, t1, -v[q] // h, t2, v[p] // h))
    return h


def _reduce_lev(v: tuple[int, ...], pol: PolarizationType) -> tuple[tuple[int, ...], mx.Matrix]:
    g = pol.g
    walk = _Walk(v, pol)
    total = _settle(walk, 1)
    if g > 1:
        cur = walk.v
        x = [-(cur[i] // total) for i in range(1, g)]
        y = [-(cur[g + i] // total) for i in range(1, g)]
        if any(x) or any(y):
            walk.apply(translation(pol, x, y))
        spill = walk.v[g]
        if spill % total:
            raise AssertionError(f"entry g+1 = {spill} not divisible by {total}")
        if spill:
            walk.apply(plane(pol, 1, 1, -spill // total, 0, 1))
    return walk.v, walk.m


def lev_canonical_vector(v: Sequence[int], pol: PolarizationType) -> tuple[int, ...]:
    """The level canonical form read off directly from the criterion."""
    v = require_primitive(check_length(v, pol))
    total = divisors(v, pol).product
    g = pol.g
    out = [x % total for x in v]
    out[0] = total
    out[g] = 0
    return tuple(out)


def canon_lev(v: Sequence[int], pol: PolarizationType, line: bool = False):
    """Reduce v under the level group; returns (WitnessedReduction, LevCanonical).

    With ``line=True`` v and -v are identified: the lexicographically
    smaller canonical form wins and the reduction's ``sign`` records which.
    """
    v = require_primitive(check_length(v, pol))
    if line:
        a = canon_lev(v, pol)
        b = canon_lev(tuple(-x for x in v), pol)
        if b[1].vector < a[1].vector:
            # W reduces -v, so v @ W == -canonical
            red = b[0]
            return WitnessedReduction(v, red.canonical, red.witness, sign=-1), b[1]
        return a
    canonical, m = _reduce_lev(v, pol)
    expected = lev_canonical_vector(v, pol)
    if canonical != expected:
        raise AssertionError(f"reduction reached {canonical}, criterion says {expected}")
    witness = GroupElement(GroupKind.TILDE_POL_LEV, pol, m)
    red = WitnessedReduction(v, canonical, witness)
    return red, LevCanonical(pol, canonical[0], canonical)


def equiv_lev(v: Sequence[int], w: Sequence[int], pol: PolarizationType) -> Equivalence:
    v = require_primitive(check_length(v, pol))
    w = require_primitive(check_length(w, pol))
    if lev_canonical_vector(v, pol) != lev_canonical_vector(w, pol):
        return Equivalence(False)
    m = transporter(v, w, pol, GroupKind.TILDE_POL_LEV)
    return Equivalence(True, m)


def enumerate_lev(pol: PolarizationType) -> Iterator[LevCanonical]:
    g = pol.g
    for tup in feasible_tuples(pol):
        D = tup.D
        total = tup.product
        bounds = [tup.range_product(1, i - 1) for i in range(2, g + 1)]
        tails = [prod(D[i - 1:]) for i in range(2, g + 1)]
        for first in cartesian(*[range(b) for b in bounds]):
            for second in cartesian(*[range(b) for b in bounds]):
                v = (
                    (total,)
                    + tuple(t * a for t, a in zip(tails, first))
                    + (0,)
                    + tuple(t * a for t, a in zip(tails, second))
                )
                if gcd_all(v) != 1 or divisors(v, pol).D != D:
                    continue
                yield LevCanonical(pol, total, v)


# ---------------------------------------------------------------------------
# the group without level structure

def vhat(v: Sequence[int], pol: PolarizationType) -> PolCanonical:
    v = require_primitive(check_length(v, pol))
    g = pol.g
    pairs = [gcd(v[j], v[g + j]) for j in range(g)]
    out = []
    for i in range(1, g + 1):
        h = gcd_all(pairs[:i])
        for j in range(i + 1, g + 1):
            h = gcd(h, pol.dsum(i, j - 1) * pairs[j - 1])
        out.append(h)
    return PolCanonical(pol, tuple(out) + (0,) * g)


def _reduce_pol(v: tuple[int, ...], pol: PolarizationType):
    walk = _Walk(v, pol)
    for i in range(1, pol.g + 1):
        _settle(walk, i)
    return walk.v, walk.m


def canon_pol(v: Sequence[int], pol: PolarizationType) -> WitnessedReduction:
    v = require_primitive(check_length(v, pol))
    canonical, m = _reduce_pol(v, pol)
    expected = vhat(v, pol).vhat
    if canonical != expected:
        raise AssertionError(f"reduction reached {canonical}, vhat is {expected}")
    return WitnessedReduction(v, canonical, GroupElement(GroupKind.TILDE_POL, pol, m))


def canon(v: Sequence[int], pol: PolarizationType, kind: GroupKind) -> WitnessedReduction:
    if kind == GroupKind.TILDE_POL:
        return canon_pol(v, pol)
    if kind == GroupKind.TILDE_POL_LEV:
        return canon_lev(v, pol)[0]
    raise InvalidInputError(f"line reduction is implemented for the tilde groups, not {kind.value}")


def transporter(v: Sequence[int], w: Sequence[int], pol: PolarizationType, kind: GroupKind):
    """M in the group with v @ M == w, or NotEquivalent carrying both canonical forms."""
    rv = canon(v, pol, kind)
    rw = canon(w, pol, kind)
    if rv.canonical != rw.canonical:
        return NotEquivalent(rv.canonical, rw.canonical)
    m = mx.matmul(rv.witness.matrix, mx.inverse(rw.witness.matrix))
    out = GroupElement(kind, pol, m)
    if out.act(rv.input) != rw.input:
        raise AssertionError("transporter does not map v to w")
    return out


def _divisors_of(n: int) -> list[int]:
    return [k for k in range(1, n + 1) if n % k == 0]


def enumerate_pol(pol: PolarizationType, anomalies: list | None = None) -> Iterator[PolCanonical]:
    """Representatives vhat of all orbits, deduplicated by vhat.

    Candidates that are not vhat fixed points, carry the wrong divisors or
    repeat an earlier vhat are skipped and appended to ``anomalies``.
    """
    g = pol.g
    seen = set()
    if pol.coprime:
        for n in _divisors_of(pol.total):
            tup = tuple_from_product(n, pol)
            v = witness_vector(tup.D, pol)
            if vhat(v, pol).vhat != v:
                raise AssertionError(f"coprime representative {v} is not a vhat fixed point")
            seen.add(v)
            yield PolCanonical(pol, v)
        return
    for tup in feasible_tuples(pol):
        D = tup.D
        for a in _middle_coefficients(pol, D):
            v = tuple(prod(D[i - 1:]) * a[i - 1] for i in range(1, g + 1)) + (0,) * g
            reason = None
            if v in seen:
                reason = "duplicate"
            elif gcd_all(v) != 1:
                reason = "not primitive"
            elif vhat(v, pol).vhat != v:
                reason = "not a vhat fixed point"
            elif divisors(v, pol).D != D:
                reason = "divisors differ"
            if reason:
                if anomalies is not None:
                    anomalies.append({"candidate": v, "D": D, "a": a, "reason": reason})
                continue
            seen.add(v)
            yield PolCanonical(pol, v)


def _middle_coefficients(pol: PolarizationType, D: tuple[int, ...]):
    """All (a_1..a_g) with a_1 = a_g = 1 satisfying the divisibility chain."""
    g = pol.g
    if g == 1:
        yield (1,)
        return

    def extend(prefix):
        i = len(prefix) + 1  # next index to fill, 1-based
        if i == g:
            a = prefix + (1,)
            ok = all(
                gcd(D[j - 2] * a[j - 2], pol.di(j) // D[j - 1] * a[j]) % a[j - 1] == 0
                for j in range(2, g)
            )
            if ok:
                yield a
            return
        for ai in _divisors_of(D[i - 2] * prefix[-1]):
            yield from extend(prefix + (ai,))

    yield from extend((1,))
