"""Brute-force cross-checks for the line classification.

Nothing here reuses the reduction machinery: walks multiply plain generator
matrices, and residue scans recompute divisors with vectorized gcds.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product as cartesian
from math import gcd

import numpy as np

from paramod import matrix as mx
from paramod.arith import gcd_all, require_primitive
from paramod.errors import InvalidInputError
from paramod.group import GroupKind, random_generator
from paramod.invariants import check_length
from paramod.orbits_lines import enumerate_lev, enumerate_pol, lev_canonical_vector, vhat
from paramod.polarization import PolarizationType

DEFAULT_CAP = 2_000_000


def _tilde_only(kind: GroupKind) -> None:
    if kind.is_conj:
        raise InvalidInputError("orbit checks run in tilde coordinates (tilde-pol, tilde-pol-lev)")


def canonical_key(v, pol: PolarizationType, kind: GroupKind) -> tuple[int, ...]:
    if kind.has_level:
        return lev_canonical_vector(v, pol)
    return vhat(v, pol).vhat


@dataclass
class OrbitSample:
    seed: int
    kind: GroupKind
    pol: PolarizationType
    start: tuple[int, ...]
    length: int
    visited: set = field(default_factory=set)

    def check(self) -> bool:
        """Every visited vector has the start vector's canonical form."""
        key = canonical_key(self.start, self.pol, self.kind)
        return all(canonical_key(w, self.pol, self.kind) == key for w in self.visited)

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "group": self.kind.value,
            "pol": list(self.pol.e),
            "start": list(self.start),
            "length": self.length,
            "visited": sorted(list(w) for w in self.visited),
            "consistent": self.check(),
        }


def orbit_sample(
    v, kind: GroupKind, pol: PolarizationType, seed: int, n: int, length: int = 20
) -> OrbitSample:
    """Endpoints of n random generator walks from v (plus v itself)."""
    _tilde_only(kind)
    v = require_primitive(check_length(v, pol))
    if n < 0 or length < 0:
        raise InvalidInputError("walk count and length must be >= 0")
    out = OrbitSample(seed, kind, pol, v, length, {v})
    for walk in range(n):
        rng = random.Random(f"paramod:walk:{kind.value}:{seed}:{walk}")
        w = v
        for _ in range(length):
            w = mx.vecmat(w, random_generator(rng, kind, pol))
        out.visited.add(tuple(int(x) for x in w))
    return out


def walk_preserves_class(
    v, kind: GroupKind, pol: PolarizationType, seed: int, walks: int, length: int
) -> bool:
    """Stepwise check: every intermediate vector of every walk keeps v's class."""
    _tilde_only(kind)
    v = require_primitive(check_length(v, pol))
    key = canonical_key(v, pol, kind)
    for walk in range(walks):
        rng = random.Random(f"paramod:walk:{kind.value}:{seed}:{walk}")
        w = v
        for _ in range(length):
            w = tuple(int(x) for x in mx.vecmat(w, random_generator(rng, kind, pol)))
            if canonical_key(w, pol, kind) != key:
                return False
    return True


# ---------------------------------------------------------------------------
# box scans

@dataclass
class CrossValidation:
    pol: PolarizationType
    kind: GroupKind
    bound: int
    scanned: int
    classes: int
    enumerated: int
    complete: bool
    agree: bool
    problems: list

    def to_json(self) -> dict:
        return {
            "pol": list(self.pol.e),
            "group": self.kind.value,
            "bound": self.bound,
            "scanned": self.scanned,
            "classes": self.classes,
            "enumerated": self.enumerated,
            "complete": self.complete,
            "agree": self.agree,
            "problems": self.problems,
        }


def cross_validate_lines(
    pol: PolarizationType, kind: GroupKind, bound: int | None = None, cap: int = DEFAULT_CAP
) -> CrossValidation:
    """Classify every primitive vector in [0, bound]^{2g} and compare with the enumeration.

    The closed box contains every canonical vector once bound >= dsum(1, g-1).

    A box larger than ``cap`` vectors is scanned only partially and the
    report is flagged incomplete.
    """
    _tilde_only(kind)
    if bound is None:
        bound = pol.total
    if bound < pol.total:
        raise InvalidInputError(f"bound must be at least {pol.total}")
    g = pol.g
    classes: dict = {}
    scanned = 0
    complete = True
    for v in cartesian(range(bound + 1), repeat=2 * g):
        if scanned >= cap:
            complete = False
            break
        scanned += 1
        if gcd_all(v) != 1:
            continue
        classes.setdefault(canonical_key(v, pol, kind), v)
    if kind.has_level:
        reps = [r.vector for r in enumerate_lev(pol)]
    else:
        reps = [r.vhat for r in enumerate_pol(pol)]
    problems = []
    hit = {}
    for r in reps:
        key = canonical_key(r, pol, kind)
        if key in hit:
            problems.append({"representatives": [list(hit[key]), list(r)], "issue": "same class"})
        hit[key] = r
        if complete and key not in classes:
            problems.append({"representative": list(r), "issue": "class not met in the box"})
    for key, v in classes.items():
        if key not in hit:
            problems.append({"witness": list(v), "issue": "class without a representative"})
    agree = not problems and (not complete or len(classes) == len(reps))
    return CrossValidation(pol, kind, bound, scanned, len(classes), len(reps), complete, agree, problems)


# ---------------------------------------------------------------------------
# vectorized residue scan mod dsum(1, g-1)

def _divisors_np(pairs: list, pol: PolarizationType) -> list:
    """Divisor arrays from pair-gcd arrays (each already gcd'ed with the modulus)."""
    D = []
    for i in range(1, pol.g):
        acc = np.full(np.shape(pairs[0]), pol.di(i), dtype=np.int64)
        for j in range(1, i + 1):
            div = np.ones_like(acc)
            for m in range(j, i):
                div = div * D[m - 1]
            acc = np.gcd(acc, pairs[j - 1] // div)
        D.append(acc)
    return D


def _pair_table(N: int):
    """All residue pairs (a, b) mod N as flat arrays plus gcd(a, b, N)."""
    a = np.arange(N, dtype=np.int64)
    first = np.repeat(a, N)
    second = np.tile(a, N)
    return first, second, np.gcd(np.gcd(first, second), N)


def residue_scan(pol: PolarizationType) -> dict:
    """Divisor tuples of every vector mod N = dsum(1, g-1) with gcd(v, N) = 1.

    Divisors of such a vector only depend on its residues mod N, so this
    visits every primitive class once. Returns {tuple: number of vectors}.
    """
    g = pol.g
    N = pol.total
    if g == 1:
        return {(): N * N}
    _, _, pair_gcd = _pair_table(N)
    size = N * N
    rest = g - 1
    # outer loop over the pair (v_1, v_{g+1}); the remaining pairs are vectorized
    inner = [pair_gcd[i] for i in np.indices((size,) * rest).reshape(rest, -1)]
    base = max(pol.d) + 1
    counts = np.zeros(base ** (g - 1), dtype=np.int64)
    # the outer pair enters only through its gcd with N, so the inner sweep
    # is computed once per gcd value and added once per outer pair
    memo: dict = {}
    for p0 in range(size):
        h0 = int(pair_gcd[p0])
        if h0 not in memo:
            pairs = [np.full(inner[0].shape, h0, dtype=np.int64)] + inner
            prim = pairs[0]
            for arr in pairs[1:]:
                prim = np.gcd(prim, arr)
            mask = prim == 1
            if not mask.any():
                memo[h0] = None
                continue
            D = _divisors_np([p[mask] for p in pairs], pol)
            code = np.zeros_like(D[0])
            for arr in D:
                code = code * base + arr
            memo[h0] = np.bincount(code, minlength=counts.size)
        if memo[h0] is not None:
            counts += memo[h0]
    out = {}
    for code in np.nonzero(counts)[0]:
        t, c = [], int(code)
        for _ in range(g - 1):
            c, r = divmod(c, base)
            t.append(r)
        out[tuple(reversed(t))] = int(counts[code])
    return out


def lev_class_count(pol: PolarizationType) -> int:
    """Number of level classes among primitive vectors, by the congruence criterion.

    Two primitive vectors are level-equivalent iff they share the divisor
    product and agree mod it. Vectors are grouped by their pair-gcd pattern
    (which fixes the divisors); the set of residues mod the product reached
    by a pattern is the product of the per-pair residue images.
    """
    g = pol.g
    N = pol.total
    first, second, pair_gcd = _pair_table(N)
    values = sorted(set(pair_gcd.tolist()))
    fibers = {h: np.nonzero(pair_gcd == h)[0] for h in values}
    tables: dict = {}
    total = 0
    for pattern in cartesian(values, repeat=g):
        if gcd_all(pattern) != 1:
            continue
        pairs = [np.array([h], dtype=np.int64) for h in pattern]
        prod_d = 1
        for arr in _divisors_np(pairs, pol):
            prod_d *= int(arr[0])
        if prod_d == N:
            # reduction mod N is injective on residues mod N
            count = 1
            for h in pattern:
                count *= len(fibers[h])
            total += count
            continue
        table = tables.setdefault(prod_d, np.zeros(prod_d ** (2 * g), dtype=bool))
        index = np.zeros(1, dtype=np.int64)
        for h in pattern:
            sel = fibers[h]
            image = np.unique((first[sel] % prod_d) * prod_d + second[sel] % prod_d)
            index = (index[:, None] * prod_d * prod_d + image[None, :]).ravel()
        table[index] = True
    return total + sum(int(t.sum()) for t in tables.values())


def tuple_occurs(D, pol: PolarizationType) -> bool:
    """Whether any primitive vector has divisor tuple D, by residue scan."""
    return tuple(D) in residue_scan(pol)


def pair_gcd_scan(pol: PolarizationType) -> dict:
    """Divisor tuples reachable from pair-gcd patterns, with multiplicities.

    Counts the same multiset as :func:`residue_scan` by grouping residue
    pairs by their gcd with the modulus, which is far cheaper.
    """
    N = pol.total
    hist: dict = {}
    for x in range(N):
        for y in range(N):
            h = gcd(gcd(x, y), N)
            hist[h] = hist.get(h, 0) + 1
    out: dict = {}
    values = sorted(hist)
    for pattern in cartesian(values, repeat=pol.g):
        if gcd_all(pattern) != 1:
            continue
        weight = 1
        for h in pattern:
            weight *= hist[h]
        pairs = [np.array([h], dtype=np.int64) for h in pattern]
        D = tuple(int(arr[0]) for arr in _divisors_np(pairs, pol))
        out[D] = out.get(D, 0) + weight
    return out
