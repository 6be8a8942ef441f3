"""Exact integer primitives: gcds, the gcd combiner, minors, saturation."""

from __future__ import annotations

from math import gcd
from typing import Sequence

from paramod.errors import InvalidInputError, NotPrimitiveError, RankError
from paramod.matrix import Matrix, as_matrix, det, is_integral, transpose

# Candidates tried before falling back to the constructive coefficient; small
# coefficients keep witness matrices small.
SHORT_SEARCH = 32


def gcd_all(values) -> int:
    """Nonnegative gcd of any number of integers; gcd() of nothing is 0."""
    g = 0
    for x in values:
        g = gcd(g, x)
        if g == 1:
            return 1
    return g


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with x*a + y*b = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def strip_common_primes(t: int, b: int) -> int:
    """Largest divisor of t sharing no prime with b (1 when b == 0)."""
    t = abs(t)
    g = gcd(t, b)
    while g > 1:
        t //= g
        g = gcd(t, g)
    return t


def is_primitive(v: Sequence[int]) -> bool:
    return gcd_all(v) == 1


def primitivize(v: Sequence[int]) -> tuple[int, ...]:
    g = gcd_all(v)
    if g == 0:
        raise InvalidInputError("the zero vector has no primitive multiple")
    return tuple(x // g for x in v)


def require_primitive(v: Sequence[int]) -> tuple[int, ...]:
    v = tuple(int(x) for x in v)
    if not is_primitive(v):
        raise NotPrimitiveError(f"vector {v} is not primitive (entry gcd {gcd_all(v)})")
    return v


def _one_step(x1: int, x2: int, y: int) -> int:
    """Some a with gcd(x1, x2 + a*y) == gcd(x1, x2, y)."""
    d = gcd_all((x1, x2, y))
    if gcd(x1, x2) == d:
        return 0
    for a in range(1, SHORT_SEARCH):
        if gcd(x1, x2 + a * y) == d:
            return a
    # every prime of x1/d either divides x2/d (so it must not divide the
    # coefficient) or does not (so it must divide it)
    t = strip_common_primes(x1 // d, x2 // d)
    return t % abs(x1 // d)


def gcd_combine(x1: int, x2: int, ys: Sequence[int]) -> tuple[int, ...]:
    """Coefficients a with gcd(x1, x2 + sum a_k y_k) == gcd(x1, x2, *ys).

    Works one y at a time: after step k the pair gcd already equals
    gcd(x1, x2, y_1..y_k).
    """
    if x1 == 0:
        raise InvalidInputError("gcd_combine needs x1 != 0")
    alphas = []
    acc = x2
    for y in ys:
        a = _one_step(x1, acc, y)
        alphas.append(a)
        acc += a * y
    return tuple(alphas)


def minor_divisibility_check(a: Matrix, d: int, k: int) -> bool:
    """True iff d divides every a_ij with j <= k <= i (1-based).

    When it holds, d divides det(a).
    """
    a = as_matrix(a)
    n = len(a)
    if any(len(r) != n for r in a):
        raise InvalidInputError("matrix must be square")
    if not 1 <= k <= n:
        raise InvalidInputError(f"k={k} outside 1..{n}")
    return all(a[i][j] % d == 0 for i in range(k - 1, n) for j in range(k))


# ---------------------------------------------------------------------------
# Hermite normal form with transformation records

def hnf_rows(a: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Row Hermite normal form.

    Returns (H, U, Uinv) with U @ a == H, U unimodular, Uinv its inverse.
    Nonzero rows of H come first, pivots are positive and entries above a
    pivot are reduced into [0, pivot).
    """
    a = [list(r) for r in as_matrix(a)]
    if not is_integral(a):
        raise InvalidInputError("HNF needs an integer matrix")
    m, n = len(a), len(a[0])
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    uinv = [[int(i == j) for j in range(m)] for i in range(m)]

    def rowop(i, j, p, q, r, s):
        # [row_i; row_j] <- [[p, q], [r, s]] [row_i; row_j], det = 1
        for mat in (a, u):
            ri, rj = mat[i], mat[j]
            mat[i] = [p * x + q * y for x, y in zip(ri, rj)]
            mat[j] = [r * x + s * y for x, y in zip(ri, rj)]
        # inverse acts on columns of uinv: [[s, -q], [-r, p]]
        for row in uinv:
            ci, cj = row[i], row[j]
            row[i] = s * ci - r * cj
            row[j] = -q * ci + p * cj

    def swap(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]
        for row in uinv:
            row[i], row[j] = row[j], row[i]

    def negate(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]
        for row in uinv:
            row[i] = -row[i]

    def addrow(i, j, c):
        # row_i += c * row_j
        a[i] = [x + c * y for x, y in zip(a[i], a[j])]
        u[i] = [x + c * y for x, y in zip(u[i], u[j])]
        for row in uinv:
            row[j] -= c * row[i]

    p = 0
    for c in range(n):
        if p == m:
            break
        for i in range(p + 1, m):
            if a[i][c] == 0:
                continue
            if a[p][c] == 0:
                swap(p, i)
                continue
            x, y = a[p][c], a[i][c]
            g, s, t = xgcd(x, y)
            rowop(p, i, s, t, -y // g, x // g)
        if a[p][c] == 0:
            continue
        if a[p][c] < 0:
            negate(p)
        piv = a[p][c]
        for i in range(p):
            q = a[i][c] // piv
            if q:
                addrow(i, p, -q)
        p += 1
    to_t = lambda mat: tuple(tuple(r) for r in mat)  # noqa: E731
    return to_t(a), to_t(u), to_t(uinv)


def rank(a: Matrix) -> int:
    h, _, _ = hnf_rows(a)
    return sum(1 for r in h if any(r))


def saturate_lattice(rows: Matrix) -> Matrix:
    """Z-basis (in row HNF) of the rational row span intersected with Z^n."""
    a = as_matrix(rows)
    if not is_integral(a):
        a = _clear_denominators(a)
    h, _, uinv = hnf_rows(transpose(a))
    r = sum(1 for row in h if any(row))
    if r == 0:
        raise RankError("rank-zero input has no saturation")
    # a == h^T uinv^T, so the row span lies in the first r rows of uinv^T,
    # which extend to a basis of Z^n
    basis = transpose(uinv)[:r]
    hb, _, _ = hnf_rows(basis)
    return hb[:r]


def _clear_denominators(a: Matrix) -> Matrix:
    out = []
    for row in a:
        lcm = 1
        for x in row:
            den = getattr(x, "denominator", 1)
            lcm = lcm * den // gcd(lcm, den)
        out.append(tuple(int(x * lcm) for x in row))
    return tuple(out)


def complete_to_unimodular(c: Sequence[int]) -> Matrix:
    """Unimodular integer matrix whose first row is the primitive vector c."""
    c = require_primitive(c)
    _, _, uinv = hnf_rows(tuple((x,) for x in c))
    out = transpose(uinv)
    assert out[0] == c
    return out


def integer_solve(basis: Matrix, v: Sequence[int]):
    """Integer x with x @ basis == v, or None when v is not in the Z-span."""
    h, u, _ = hnf_rows(basis)
    y = []
    rest = list(v)
    for row in h:
        piv = next((j for j, x in enumerate(row) if x), None)
        if piv is None:
            y.append(0)
            continue
        q, r = divmod(rest[piv], row[piv])
        if r:
            return None
        y.append(q)
        rest = [a - q * b for a, b in zip(rest, row)]
    if any(rest):
        return None
    n = len(basis)
    return tuple(sum(y[i] * u[i][j] for i in range(n)) for j in range(n))


def same_lattice(a: Matrix, b: Matrix) -> bool:
    """Whether two row sets span the same Z-lattice."""
    return all(integer_solve(a, r) is not None for r in b) and all(
        integer_solve(b, r) is not None for r in a
    )


def is_unimodular(m: Matrix) -> bool:
    return is_integral(m) and det(m) in (1, -1)
