"""The form Lambda, paramodular group membership, and generator matrices.

Vectors are rows and group elements act from the right, v -> v @ M.
The pairing is <x, y> = x Lambda y^T with Lambda = [[0, Delta], [-Delta, 0]].
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

from paramod import matrix as mx
from paramod.arith import strip_common_primes, xgcd, gcd_all
from paramod.errors import (
    InvalidInputError,
    MembershipError,
    NotUnimodularError,
)
from paramod.polarization import PolarizationType


class GroupKind(enum.Enum):
    TILDE_POL = "tilde-pol"
    TILDE_POL_LEV = "tilde-pol-lev"
    CONJ_POL = "conj-pol"
    CONJ_POL_LEV = "conj-pol-lev"

    @property
    def is_conj(self) -> bool:
        return self in (GroupKind.CONJ_POL, GroupKind.CONJ_POL_LEV)

    @property
    def has_level(self) -> bool:
        return self in (GroupKind.TILDE_POL_LEV, GroupKind.CONJ_POL_LEV)

    @property
    def tilde(self) -> "GroupKind":
        return GroupKind.TILDE_POL_LEV if self.has_level else GroupKind.TILDE_POL

    @classmethod
    def parse(cls, text: str) -> "GroupKind":
        key = text.strip().lower().replace("_", "-")
        aliases = {
            "pol": cls.TILDE_POL,
            "lev": cls.TILDE_POL_LEV,
            "tildepol": cls.TILDE_POL,
            "tildepollev": cls.TILDE_POL_LEV,
            "conjpol": cls.CONJ_POL,
            "conjpollev": cls.CONJ_POL_LEV,
        }
        for kind in cls:
            if key == kind.value:
                return kind
        try:
            return aliases[key.replace("-", "")]
        except KeyError:
            raise InvalidInputError(f"unknown group {text!r}") from None


# ---------------------------------------------------------------------------
# the form

def lambda_form(pol: PolarizationType) -> mx.Matrix:
    g = pol.g
    delta = mx.diag(pol.e)
    return mx.block(mx.zeros(g, g), delta, mx.scale(-1, delta), mx.zeros(g, g))


def pairing(v: Sequence[int], w: Sequence[int], pol: PolarizationType):
    g = pol.g
    if len(v) != 2 * g or len(w) != 2 * g:
        raise InvalidInputError(f"vectors must have length {2 * g}")
    return sum(pol.e[i] * (v[i] * w[g + i] - v[g + i] * w[i]) for i in range(g))


def r_matrix(pol: PolarizationType) -> mx.Matrix:
    return mx.diag((1,) * pol.g + pol.e)


def to_tilde(m: mx.Matrix, pol: PolarizationType) -> mx.Matrix:
    """R M R^{-1}: coordinates of the integral (tilde) group."""
    g = pol.g
    scale = (1,) * g + pol.e
    return mx.as_matrix(
        [[Fraction(m[i][j]) * scale[i] / scale[j] for j in range(2 * g)] for i in range(2 * g)]
    )


def from_tilde(m: mx.Matrix, pol: PolarizationType) -> mx.Matrix:
    """R^{-1} M R."""
    g = pol.g
    scale = (1,) * g + pol.e
    return mx.as_matrix(
        [[Fraction(m[i][j]) * scale[j] / scale[i] for j in range(2 * g)] for i in range(2 * g)]
    )


# ---------------------------------------------------------------------------
# membership

class Membership(NamedTuple):
    ok: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def _tilde_check(m: mx.Matrix, pol: PolarizationType, level: bool) -> Membership:
    g = pol.g
    if not mx.is_integral(m):
        return Membership(False, "non-integer entry")
    d = mx.det(m)
    if d != 1:
        return Membership(False, f"determinant {d} != 1")
    lam = lambda_form(pol)
    if mx.matprod(m, lam, mx.transpose(m)) != lam:
        return Membership(False, "M Lambda M^T != Lambda")
    if level:
        for i in range(g):
            mod = pol.e[i]
            for r in (i, g + i):
                for c in range(2 * g):
                    if (m[r][c] - (r == c)) % mod:
                        return Membership(
                            False,
                            f"row {r + 1} of M - 1 not divisible by {mod} (column {c + 1})",
                        )
    return Membership(True)


def member(m, kind: GroupKind, pol: PolarizationType) -> Membership:
    m = mx.as_matrix(m)
    n = 2 * pol.g
    if mx.shape(m) != (n, n):
        raise InvalidInputError(f"expected a {n}x{n} matrix, got {mx.shape(m)}")
    if kind.is_conj:
        m = to_tilde(m, pol)
    return _tilde_check(m, pol, kind.has_level)


def in_dpol(s, pol: PolarizationType) -> bool:
    """Whether s lies in the ring D(Delta): dsum(j, i-1) | s_ij for j < i."""
    s = mx.as_matrix(s)
    g = pol.g
    if mx.shape(s) != (g, g) or not mx.is_integral(s):
        return False
    return all(s[i][j] % pol.dsum(j + 1, i) == 0 for i in range(g) for j in range(i))


def in_dpol_blocks(m, pol: PolarizationType) -> bool:
    """All four g x g blocks of an integer 2g x 2g matrix lie in D(Delta)."""
    g = pol.g
    m = mx.as_matrix(m)
    return all(
        in_dpol(tuple(row[c0:c0 + g] for row in m[r0:r0 + g]), pol)
        for r0 in (0, g)
        for c0 in (0, g)
    )


def sd_inverse(s, pol: PolarizationType) -> mx.Matrix:
    s = mx.as_matrix(s)
    if not in_dpol(s, pol):
        raise InvalidInputError("matrix is not in D(Delta)")
    if mx.det(s) != 1:
        raise NotUnimodularError("determinant is not 1")
    t = mx.inverse(s)
    if not in_dpol(t, pol):
        raise AssertionError("inverse left D(Delta)")
    return t


# ---------------------------------------------------------------------------
# group elements

@dataclass(frozen=True)
class GroupElement:
    """An element of one of the four groups, verified on construction.

    ``matrix`` is in the coordinates of ``kind``: integer for the tilde kinds,
    rational for the conjugated ones.
    """

    kind: GroupKind
    pol: PolarizationType
    matrix: mx.Matrix
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "matrix", mx.as_matrix(self.matrix))
        if self.check:
            res = member(self.matrix, self.kind, self.pol)
            if not res:
                raise MembershipError(f"not in {self.kind.value}: {res.reason}")

    @classmethod
    def identity(cls, kind: GroupKind, pol: PolarizationType) -> "GroupElement":
        return cls(kind, pol, mx.identity(2 * pol.g), check=False)

    def act(self, v: Sequence[int]) -> tuple:
        return mx.vecmat(tuple(v), self.matrix)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        if other.pol != self.pol:
            raise InvalidInputError("polarizations differ")
        kind = self.kind if self.kind == other.kind else _meet(self.kind, other.kind)
        return GroupElement(kind, self.pol, mx.matmul(self.matrix, other.matrix), check=False)

    def inverse(self) -> "GroupElement":
        return GroupElement(self.kind, self.pol, mx.inverse(self.matrix), check=False)

    def tilde_matrix(self) -> mx.Matrix:
        if self.kind.is_conj:
            return to_tilde(self.matrix, self.pol)
        return self.matrix

    def verify(self) -> Membership:
        return member(self.matrix, self.kind, self.pol)

    def to_json(self) -> dict:
        out = mx.matrix_to_json(self.matrix)
        out["group"] = self.kind.value
        return out


def _meet(a: GroupKind, b: GroupKind) -> GroupKind:
    if a.is_conj != b.is_conj:
        raise InvalidInputError("cannot compose tilde and conjugated elements")
    if a.has_level and b.has_level:
        return a
    return GroupKind.CONJ_POL if a.is_conj else GroupKind.TILDE_POL


# ---------------------------------------------------------------------------
# generator families (tilde coordinates, integer matrices)

def _eye(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _freeze(m):
    return tuple(tuple(r) for r in m)


def translation(pol: PolarizationType, x: Sequence[int], y: Sequence[int]) -> mx.Matrix:
    """Level-structure translation fixing v_1.

    x, y hold coefficients for coordinates 2..g. On v: v_i += x_i v_1,
    v_{g+i} += y_i v_1, and v_{g+1} absorbs
    sum dsum(1,i-1) (y_i v_i - x_i v_{g+i}).
    """
    g = pol.g
    if len(x) != g - 1 or len(y) != g - 1:
        raise InvalidInputError(f"translation needs {g - 1} coefficients per half")
    m = _eye(2 * g)
    for idx in range(1, g):
        xi, yi = x[idx - 1], y[idx - 1]
        e = pol.e[idx]
        m[0][idx] = xi
        m[0][g + idx] = yi
        m[idx][g] = e * yi
        m[g + idx][g] = -e * xi
    return _freeze(m)


def plane(pol: PolarizationType, i: int, a: int, b: int, c: int, d: int) -> mx.Matrix:
    """SL2 block [[a, b], [c, d]] in the coordinate plane (i, g+i), 1-based."""
    if a * d - b * c != 1:
        raise NotUnimodularError("plane block must have determinant 1")
    g = pol.g
    m = _eye(2 * g)
    p, q = i - 1, g + i - 1
    m[p][p], m[p][q], m[q][p], m[q][q] = a, b, c, d
    return _freeze(m)


def _partner(pol: PolarizationType, k: int, i: int, c: int) -> int:
    num = c * pol.e[i - 1]
    den = pol.e[k - 1]
    if num % den:
        raise InvalidInputError(f"coefficient {c} must make c*e_{i}/e_{k} integral")
    return num // den


def elem_a(pol: PolarizationType, k: int, i: int, c: int) -> mx.Matrix:
    """v_i += c v_k, compensated by v_{g+k} -= c (e_i/e_k) v_{g+i}."""
    if k == i:
        raise InvalidInputError("elem_a needs k != i")
    g = pol.g
    c2 = _partner(pol, k, i, c)
    m = _eye(2 * g)
    m[k - 1][i - 1] += c
    m[g + i - 1][g + k - 1] -= c2
    return _freeze(m)


def elem_b(pol: PolarizationType, k: int, i: int, c: int) -> mx.Matrix:
    """v_{g+i} += c v_k and v_{g+k} += c (e_i/e_k) v_i (one term when k == i)."""
    g = pol.g
    m = _eye(2 * g)
    m[k - 1][g + i - 1] += c
    if k != i:
        m[i - 1][g + k - 1] += _partner(pol, k, i, c)
    return _freeze(m)


def elem_c(pol: PolarizationType, k: int, i: int, c: int) -> mx.Matrix:
    """v_i += c v_{g+k} and v_k += c (e_i/e_k) v_{g+i} (one term when k == i)."""
    g = pol.g
    m = _eye(2 * g)
    m[g + k - 1][i - 1] += c
    if k != i:
        m[g + i - 1][k - 1] += _partner(pol, k, i, c)
    return _freeze(m)


def block_diag_sd(pol: PolarizationType, gmat: mx.Matrix, indices: Sequence[int]) -> mx.Matrix:
    """Embed G on the coordinates ``indices`` as diag(G, Delta G^{-T} Delta^{-1}).

    Preserves both halves of the coordinate sublattices; integral whenever
    G lies in SD for the restricted type.
    """
    g = pol.g
    n = len(indices)
    e = [pol.e[i - 1] for i in indices]
    ginv_t = mx.transpose(mx.inverse(gmat))
    dblock = [[Fraction(e[r]) * ginv_t[r][s] / e[s] for s in range(n)] for r in range(n)]
    m = [[Fraction(int(r == s)) for s in range(2 * g)] for r in range(2 * g)]
    for r, ir in enumerate(indices):
        for s, js in enumerate(indices):
            m[ir - 1][js - 1] = Fraction(gmat[r][s])
            m[g + ir - 1][g + js - 1] = dblock[r][s]
    out = mx.as_matrix(m)
    if not mx.is_integral(out):
        raise InvalidInputError("G does not lie in SD(Delta) for these indices")
    return out


def sd_pair_gcd(a: int, b: int, d: int) -> mx.Matrix:
    """G in SD(diag(1, d)) with (a, b) G = (*, gcd(a, b))."""
    x, alpha, beta = xgcd(a, b)
    if x == 0:
        return ((1, 0), (0, 1))
    t = strip_common_primes(d, beta)
    p = beta - t * (a // x)
    q = alpha + t * (b // x)
    one, s, r = xgcd(p, d * q)
    if one != 1:
        raise AssertionError(f"coprimality failed for a={a} b={b} d={d}")
    lam, mu = s, -r
    if lam == 0:
        # keep the diagonal nonzero; the next prepend multiplies through it
        lam, mu = lam + d * q, mu + p
    return ((lam, q), (d * mu, p))


def sd_gcd_matrix(pol: PolarizationType, v: Sequence[int]) -> mx.Matrix:
    """G in SD(Delta) with (v G)_g = gcd(v), built by prepending coordinates."""
    n = len(v)
    if n != pol.g:
        raise InvalidInputError(f"vector length {n} != g = {pol.g}")
    if n == 1:
        return ((-1,),) if v[0] < 0 else ((1,),)
    gm = [list(r) for r in sd_pair_gcd(v[n - 2], v[n - 1], pol.d[n - 2])]
    betas = [gm[0][0]]
    for start in range(n - 3, -1, -1):
        m = len(gm)
        tail_gcd = gcd_all(v[start + 1:])
        full = pol.e[n - 1] // pol.e[start]
        bprod = 1
        for b in betas:
            bprod *= b
        gp = sd_pair_gcd(v[start], tail_gcd, full * bprod)
        mu0, lam0 = gp[0]
        dmu1, lam1 = gp[1]
        mu1 = dmu1 // (full * bprod) if full * bprod else 0
        new = [[mu0] + [0] * (m - 1) + [lam0]]
        for r in range(m - 1):
            new.append([0] + gm[r][:m - 1] + [lam1 * gm[r][m - 1]])
        new.append([full * mu1] + gm[m - 1][:m - 1] + [lam1 * gm[m - 1][m - 1]])
        gm = new
        betas = [mu0] + betas
    return _freeze(gm)


# ---------------------------------------------------------------------------
# random words

STEP_RANGE = 3


def _small_sl2(rng: random.Random, bound: int = 4):
    while True:
        a = rng.randint(-bound, bound)
        b = rng.randint(-bound, bound)
        g, s, t = xgcd(a, b)
        if g == 1:
            # [[s, -b], [t, a]] has determinant s*a + t*b = 1
            return s, -b, t, a


def _nonzero(rng: random.Random, bound: int = STEP_RANGE) -> int:
    c = 0
    while c == 0:
        c = rng.randint(-bound, bound)
    return c


def _pol_generator(rng: random.Random, pol: PolarizationType, level: bool) -> mx.Matrix:
    g = pol.g
    choice = rng.randrange(6 if not level else 5)
    if choice == 0 and g >= 2:
        x = [rng.randint(-STEP_RANGE, STEP_RANGE) for _ in range(g - 1)]
        y = [rng.randint(-STEP_RANGE, STEP_RANGE) for _ in range(g - 1)]
        return translation(pol, x, y)
    if choice in (0, 1):
        if level:
            a, b, c, d = _small_sl2(rng)
            return plane(pol, 1, a, b, c, d)
        i = rng.randint(1, g)
        return plane(pol, i, *_small_sl2(rng))
    k = rng.randint(1, g)
    i = rng.randint(1, g)
    if level:
        unit = pol.e[k - 1]
    else:
        unit = pol.e[k - 1] // gcd_all((pol.e[k - 1], pol.e[i - 1]))
    c = _nonzero(rng) * unit
    if choice == 2 and k != i:
        return elem_a(pol, k, i, c)
    if choice == 3:
        return elem_b(pol, k, i, c)
    if choice == 4 or g == 1:
        return elem_c(pol, k, i, c)
    if choice == 2:
        return elem_b(pol, k, i, c)
    # choice 5: an SD block from the pair gcd construction
    idx = sorted(rng.sample(range(1, g + 1), 2))
    sub = pol.restrict(idx)
    gm = sd_pair_gcd(rng.randint(-6, 6), rng.randint(-6, 6), sub.d[0])
    return block_diag_sd(pol, gm, idx)


def random_word(kind: GroupKind, pol: PolarizationType, seed: int, length: int) -> mx.Matrix:
    """Tilde-coordinate matrix of a deterministic random word."""
    if length < 0:
        raise InvalidInputError("word length must be >= 0")
    rng = random.Random(f"paramod:{kind.tilde.value}:{seed}")
    level = kind.has_level
    m = mx.identity(2 * pol.g)
    for _ in range(length):
        gen = _pol_generator(rng, pol, level)
        if rng.random() < 0.5:
            gen = mx.inverse(gen)
        m = mx.matmul(m, gen)
    return m


def random_element(kind: GroupKind, pol: PolarizationType, seed: int, length: int) -> GroupElement:
    m = random_word(kind, pol, seed, length)
    if kind.is_conj:
        m = from_tilde(m, pol)
    return GroupElement(kind, pol, m)


def random_generator(rng: random.Random, kind: GroupKind, pol: PolarizationType) -> mx.Matrix:
    """One generator (or its inverse) in tilde coordinates, drawn from ``rng``."""
    gen = _pol_generator(rng, pol, kind.has_level)
    if rng.random() < 0.5:
        gen = mx.inverse(gen)
    return gen
