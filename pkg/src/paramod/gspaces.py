"""Maximal isotropic sublattices and their reduction to the standard one.

For square-free coprime types the group acts transitively on saturated
isotropic rank-g lattices. ``reduce_to_standard`` produces the certificate
``U @ B @ gamma == [I | 0]`` with ``U`` unimodular and ``gamma`` in the
group, logging every move on a replayable tape.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from math import gcd
from typing import Sequence

from paramod import matrix as mx
from paramod.arith import (
    complete_to_unimodular,
    gcd_all,
    gcd_combine,
    is_unimodular,
    rank,
    saturate_lattice,
)
from paramod.errors import (
    InvalidInputError,
    InvariantBreach,
    IsotropyError,
    NotUnimodularError,
    RankError,
    UnsupportedPolarizationError,
)
from paramod.group import (
    GroupElement,
    GroupKind,
    block_diag_sd,
    pairing,
    random_word,
    sd_gcd_matrix,
)
from paramod.invariants import divisors
from paramod.orbits_lines import transporter
from paramod.polarization import PolarizationType, prime_factors


@dataclass(frozen=True)
class IsotropicLattice:
    pol: PolarizationType
    basis: mx.Matrix

    def verify(self) -> bool:
        b = self.basis
        g = self.pol.g
        if len(b) != g or rank(b) != g:
            return False
        if any(pairing(b[i], b[j], self.pol) for i in range(g) for j in range(i + 1, g)):
            return False
        return mx.as_matrix(saturate_lattice(b)) == mx.as_matrix(_row_hnf(b))

    def to_json(self) -> dict:
        return {"pol": list(self.pol.e), "basis": [list(r) for r in self.basis]}


def _row_hnf(b):
    from paramod.arith import hnf_rows

    h, _, _ = hnf_rows(b)
    return tuple(r for r in h if any(r))


def standard_lattice(pol: PolarizationType) -> IsotropicLattice:
    g = pol.g
    return IsotropicLattice(pol, tuple(mx.identity(2 * g)[:g]))


def make_lattice(rows, pol: PolarizationType) -> IsotropicLattice:
    """Saturated Z-basis of the span of ``rows`` after checking isotropy and rank."""
    rows = mx.as_matrix(rows)
    g = pol.g
    if any(len(r) != 2 * g for r in rows):
        raise InvalidInputError(f"rows must have length {2 * g}")
    for i, j in combinations(range(len(rows)), 2):
        value = pairing(rows[i], rows[j], pol)
        if value:
            raise IsotropyError(i + 1, j + 1, value)
    r = rank(_clear(rows))
    if r != g:
        raise RankError(f"rows span a rank-{r} space, need {g}")
    basis = saturate_lattice(rows)
    out = IsotropicLattice(pol, basis)
    for i, j in combinations(range(g), 2):
        if pairing(basis[i], basis[j], pol):
            raise AssertionError("saturation broke isotropy")
    return out


def _clear(rows):
    out = []
    for row in rows:
        den = 1
        for x in row:
            q = getattr(x, "denominator", 1)
            den = den * q // gcd(den, q)
        out.append(tuple(int(x * den) for x in row))
    return tuple(out)


# ---------------------------------------------------------------------------
# tape

@dataclass(frozen=True)
class TapeStep:
    op: str
    args: dict
    matrix: mx.Matrix
    acts_on: str  # "rows": B <- M @ B, "columns": B <- B @ M

    def apply(self, b: mx.Matrix) -> mx.Matrix:
        if self.acts_on == "rows":
            return mx.matmul(self.matrix, b)
        return mx.matmul(b, self.matrix)

    def to_json(self) -> dict:
        return {
            "op": self.op,
            "args": self.args,
            "acts_on": self.acts_on,
            "matrix": mx.matrix_to_json(self.matrix),
        }


@dataclass
class TransformationTape:
    input: mx.Matrix
    steps: list = field(default_factory=list)
    output: mx.Matrix | None = None

    def record(self, op: str, m: mx.Matrix, acts_on: str, **args) -> None:
        self.steps.append(TapeStep(op, args, mx.as_matrix(m), acts_on))

    def replay(self) -> mx.Matrix:
        b = mx.as_matrix(self.input)
        for step in self.steps:
            b = step.apply(b)
        return b

    def verify(self) -> bool:
        return self.output is not None and self.replay() == mx.as_matrix(self.output)

    def to_json(self) -> dict:
        return {
            "input": [list(r) for r in self.input],
            "output": None if self.output is None else [list(r) for r in self.output],
            "steps": [s.to_json() for s in self.steps],
        }


# ---------------------------------------------------------------------------
# moving a gcd into one coordinate

def getgcdsym_transform(v: Sequence[int], indices: Sequence[int], pol: PolarizationType) -> GroupElement:
    """Group element moving gcd(v_i : i in indices) into the last listed coordinate.

    The element is block diagonal: it maps the span of the chosen first-half
    unit vectors to itself, and likewise for the second half.
    """
    g = pol.g
    v = tuple(int(x) for x in v)
    if len(v) != 2 * g:
        raise InvalidInputError(f"vector length {len(v)} != {2 * g}")
    indices = tuple(indices)
    if not indices or any(not 1 <= i <= g for i in indices):
        raise InvalidInputError(f"indices must lie in 1..{g}")
    if any(b <= a for a, b in zip(indices, indices[1:])):
        raise InvalidInputError("indices must be strictly increasing")
    sub = pol.restrict(indices)
    gm = sd_gcd_matrix(sub, [v[i - 1] for i in indices])
    out = GroupElement(GroupKind.TILDE_POL, pol, block_diag_sd(pol, gm, indices))
    u = out.act(v)
    if u[indices[-1] - 1] != gcd_all(v[i - 1] for i in indices):
        raise AssertionError("gcd did not land in the last index")
    return out


# ---------------------------------------------------------------------------
# divisor bookkeeping for square-free coprime types

def require_square_free_coprime(pol: PolarizationType) -> None:
    if not (pol.square_free and pol.coprime):
        raise UnsupportedPolarizationError(
            f"type {pol} is not square-free and coprime; transitivity is not available"
        )


def _support_mod(u: Sequence[int], g: int, i: int, p: int) -> bool:
    """Whether u is nonzero mod p on coordinates 1..i and g+1..g+i."""
    return any(u[j] % p for j in range(i)) or any(u[g + j] % p for j in range(i))


def divisor_gcd(rows: Sequence[Sequence[int]], pol: PolarizationType, k: int) -> int:
    """gcd over the given rows of their k-th divisor D_k."""
    return gcd_all(divisors(r, pol).D[k - 1] for r in rows)


def _min_divisor_rows(rows: mx.Matrix, pol: PolarizationType, n: int, tape=None):
    """Change the last n rows so the first of them has D_{g-n+1} = 1.

    Returns the new full row list and the unimodular change applied.
    """
    g = pol.g
    m = len(rows)
    i = g - n + 1
    head, tail = list(rows[:m - n]), list(rows[m - n:])
    dmod = pol.di(i)
    if divisors(tail[0], pol).D[i - 1] == 1:
        return tuple(rows), mx.identity(m)
    coeffs = [0] * n
    # CRT: for each prime of d_i pick a row that survives mod p and use the
    # idempotent for p so the combination reduces to that row mod p
    for p in prime_factors(dmod):
        pick = next((r for r, u in enumerate(tail) if _support_mod(u, g, i, p)), None)
        if pick is None:
            raise InvariantBreach(
                f"no row of the sublattice survives mod {p} on coordinates 1..{i}", tape
            )
        rest = dmod // p
        coeffs[pick] += rest * pow(rest, -1, p)
    coeffs = [c % dmod for c in coeffs]
    coeffs = _primitive_lift(coeffs, dmod)
    change = complete_to_unimodular(coeffs)
    new_tail = mx.matmul(change, tuple(tuple(r) for r in tail))
    full_change = _embed_rows(change, m, m - n)
    v = new_tail[0]
    if divisors(v, pol).D[i - 1] != 1:
        raise InvariantBreach(f"combined vector {v} still has D_{i} > 1", tape)
    return tuple(head) + tuple(new_tail), full_change


def _primitive_lift(c: list[int], modulus: int) -> list[int]:
    """A primitive integer vector congruent to c mod ``modulus``.

    Needs gcd(c, modulus) == 1.
    """
    c = list(c)
    if gcd_all(c + [modulus]) != 1:
        raise AssertionError("residues share a factor with the modulus")
    if gcd_all(c) == 1:
        return c
    if len(c) == 1:
        return [1] if modulus == 1 or c[0] % modulus == 1 % modulus else c
    if gcd_all(c[1:]) == 0:
        c[1] += modulus
    (a,) = gcd_combine(gcd_all(c[1:]), c[0], [modulus])
    c[0] += a * modulus
    assert gcd_all(c) == 1
    return c


def _embed_rows(u: mx.Matrix, m: int, offset: int) -> mx.Matrix:
    out = [list(r) for r in mx.identity(m)]
    for r in range(len(u)):
        for s in range(len(u)):
            out[offset + r][offset + s] = u[r][s]
    return tuple(tuple(r) for r in out)


def min_divisor_vector(lattice: IsotropicLattice, n: int):
    """Vector v in the span of the last n basis rows with D_{g-n+1}(v) = 1.

    Returns (v, new lattice) where v is the first of the new last n rows.
    """
    pol = lattice.pol
    require_square_free_coprime(pol)
    g = pol.g
    if not 2 <= n <= g:
        raise InvalidInputError(f"n must lie in 2..{g}")
    rows, _ = _min_divisor_rows(lattice.basis, pol, n)
    return rows[g - n], IsotropicLattice(pol, rows)


def _combination(pol: PolarizationType) -> tuple[int, ...]:
    """Coefficients of the vector with all divisors 1 built from rows having D_i(u^i) = 1."""
    g = pol.g
    if g <= 2:
        return (1,) + (0,) * (g - 1)
    return tuple(pol.dsum(1, n - 1) * pol.dsum(n + 1, g - 1) for n in range(1, g)) + (0,)


# ---------------------------------------------------------------------------
# the reduction

@dataclass(frozen=True)
class Reduction:
    lattice: IsotropicLattice
    unimodular: mx.Matrix
    gamma: GroupElement
    tape: TransformationTape

    def verify(self) -> bool:
        pol = self.lattice.pol
        g = pol.g
        if not is_unimodular(self.unimodular) or not self.gamma.verify():
            return False
        image = mx.matprod(self.unimodular, self.lattice.basis, self.gamma.matrix)
        return image == standard_lattice(pol).basis and self.tape.verify()

    def to_json(self) -> dict:
        return {
            "gamma": self.gamma.to_json(),
            "unimodular": mx.matrix_to_json(self.unimodular),
            "tape": self.tape.to_json(),
            "verified": self.verify(),
        }


def _sub_vector(u, g, k):
    return tuple(u[k:g]) + tuple(u[g + k:])


def _embed_block(m: mx.Matrix, g: int, k: int) -> mx.Matrix:
    """Put a 2(g-k) square matrix on coordinates k+1..g, g+k+1..2g."""
    idx = list(range(k, g)) + list(range(g + k, 2 * g))
    out = [list(r) for r in mx.identity(2 * g)]
    for r, ir in enumerate(idx):
        for s, js in enumerate(idx):
            out[ir][js] = m[r][s]
    return tuple(tuple(r) for r in out)


def reduce_to_standard(lattice: IsotropicLattice) -> Reduction:
    pol = lattice.pol
    require_square_free_coprime(pol)
    g = pol.g
    basis = mx.as_matrix(lattice.basis)
    tape = TransformationTape(input=basis)
    cur = basis
    u_total = mx.identity(g)
    gamma = mx.identity(2 * g)

    def rows_change(change, op, **args):
        nonlocal cur, u_total
        cur = mx.matmul(change, cur)
        u_total = mx.matmul(change, u_total)
        tape.record(op, change, "rows", **args)

    def group_step(m, op, **args):
        nonlocal cur, gamma
        cur = mx.matmul(cur, m)
        gamma = mx.matmul(gamma, m)
        tape.record(op, m, "columns", **args)

    for k in range(g):
        sub = pol.sub(k + 1)
        gs = sub.g
        sub_rows = tuple(_sub_vector(r, g, k) for r in cur[k:])
        for r in cur[k:]:
            if any(r[:k]) or any(r[g:g + k]):
                raise InvariantBreach(f"row {r} leaks into settled coordinates at step {k}", tape)
        # rows u^i of the sub-block get D_i(u^i) = 1, one index at a time
        for i in range(1, gs):
            n = gs - i + 1
            sub_rows, change = _min_divisor_rows(sub_rows, sub, n, tape)
            if change != mx.identity(len(change)):
                rows_change(_embed_rows(change, g, k), "Combine", step=k + 1, index=i)
        if gs == 1 or all(x == 1 for x in divisors(sub_rows[0], sub).D):
            # the leading row already qualifies
            coeffs = (1,) + (0,) * (gs - 1)
        else:
            coeffs = _combination(sub)
        v = mx.vecmat(coeffs, sub_rows)
        if gs > 1 and any(divisors(v, sub).D[j] != 1 for j in range(gs - 1)):
            raise InvariantBreach(f"combination {v} has a divisor > 1 at step {k + 1}", tape)
        change = complete_to_unimodular(coeffs)
        sub_rows = mx.matmul(change, sub_rows)
        if change != mx.identity(gs):
            rows_change(_embed_rows(change, g, k), "SortVector", step=k + 1)
        target = (1,) + (0,) * (2 * gs - 1)
        move = transporter(sub_rows[0], target, sub, GroupKind.TILDE_POL)
        if not move:
            raise InvariantBreach(f"{sub_rows[0]} is not in the orbit of the unit vector", tape)
        if move.matrix != mx.identity(2 * gs):
            group_step(_embed_block(move.matrix, g, k), "Sympl", step=k + 1)
        if cur[k] != mx.identity(2 * g)[k]:
            raise InvariantBreach(f"row {k + 1} is {cur[k]} after the group step", tape)
        clear = [list(r) for r in mx.identity(g)]
        for j in range(k + 1, g):
            if cur[j][g + k]:
                raise InvariantBreach(f"row {j + 1} has nonzero entry at {g + k + 1}", tape)
            clear[j][k] = -cur[j][k]
        clear = tuple(tuple(r) for r in clear)
        if clear != mx.identity(g):
            rows_change(clear, "Primit", step=k + 1)
    tape.output = cur
    if cur != standard_lattice(pol).basis:
        raise InvariantBreach("reduction did not reach the standard lattice", tape)
    out = Reduction(
        lattice, u_total, GroupElement(GroupKind.TILDE_POL, pol, gamma), tape
    )
    pre = mx.matmul(u_total, basis)
    for i, row in enumerate(pre, start=1):
        prod_d = divisors(row, pol).product
        if prod_d != pol.dsum(1, i - 1):
            raise InvariantBreach(
                f"row {i} of the reordered basis has divisor product {prod_d}", tape
            )
    if not out.verify():
        raise InvariantBreach("certificate failed to verify", tape)
    return out


# ---------------------------------------------------------------------------
# checks of the divisor invariant the reduction relies on

def certify_gcd_is_one(lattice: IsotropicLattice) -> dict:
    """Evaluate m_k = gcd(D_k over any n rows) for every row subset.

    For square-free coprime types m_k = 1 whenever k >= g-n+1; a failure
    raises InvariantBreach carrying the offending rows.
    """
    pol = lattice.pol
    require_square_free_coprime(pol)
    g = pol.g
    checked = 0
    for n in range(1, g + 1):
        for subset in combinations(range(g), n):
            rows = [lattice.basis[i] for i in subset]
            for k in range(max(1, g - n + 1), g):
                m_k = divisor_gcd(rows, pol, k)
                checked += 1
                if m_k != 1:
                    tape = TransformationTape(input=lattice.basis, output=lattice.basis)
                    raise InvariantBreach(
                        f"rows {[i + 1 for i in subset]} have gcd of D_{k} equal to {m_k}", tape
                    )
    return {"checked": checked, "ok": True}


# ---------------------------------------------------------------------------
# random test lattices

def random_unimodular(n: int, rng: random.Random, steps: int = 8) -> mx.Matrix:
    m = [list(r) for r in mx.identity(n)]
    for _ in range(steps):
        if n == 1:
            break
        i, j = rng.sample(range(n), 2)
        c = rng.randint(-3, 3)
        m[i] = [a + c * b for a, b in zip(m[i], m[j])]
        if rng.random() < 0.3:
            m[i], m[j] = m[j], m[i]
    if n and rng.random() < 0.5:
        m[0] = [-x for x in m[0]]
    out = tuple(tuple(r) for r in m)
    if not is_unimodular(out):
        raise NotUnimodularError("internal: random mix not unimodular")
    return out


def random_lattice(pol: PolarizationType, seed: int, length: int = 12) -> IsotropicLattice:
    """Standard lattice moved by a random group word, then row-mixed."""
    g = pol.g
    word = random_word(GroupKind.TILDE_POL, pol, seed, length)
    rng = random.Random(f"paramod:lattice:{seed}")
    mix = random_unimodular(g, rng)
    basis = mx.matprod(mix, standard_lattice(pol).basis, word)
    return IsotropicLattice(pol, basis)
