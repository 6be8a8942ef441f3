import random
from itertools import product
from math import gcd

import pytest

from helpers import pol, random_primitive
from paramod.arith import gcd_all
from paramod.errors import InvalidInputError, NotPrimitiveError
from paramod.group import GroupKind
from paramod.invariants import divisors, feasible_tuples
from paramod.oracle import (
    canonical_key,
    cross_validate_lines,
    lev_class_count,
    orbit_sample,
    pair_gcd_scan,
    residue_scan,
    tuple_occurs,
    walk_preserves_class,
)

LEV = GroupKind.TILDE_POL_LEV
POL = GroupKind.TILDE_POL


class TestOrbitSample:
    def test_unit_vector_class(self):
        s = orbit_sample((1, 0, 0, 0), POL, pol(1, 2), seed=1, n=50)
        assert s.check()
        assert {canonical_key(w, pol(1, 2), POL) for w in s.visited} == {(1, 1, 0, 0)}

    def test_zero_walks(self):
        s = orbit_sample((1, 0, 0, 0), POL, pol(1, 2), seed=0, n=0)
        assert s.visited == {(1, 0, 0, 0)}

    def test_level_congruence(self):
        s = orbit_sample((2, 1, 0, 0), LEV, pol(1, 2), seed=3, n=50)
        assert len(s.visited) > 1
        for w in s.visited:
            assert divisors(w, pol(1, 2)).product == 2
            assert all((a - b) % 2 == 0 for a, b in zip(w, (2, 1, 0, 0)))

    def test_deterministic(self):
        a = orbit_sample((1, 2, 3, 4), LEV, pol(1, 2), 7, 10)
        b = orbit_sample((1, 2, 3, 4), LEV, pol(1, 2), 7, 10)
        assert a.visited == b.visited and a.to_json() == b.to_json()

    def test_errors(self):
        with pytest.raises(NotPrimitiveError):
            orbit_sample((2, 0, 0, 0), POL, pol(1, 2), 0, 1)
        with pytest.raises(InvalidInputError):
            orbit_sample((1, 0, 0, 0), GroupKind.CONJ_POL, pol(1, 2), 0, 1)
        with pytest.raises(InvalidInputError):
            orbit_sample((1, 0, 0, 0), POL, pol(1, 2), 0, -1)

    @pytest.mark.parametrize("kind", [POL, LEV])
    def test_walks_never_leave_the_class(self, kind):
        rng = random.Random(kind.value)
        for n in range(20):
            p = [pol(1, 2), pol(1, 4, 24), pol(1, 2, 6, 30)][n % 3]
            assert walk_preserves_class(random_primitive(rng, p.g), kind, p, n, walks=5, length=20)


class TestCrossValidate:
    @pytest.mark.parametrize(
        "p,kind,classes",
        [(pol(1, 2), LEV, 4), (pol(1, 2), POL, 2), (pol(1, 1), LEV, 1), (pol(1, 1), POL, 1), (pol(1, 3), POL, 2)],
    )
    def test_small_cases(self, p, kind, classes):
        rep = cross_validate_lines(p, kind)
        assert rep.complete and rep.agree and rep.classes == classes == rep.enumerated

    def test_one_two_six(self):
        rep = cross_validate_lines(pol(1, 2, 6), POL)
        assert rep.agree and rep.classes == 4
        rep = cross_validate_lines(pol(1, 2, 6), LEV)
        assert rep.agree and rep.classes == lev_class_count(pol(1, 2, 6))

    def test_one_four_twenty_four_pol(self):
        # box [0, 24]^6 is 2.4e8 vectors; the capped partial scan must still be consistent
        rep = cross_validate_lines(pol(1, 4, 24), POL, cap=300_000)
        assert not rep.complete and rep.agree and rep.classes <= 12

    def test_bound_too_small(self):
        with pytest.raises(InvalidInputError):
            cross_validate_lines(pol(1, 2, 6), POL, bound=5)

    def test_report_json(self):
        out = cross_validate_lines(pol(1, 2), LEV).to_json()
        assert out["classes"] == 4 and out["problems"] == [] and out["group"] == LEV.value


def primitive_lift(v, N):
    """Shift one entry by a multiple of N until the vector is primitive."""
    for k in range(len(v)):
        for t in range(50):
            w = tuple(x + t * N * (i == k) for i, x in enumerate(v))
            if gcd_all(w) == 1:
                return w
    raise AssertionError(f"no small lift of {v}")


def brute_residue_scan(p):
    """Histogram of divisor tuples over residue vectors mod N coprime to N, one vector at a time."""
    N = p.total
    out = {}
    for v in product(range(N), repeat=2 * p.g):
        if gcd(gcd_all(v), N) != 1:
            continue
        D = divisors(primitive_lift(v, N), p).D
        out[D] = out.get(D, 0) + 1
    return out


class TestResidueScan:
    @pytest.mark.parametrize("p", [pol(1, 2, 6), pol(1, 2, 4), pol(1, 4)])
    def test_matches_direct_enumeration(self, p):
        assert residue_scan(p) == brute_residue_scan(p)

    def test_no_two_two_mod_24(self):
        hist = residue_scan(pol(1, 4, 24))
        assert (2, 2) not in hist and not tuple_occurs((2, 2), pol(1, 4, 24))
        assert set(hist) == {t.D for t in feasible_tuples(pol(1, 4, 24))}
        assert sum(hist.values()) == 187_858_944

    @pytest.mark.parametrize("p", [pol(1, 4, 24), pol(1, 2, 4, 8), pol(1, 6, 36)])
    def test_pair_gcd_scan_agrees(self, p):
        assert pair_gcd_scan(p) == residue_scan(p)


class TestLevClassCount:
    @pytest.mark.parametrize("p,count", [(pol(1, 2), 4), (pol(1, 1), 1), (pol(1, 3), 9), (pol(1, 2, 6), 144)])
    def test_small(self, p, count):
        assert lev_class_count(p) == count

    def test_matches_box_classification(self):
        p = pol(1, 2, 4)
        keys = set()
        for v in product(range(p.total + 1), repeat=2 * p.g):
            if gcd_all(v) == 1:
                keys.add(canonical_key(v, p, LEV))
        assert len(keys) == lev_class_count(p)
