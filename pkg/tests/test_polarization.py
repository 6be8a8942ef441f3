import pytest
from hypothesis import given
from hypothesis import strategies as st

from paramod.errors import InvalidInputError, InvalidPolarizationError
from paramod.polarization import (
    from_quotients,
    is_square_free,
    make_polarization,
    parse_polarization,
    prime_factors,
)

quotients = st.lists(st.integers(1, 12), min_size=0, max_size=4)


def test_quotients_of_1_4_24():
    assert make_polarization((1, 4, 24)).d == (4, 6)


def test_normalization_divides_by_first_entry():
    assert make_polarization((2, 8, 48)).e == (1, 4, 24)


def test_quotients_of_1_2_6():
    assert make_polarization((1, 2, 6)).d == (2, 3)


@pytest.mark.parametrize(
    "i,j,value", [(1, 2, 24), (2, 1, 1), (2, 2, 6), (1, 0, 1), (3, 2, 1), (1, 1, 4)]
)
def test_range_products(i, j, value):
    assert make_polarization((1, 4, 24)).dsum(i, j) == value


@pytest.mark.parametrize("i,j", [(0, 1), (4, 1), (1, 3), (1, -1)])
def test_range_product_index_errors(i, j):
    with pytest.raises(InvalidInputError):
        make_polarization((1, 4, 24)).dsum(i, j)


@pytest.mark.parametrize(
    "e,flags", [((1, 4, 24), (False, False)), ((1, 2, 6), (True, True)), ((1, 2, 4), (True, False))]
)
def test_classify(e, flags):
    assert make_polarization(e).classify() == flags


@pytest.mark.parametrize("bad", [(), (1, 3, 4), (0, 1), (1, -2), (1, 2.0), (True, 2)])
def test_invalid_types(bad):
    with pytest.raises(InvalidPolarizationError):
        make_polarization(bad)


@given(quotients)
def test_range_product_splits(d):
    p = from_quotients(d)
    g = p.g
    for i in range(1, g):
        for j in range(i, g):
            for k in range(i, j):
                assert p.dsum(i, k) * p.dsum(k + 1, j) == p.dsum(i, j)


@given(quotients, st.integers(1, 5))
def test_normalization_idempotent(d, scale):
    p = from_quotients(d)
    scaled = make_polarization(tuple(scale * x for x in p.e))
    assert scaled == p
    assert make_polarization(scaled.e) == scaled


@given(quotients)
def test_classification_matches_definition(d):
    p = from_quotients(d)
    sq = all(all(x % (q * q) for q in range(2, x + 1)) for x in p.d)
    assert p.square_free == sq
    from math import gcd

    cop = all(gcd(a, b) == 1 for n, a in enumerate(p.d) for b in p.d[n + 1:])
    assert p.coprime == cop


def test_genus_one_is_allowed():
    p = make_polarization((5,))
    assert p.g == 1 and p.d == () and p.total == 1
    assert p.classify() == (True, True)


def test_text_round_trip():
    p = parse_polarization("1, 4,24")
    assert str(p) == "1,4,24" and parse_polarization(str(p)) == p
    with pytest.raises(InvalidPolarizationError):
        parse_polarization("1,x")


def test_sub_and_restrict():
    p = make_polarization((1, 2, 6, 30))
    assert p.sub(2).e == (1, 3, 15)
    assert p.sub(4).e == (1,)
    assert p.restrict((1, 3)).e == (1, 6)
    with pytest.raises(InvalidInputError):
        p.sub(5)


def test_number_helpers():
    assert prime_factors(360) == (2, 3, 5)
    assert prime_factors(1) == ()
    assert is_square_free(30) and not is_square_free(12)
