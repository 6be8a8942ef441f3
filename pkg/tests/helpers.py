"""Shared test helpers."""

import random

from paramod.arith import gcd_all
from paramod.polarization import make_polarization


def pol(*e):
    return make_polarization(e)


def random_primitive(rng, g, bound=30):
    while True:
        v = tuple(rng.randint(-bound, bound) for _ in range(2 * g))
        if gcd_all(v) == 1:
            return v
