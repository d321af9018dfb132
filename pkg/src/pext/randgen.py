"""Seeded random polynomials and multivectors for the identity suites.

Only ``random.Random`` instances are consumed, and candidate monomials are
enumerated in a fixed order, so a given seed reproduces bit-identical
objects on every run and platform.
"""

from __future__ import annotations

import random
from functools import lru_cache
from itertools import combinations

from .exterior import DiffForm, Multivector
from .polyring import Poly

__all__ = ["monomials_up_to", "random_poly", "random_multivector", "random_form"]

HEIGHT = 9


@lru_cache(maxsize=None)
def monomials_up_to(n: int, max_degree: int) -> tuple[tuple[int, ...], ...]:
    """All exponent vectors of total degree <= max_degree, degree-ascending."""
    out = []
    for d in range(max_degree + 1):
        for cut in combinations(range(d + n - 1), n - 1):
            # stars and bars
            prev, e = -1, []
            for c in cut:
                e.append(c - prev - 1)
                prev = c
            e.append(d + n - 2 - prev)
            out.append(tuple(e))
    return tuple(out)


def random_poly(
    rng: random.Random,
    n: int,
    max_degree: int = 2,
    density: float = 0.4,
    height: int = HEIGHT,
) -> Poly:
    """Each monomial of degree <= max_degree is kept with probability ``density``
    and given a nonzero integer coefficient in [-height, height]."""
    terms = {}
    for e in monomials_up_to(n, max_degree):
        if rng.random() < density:
            c = rng.randint(1, height) * rng.choice((1, -1))
            terms[e] = c
    return Poly(n, terms)


def random_multivector(
    rng: random.Random,
    n: int,
    k: int,
    max_degree: int = 2,
    density: float = 0.4,
    height: int = HEIGHT,
) -> Multivector:
    coeffs = {}
    for J in combinations(range(1, n + 1), k):
        p = random_poly(rng, n, max_degree, density, height)
        if p:
            coeffs[J] = p
    return Multivector(n, k, coeffs)


def random_form(
    rng: random.Random,
    n: int,
    k: int,
    max_degree: int = 2,
    density: float = 0.4,
    height: int = HEIGHT,
) -> DiffForm:
    coeffs = {}
    for J in combinations(range(1, n + 1), k):
        p = random_poly(rng, n, max_degree, density, height)
        if p:
            coeffs[J] = p
    return DiffForm(n, k, coeffs)
