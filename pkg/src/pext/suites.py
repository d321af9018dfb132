"""Randomized identity suites driven by ``pext verify``.

Each suite is a pair: ``draw`` builds a case from a seeded ``random.Random``
and ``check`` decides it.  A failing case is serialized as a problem file
that ``replay`` turns back into the same objects, so counterexamples can be
re-run in isolation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Any, Callable

from . import exterior as ex
from .corpus import CORPUS, three_variable_entries
from .exterior import DiffForm, Multivector
from .extension import (
    InternalConsistencyError,
    _koszul_gb,
    casimir_check,
    check_jacobi_mod,
    decompose,
    extend_dim3,
    freedom_in_X2,
    koszul_columns,
    obstruction_dim4,
    obstruction_general,
)
from .groebner import FreeModuleElement, module_solve
from .polyring import Poly
from .randgen import random_form, random_multivector, random_poly

__all__ = ["Suite", "SUITES", "run_suite", "replay", "case_to_doc", "case_from_doc"]

_QUADRIC4 = Poly.parse("x1^2 + x2^2 + x3^2 + x4^2", 4)
_ROUND_TRIP = ("A1", "A2", "A3")


@dataclass(frozen=True)
class Suite:
    draw: Callable[[random.Random], dict]
    check: Callable[[dict], bool]


def _sgn(e: int) -> int:
    return -1 if e % 2 else 1


def _n_k(rng: random.Random) -> tuple[int, int]:
    n = rng.choice((2, 3, 4))
    return n, rng.randint(0, n)


def _degrees(rng: random.Random, n: int, count: int) -> list[int]:
    # keep the bracket degree sum(d) - count + 1 within range
    while True:
        ds = [rng.randint(0, 2) for _ in range(count)]
        if sum(ds) - count + 1 <= n:
            return ds


def _entry_phi(name: str) -> Poly:
    return next(e.phi for e in CORPUS if e.name == name)


# --- complexes -------------------------------------------------------------


def _draw_mv_phi(rng):
    n, k = _n_k(rng)
    return {"n": n, "phi": random_poly(rng, n, 3), "A": random_multivector(rng, n, k, 3)}


def _draw_mv(rng):
    n, k = _n_k(rng)
    return {"n": n, "A": random_multivector(rng, n, k, 3)}


def _draw_form(rng):
    n, k = _n_k(rng)
    return {"n": n, "A": random_form(rng, n, k, 3)}


def _draw_form_phi(rng):
    n, k = _n_k(rng)
    return {"n": n, "phi": random_poly(rng, n, 3), "A": random_form(rng, n, k, 3)}


def _intertwines(c):
    A, phi = c["A"], c["phi"]
    sign = 1 if A.n % 2 else -1
    lhs = ex.flat(ex.d_phi(A, phi)).scale(sign)
    rhs = ex.koszul_d_form(ex.flat(A).scale(sign), phi)
    return lhs == rhs


# --- Schouten bracket ------------------------------------------------------


def _draw_koszul_pair(rng):
    n = rng.choice((2, 3, 4))
    a = rng.randint(0, n)
    b = rng.randint(0, n + 1 - a) if a else rng.randint(0, n)
    return {"n": n, "A": random_multivector(rng, n, a, 2), "B": random_multivector(rng, n, b, 2)}


def _draw_pair(rng):
    n = rng.choice((2, 3, 4))
    a, b = _degrees(rng, n, 2)
    return {"n": n, "A": random_multivector(rng, n, a, 2), "B": random_multivector(rng, n, b, 2)}


def _draw_triple(max_degree):
    def draw(rng):
        n = rng.choice((3, 4))
        ds = _degrees(rng, n, 3)
        A, B, C = (random_multivector(rng, n, d, max_degree) for d in ds)
        return {"n": n, "A": A, "B": B, "C": C}

    return draw


def _antisymmetric(c):
    A, B = c["A"], c["B"]
    return ex.schouten(A, B) == ex.schouten(B, A).scale(-_sgn((A.degree - 1) * (B.degree - 1)))


def _leibniz(c):
    A, B, C = c["A"], c["B"], c["C"]
    lhs = ex.schouten(A, ex.wedge(B, C))
    rhs = ex.wedge(ex.schouten(A, B), C) + ex.wedge(B, ex.schouten(A, C)).scale(
        _sgn((A.degree - 1) * B.degree)
    )
    return lhs == rhs


def _graded_jacobi(c):
    A, B, C = c["A"], c["B"], c["C"]
    a, b, k = A.degree, B.degree, C.degree
    S = ex.schouten
    total = (
        S(A, S(B, C)).scale(_sgn((a - 1) * (k - 1)))
        + S(B, S(C, A)).scale(_sgn((b - 1) * (a - 1)))
        + S(C, S(A, B)).scale(_sgn((k - 1) * (b - 1)))
    )
    return total.is_zero()


def _draw_bivector(rng):
    n = rng.choice((3, 4))
    return {"n": n, "A": random_multivector(rng, n, 2, 2)}


def _jacobiator_matches(c):
    J = ex.jacobiator(c["A"])
    return all(
        s == J.bracket_square.coeff(ijk).scale(ex.JACOBI_CONSTANT) for ijk, s in J.triple_sums.items()
    )


# --- Poisson structures and extensions ----------------------------------------


def _draw_lichnerowicz(rng):
    entry = rng.choice(three_variable_entries())
    k = rng.randint(0, 2)
    return {"n": 3, "phi": entry.phi, "f": random_poly(rng, 3, 2), "A": random_multivector(rng, 3, k, 2)}


def _lichnerowicz_squares(c):
    pi = extend_dim3(c["phi"], c["f"]).beta
    A = c["A"]
    return ex.lichnerowicz_d(ex.lichnerowicz_d(A, pi), pi).is_zero()


def _draw_extend(rng):
    entry = rng.choice(three_variable_entries())
    return {"n": 3, "phi": entry.phi, "f": random_poly(rng, 3, 3)}


def _extends(c):
    phi = c["phi"]
    res = extend_dim3(phi, c["f"])
    return res.is_poisson and casimir_check(res.beta, phi) and bool(check_jacobi_mod(res.beta, phi))


def _draw_dim4(rng):
    return {"n": 4, "phi": _QUADRIC4, "X3": random_multivector(rng, 4, 3, 2)}


def _dim4_agrees(c):
    try:
        dim4 = obstruction_dim4(c["X3"], c["phi"])
    except InternalConsistencyError:
        return False
    return dim4.satisfied == obstruction_general(c["X3"], c["phi"]).satisfied


def _draw_round_trip(rng):
    phi = _entry_phi(rng.choice(_ROUND_TRIP))
    return {"n": 3, "phi": phi, "X3": random_multivector(rng, 3, 3, 2), "X2": random_multivector(rng, 3, 2, 2)}


def _round_trips(c):
    phi, X3, X2 = c["phi"], c["X3"], c["X2"]
    beta = ex.d_phi(X3, phi) + X2.scale(phi)
    dec = decompose(beta, phi)
    return dec.reassemble() == beta and ex.d_phi(dec.X3 - X3, phi).exact_div(phi) is not None


def _draw_freedom(rng):
    phi = _entry_phi(rng.choice(_ROUND_TRIP))
    X3 = random_multivector(rng, 3, 3, 2)
    return {"n": 3, "phi": phi, "X3": X3, "X2": random_multivector(rng, 3, 2, 2)}


def _free_in_x2(c):
    phi, X3 = c["phi"], c["X3"]
    dec = decompose(ex.d_phi(X3, phi), phi)
    try:
        freedom_in_X2(dec, phi, c["X2"])
    except InternalConsistencyError:
        return False
    return True


def _draw_exact(rng):
    entry = rng.choice(CORPUS)
    n = entry.n
    k = rng.randint(1, n - 1)
    return {"n": n, "phi": entry.phi, "A": ex.d_phi(random_multivector(rng, n, k + 1, 2), entry.phi)}


def _lifts(c):
    # every d_phi-boundary of degree k < n must lift back along d_phi
    A, phi = c["A"], c["phi"]
    n, k = A.n, A.degree
    target = FreeModuleElement(A.vector(), n)
    return module_solve(koszul_columns(phi, k + 1), target, gb=_koszul_gb(phi, k + 1)) is not None


SUITES: dict[str, Suite] = {
    "dphi-squared": Suite(_draw_mv_phi, lambda c: ex.d_phi(ex.d_phi(c["A"], c["phi"]), c["phi"]).is_zero()),
    "divergence-squared": Suite(_draw_mv, lambda c: ex.divergence(ex.divergence(c["A"])).is_zero()),
    "de-rham-squared": Suite(_draw_form, lambda c: ex.de_rham_d(ex.de_rham_d(c["A"])).is_zero()),
    "koszul-form-squared": Suite(
        _draw_form_phi, lambda c: ex.koszul_d_form(ex.koszul_d_form(c["A"], c["phi"]), c["phi"]).is_zero()
    ),
    "intertwining": Suite(_draw_mv_phi, _intertwines),
    "divergence-transport": Suite(_draw_mv, lambda c: ex.divergence(c["A"]) == ex.divergence_transported(c["A"])),
    "koszul-formula": Suite(
        _draw_koszul_pair,
        lambda c: ex.schouten_via_koszul(c["A"], c["B"]) == ex.schouten(c["A"], c["B"]).scale(ex.KOSZUL_SIGN),
    ),
    "schouten-antisymmetry": Suite(_draw_pair, _antisymmetric),
    "schouten-leibniz": Suite(_draw_triple(2), _leibniz),
    "schouten-jacobi": Suite(_draw_triple(1), _graded_jacobi),
    "jacobiator": Suite(_draw_bivector, _jacobiator_matches),
    "lichnerowicz": Suite(_draw_lichnerowicz, _lichnerowicz_squares),
    "extend-dim3": Suite(_draw_extend, _extends),
    "dim4-identity": Suite(_draw_dim4, _dim4_agrees),
    "round-trip": Suite(_draw_round_trip, _round_trips),
    "freedom-x2": Suite(_draw_freedom, _free_in_x2),
    "exactness": Suite(_draw_exact, _lifts),
}


# --- serialization -----------------------------------------------------------------


def case_to_doc(suite: str, case: dict) -> dict:
    """A problem file holding ``case``; X3/X2 use the plain literal form."""
    doc: dict[str, Any] = {"command": "verify", "suite": suite}
    for key, val in case.items():
        if isinstance(val, Poly):
            doc[key] = str(val)
        elif key in ("X3", "X2"):
            doc[key] = val.to_literal()
        elif isinstance(val, ex._Graded):
            kind = "form" if isinstance(val, DiffForm) else "multivector"
            doc[key] = {"kind": kind, "degree": val.degree, "terms": val.to_literal()}
        else:
            doc[key] = val
    return doc


def case_from_doc(doc: dict) -> dict:
    n = doc["n"]
    case: dict[str, Any] = {"n": n}
    for key in ("phi", "f"):
        if key in doc:
            case[key] = Poly.parse(doc[key], n)
    for key, degree in (("X3", 3), ("X2", 2)):
        if key in doc:
            case[key] = Multivector.from_literal(doc[key], n, degree)
    for key in ("A", "B", "C"):
        if key in doc:
            d = doc[key]
            cls = DiffForm if d.get("kind") == "form" else Multivector
            case[key] = cls.from_literal(d["terms"], n, d["degree"])
    return case


def replay(doc: dict) -> bool:
    """Re-run the identity of a saved case; True when it holds."""
    return SUITES[doc["suite"]].check(case_from_doc(doc))


def run_suite(name: str, seed: int, count: int) -> dict:
    """Run ``count`` cases of suite ``name``; the result depends only on the arguments."""
    if name not in SUITES:
        raise KeyError(name)
    suite = SUITES[name]
    rng = random.Random(seed)
    failures = []
    for i in range(count):
        case = suite.draw(rng)
        if not suite.check(case):
            doc = case_to_doc(name, case)
            doc["case"] = i
            failures.append(doc)
    return {"suite": name, "seed": seed, "count": count, "passed": count - len(failures), "failures": failures}
