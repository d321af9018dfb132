"""Problem files and reports: JSON documents with polynomials embedded as text.

A problem file looks like::

    {"n": 3,
     "phi": "x1^2 + x2^2 + x3^2",
     "bracket": {"1,2": "2*x3", "2,3": "2*x1", "3,1": "2*x2"},
     "f": "1",
     "X3": [{"index": [1, 2, 3], "coeff": "1"}]}

Reports echo the inputs and carry verdicts and witnesses; every witness
is stored in the same literal form so ``recheck_report`` can re-parse it
and re-verify the identity it claims.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any

from .exterior import Multivector, d_phi, divergence, schouten, wedge
from .extension import milnor_cached
from .polyring import Poly, PolySyntaxError

__all__ = [
    "SchemaError",
    "ProblemFile",
    "load_problem",
    "parse_problem",
    "mv_to_json",
    "mv_from_json",
    "dump_report",
    "recheck_report",
]


class SchemaError(ValueError):
    """The document does not match the problem-file schema."""


_KNOWN = {"n", "phi", "bracket", "f", "X3", "X2", "command", "name", "max_degree", "seed", "count", "suite", "A", "B", "C", "case", "entries"}
_PAIR = re.compile(r"^\s*(\d+)\s*,\s*(\d+)\s*$")


@dataclass
class ProblemFile:
    n: int
    phi: Poly | None = None
    raw_bracket: dict[tuple[int, int], Poly] | None = None
    f: Poly | None = None
    X3: Multivector | None = None
    X2: Multivector | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def echo(self) -> dict:
        d: dict = {"n": self.n}
        if self.phi is not None:
            d["phi"] = str(self.phi)
        if self.raw_bracket is not None:
            d["bracket"] = {f"{i},{j}": str(p) for (i, j), p in sorted(self.raw_bracket.items())}
        if self.f is not None:
            d["f"] = str(self.f)
        if self.X3 is not None:
            d["X3"] = self.X3.to_literal()
        if self.X2 is not None:
            d["X2"] = self.X2.to_literal()
        d.update(self.extra)
        return d


def _pair(key: str, n: int) -> tuple[int, int]:
    m = _PAIR.match(key)
    if m:
        i, j = int(m.group(1)), int(m.group(2))
    elif key.isdigit() and len(key) == 2:
        i, j = int(key[0]), int(key[1])
    else:
        raise SchemaError(f"bracket key {key!r} is not of the form 'i,j'")
    if not (1 <= i <= n and 1 <= j <= n) or i == j:
        raise SchemaError(f"bracket key {key!r} out of range for n={n}")
    return i, j


def _poly(doc: dict, name: str, n: int) -> Poly | None:
    if name not in doc:
        return None
    if not isinstance(doc[name], str):
        raise SchemaError(f"field {name!r} must be a polynomial string")
    return Poly.parse(doc[name], n)


def _mv(doc: dict, name: str, n: int, degree: int) -> Multivector | None:
    if name not in doc:
        return None
    val = doc[name]
    if isinstance(val, str):
        mv = Multivector.parse(val, n)
    elif isinstance(val, list):
        for item in val:
            if not isinstance(item, dict) or set(item) != {"index", "coeff"}:
                raise SchemaError(f"{name} entries must be objects with 'index' and 'coeff'")
            if not isinstance(item["index"], list) or not all(isinstance(i, int) for i in item["index"]):
                raise SchemaError(f"{name} index must be a list of integers")
            if any(not 1 <= i <= n for i in item["index"]):
                raise SchemaError(f"{name} index {item['index']} out of range for n={n}")
        try:
            mv = Multivector.from_literal(val, n, degree)
        except PolySyntaxError:
            raise
        except (KeyError, ValueError) as exc:
            raise SchemaError(f"{name}: {exc}") from None
    else:
        raise SchemaError(f"field {name!r} must be a multivector literal")
    if mv and mv.degree != degree:
        raise SchemaError(f"{name} must have degree {degree}, got {mv.degree}")
    if not mv:
        mv = Multivector.zero(n, degree)
    return mv


def parse_problem(doc: Any) -> ProblemFile:
    """Validate a decoded JSON document against the problem-file schema."""
    if not isinstance(doc, dict):
        raise SchemaError("problem file must be a JSON object")
    unknown = set(doc) - _KNOWN
    if unknown:
        raise SchemaError(f"unknown fields: {sorted(unknown)}")
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise SchemaError("field 'n' must be a positive integer")
    prob = ProblemFile(n=n)
    prob.phi = _poly(doc, "phi", n)
    prob.f = _poly(doc, "f", n)
    if "bracket" in doc:
        br = doc["bracket"]
        if not isinstance(br, dict):
            raise SchemaError("field 'bracket' must be an object mapping 'i,j' to polynomials")
        prob.raw_bracket = {}
        seen: dict[frozenset, str] = {}
        for key, val in br.items():
            i, j = _pair(key, n)
            pair = frozenset((i, j))
            if pair in seen:
                raise SchemaError(f"bracket pair {key!r} duplicates {seen[pair]!r}")
            seen[pair] = key
            if not isinstance(val, str):
                raise SchemaError(f"bracket value for {key!r} must be a polynomial string")
            p = Poly.parse(val, n)
            if i > j:
                i, j, p = j, i, -p
            prob.raw_bracket[(i, j)] = p
    prob.X3 = _mv(doc, "X3", n, 3)
    prob.X2 = _mv(doc, "X2", n, 2)
    for key in ("command", "name", "max_degree", "seed", "count", "suite", "A", "B", "C", "case", "entries"):
        if key in doc:
            prob.extra[key] = doc[key]
    return prob


def load_problem(path: str) -> ProblemFile:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_problem(doc)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


def mv_to_json(A: Multivector) -> dict:
    return {"degree": A.degree, "terms": A.to_literal(), "text": A.to_text()}


def mv_from_json(d: dict, n: int) -> Multivector:
    return Multivector.from_literal(d["terms"], n, d["degree"])


def dump_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)


def _phi_of(report: dict) -> tuple[int, Poly]:
    inputs = report["inputs"]
    n = inputs["n"]
    return n, Poly.parse(inputs["phi"], n)


def recheck_report(report: dict) -> list[str]:
    """Re-verify every witness a report claims; returns a list of problems."""
    problems: list[str] = []
    cmd = report.get("command")
    w = report.get("witnesses", {})
    v = report.get("verdicts", {})

    def need(cond: bool, what: str) -> None:
        if not cond:
            problems.append(what)

    if cmd in ("check", "decompose", "extend") and "phi" in report.get("inputs", {}):
        n, phi = _phi_of(report)
        if "beta" in w:
            beta = mv_from_json(w["beta"], n)
            ham = v.get("hamiltonian")
            if ham is not None:
                divisible = d_phi(beta, phi).exact_div(phi) is not None
                need(divisible == ham["ok"], "hamiltonian verdict does not re-verify")
                if not ham["ok"]:
                    c = Poly.parse(ham["coefficient"], n)
                    need(c.exact_div(phi) is None, "hamiltonian witness coefficient is divisible")
            jac = v.get("jacobi_mod")
            if jac is not None:
                sq = schouten(beta, beta) if beta else beta
                need((sq.exact_div(phi) is not None) == jac["ok"], "jacobi verdict does not re-verify")
            if "is_poisson" in v:
                need(schouten(beta, beta).is_zero() == v["is_poisson"], "is_poisson does not re-verify")
            if "casimir" in v:
                need(d_phi(beta, phi).is_zero() == v["casimir"], "casimir verdict does not re-verify")
        if {"X3", "X2"} <= set(w):
            X3 = mv_from_json(w["X3"], n)
            X2 = mv_from_json(w["X2"], n)
            beta = mv_from_json(w["beta"], n)
            if cmd == "extend":
                # the emitted beta is d_phi X3; an input bracket agrees with it modulo phi
                need(d_phi(X3, phi) == beta, "beta != d_phi(X3)")
                if "input_beta" in w:
                    diff = beta - mv_from_json(w["input_beta"], n)
                    need(diff.exact_div(phi) is not None, "beta differs from the input modulo phi")
            else:
                need(d_phi(X3, phi) + X2.scale(phi) == beta, "beta != d_phi(X3) + phi*X2")
            if "X1" in w:
                X1 = mv_from_json(w["X1"], n)
                need(d_phi(X2, phi) == X1, "X1 != d_phi(X2)")
    elif cmd == "obstruction":
        n, phi = _phi_of(report)
        X3 = mv_from_json(w["X3"], n)
        T = schouten(X3, d_phi(X3, phi))
        need(T == mv_from_json(w["bracket_term"], n), "bracket term does not re-verify")
        W = wedge(divergence(X3), d_phi(X3, phi))
        need(T == W.scale(-2), "[X3, d_phi X3] != -2 D(X3)^d_phi(X3)")
        if v.get("satisfied"):
            Y4 = mv_from_json(w["Y4"], n)
            Y5 = mv_from_json(w["Y5"], n)
            need(d_phi(Y5, phi) + Y4.scale(phi) == T, "witness (Y4, Y5) does not reproduce the bracket")
        else:
            need(W.exact_div(phi) is None, "claimed non-membership but D(X3)^d_phi(X3) is phi-divisible")
    elif cmd == "milnor":
        n, phi = _phi_of(report)
        data = milnor_cached(phi)
        need(data.is_isolated == v["is_isolated"], "isolatedness does not re-verify")
        if data.is_isolated:
            need(data.milnor_number == v["milnor_number"], "Milnor number does not re-verify")
            need(
                [list(e) for e in data.standard_monomials] == w["standard_monomials"],
                "standard monomials do not re-verify",
            )
    return problems
