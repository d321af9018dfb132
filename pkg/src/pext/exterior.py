"""Polyvector fields and differential forms with polynomial coefficients.

A degree-k multivector is stored on the basis d_{i1}^...^d_{ik} (with
i1 < ... < ik) of wedge products of coordinate partials; a degree-k form on
the basis dx_{i1}^...^dx_{ik}.  Indices are 1-based throughout.

Sign conventions (validated by the test-suite, not by notation):

* ``left_contract(A, i)`` removes d_i after moving it to the front,
  ``right_contract(A, i)`` after moving it to the back.
* ``d_phi(A) = (-1)^(n+1) * sum_i (dphi/dx_i) * left_contract(A, i)``.  The
  dimension sign makes ``F = (-1)^(n+1) flat`` a chain map to
  ``(forms, . ^ dphi)`` in every dimension; it is +1 for odd ``n``.
* ``divergence(A) = sum_i d/dx_i right_contract(A, i)``, which is exactly
  ``sharp o d o flat``.
* ``schouten`` extends [V, f] = V(f) and the Lie bracket of vector fields,
  and equals Koszul's expression
  ``(-1)^b D(A^B) - D(A)^B - (-1)^b A^D(B)`` for ``B`` of degree ``b``.
* For a bivector ``pi`` the generator Jacobi sums satisfy
  ``Jac(x_i, x_j, x_k) = JACOBI_CONSTANT * [pi, pi]_{ijk}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Mapping, Sequence

from gmpy2 import mpq

from .polyring import DimensionError, Poly, PolySyntaxError, _PolyParser, format_rational, to_rational

__all__ = [
    "Multivector",
    "DiffForm",
    "JACOBI_CONSTANT",
    "KOSZUL_SIGN",
    "permutation_sign",
    "sort_index",
    "complement",
    "wedge",
    "left_contract",
    "right_contract",
    "d_phi",
    "de_rham_d",
    "koszul_d_form",
    "flat",
    "sharp",
    "divergence",
    "divergence_transported",
    "schouten",
    "schouten_via_koszul",
    "lichnerowicz_d",
    "hamiltonian_vector_field",
    "jacobiator",
    "Jacobiator",
    "apply_multivector",
    "pairing",
    "volume_form",
    "differential",
]

# Jac(x_i, x_j, x_k) = JACOBI_CONSTANT * [pi, pi]_(ijk); measured on formal
# coefficients in tests/test_exterior.py::test_jacobi_constant_formal.
JACOBI_CONSTANT = mpq(1, 2)
# schouten_via_koszul(A, B) == KOSZUL_SIGN * schouten(A, B) for all A, B.
KOSZUL_SIGN = 1


# ---------------------------------------------------------------------------
# Multi-index helpers
# ---------------------------------------------------------------------------


def permutation_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq``; 0 if it has a repeat."""
    s = list(seq)
    if len(set(s)) != len(s):
        return 0
    sign = 1
    for a in range(len(s)):
        for b in range(a + 1, len(s)):
            if s[a] > s[b]:
                sign = -sign
    return sign


def sort_index(seq: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Return ``(sign, sorted_index)``; sign is 0 for repeated indices."""
    return permutation_sign(seq), tuple(sorted(seq))


def complement(J: Sequence[int], n: int) -> tuple[int, ...]:
    """Indices of 1..n not in J, in increasing order."""
    s = set(J)
    return tuple(i for i in range(1, n + 1) if i not in s)


def _merge_sign(J: tuple, K: tuple) -> int:
    # sign of sorting the concatenation J + K of two increasing disjoint tuples
    inv = 0
    for k in K:
        for j in J:
            if j > k:
                inv += 1
    return -1 if inv & 1 else 1


# ---------------------------------------------------------------------------
# Graded objects
# ---------------------------------------------------------------------------


class _Graded:
    """Shared storage: ``coeffs`` maps increasing index tuples to nonzero Poly."""

    __slots__ = ("n", "degree", "coeffs")
    _token = "d"

    def __init__(self, n: int, degree: int, coeffs: Mapping[Sequence[int], Poly] | None = None):
        if degree < 0:
            raise ValueError("degree must be non-negative")
        clean: dict = {}
        for J, c in (coeffs or {}).items():
            J = tuple(int(j) for j in J)
            if len(J) != degree:
                raise ValueError(f"index {J} does not have length {degree}")
            if any(not 1 <= j <= n for j in J):
                raise IndexError(f"index {J} out of range for n={n}")
            if not isinstance(c, Poly):
                c = Poly.const(c, n)
            if c.n != n:
                raise DimensionError("coefficient lives in a different dimension")
            sign, K = sort_index(J)
            if not sign or not c:
                continue
            c = c if sign > 0 else -c
            if K in clean:
                c = clean[K] + c
                if not c:
                    del clean[K]
                    continue
            clean[K] = c
        self.n = n
        self.degree = degree
        self.coeffs = clean

    @classmethod
    def _raw(cls, n: int, degree: int, coeffs: dict):
        obj = object.__new__(cls)
        obj.n = n
        obj.degree = degree
        obj.coeffs = coeffs
        return obj

    @classmethod
    def zero(cls, n: int, degree: int):
        return cls._raw(n, degree, {})

    @classmethod
    def basis(cls, n: int, index: Sequence[int], coeff=1):
        c = coeff if isinstance(coeff, Poly) else Poly.const(coeff, n)
        return cls(n, len(index), {tuple(index): c})

    @classmethod
    def scalar(cls, p: Poly):
        return cls._raw(p.n, 0, {(): p} if p else {})

    # -- queries ---------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, index: Sequence[int]) -> Poly:
        sign, K = sort_index(index)
        c = self.coeffs.get(K)
        if c is None or not sign:
            return Poly.zero(self.n)
        return c if sign > 0 else -c

    def items(self):
        return sorted(self.coeffs.items())

    def indices(self) -> list[tuple[int, ...]]:
        return [tuple(J) for J in combinations(range(1, self.n + 1), self.degree)]

    def vector(self) -> list[Poly]:
        """Coefficients on the lexicographically ordered basis of this degree."""
        z = Poly.zero(self.n)
        return [self.coeffs.get(J, z) for J in self.indices()]

    @classmethod
    def from_vector(cls, n: int, degree: int, comps: Sequence[Poly]):
        idx = list(combinations(range(1, n + 1), degree))
        if len(idx) != len(comps):
            raise DimensionError(f"expected {len(idx)} components, got {len(comps)}")
        return cls._raw(n, degree, {J: c for J, c in zip(idx, comps) if c})

    def max_coeff_degree(self) -> int:
        return max((c.total_degree() for c in self.coeffs.values()), default=-1)

    # -- arithmetic ------------------------------------------------------
    def _check(self, other) -> None:
        if type(self) is not type(other):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if self.n != other.n:
            raise DimensionError(f"ambient dimensions differ: {self.n} vs {other.n}")

    def _check_same_degree(self, other) -> None:
        self._check(other)
        if self.degree != other.degree and self.coeffs and other.coeffs:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")

    def _degree_with(self, other) -> int:
        if self.degree == other.degree:
            return self.degree
        return self.degree if self.coeffs else other.degree

    def __add__(self, other):
        self._check_same_degree(other)
        out = dict(self.coeffs)
        for J, c in other.coeffs.items():
            v = out[J] + c if J in out else c
            if v:
                out[J] = v
            else:
                out.pop(J, None)
        return type(self)._raw(self.n, self._degree_with(other), out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return type(self)._raw(self.n, self.degree, {J: -c for J, c in self.coeffs.items()})

    def scale(self, p) -> "_Graded":
        """Multiply every coefficient by a polynomial or rational."""
        if not isinstance(p, Poly):
            p = Poly.const(p, self.n)
        elif p.n != self.n:
            raise DimensionError("scalar lives in a different dimension")
        out = {}
        for J, c in self.coeffs.items():
            v = p * c
            if v:
                out[J] = v
        return type(self)._raw(self.n, self.degree, out)

    def __mul__(self, other):
        if isinstance(other, _Graded):
            return NotImplemented
        return self.scale(other)

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, _Graded):
            return NotImplemented
        if type(self) is not type(other) or self.n != other.n:
            return False
        if not self.coeffs and not other.coeffs:
            return True
        return self.degree == other.degree and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.n, self.degree, frozenset(self.coeffs.items())))

    def map_coeffs(self, fn: Callable[[Poly], Poly]):
        out = {}
        for J, c in self.coeffs.items():
            v = fn(c)
            if v:
                out[J] = v
        return type(self)._raw(self.n, self.degree, out)

    def exact_div(self, d: Poly):
        """Coefficientwise exact division, or None if some coefficient is not divisible."""
        out = {}
        for J, c in self.coeffs.items():
            q = c.exact_div(d)
            if q is None:
                return None
            out[J] = q
        return type(self)._raw(self.n, self.degree, out)

    # -- text --------------------------------------------------------------
    def _basis_text(self, J: Sequence[int]) -> str:
        return "^".join(f"{self._token}{j}" for j in J)

    def to_text(self, order: Sequence[Sequence[int]] | None = None) -> str:
        """Render as e.g. ``2*x3 d1^d2 - 2*x2 d1^d3``.

        ``order`` lists the basis elements to print, possibly non-increasing
        (``(3, 1)`` prints ``d3^d1`` with the sign adjusted).
        """
        if self.degree == 0:
            return str(self.coeffs.get((), Poly.zero(self.n)))
        if order is None:
            order = [J for J, _ in self.items()]
        parts = []
        for J in order:
            c = self.coeff(J)
            if not c:
                continue
            parts.append((c, self._basis_text(J)))
        if not parts:
            return "0"
        out = []
        for idx, (c, b) in enumerate(parts):
            neg = len(c) == 1 and next(iter(c.terms.values())) < 0
            if neg:
                c = -c
            if c == 1:
                body = b
            elif len(c) == 1:
                body = f"{c} {b}"
            else:
                body = f"({c}) {b}"
            if idx == 0:
                out.append(f"-{body}" if neg else body)
            else:
                out.append(f"- {body}" if neg else f"+ {body}")
        return " ".join(out)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_text()!r}, n={self.n}, degree={self.degree})"

    # -- literal (JSON) form ------------------------------------------------
    def to_literal(self) -> list[dict]:
        return [{"index": list(J), "coeff": str(c)} for J, c in self.items()]

    @classmethod
    def from_literal(cls, items: Iterable[Mapping], n: int, degree: int | None = None):
        coeffs: dict = {}
        acc = []
        for item in items:
            J = tuple(int(j) for j in item["index"])
            c = Poly.parse(str(item["coeff"]), n)
            acc.append((J, c))
        degs = {len(J) for J, _ in acc}
        if len(degs) > 1:
            raise ValueError(f"mixed degrees in literal: {sorted(degs)}")
        if degs:
            d = degs.pop()
            if degree is not None and d != degree:
                raise ValueError(f"literal has degree {d}, expected {degree}")
            degree = d
        if degree is None:
            raise ValueError("degree of an empty literal must be given")
        out = cls(n, degree, {})
        for J, c in acc:
            out = out + cls(n, degree, {J: c})
        return out


class Multivector(_Graded):
    """Element of X^k: a skew k-derivation A_J d_J of Q[x1..xn].

    Zero multivectors may carry a degree above ``n`` (e.g. a 5-vector in
    dimension 4); nonzero ones always have ``degree <= n``.
    """

    __slots__ = ()
    _token = "d"

    @classmethod
    def parse(cls, text: str, n: int) -> "Multivector":
        return _MultivectorParser(text, n).parse_mv()


class DiffForm(_Graded):
    """Element of Omega^k: sum of f_J dx_J."""

    __slots__ = ()
    _token = "dx"


class _MultivectorParser(_PolyParser):
    """Polynomial grammar plus basis tokens: ``term := [factors ['*']] dI('^'dJ)*``."""

    prefixes = "d"

    def parse_mv(self) -> Multivector:
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        sign = 1
        if self.peek()[0] in "+-":
            sign = -1 if self.take()[0] == "-" else 1
        acc = self.mv_term().scale(sign)
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            t = self.mv_term()
            try:
                acc = acc + t if op == "+" else acc - t
            except ValueError as exc:
                raise self.error(str(exc)) from None
        self.take("end")
        return acc

    def basis(self) -> tuple[int, ...]:
        idx = []
        while True:
            tok = self.take("d")
            j = int(tok[1])
            if not 1 <= j <= self.n:
                raise self.error(f"basis index d{j} out of range for n={self.n}", tok)
            idx.append(j)
            if self.peek()[0] == "^" and self.tokens[self.i + 1][0] == "d":
                self.take()
                continue
            return tuple(idx)

    def mv_term(self) -> Multivector:
        if self.peek()[0] == "d":
            return Multivector.basis(self.n, self.basis())
        coeff = self.factor()
        while True:
            kind = self.peek()[0]
            if kind == "*":
                self.take()
                if self.peek()[0] == "d":
                    break
                coeff = coeff * self.factor()
            elif kind == "d":
                break
            else:
                return Multivector.scalar(coeff)
        return Multivector.basis(self.n, self.basis(), coeff)


# ---------------------------------------------------------------------------
# Algebra
# ---------------------------------------------------------------------------


def wedge(A: _Graded, B: _Graded) -> _Graded:
    """Exterior product; graded commutative, A^B = (-1)^(jk) B^A."""
    A._check(B)
    n = A.n
    deg = A.degree + B.degree
    out: dict = {}
    if deg <= n:
        for J, a in A.coeffs.items():
            sJ = set(J)
            for K, b in B.coeffs.items():
                if sJ.intersection(K):
                    continue
                L = tuple(sorted(J + K))
                v = a * b
                if _merge_sign(J, K) < 0:
                    v = -v
                if L in out:
                    v = out[L] + v
                if v:
                    out[L] = v
                else:
                    out.pop(L, None)
    return type(A)._raw(n, deg, out)


def left_contract(A: _Graded, i: int) -> _Graded:
    """Remove d_i from the front: d_i^d_J -> d_J."""
    out = {}
    for J, c in A.coeffs.items():
        if i in J:
            l = J.index(i)
            out[J[:l] + J[l + 1 :]] = -c if l & 1 else c
    return type(A)._raw(A.n, max(A.degree - 1, 0), out)


def right_contract(A: _Graded, i: int) -> _Graded:
    """Remove d_i from the back: d_J^d_i -> d_J."""
    k = A.degree
    out = {}
    for J, c in A.coeffs.items():
        if i in J:
            l = J.index(i)
            out[J[:l] + J[l + 1 :]] = -c if (k - 1 - l) & 1 else c
    return type(A)._raw(A.n, max(A.degree - 1, 0), out)


def _partial(A: _Graded, i: int) -> _Graded:
    return A.map_coeffs(lambda c: c.partial(i))


def _sum(terms: Iterable[_Graded], like: _Graded, degree: int) -> _Graded:
    acc = type(like)._raw(like.n, degree, {})
    for t in terms:
        if t:
            acc = acc + t
    return acc


def d_phi(A: Multivector, phi: Poly) -> Multivector:
    """Koszul differential X^k -> X^(k-1): contraction with dphi."""
    if A.n != phi.n:
        raise DimensionError(f"ambient dimensions differ: {A.n} vs {phi.n}")
    if A.degree == 0 or not A:
        return Multivector._raw(A.n, max(A.degree - 1, 0), {})
    grads = phi.gradient()
    out = _sum(
        (left_contract(A, i).scale(g) for i, g in enumerate(grads, 1) if g),
        A,
        A.degree - 1,
    )
    return out if A.n % 2 else -out


def divergence(A: Multivector) -> Multivector:
    """Divergence with respect to dx1^...^dxn."""
    if A.degree == 0 or not A:
        return Multivector._raw(A.n, max(A.degree - 1, 0), {})
    return _sum((_partial(right_contract(A, i), i) for i in range(1, A.n + 1)), A, A.degree - 1)


def differential(f: Poly) -> DiffForm:
    """df as a 1-form."""
    return DiffForm._raw(f.n, 1, {(i,): g for i, g in enumerate(f.gradient(), 1) if g})


def volume_form(n: int) -> DiffForm:
    return DiffForm._raw(n, n, {tuple(range(1, n + 1)): Poly.one(n)})


def de_rham_d(w: DiffForm) -> DiffForm:
    """Exterior derivative d(f dx_J) = sum_i df/dx_i dx_i ^ dx_J."""
    if not isinstance(w, DiffForm):
        raise TypeError("de_rham_d expects a DiffForm")
    n = w.n
    out: dict = {}
    if w.degree < n:
        for J, f in w.coeffs.items():
            for i in range(1, n + 1):
                if i in J:
                    continue
                g = f.partial(i)
                if not g:
                    continue
                pos = sum(1 for j in J if j < i)
                L = J[:pos] + (i,) + J[pos:]
                if pos & 1:
                    g = -g
                v = out[L] + g if L in out else g
                if v:
                    out[L] = v
                else:
                    out.pop(L, None)
    return DiffForm._raw(n, w.degree + 1, out)


def koszul_d_form(w: DiffForm, phi: Poly) -> DiffForm:
    """Koszul differential on forms: w -> w ^ dphi."""
    if w.n != phi.n:
        raise DimensionError(f"ambient dimensions differ: {w.n} vs {phi.n}")
    return wedge(w, differential(phi))


def flat(A: Multivector) -> DiffForm:
    """Contraction into the volume form: <flat(A), B> = <nu, A^B>."""
    n = A.n
    out = {}
    for J, c in A.coeffs.items():
        K = complement(J, n)
        out[K] = c if _merge_sign(J, K) > 0 else -c
    return DiffForm._raw(n, n - A.degree if A.degree <= n else 0, out)


def sharp(w: DiffForm) -> Multivector:
    """Inverse of ``flat``."""
    n = w.n
    out = {}
    for K, c in w.coeffs.items():
        J = complement(K, n)
        out[J] = c if _merge_sign(J, K) > 0 else -c
    return Multivector._raw(n, n - w.degree, out)


def divergence_transported(A: Multivector) -> Multivector:
    """sharp o d o flat, the divergence by its defining transport."""
    return sharp(de_rham_d(flat(A)))


def pairing(P: Multivector, w: DiffForm) -> Poly:
    """<P, w> = sum_J P_J w_J for P and w of the same degree."""
    if P.n != w.n:
        raise DimensionError("ambient dimensions differ")
    if P.degree != w.degree and P and w:
        raise ValueError("pairing needs equal degrees")
    acc = Poly.zero(P.n)
    for J, c in P.coeffs.items():
        d = w.coeffs.get(J)
        if d is not None:
            acc = acc + c * d
    return acc


def apply_multivector(P: Multivector, *fs: Poly) -> Poly:
    """Evaluate the k-derivation P on functions f1..fk."""
    if len(fs) != P.degree:
        raise ValueError(f"a {P.degree}-vector takes {P.degree} arguments")
    if P.degree == 0:
        return P.coeffs.get((), Poly.zero(P.n))
    forms = [differential(f) for f in fs]
    w = forms[0]
    for f in forms[1:]:
        w = wedge(w, f)
    return pairing(P, w)


def schouten(A: Multivector, B: Multivector) -> Multivector:
    """Schouten-Nijenhuis bracket.

    Uses the odd-coordinate formula
    [A, B] = sum_i rc_i(A) ^ d_i B - (-1)^((a-1)(b-1)) rc_i(B) ^ d_i A,
    with rc_i the right contraction and d_i the coefficientwise partial.
    """
    A._check(B)
    if not isinstance(A, Multivector):
        raise TypeError("schouten expects multivectors")
    n = A.n
    a, b = A.degree, B.degree
    deg = a + b - 1
    if deg < 0 or deg > n or (not A) or (not B):
        return Multivector._raw(n, max(deg, 0), {})
    sign = -1 if ((a - 1) * (b - 1)) & 1 else 1
    acc = Multivector._raw(n, deg, {})
    for i in range(1, n + 1):
        if a:
            rA = right_contract(A, i)
            if rA:
                dB = _partial(B, i)
                if dB:
                    acc = acc + wedge(rA, dB)
        if b:
            rB = right_contract(B, i)
            if rB:
                dA = _partial(A, i)
                if dA:
                    t = wedge(rB, dA)
                    acc = acc - t if sign > 0 else acc + t
    return acc


def schouten_via_koszul(A: Multivector, B: Multivector) -> Multivector:
    """Koszul's formula (-1)^b D(A^B) - D(A)^B - (-1)^b A^D(B), b = deg B."""
    A._check(B)
    n = A.n
    deg = max(A.degree + B.degree - 1, 0)
    s = -1 if B.degree & 1 else 1
    t1 = divergence(wedge(A, B))
    t2 = wedge(divergence(A), B)
    t3 = wedge(A, divergence(B))
    out = Multivector._raw(n, deg, {})
    for t, c in ((t1, s), (t2, -1), (t3, -s)):
        if t:
            out = out + (t if c > 0 else -t)
    return out


def lichnerowicz_d(A: Multivector, pi: Multivector) -> Multivector:
    """d_pi A = -[A, pi]."""
    if pi.degree != 2:
        raise ValueError(f"lichnerowicz_d needs a bivector, got degree {pi.degree}")
    return -schouten(A, pi)


def hamiltonian_vector_field(pi: Multivector, f: Poly) -> Multivector:
    """X_f = d_pi f = -[f, pi]; acts as X_f(g) = pi(f, g)."""
    return lichnerowicz_d(Multivector.scalar(f), pi)


@dataclass(frozen=True)
class Jacobiator:
    bracket_square: Multivector
    triple_sums: dict

    def vanishes(self) -> bool:
        return not self.bracket_square and not any(self.triple_sums.values())


def jacobiator(pi: Multivector) -> Jacobiator:
    """[pi, pi] together with the brute-force generator sums Jac(x_i, x_j, x_k)."""
    if pi.degree != 2 and pi:
        raise ValueError(f"jacobiator needs a bivector, got degree {pi.degree}")
    n = pi.n
    xs = [Poly.var(i, n) for i in range(1, n + 1)]
    br = {}

    def bracket(i: int, j: int) -> Poly:
        if (i, j) not in br:
            br[(i, j)] = pi.coeff((i, j)) if i != j else Poly.zero(n)
        return br[(i, j)]

    def pb(f: Poly, g: Poly) -> Poly:
        return apply_multivector(pi, f, g) if pi else Poly.zero(n)

    sums = {}
    for i, j, k in combinations(range(1, n + 1), 3):
        xi, xj, xk = xs[i - 1], xs[j - 1], xs[k - 1]
        sums[(i, j, k)] = (
            pb(xi, bracket(j, k)) + pb(xj, bracket(k, i)) + pb(xk, bracket(i, j))
        )
    sq = schouten(pi, pi) if pi else Multivector.zero(n, 3)
    return Jacobiator(sq, sums)
