"""Exact multivariate polynomials over the rationals.

Polynomials live in Q[x1, ..., xn] and are stored sparsely as a map from
exponent tuples to nonzero ``gmpy2.mpq`` coefficients.  Values are immutable
once built; every operation returns a new polynomial.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Integral, Rational as _RationalABC
from typing import Iterable, Iterator, Mapping, Sequence

from gmpy2 import mpq

__all__ = [
    "Rational",
    "Poly",
    "PolySyntaxError",
    "DimensionError",
    "to_rational",
    "grevlex_key",
    "lex_key",
    "grlex_key",
    "poly_parse",
    "format_rational",
]

Rational = type(mpq())
Exponent = tuple  # tuple[int, ...]


class DimensionError(ValueError):
    """Raised when operands live in different ambient dimensions."""


class PolySyntaxError(ValueError):
    """Malformed polynomial text; ``pos`` is the 0-based character offset."""

    def __init__(self, message: str, text: str, pos: int):
        self.text = text
        self.pos = pos
        pointer = " " * pos + "^"
        super().__init__(f"{message} at position {pos}\n  {text}\n  {pointer}")


def to_rational(c) -> Rational:
    """Coerce an int, Fraction, mpq or 'a/b' string to an exact rational."""
    if isinstance(c, Rational):
        return c
    if isinstance(c, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(c, (Integral, Fraction, _RationalABC)):
        return mpq(int(c.numerator), int(c.denominator))
    if isinstance(c, str):
        return mpq(Fraction(c))
    raise TypeError(f"cannot use {type(c).__name__} as an exact coefficient")


def format_rational(c: Rational) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


# Monomial orders as sort keys: a larger key means a larger monomial.
def grevlex_key(e: Exponent):
    return (sum(e), tuple(-x for x in reversed(e)))


def lex_key(e: Exponent):
    return e


def grlex_key(e: Exponent):
    return (sum(e), e)


class Poly:
    """A polynomial in ``n`` variables with exact rational coefficients.

    >>> p = Poly.parse("x1^2 + x2^2 + x3^2", 3)
    >>> p.partial(3)
    Poly('2*x3', n=3)
    """

    __slots__ = ("n", "terms", "_hash")

    def __init__(self, n: int, terms: Mapping[Exponent, object] | None = None):
        if n < 0:
            raise ValueError("ambient dimension must be non-negative")
        clean = {}
        if terms:
            for e, c in terms.items():
                e = tuple(int(x) for x in e)
                if len(e) != n:
                    raise DimensionError(f"monomial {e} does not have length {n}")
                if any(x < 0 for x in e):
                    raise ValueError(f"negative exponent in {e}")
                c = to_rational(c)
                if c:
                    clean[e] = clean.get(e, mpq(0)) + c
                    if not clean[e]:
                        del clean[e]
        self.n = n
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, n: int, terms: dict) -> "Poly":
        # trusted constructor: terms already has length-n keys and nonzero mpq values
        p = object.__new__(cls)
        p.n = n
        p.terms = terms
        p._hash = None
        return p

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, n: int) -> "Poly":
        return cls._raw(n, {})

    @classmethod
    def const(cls, c, n: int) -> "Poly":
        c = to_rational(c)
        return cls._raw(n, {(0,) * n: c} if c else {})

    @classmethod
    def one(cls, n: int) -> "Poly":
        return cls.const(1, n)

    @classmethod
    def var(cls, i: int, n: int) -> "Poly":
        """The coordinate function x_i (1-based)."""
        if not 1 <= i <= n:
            raise IndexError(f"variable x{i} out of range for n={n}")
        e = [0] * n
        e[i - 1] = 1
        return cls._raw(n, {tuple(e): mpq(1)})

    @classmethod
    def monomial(cls, e: Sequence[int], c=1) -> "Poly":
        return cls(len(e), {tuple(e): c})

    @classmethod
    def parse(cls, text: str, n: int) -> "Poly":
        return poly_parse(text, n)

    # -- basic queries ----------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and (0,) * self.n in self.terms)

    def constant_coeff(self) -> Rational:
        return self.terms.get((0,) * self.n, mpq(0))

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def __len__(self) -> int:
        return len(self.terms)

    def coeff(self, e: Sequence[int]) -> Rational:
        return self.terms.get(tuple(e), mpq(0))

    def sorted_terms(self, key=grevlex_key) -> list[tuple[Exponent, Rational]]:
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def leading_term(self, key=grevlex_key) -> tuple[Exponent, Rational]:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=key)
        return e, self.terms[e]

    # -- arithmetic -------------------------------------------------------
    def _check(self, other: "Poly") -> None:
        if self.n != other.n:
            raise DimensionError(f"ambient dimensions differ: {self.n} vs {other.n}")

    def _coerce(self, other) -> "Poly | None":
        if isinstance(other, Poly):
            self._check(other)
            return other
        try:
            return Poly.const(other, self.n)
        except TypeError:
            return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if len(other.terms) > len(self.terms):
            big, small = other.terms, self.terms
        else:
            big, small = self.terms, other.terms
        out = dict(big)
        for e, c in small.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = s + c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Poly._raw(self.n, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            if s is None:
                out[e] = -c
            else:
                s = s - c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Poly._raw(self.n, out)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            try:
                c = to_rational(other)
            except TypeError:
                return NotImplemented
            return self.scale(c)
        self._check(other)
        if not self.terms or not other.terms:
            return Poly._raw(self.n, {})
        out: dict = {}
        get = out.get
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = get(e, 0) + c1 * c2
        return Poly._raw(self.n, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def scale(self, c) -> "Poly":
        c = to_rational(c)
        if not c:
            return Poly._raw(self.n, {})
        return Poly._raw(self.n, {e: c * v for e, v in self.terms.items()})

    def mul_term(self, e: Exponent, c: Rational) -> "Poly":
        return Poly._raw(
            self.n, {tuple(a + b for a, b in zip(e0, e)): c * v for e0, v in self.terms.items()}
        )

    def __pow__(self, k: int) -> "Poly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Poly.one(self.n)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.n == other.n and self.terms == other.terms
        try:
            c = to_rational(other)
        except TypeError:
            return NotImplemented
        return self.terms == ({(0,) * self.n: c} if c else {})

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self.terms.items())))
        return self._hash

    # -- calculus & evaluation ------------------------------------------------
    def partial(self, i: int) -> "Poly":
        """Formal partial derivative with respect to x_i (1-based)."""
        if not 1 <= i <= self.n:
            raise IndexError(f"variable index {i} out of range for n={self.n}")
        k = i - 1
        out = {}
        for e, c in self.terms.items():
            a = e[k]
            if a:
                out[e[:k] + (a - 1,) + e[k + 1 :]] = c * a
        return Poly._raw(self.n, out)

    def gradient(self) -> list["Poly"]:
        return [self.partial(i) for i in range(1, self.n + 1)]

    def evaluate(self, point: Sequence) -> Rational:
        if len(point) != self.n:
            raise DimensionError(f"point has length {len(point)}, expected {self.n}")
        pt = [to_rational(a) for a in point]
        total = mpq(0)
        for e, c in self.terms.items():
            v = c
            for a, k in zip(pt, e):
                if k:
                    v *= a**k
            total += v
        return total

    def weighted_degree(self, weights: Sequence[int]) -> int | None:
        """Common weighted degree of all terms, or None if inhomogeneous.

        The zero polynomial is assigned weighted degree 0.
        """
        if len(weights) != self.n:
            raise DimensionError(f"expected {self.n} weights, got {len(weights)}")
        degs = {sum(w * a for w, a in zip(weights, e)) for e in self.terms}
        if not degs:
            return 0
        return degs.pop() if len(degs) == 1 else None

    def exact_div(self, d: "Poly") -> "Poly | None":
        """Return q with self == q*d, or None when d does not divide self."""
        self._check(d)
        if not d.terms:
            raise ZeroDivisionError("division by the zero polynomial")
        if not self.terms:
            return Poly._raw(self.n, {})
        le, lc = d.leading_term()
        rest = [(e, c) for e, c in d.terms.items() if e != le]
        p = dict(self.terms)
        q = {}
        while p:
            e = max(p, key=grevlex_key)
            if any(a < b for a, b in zip(e, le)):
                # a single divisor is a Groebner basis, so a stuck term means d does not divide
                return None
            qe = tuple(a - b for a, b in zip(e, le))
            qc = p.pop(e) / lc
            q[qe] = qc
            for e2, c2 in rest:
                m = tuple(a + b for a, b in zip(qe, e2))
                v = p.get(m, 0) - qc * c2
                if v:
                    p[m] = v
                else:
                    p.pop(m, None)
        return Poly._raw(self.n, q)

    def divides(self, other: "Poly") -> bool:
        return other.exact_div(self) is not None

    # -- printing -----------------------------------------------------------
    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for idx, (e, c) in enumerate(self.sorted_terms()):
            mono = "*".join(
                f"x{i + 1}" if a == 1 else f"x{i + 1}^{a}" for i, a in enumerate(e) if a
            )
            neg = c < 0
            a = -c if neg else c
            if not mono:
                body = format_rational(a)
            elif a == 1:
                body = mono
            else:
                body = f"{format_rational(a)}*{mono}"
            if idx == 0:
                parts.append(f"-{body}" if neg else body)
            else:
                parts.append(f"- {body}" if neg else f"+ {body}")
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"Poly({str(self)!r}, n={self.n})"

    def __iter__(self) -> Iterator[tuple[Exponent, Rational]]:
        return iter(self.terms.items())


def poly_sum(polys: Iterable[Poly], n: int) -> Poly:
    out: dict = {}
    for p in polys:
        for e, c in p.terms.items():
            out[e] = out.get(e, 0) + c
    return Poly._raw(n, {e: c for e, c in out.items() if c})


# --------------------------------------------------------------------------
# Parsing
#
#   expression := ['+'|'-'] term (('+'|'-') term)*
#   term       := factor ('*' factor)*
#   factor     := integer ['/' posint] | var ['^' posint] | '(' expression ')' ['^' posint]
#   var        := 'x' posint
# --------------------------------------------------------------------------

_SYMBOLS = set("+-*/^()")


def _tokenize(text: str, extra_prefixes: str = "") -> list[tuple[str, str, int]]:
    tokens = []
    i, L = 0, len(text)
    while i < L:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < L and text[j].isdigit():
                j += 1
            tokens.append(("int", text[i:j], i))
            i = j
        elif ch == "x" or ch in extra_prefixes:
            j = i + 1
            while j < L and text[j].isdigit():
                j += 1
            if j == i + 1:
                raise PolySyntaxError(f"expected an index after {ch!r}", text, i)
            tokens.append((ch, text[i + 1 : j], i))
            i = j
        elif ch in _SYMBOLS:
            tokens.append((ch, ch, i))
            i += 1
        else:
            raise PolySyntaxError(f"unexpected character {ch!r}", text, i)
    tokens.append(("end", "", L))
    return tokens


class _PolyParser:
    prefixes = ""

    def __init__(self, text: str, n: int):
        self.text = text
        self.n = n
        self.tokens = _tokenize(text, self.prefixes)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind: str | None = None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            want = "end of input" if kind == "end" else repr(kind)
            got = "end of input" if tok[0] == "end" else repr(tok[1])
            raise PolySyntaxError(f"expected {want}, found {got}", self.text, tok[2])
        self.i += 1
        return tok

    def error(self, message: str, tok=None):
        tok = tok or self.peek()
        return PolySyntaxError(message, self.text, tok[2])

    def posint(self) -> int:
        tok = self.take("int")
        v = int(tok[1])
        if v <= 0:
            raise self.error("expected a positive integer", tok)
        return v

    def parse(self) -> Poly:
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        p = self.expression()
        self.take("end")
        return p

    def expression(self) -> Poly:
        sign = 1
        if self.peek()[0] in "+-":
            sign = -1 if self.take()[0] == "-" else 1
        acc = self.term().scale(sign)
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self) -> Poly:
        acc = self.factor()
        while self.peek()[0] == "*":
            self.take()
            acc = acc * self.factor()
        return acc

    def factor(self) -> Poly:
        tok = self.peek()
        kind = tok[0]
        if kind == "int":
            self.take()
            num = int(tok[1])
            if self.peek()[0] == "/":
                self.take()
                den = self.posint()
                return Poly.const(mpq(num, den), self.n)
            return Poly.const(num, self.n)
        if kind == "x":
            self.take()
            idx = int(tok[1])
            if not 1 <= idx <= self.n:
                raise self.error(f"variable x{idx} out of range for n={self.n}", tok)
            p = Poly.var(idx, self.n)
            if self.peek()[0] == "^":
                self.take()
                p = p ** self.posint()
            return p
        if kind == "(":
            self.take()
            p = self.expression()
            self.take(")")
            if self.peek()[0] == "^":
                self.take()
                p = p ** self.posint()
            return p
        if kind == "end":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected {tok[1]!r}")


def poly_parse(text: str, n: int) -> Poly:
    """Parse polynomial text such as ``"1/2*x1*x2 - x3"`` in ``n`` variables."""
    return _PolyParser(text, n).parse()
