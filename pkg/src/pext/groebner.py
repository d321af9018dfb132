"""Groebner bases for polynomial ideals and submodules of free modules.

Everything runs on one engine: Buchberger's algorithm over sparse module
vectors, stored as dicts ``{(position, exponent): coefficient}``.  An ideal
is the rank-1 case.

Cofactors and syzygies come from the usual augmentation trick.  Each input
column ``c_i`` in ``R^r`` is extended to ``(c_i, e_i)`` in ``R^(r+m)`` and a
Groebner basis is computed with position-over-term order, the original
positions first.  Basis vectors with nonzero top part give a Groebner basis
of the column module together with representations.  Those with zero top
part give a Groebner basis of the syzygy module.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from gmpy2 import mpq

from .polyring import DimensionError, Poly

__all__ = [
    "MonomialOrder",
    "GREVLEX",
    "GroebnerBasis",
    "FreeModuleElement",
    "ModuleGB",
    "MilnorData",
    "NotAGroebnerBasis",
    "buchberger",
    "normal_form",
    "normal_form_with_cofactors",
    "milnor",
    "module_buchberger",
    "module_normal_form",
    "module_solve",
    "s_vectors_reduce_to_zero",
]


class NotAGroebnerBasis(AssertionError):
    """A certificate identity failed to hold; this always indicates a bug."""


# ---------------------------------------------------------------------------
# Orders
# ---------------------------------------------------------------------------


def _grevlex(e):
    return (-sum(e),) + e[::-1]


def _lex(e):
    return tuple(-a for a in e)


def _grlex(e):
    return (-sum(e),) + tuple(-a for a in e)


_MONO_KEYS = {"grevlex": _grevlex, "lex": _lex, "grlex": _grlex}


@dataclass(frozen=True)
class MonomialOrder:
    """Term order on module terms ``(position, exponent)``.

    ``kind`` picks the monomial order; ``position`` is ``"pot"``
    (position over term, lower position index wins) or ``"top"``.
    ``key`` maps a term to a tuple where *smaller* means *larger* term.
    """

    kind: str = "grevlex"
    position: str = "pot"

    def __post_init__(self):
        if self.kind not in _MONO_KEYS:
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if self.position not in ("pot", "top"):
            raise ValueError(f"unknown position rule {self.position!r}")

    @property
    def key(self) -> Callable:
        mk = _MONO_KEYS[self.kind]
        if self.position == "pot":
            return lambda t: (t[0],) + mk(t[1])
        return lambda t: mk(t[1]) + (t[0],)

    @property
    def mono_key(self) -> Callable:
        return _MONO_KEYS[self.kind]


GREVLEX = MonomialOrder()


# ---------------------------------------------------------------------------
# Engine
# ---------------------------------------------------------------------------


def _divides(a, b) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _lcm(a, b):
    return tuple(x if x > y else y for x, y in zip(a, b))


class _Elt:
    __slots__ = ("vec", "pos", "exp")

    def __init__(self, vec: dict, lead):
        self.vec = vec
        self.pos, self.exp = lead


def _lead(vec: dict, key):
    return min(vec, key=key)


def _monic(vec: dict, key) -> tuple[dict, tuple]:
    lt = _lead(vec, key)
    lc = vec[lt]
    if lc != 1:
        inv = 1 / lc
        vec = {t: c * inv for t, c in vec.items()}
    return vec, lt


def _find_reducer(basis: Sequence[_Elt], pos, exp):
    for g in basis:
        if g.pos == pos and _divides(g.exp, exp):
            return g
    return None


def _reduce(vec: dict, basis: Sequence[_Elt], key, full: bool = True) -> dict:
    """Remainder of ``vec`` modulo monic ``basis``.

    With ``full=False`` only the leading term is reduced (top reduction).
    """
    p = dict(vec)
    if not p or not basis:
        return p
    heap = [(key(t), t) for t in p]
    heapq.heapify(heap)
    rem = {}
    while heap:
        _, t = heapq.heappop(heap)
        c = p.get(t)
        if c is None:
            continue
        # a term may sit in the heap more than once; skip stale duplicates
        if heap and heap[0][1] == t:
            continue
        pos, exp = t
        g = _find_reducer(basis, pos, exp)
        if g is None:
            rem[t] = p.pop(t)
            if not full:
                rem.update(p)
                return rem
            continue
        shift = tuple(a - b for a, b in zip(exp, g.exp))
        for (gp, ge), gc in g.vec.items():
            m = (gp, tuple(a + b for a, b in zip(ge, shift)))
            old = p.get(m)
            if old is None:
                p[m] = -c * gc
                heapq.heappush(heap, (key(m), m))
            else:
                v = old - c * gc
                if v:
                    p[m] = v
                else:
                    del p[m]
    return rem


def _s_vector(f: _Elt, g: _Elt):
    l = _lcm(f.exp, g.exp)
    sf = tuple(a - b for a, b in zip(l, f.exp))
    sg = tuple(a - b for a, b in zip(l, g.exp))
    out: dict = {}
    for (p, e), c in f.vec.items():
        out[(p, tuple(a + b for a, b in zip(e, sf)))] = c
    for (p, e), c in g.vec.items():
        t = (p, tuple(a + b for a, b in zip(e, sg)))
        v = out.get(t, 0) - c
        if v:
            out[t] = v
        else:
            out.pop(t, None)
    return out


def _gb(vectors: Iterable[dict], order: MonomialOrder) -> list[dict]:
    """Reduced, monic Groebner basis of the module spanned by ``vectors``."""
    key = order.key
    G: list[_Elt] = []
    pairs: list = []  # heap of (neg lcm key, i, j, lcm)

    def neg(k):
        return tuple(-x for x in k)

    def add(vec: dict) -> None:
        vec, lt = _monic(vec, key)
        h = _Elt(vec, lt)
        hi = len(G)
        G.append(h)
        # Gebauer-Moeller update without the product criterion, which is
        # unsound for modules.
        new = {}
        for i, g in enumerate(G[:-1]):
            if g.pos == h.pos:
                new[i] = _lcm(g.exp, h.exp)
        keep = {}
        for i, li in new.items():
            if any(j != i and _divides(lj, li) and lj != li for j, lj in new.items()):
                continue
            if li in keep.values():
                continue
            keep[i] = li
        survivors = []
        for item in pairs:
            _, i, j, lij = item
            if (
                G[i].pos == h.pos
                and _divides(h.exp, lij)
                and _lcm(G[i].exp, h.exp) != lij
                and _lcm(G[j].exp, h.exp) != lij
            ):
                continue
            survivors.append(item)
        for i, li in keep.items():
            survivors.append((neg(key((h.pos, li))), i, hi, li))
        heapq.heapify(survivors)
        pairs[:] = survivors

    for v in vectors:
        if not v:
            continue
        r = _reduce(v, G, key, full=False)
        if r:
            add(r)

    while pairs:
        _, i, j, _l = heapq.heappop(pairs)
        s = _s_vector(G[i], G[j])
        if not s:
            continue
        r = _reduce(s, G, key, full=False)
        if r:
            add(r)

    # minimalize, then interreduce
    ordered = sorted(G, key=lambda g: key((g.pos, g.exp)), reverse=True)
    minimal: list[_Elt] = []
    for g in ordered:
        if not any(m.pos == g.pos and _divides(m.exp, g.exp) for m in minimal):
            minimal.append(g)
    out = []
    for idx, g in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1 :]
        r = _reduce(g.vec, others, key, full=True)
        r, _ = _monic(r, key)
        out.append(r)
    out.sort(key=lambda v: key(_lead(v, key)))
    return out


# ---------------------------------------------------------------------------
# Free module elements
# ---------------------------------------------------------------------------


class FreeModuleElement:
    """A vector of ``rank`` polynomials, all in the same ambient dimension."""

    __slots__ = ("n", "components")

    def __init__(self, components: Sequence[Poly], n: int | None = None):
        comps = tuple(components)
        if n is None:
            if not comps:
                raise ValueError("ambient dimension needed for a rank-0 element")
            n = comps[0].n
        for c in comps:
            if c.n != n:
                raise DimensionError("components must share the ambient dimension")
        self.n = n
        self.components = comps

    @classmethod
    def zero(cls, rank: int, n: int) -> "FreeModuleElement":
        return cls([Poly.zero(n)] * rank, n)

    @classmethod
    def unit(cls, i: int, rank: int, n: int) -> "FreeModuleElement":
        comps = [Poly.zero(n)] * rank
        comps[i] = Poly.one(n)
        return cls(comps, n)

    @property
    def rank(self) -> int:
        return len(self.components)

    def __getitem__(self, i: int) -> Poly:
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def is_zero(self) -> bool:
        return not any(self.components)

    def _check(self, other: "FreeModuleElement") -> None:
        if self.rank != other.rank:
            raise DimensionError(f"rank mismatch: {self.rank} vs {other.rank}")
        if self.n != other.n:
            raise DimensionError("ambient dimension mismatch")

    def __add__(self, other: "FreeModuleElement") -> "FreeModuleElement":
        self._check(other)
        return FreeModuleElement([a + b for a, b in zip(self, other)], self.n)

    def __sub__(self, other: "FreeModuleElement") -> "FreeModuleElement":
        self._check(other)
        return FreeModuleElement([a - b for a, b in zip(self, other)], self.n)

    def __neg__(self) -> "FreeModuleElement":
        return FreeModuleElement([-a for a in self], self.n)

    def scale(self, p) -> "FreeModuleElement":
        return FreeModuleElement([p * a for a in self], self.n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FreeModuleElement):
            return NotImplemented
        return self.n == other.n and self.components == other.components

    def __hash__(self) -> int:
        return hash((self.n, self.components))

    def __repr__(self) -> str:
        return "FreeModuleElement([" + ", ".join(str(c) for c in self) + "])"

    def to_vec(self, offset: int = 0) -> dict:
        out = {}
        for i, p in enumerate(self.components):
            for e, c in p.terms.items():
                out[(i + offset, e)] = c
        return out


def _split(vec: dict, r: int, m: int, n: int) -> tuple[list[Poly], list[Poly]]:
    top = [dict() for _ in range(r)]
    bot = [dict() for _ in range(m)]
    for (p, e), c in vec.items():
        if p < r:
            top[p][e] = c
        else:
            bot[p - r][e] = c
    return [Poly._raw(n, t) for t in top], [Poly._raw(n, b) for b in bot]


def _combine(coeffs: Sequence[Poly], columns: Sequence[FreeModuleElement], rank: int, n: int):
    acc = [Poly.zero(n)] * rank
    for u, col in zip(coeffs, columns):
        if u:
            acc = [a + u * c for a, c in zip(acc, col)]
    return FreeModuleElement(acc, n)


# ---------------------------------------------------------------------------
# Module Groebner bases
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ModuleGB:
    """Reduced Groebner basis of the submodule spanned by ``columns``.

    ``representation_matrix[i]`` writes ``generators[i]`` as a combination
    of the original columns; ``syzygies`` is a Groebner basis of the module
    of relations among the columns (induced order).
    """

    rank: int
    n: int
    columns: tuple[FreeModuleElement, ...]
    order: MonomialOrder
    generators: tuple[FreeModuleElement, ...]
    representation_matrix: tuple[tuple[Poly, ...], ...]
    syzygies: tuple[FreeModuleElement, ...]
    _basis: tuple = field(repr=False)

    def leading_terms(self) -> list[tuple[int, tuple]]:
        key = self.order.key
        return [_lead(g.to_vec(), key) for g in self.generators]


def _check_columns(columns: Sequence[FreeModuleElement], rank: int | None, n: int | None):
    if columns:
        rank = columns[0].rank if rank is None else rank
        n = columns[0].n if n is None else n
    if rank is None or n is None:
        raise ValueError("rank and ambient dimension are required for an empty column list")
    for c in columns:
        if c.rank != rank:
            raise DimensionError(f"rank mismatch: expected {rank}, got {c.rank}")
        if c.n != n:
            raise DimensionError("ambient dimension mismatch among columns")
    return rank, n


def module_buchberger(
    columns: Sequence[FreeModuleElement],
    order: MonomialOrder = GREVLEX,
    rank: int | None = None,
    n: int | None = None,
) -> ModuleGB:
    """Groebner basis of the column module, with representations and syzygies.

    The order is applied with the column positions first; the auxiliary
    representation positions are always placed after them (position over
    term), which is what makes the syzygy part an elimination.
    """
    columns = tuple(columns)
    r, n = _check_columns(columns, rank, n)
    m = len(columns)
    aug_order = MonomialOrder(order.kind, "pot")
    vecs = []
    for i, col in enumerate(columns):
        v = col.to_vec()
        v[(r + i, (0,) * n)] = mpq(1)
        vecs.append(v)
    basis = _gb(vecs, aug_order)
    key = aug_order.key
    gens, reps, syz = [], [], []
    for v in basis:
        top, bot = _split(v, r, m, n)
        if _lead(v, key)[0] < r:
            gens.append(FreeModuleElement(top, n))
            reps.append(tuple(bot))
        else:
            syz.append(FreeModuleElement(bot, n))
    gb = ModuleGB(
        rank=r,
        n=n,
        columns=columns,
        order=aug_order,
        generators=tuple(gens),
        representation_matrix=tuple(reps),
        syzygies=tuple(syz),
        _basis=tuple(_Elt(v, _lead(v, key)) for v in basis),
    )
    for g, rep in zip(gb.generators, gb.representation_matrix):
        if _combine(rep, columns, r, n) != g:
            raise NotAGroebnerBasis("representation identity failed")
    return gb


def module_normal_form(
    target: FreeModuleElement, gb: ModuleGB
) -> tuple[FreeModuleElement, list[Poly]]:
    """Reduce ``target`` modulo the column module.

    Returns ``(remainder, u)`` with ``target - remainder == sum(u_i * column_i)``;
    ``u`` is itself reduced modulo the syzygy basis.
    """
    if target.rank != gb.rank:
        raise DimensionError(f"rank mismatch: target {target.rank}, module {gb.rank}")
    if target.n != gb.n:
        raise DimensionError("ambient dimension mismatch")
    m = len(gb.columns)
    vec = _reduce(target.to_vec(), gb._basis, gb.order.key, full=True)
    top, bot = _split(vec, gb.rank, m, gb.n)
    return FreeModuleElement(top, gb.n), [-b for b in bot]


def module_solve(
    columns: Sequence[FreeModuleElement],
    target: FreeModuleElement,
    gb: ModuleGB | None = None,
) -> list[Poly] | None:
    """Solve ``sum(u_i * columns[i]) == target`` over the polynomial ring.

    Returns the canonical solution (normal form modulo syzygies), or None
    when ``target`` is certified not to lie in the column module.
    """
    columns = tuple(columns)
    if gb is None:
        gb = module_buchberger(columns, rank=target.rank, n=target.n)
    elif gb.columns != columns:
        raise ValueError("Groebner basis was computed for different columns")
    rem, u = module_normal_form(target, gb)
    if not rem.is_zero():
        return None
    if _combine(u, columns, gb.rank, gb.n) != target:
        raise NotAGroebnerBasis("module_solve re-substitution failed")
    return u


def s_vectors_reduce_to_zero(elements: Sequence[FreeModuleElement], order: MonomialOrder = GREVLEX) -> bool:
    """Buchberger criterion: every S-vector of ``elements`` reduces to zero."""
    key = order.key
    basis = []
    for el in elements:
        v = el.to_vec()
        if v:
            v, lt = _monic(v, key)
            basis.append(_Elt(v, lt))
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            if basis[i].pos != basis[j].pos:
                continue
            s = _s_vector(basis[i], basis[j])
            if s and _reduce(s, basis, key, full=True):
                return False
    return True


# ---------------------------------------------------------------------------
# Ideals
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GroebnerBasis:
    """Reduced Groebner basis of a polynomial ideal, with cofactors.

    ``cofactor_matrix[i][j]`` is the coefficient of ``original_generators[j]``
    in ``generators[i]``.
    """

    generators: tuple[Poly, ...]
    order: MonomialOrder
    original_generators: tuple[Poly, ...]
    cofactor_matrix: tuple[tuple[Poly, ...], ...]
    _module: ModuleGB = field(repr=False)

    @property
    def n(self) -> int:
        return self._module.n

    def leading_monomials(self) -> list[tuple]:
        mk = self.order.mono_key
        return [min(g.terms, key=mk) for g in self.generators]

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)


def buchberger(gens: Sequence[Poly], order: MonomialOrder = GREVLEX) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by ``gens``."""
    gens = tuple(gens)
    if not gens or all(g.is_zero() for g in gens):
        raise ValueError("need at least one nonzero generator")
    n = gens[0].n
    if any(g.n != n for g in gens):
        raise DimensionError("generators must share the ambient dimension")
    order = MonomialOrder(order.kind, "pot")
    mgb = module_buchberger([FreeModuleElement([g], n) for g in gens], order)
    return GroebnerBasis(
        generators=tuple(g[0] for g in mgb.generators),
        order=order,
        original_generators=gens,
        cofactor_matrix=mgb.representation_matrix,
        _module=mgb,
    )


def normal_form_with_cofactors(p: Poly, gb: GroebnerBasis) -> tuple[Poly, list[Poly]]:
    """Return ``(r, c)`` with ``p - r == sum(c_j * original_generators[j])``."""
    if p.n != gb.n:
        raise DimensionError(f"ambient dimensions differ: {p.n} vs {gb.n}")
    rem, u = module_normal_form(FreeModuleElement([p], p.n), gb._module)
    return rem[0], u


def normal_form(p: Poly, gb: GroebnerBasis) -> Poly:
    return normal_form_with_cofactors(p, gb)[0]


# ---------------------------------------------------------------------------
# Milnor number
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MilnorData:
    """Milnor algebra data of a hypersurface.

    ``milnor_number`` is None when the Milnor algebra is infinite
    dimensional (non-isolated critical locus); ``standard_monomials`` is
    then empty and ``is_isolated`` is False.
    """

    is_isolated: bool
    milnor_number: int | None
    standard_monomials: tuple[tuple[int, ...], ...]
    leading_monomials: tuple[tuple[int, ...], ...] = ()

    def to_dict(self) -> dict:
        return {
            "is_isolated": self.is_isolated,
            "milnor_number": self.milnor_number if self.is_isolated else "infinity",
            "standard_monomials": [list(e) for e in self.standard_monomials],
        }


def _standard_monomials(leads: Sequence[tuple], n: int) -> list[tuple] | None:
    bounds = []
    for i in range(n):
        pure = [e[i] for e in leads if all(a == 0 for k, a in enumerate(e) if k != i) and e[i] > 0]
        if not pure and not any(sum(e) == 0 for e in leads):
            return None
        bounds.append(min(pure) if pure else 0)
    if any(sum(e) == 0 for e in leads):
        return []
    out = []
    stack = [(0,) * n]
    seen = {stack[0]}
    while stack:
        e = stack.pop()
        if any(_divides(l, e) for l in leads):
            continue
        out.append(e)
        for i in range(n):
            if e[i] + 1 < bounds[i]:
                f = e[:i] + (e[i] + 1,) + e[i + 1 :]
                if f not in seen:
                    seen.add(f)
                    stack.append(f)
    out.sort(key=_grevlex)
    out.reverse()
    return out


def milnor(phi: Poly) -> MilnorData:
    """Milnor number of ``phi`` as the dimension of Q[x]/J_phi.

    The count is global: it sums the Milnor numbers of all critical points,
    which for the quasi-homogeneous corpus is the Milnor number at 0.
    """
    if phi.is_constant():
        raise ValueError("milnor: phi must be nonconstant")
    grads = [g for g in phi.gradient() if g]
    gb = buchberger(grads)
    leads = gb.leading_monomials()
    std = _standard_monomials(leads, phi.n)
    if std is None:
        return MilnorData(False, None, (), tuple(leads))
    return MilnorData(True, len(std), tuple(std), tuple(leads))
