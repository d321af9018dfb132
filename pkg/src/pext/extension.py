"""Extending Poisson brackets from a hypersurface V(phi) to affine space.

Given representatives x_ij of the brackets of the coordinate functions on
V(phi), the ambient bi-derivation beta is split as

    beta = d_phi(X3) + phi * X2,      d_phi(beta) = phi * X1,  X1 = d_phi(X2)

using exactness of the Koszul complex of the Jacobian ideal.  Any
d_phi(X3) + phi * X2' restricts to the same bracket on V(phi); the
necessary condition on X3 for some choice to be Poisson is that
[X3, d_phi X3] lies in d_phi(X^5) + phi * X^4.  In three variables that
condition is empty and d_phi(X3) itself is Poisson.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Mapping

from .exterior import (
    Multivector,
    d_phi,
    divergence,
    schouten,
    wedge,
)
from .groebner import (
    FreeModuleElement,
    MilnorData,
    ModuleGB,
    buchberger,
    milnor,
    module_buchberger,
    module_normal_form,
    module_solve,
    normal_form,
)
from .polyring import DimensionError, Poly

__all__ = [
    "BracketData",
    "CheckResult",
    "Decomposition",
    "ObstructionReport",
    "ExtensionResult",
    "ExtensionError",
    "NonIsolatedSingularity",
    "HamiltonianFailure",
    "JacobiModFailure",
    "InternalConsistencyError",
    "milnor_cached",
    "require_isolated",
    "biderivation_from_bracket",
    "check_hamiltonian",
    "check_jacobi_mod",
    "koszul_columns",
    "decompose",
    "extend_dim3",
    "extend_from_bracket_dim3",
    "obstruction_general",
    "obstruction_dim4",
    "casimir_check",
    "freedom_in_X2",
    "restrict_to_generators",
    "search_poisson_X2",
]


class ExtensionError(ValueError):
    """Input is not valid for the requested construction."""


class NonIsolatedSingularity(ExtensionError):
    def __init__(self, phi: Poly):
        self.phi = phi
        super().__init__(f"non-isolated singularity: J_phi has infinite colength for phi = {phi}")


class HamiltonianFailure(ExtensionError):
    def __init__(self, result: "CheckResult"):
        self.result = result
        super().__init__(f"beta(phi, .) is not phi-valued: {result.describe()}")


class JacobiModFailure(ExtensionError):
    def __init__(self, result: "CheckResult"):
        self.result = result
        super().__init__(f"Jacobi identity fails modulo phi: {result.describe()}")


class InternalConsistencyError(RuntimeError):
    """An identity guaranteed by the theory failed; indicates a bug."""


# ---------------------------------------------------------------------------
# Data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BracketData:
    """Hypersurface equation plus representatives x_ij = {x_i, x_j}, i < j.

    Missing pairs mean 0; x_ji is implicitly -x_ij.
    """

    n: int
    phi: Poly
    reps: Mapping[tuple[int, int], Poly] = field(default_factory=dict)

    def __post_init__(self):
        if self.phi.n != self.n:
            raise DimensionError(f"phi lives in {self.phi.n} variables, expected {self.n}")
        if self.phi.is_constant():
            raise ExtensionError("phi must be nonconstant")
        if self.phi.constant_coeff() != 0:
            raise ExtensionError("phi must vanish at the origin")
        clean = {}
        for key, p in self.reps.items():
            i, j = key
            if not (1 <= i <= self.n and 1 <= j <= self.n) or i == j:
                raise ExtensionError(f"malformed bracket index {key} for n={self.n}")
            if p.n != self.n:
                raise DimensionError(f"representative for {key} lives in {p.n} variables")
            if i > j:
                i, j, p = j, i, -p
            if (i, j) in clean:
                raise ExtensionError(f"bracket pair {{{i},{j}}} given twice")
            clean[(i, j)] = p
        object.__setattr__(self, "reps", clean)

    @classmethod
    def from_bivector(cls, beta: Multivector, phi: Poly) -> "BracketData":
        return cls(phi.n, phi, {J: c for J, c in beta.coeffs.items()})


@dataclass(frozen=True)
class CheckResult:
    """Verdict of a divisibility test; the witness names the first failing coefficient."""

    ok: bool
    index: tuple[int, ...] | None = None
    coefficient: Poly | None = None
    remainder: Poly | None = None

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "ok"
        return f"coefficient {self.coefficient} at {self.index} leaves remainder {self.remainder}"

    def to_dict(self) -> dict:
        d: dict = {"ok": self.ok}
        if not self.ok:
            d["index"] = list(self.index)
            d["coefficient"] = str(self.coefficient)
            d["remainder"] = str(self.remainder)
        return d


@dataclass(frozen=True)
class Decomposition:
    """beta = d_phi(X3) + phi * X2 with d_phi(beta) = phi * X1 and X1 = d_phi(X2)."""

    beta: Multivector
    phi: Poly
    X3: Multivector
    X2: Multivector
    X1: Multivector
    residual_check: bool

    def reassemble(self) -> Multivector:
        return d_phi(self.X3, self.phi) + self.X2.scale(self.phi)


@dataclass(frozen=True)
class ObstructionReport:
    """Whether [X3, d_phi X3] lies in d_phi(X^5) + phi * X^4.

    On success ``Y4``/``Y5`` witness the membership; otherwise ``remainder``
    is the nonzero normal form certifying non-membership.
    """

    bracket_term: Multivector
    satisfied: bool
    Y4: Multivector | None = None
    Y5: Multivector | None = None
    remainder: Multivector | None = None
    divergence_term: Multivector | None = None


@dataclass(frozen=True)
class ExtensionResult:
    beta: Multivector
    is_poisson: bool
    jacobi_witness: Multivector
    decomposition: Decomposition | None = None


# ---------------------------------------------------------------------------
# Preconditions
# ---------------------------------------------------------------------------


@lru_cache(maxsize=256)
def milnor_cached(phi: Poly) -> MilnorData:
    return milnor(phi)


def require_isolated(phi: Poly) -> MilnorData:
    data = milnor_cached(phi)
    if not data.is_isolated:
        raise NonIsolatedSingularity(phi)
    return data


def _check_pair(beta: Multivector, phi: Poly, degree: int = 2) -> None:
    if beta.n != phi.n:
        raise DimensionError(f"ambient dimensions differ: {beta.n} vs {phi.n}")
    if beta.degree != degree and beta:
        raise ValueError(f"expected a degree-{degree} multivector, got degree {beta.degree}")


@lru_cache(maxsize=64)
def _principal_gb(phi: Poly):
    return buchberger([phi])


def _divisibility(A: Multivector, phi: Poly) -> CheckResult:
    for J, c in A.items():
        if c.exact_div(phi) is None:
            return CheckResult(False, J, c, normal_form(c, _principal_gb(phi)))
    return CheckResult(True)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def biderivation_from_bracket(data: BracketData) -> Multivector:
    """beta = sum_{i<j} x_ij d_i^d_j."""
    return Multivector(data.n, 2, dict(data.reps))


def restrict_to_generators(beta: Multivector, phi: Poly) -> BracketData:
    """Bracket data {x_i, x_j} = beta_ij read off an ambient bivector."""
    return BracketData.from_bivector(beta, phi)


def check_hamiltonian(beta: Multivector, phi: Poly) -> CheckResult:
    """Is beta(phi, .) = d_phi(beta) divisible by phi coefficientwise?"""
    _check_pair(beta, phi)
    return _divisibility(d_phi(beta, phi), phi)


def check_jacobi_mod(beta: Multivector, phi: Poly) -> CheckResult:
    """Is every coefficient of [beta, beta] divisible by phi?"""
    _check_pair(beta, phi)
    if not beta:
        return CheckResult(True)
    return _divisibility(schouten(beta, beta), phi)


@lru_cache(maxsize=128)
def koszul_columns(phi: Poly, k: int) -> tuple[FreeModuleElement, ...]:
    """Columns of d_phi: X^k -> X^(k-1) on the lexicographic bases."""
    n = phi.n
    if k < 1 or k > n:
        return ()
    cols = []
    for J in itertools.combinations(range(1, n + 1), k):
        img = d_phi(Multivector.basis(n, J), phi)
        cols.append(FreeModuleElement(img.vector() if img else [Poly.zero(n)] * comb(n, k - 1), n))
    return tuple(cols)


@lru_cache(maxsize=128)
def _koszul_gb(phi: Poly, k: int) -> ModuleGB:
    return module_buchberger(koszul_columns(phi, k), rank=comb(phi.n, k - 1), n=phi.n)


def _lift(target: Multivector, phi: Poly, k: int) -> Multivector:
    """Solve d_phi(X) = target for X of degree k; raises if impossible."""
    n = phi.n
    rank = comb(n, k - 1)
    vec = FreeModuleElement(target.vector() if target else [Poly.zero(n)] * rank, n)
    u = module_solve(koszul_columns(phi, k), vec, gb=_koszul_gb(phi, k))
    if u is None:
        raise InternalConsistencyError(
            f"Koszul lift to degree {k} failed although the complex is exact"
        )
    if not u:
        return Multivector.zero(n, k)
    return Multivector.from_vector(n, k, u)


def decompose(beta: Multivector, phi: Poly) -> Decomposition:
    """Split a phi-Hamiltonian bi-derivation as d_phi(X3) + phi * X2."""
    _check_pair(beta, phi)
    require_isolated(phi)
    n = phi.n
    ham = check_hamiltonian(beta, phi)
    if not ham:
        raise HamiltonianFailure(ham)
    X1 = d_phi(beta, phi).exact_div(phi)
    X2 = _lift(X1, phi, 2)
    X3 = _lift(beta - X2.scale(phi), phi, 3)
    ok = (
        d_phi(beta, phi) == X1.scale(phi)
        and d_phi(X2, phi) == X1
        and d_phi(X3, phi) + X2.scale(phi) == beta
    )
    if not ok:
        raise InternalConsistencyError("decomposition identities failed on re-substitution")
    return Decomposition(beta, phi, X3, X2, X1, True)


def casimir_check(beta: Multivector, phi: Poly) -> bool:
    """True iff phi is a Casimir of beta, i.e. d_phi(beta) == 0."""
    _check_pair(beta, phi)
    return d_phi(beta, phi).is_zero()


def _result(beta: Multivector, decomposition: Decomposition | None = None) -> ExtensionResult:
    sq = schouten(beta, beta) if beta else Multivector.zero(beta.n, 3)
    return ExtensionResult(beta, sq.is_zero(), sq, decomposition)


def extend_dim3(phi: Poly, f: Poly) -> ExtensionResult:
    """The Poisson bracket d_phi(f d1^d2^d3) on affine 3-space."""
    if phi.n != 3:
        raise ExtensionError(f"extend_dim3 needs n = 3, got n = {phi.n}")
    if f.n != 3:
        raise DimensionError("f must be a polynomial in 3 variables")
    require_isolated(phi)
    X3 = Multivector.basis(3, (1, 2, 3), f)
    beta = d_phi(X3, phi)
    dec = Decomposition(beta, phi, X3, Multivector.zero(3, 2), Multivector.zero(3, 1), True)
    return _result(beta, dec)


def extend_from_bracket_dim3(data: BracketData) -> ExtensionResult:
    """Poisson extension d_phi(X3) of bracket data on a surface in affine 3-space."""
    if data.n != 3:
        raise ExtensionError(f"extend_from_bracket_dim3 needs n = 3, got n = {data.n}")
    phi = data.phi
    require_isolated(phi)
    beta = biderivation_from_bracket(data)
    ham = check_hamiltonian(beta, phi)
    if not ham:
        raise HamiltonianFailure(ham)
    jac = check_jacobi_mod(beta, phi)
    if not jac:
        raise JacobiModFailure(jac)
    dec = decompose(beta, phi)
    ext = d_phi(dec.X3, phi)
    if (ext - beta).exact_div(phi) is None:
        raise InternalConsistencyError("extension does not agree with the input modulo phi")
    return _result(ext, dec)


@lru_cache(maxsize=64)
def _obstruction_columns(phi: Poly) -> tuple[tuple[FreeModuleElement, ...], ModuleGB]:
    n = phi.n
    rank = comb(n, 4)
    cols = list(koszul_columns(phi, 5))
    for idx in range(rank):
        comps = [Poly.zero(n)] * rank
        comps[idx] = phi
        cols.append(FreeModuleElement(comps, n))
    cols = tuple(cols)
    return cols, module_buchberger(cols, rank=rank, n=n)


def obstruction_general(X3: Multivector, phi: Poly) -> ObstructionReport:
    """Decide [X3, d_phi X3] in d_phi(X^5) + phi X^4 by module membership."""
    _check_pair(X3, phi, 3)
    require_isolated(phi)
    n = phi.n
    T = schouten(X3, d_phi(X3, phi)) if X3 else Multivector.zero(n, 4)
    if n < 4:
        return ObstructionReport(T, True, Multivector.zero(n, 4), Multivector.zero(n, 5))
    cols, gb = _obstruction_columns(phi)
    target = FreeModuleElement(T.vector(), n)
    u = module_solve(cols, target, gb=gb)
    if u is None:
        rem, _ = module_normal_form(target, gb)
        return ObstructionReport(T, False, remainder=Multivector.from_vector(n, 4, list(rem)))
    m5 = comb(n, 5)
    Y5 = Multivector.from_vector(n, 5, u[:m5]) if m5 else Multivector.zero(n, 5)
    Y4 = Multivector.from_vector(n, 4, u[m5:])
    if d_phi(Y5, phi) + Y4.scale(phi) != T:
        raise InternalConsistencyError("obstruction witness does not reproduce the bracket")
    return ObstructionReport(T, True, Y4, Y5)


def obstruction_dim4(X3: Multivector, phi: Poly, cross_check: bool = False) -> ObstructionReport:
    """In four variables: is D(X3) ^ d_phi(X3) divisible by phi?

    Also asserts [X3, d_phi X3] == -2 D(X3) ^ d_phi(X3).  With
    ``cross_check`` the verdict is compared against ``obstruction_general``.
    """
    if phi.n != 4:
        raise ExtensionError(f"obstruction_dim4 needs n = 4, got n = {phi.n}")
    _check_pair(X3, phi, 3)
    require_isolated(phi)
    dX3 = d_phi(X3, phi)
    W = wedge(divergence(X3), dX3)
    T = schouten(X3, dX3) if X3 else Multivector.zero(4, 4)
    if T != W.scale(-2):
        raise InternalConsistencyError("[X3, d_phi X3] != -2 D(X3) ^ d_phi(X3)")
    q = W.exact_div(phi)
    if q is not None:
        report = ObstructionReport(T, True, q.scale(-2), Multivector.zero(4, 5), divergence_term=W)
    else:
        rem = W.map_coeffs(lambda c: normal_form(c, _principal_gb(phi)))
        report = ObstructionReport(T, False, remainder=rem, divergence_term=W)
    if cross_check:
        general = obstruction_general(X3, phi)
        if general.satisfied != report.satisfied:
            raise InternalConsistencyError("obstruction verdicts disagree")
    return report


def freedom_in_X2(decomp: Decomposition, phi: Poly, alt_X2: Multivector) -> Multivector:
    """d_phi(X3) + phi * alt_X2, checked to extend the same bracket."""
    _check_pair(alt_X2, phi)
    beta_alt = d_phi(decomp.X3, phi) + alt_X2.scale(phi)
    if not check_hamiltonian(beta_alt, phi):
        raise InternalConsistencyError("alternative extension is not phi-Hamiltonian")
    if (beta_alt - decomp.beta).exact_div(phi) is None:
        raise InternalConsistencyError("alternative extension differs from beta modulo phi")
    return beta_alt


def search_poisson_X2(
    X3: Multivector,
    phi: Poly,
    max_degree: int = 0,
    count: int = 200,
    seed: int = 0,
) -> list[Multivector]:
    """Bounded search for X2 with [d_phi X3 + phi X2, same] = 0.

    With ``max_degree == 0`` all X2 with coefficients in {-1, 0, 1} are
    enumerated; otherwise ``count`` seeded random candidates with
    coefficients of degree <= max_degree are tried.  This is an experiment,
    not a decision procedure: an empty result proves nothing.
    """
    _check_pair(X3, phi, 3)
    n = phi.n
    base = d_phi(X3, phi)
    idx = list(itertools.combinations(range(1, n + 1), 2))
    hits = []

    def test(X2: Multivector) -> None:
        b = base + X2.scale(phi)
        if not b or schouten(b, b).is_zero():
            hits.append(X2)

    if max_degree == 0:
        for coeffs in itertools.product((0, 1, -1), repeat=len(idx)):
            test(Multivector(n, 2, {J: Poly.const(c, n) for J, c in zip(idx, coeffs) if c}))
    else:
        from .randgen import random_multivector

        rng = random.Random(seed)
        test(Multivector.zero(n, 2))
        for _ in range(count):
            test(random_multivector(rng, n, 2, max_degree=max_degree))
    return hits
