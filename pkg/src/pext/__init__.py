"""Exact Koszul-complex machinery for Poisson brackets on hypersurfaces."""

from .corpus import CORPUS, CorpusEntry, get_entry
from .exterior import (
    DiffForm,
    Multivector,
    d_phi,
    de_rham_d,
    divergence,
    flat,
    jacobiator,
    koszul_d_form,
    lichnerowicz_d,
    schouten,
    schouten_via_koszul,
    sharp,
    wedge,
)
from .extension import (
    BracketData,
    CheckResult,
    Decomposition,
    ExtensionResult,
    ObstructionReport,
    casimir_check,
    check_hamiltonian,
    check_jacobi_mod,
    decompose,
    extend_dim3,
    extend_from_bracket_dim3,
    obstruction_dim4,
    obstruction_general,
)
from .groebner import (
    FreeModuleElement,
    GroebnerBasis,
    MonomialOrder,
    buchberger,
    milnor,
    module_buchberger,
    module_solve,
    normal_form,
)
from .polyring import Poly, PolySyntaxError

__version__ = "0.1.0"
