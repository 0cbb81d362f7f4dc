"""Exact symbolic engine for the KPZ tree algebra.

Everything in this subpackage is exact: degrees live in Q + Q*kappa
(`ExactDegree`), coefficients are sympy polynomials over Q in a fixed set of
named scalar indeterminates.  No floating point arithmetic is used anywhere.
"""

from openkpz.treealg.degree import ExactDegree, AmbiguousDegreeError
from openkpz.treealg.trees import (
    XI,
    ONE,
    X1,
    Integ,
    Monomial,
    Product,
    Tree,
    Xi,
    GrammarError,
    deriv_tree,
    integ,
    prod,
    tree_degree,
)
from openkpz.treealg.combination import TreeCombination, TensorElement
from openkpz.treealg.basis import (
    BASIS_NAMES,
    EXTENDED_NAMES,
    basis_W,
    basis_tree,
    format_tree,
    parse_tree,
)
from openkpz.treealg.coproduct import (
    CharacterF,
    CoproductDomainError,
    StructureGroupReport,
    check_structure_group,
    compose_gamma,
    coproduct,
    counit_left,
    gamma_f,
    generic_character,
    zero_character,
)
from openkpz.treealg.renorm import RenormParams, contraction_generator, renormalize
from openkpz.treealg.expansion import (
    picard_W,
    picard_dW,
    q_leq0_nonlinearity,
    renorm_constants,
)
from openkpz.treealg.sector import sector_exponents, sector_table
from openkpz.treealg.golden import verify_golden_tables

__all__ = [
    "ExactDegree",
    "AmbiguousDegreeError",
    "Tree",
    "Xi",
    "Monomial",
    "Integ",
    "Product",
    "XI",
    "ONE",
    "X1",
    "GrammarError",
    "prod",
    "integ",
    "deriv_tree",
    "tree_degree",
    "TreeCombination",
    "TensorElement",
    "BASIS_NAMES",
    "EXTENDED_NAMES",
    "basis_W",
    "basis_tree",
    "parse_tree",
    "format_tree",
    "coproduct",
    "CoproductDomainError",
    "CharacterF",
    "generic_character",
    "zero_character",
    "gamma_f",
    "counit_left",
    "check_structure_group",
    "StructureGroupReport",
    "compose_gamma",
    "RenormParams",
    "renormalize",
    "contraction_generator",
    "picard_W",
    "picard_dW",
    "q_leq0_nonlinearity",
    "renorm_constants",
    "sector_exponents",
    "sector_table",
    "verify_golden_tables",
]
