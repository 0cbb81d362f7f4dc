"""Coproduct, structure-group maps Gamma_f, and group-closure checks.

The coproduct sends the model space into (model space) tensor (free
commutative algebra on seven generators).  Integration obeys two rules: a
plain rule, and an extended rule producing X1 corrections for the two
children whose plain integral has degree above 1.  Primed integration is
always primitive on the left, ``Delta I'(t) = (I' x id) Delta t``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import sympy

from openkpz.treealg.basis import (
    BASIS_NAMES,
    IP_PSI,
    IP_PSI_IP_PSI2,
    PSI,
    PSI_IP_PSI2,
    basis_tree,
    basis_W,
    format_tree,
)
from openkpz.treealg.combination import (
    SYMBOLS,
    RightMono,
    TensorElement,
    TreeCombination,
    _as_coeff,
    _is_zero,
)
from openkpz.treealg.trees import (
    ONE,
    X1,
    XI,
    Integ,
    Monomial,
    Product,
    Tree,
    Xi,
    integ,
    tree_degree,
)

# Children triggering the extended integration rule (their plain integral
# has degree above 1, so first-order recentering terms appear).
_EXTENDED_RULE_CHILDREN = (PSI, PSI_IP_PSI2)

# Generators of the plus algebra, paired with their conventional symbol names.
PLUS_GENERATORS: Tuple[Tuple[Tree, str], ...] = (
    (X1, "a"),
    (basis_tree("<1>"), "b"),
    (basis_tree("<2d1>"), "c"),
    (basis_tree("<1d1>"), "d"),
    (IP_PSI, "g"),
    (basis_tree("<2d2d1>"), "h"),
    (IP_PSI_IP_PSI2, "w"),
)


class CoproductDomainError(ValueError):
    """The tree is outside the domain of the coproduct recursion."""


def _integ_left(prime: bool):
    def fn(tree: Tree) -> TreeCombination:
        if isinstance(tree, Monomial):
            return TreeCombination.zero()
        return TreeCombination.single(Integ(tree, prime))

    return fn


def coproduct(tree: Tree) -> TensorElement:
    if isinstance(tree, Xi):
        return TensorElement.single(XI)
    if isinstance(tree, Monomial):
        if tree.l0 != 0:
            raise CoproductDomainError(f"{tree!r} does not occur in the recursion")
        out = TensorElement()
        for k in range(tree.l1 + 1):
            out = out + TensorElement.single(
                Monomial(0, k),
                (X1,) * (tree.l1 - k),
                sympy.binomial(tree.l1, k),
            )
        return out
    if isinstance(tree, Product):
        out = TensorElement.single(ONE)
        for f in tree.factors:
            out = out.mul(coproduct(f))
        return out
    if isinstance(tree, Integ):
        inner = coproduct(tree.child)
        if tree.prime:
            return inner.apply_left(_integ_left(prime=True))
        out = inner.apply_left(_integ_left(prime=False))
        out = out + TensorElement.single(ONE, (tree,))
        if tree.child in _EXTENDED_RULE_CHILDREN:
            primed = integ(tree.child, prime=True)
            out = out + TensorElement.single(ONE, (X1, primed))
            out = out + TensorElement.single(X1, (primed,))
        return out
    raise CoproductDomainError(f"cannot form the coproduct of {tree!r}")


def counit_left(element: TensorElement) -> TreeCombination:
    """Apply (id x eps), eps(unit) = 1 and eps(generators) = 0."""
    out = TreeCombination.zero()
    for (left, right), coeff in element.terms.items():
        if not right:
            out = out + TreeCombination.single(left, coeff)
    return out


@dataclass(frozen=True)
class CharacterF:
    """Multiplicative functional on the plus algebra, given on generators."""

    values: Tuple[sympy.Expr, ...]  # aligned with PLUS_GENERATORS

    def __post_init__(self) -> None:
        if len(self.values) != len(PLUS_GENERATORS):
            raise ValueError("a character needs one value per generator")
        object.__setattr__(
            self, "values", tuple(_as_coeff(v) for v in self.values)
        )

    def value(self, generator: Tree) -> sympy.Expr:
        for (gen, _), val in zip(PLUS_GENERATORS, self.values):
            if gen == generator:
                return val
        raise KeyError(f"{generator!r} is not a plus-algebra generator")

    def of_monomial(self, right: RightMono) -> sympy.Expr:
        out = sympy.Integer(1)
        for gen in right:
            out = out * self.value(gen)
        return out

    def as_dict(self) -> Dict[str, sympy.Expr]:
        return {name: val for (_, name), val in zip(PLUS_GENERATORS, self.values)}


def generic_character(prefix: str = "") -> CharacterF:
    """Character with fully symbolic generator values."""
    values = []
    for _, name in PLUS_GENERATORS:
        symbol = SYMBOLS[name] if not prefix else sympy.Symbol(prefix + name)
        values.append(symbol)
    return CharacterF(tuple(values))


def zero_character() -> CharacterF:
    return CharacterF((0,) * len(PLUS_GENERATORS))


def gamma_f(f: CharacterF, x: TreeCombination | Tree) -> TreeCombination:
    """Gamma_f = (id x f) Delta, extended linearly."""
    if not isinstance(x, TreeCombination):
        x = TreeCombination.single(x)
    out = TreeCombination.zero()
    for tree, coeff in x.items():
        for (left, right), c in coproduct(tree).terms.items():
            out = out + TreeCombination.single(left, coeff * c * f.of_monomial(right))
    return out


@dataclass
class StructureGroupReport:
    entries: List[Tuple[str, bool, str]] = field(default_factory=list)

    def add(self, prop: str, passed: bool, witness: str = "") -> None:
        self.entries.append((prop, passed, witness))

    @property
    def all_passed(self) -> bool:
        return all(passed for _, passed, _ in self.entries)

    def __str__(self) -> str:
        lines = []
        for prop, passed, witness in self.entries:
            line = f"{'PASS' if passed else 'FAIL'}  {prop}"
            if witness and not passed:
                line += f"  [{witness}]"
            lines.append(line)
        return "\n".join(lines)


def check_structure_group(f: CharacterF) -> StructureGroupReport:
    """Verify the four defining properties of the structure group on the basis."""
    report = StructureGroupReport()
    basis = basis_W()

    # (i) action on Xi, the unit, and X1.
    fixed_ok = gamma_f(f, XI) == TreeCombination.single(XI) and gamma_f(
        f, ONE
    ) == TreeCombination.single(ONE)
    gx1 = gamma_f(f, X1)
    shift_ok = set(gx1.terms) <= {X1, ONE} and _is_zero(gx1.coeff(X1) - 1)
    report.add("fixes Xi and 1; shifts X1 by a multiple of 1", fixed_ok and shift_ok)

    # (ii) triangularity: Gamma_f(t) - t lives strictly below deg t.
    for name, tree, deg in basis:
        delta = gamma_f(f, tree) - TreeCombination.single(tree)
        bad = [t for t in delta.terms if not tree_degree(t) < deg]
        report.add(
            f"triangular on {name}",
            not bad,
            "" if not bad else f"term {format_tree(bad[0])} not below {deg}",
        )

    # (iii) multiplicativity on products staying inside the basis.
    trees_in_basis = {tree for _, tree, _ in basis}
    from openkpz.treealg.trees import prod as tree_prod

    for n1, t1, _ in basis:
        for n2, t2, _ in basis:
            product = tree_prod(t1, t2)
            if product not in trees_in_basis:
                continue
            lhs = gamma_f(f, product)
            rhs = gamma_f(f, t1).mul(gamma_f(f, t2))
            report.add(
                f"multiplicative on {n1}*{n2}",
                lhs == rhs,
                "" if lhs == rhs else f"{lhs!r} != {rhs!r}",
            )

    # (iv) commutation with integration up to polynomials.
    for name, tree, _ in basis:
        for prime in (False, True):
            try:
                image = integ(tree, prime)
            except Exception:
                continue
            if image not in trees_in_basis:
                continue
            diff = gamma_f(f, image) - gamma_f(f, tree).integrate(prime)
            poly_only = all(isinstance(t, Monomial) for t in diff.terms)
            report.add(
                f"Gamma commutes with {'I`' if prime else 'I'} on {name} up to polynomials",
                poly_only,
                "" if poly_only else f"non-polynomial remainder {diff!r}",
            )
    return report


class GroupClosureError(RuntimeError):
    pass


def compose_gamma(f: CharacterF, g: CharacterF) -> CharacterF:
    """Character h with Gamma_f o Gamma_g = Gamma_h on the whole basis.

    The generator values of h are read off the composed action by matching
    coefficients (triangularity makes the extraction sequential); the
    resulting map is then verified on all basis elements.
    """

    def composed(tree: Tree) -> TreeCombination:
        return gamma_f(f, gamma_f(g, tree))

    values: Dict[str, sympy.Expr] = {}
    values["a"] = composed(X1).coeff(ONE)
    values["b"] = composed(basis_tree("<1>")).coeff(ONE)
    values["c"] = composed(basis_tree("<2d1>")).coeff(ONE)
    img_1d1 = composed(basis_tree("<1d1>"))
    values["g"] = img_1d1.coeff(X1)
    values["d"] = sympy.expand(img_1d1.coeff(ONE) - values["a"] * values["g"])
    img_2d2d1 = composed(basis_tree("<2d2d1>"))
    values["w"] = img_2d2d1.coeff(X1)
    values["h"] = sympy.expand(img_2d2d1.coeff(ONE) - values["a"] * values["w"])

    h = CharacterF(tuple(values[name] for _, name in PLUS_GENERATORS))
    for name, tree, _ in basis_W():
        if not gamma_f(h, tree) == composed(tree):
            raise GroupClosureError(
                f"no character reproduces the composition on {name}"
            )
    return h
