"""Unit tests for the exact symbolic tree algebra."""

from fractions import Fraction

import pytest
import sympy

from openkpz.treealg import (
    BASIS_NAMES,
    CharacterF,
    CoproductDomainError,
    ExactDegree,
    GrammarError,
    RenormParams,
    basis_tree,
    check_structure_group,
    compose_gamma,
    coproduct,
    deriv_tree,
    format_tree,
    gamma_f,
    generic_character,
    parse_tree,
    picard_W,
    picard_dW,
    q_leq0_nonlinearity,
    renorm_constants,
    renormalize,
    sector_table,
    tree_degree,
    verify_golden_tables,
    zero_character,
)
from openkpz.treealg.combination import SYMBOLS, TreeCombination
from openkpz.treealg.basis import tree_name
from openkpz.treealg.trees import XI, ONE, X1, integ, prod


class TestDegrees:
    def test_exact_arithmetic(self):
        d = ExactDegree(Fraction(-3, 2), Fraction(0))
        e = ExactDegree(Fraction(1), Fraction(-1))
        assert (d + e).rational == Fraction(-1, 2)
        assert (d + e).kappa == Fraction(-1)

    def test_comparisons_hold_for_small_kappa(self):
        # -3/2 - kappa < -3/2 < -3/2 + kappa for every small kappa > 0
        lo = ExactDegree(Fraction(-3, 2), Fraction(-1))
        mid = ExactDegree(Fraction(-3, 2), Fraction(0))
        hi = ExactDegree(Fraction(-3, 2), Fraction(1))
        assert lo < mid < hi
        assert not hi < lo

    def test_basis_degrees(self):
        expected = {
            "Xi": "-3/2-k",
            "<1>": "1/2-k",
            "<1d>": "-1/2-k",
            "<1d1>": "3/2-k",
            "<2d>": "-1-2*k",
            "<2d1>": "1-2*k",
            "<2d1d>": "-2*k",
            "<2d2d>": "-1/2-3*k",
            "<2d2d1>": "3/2-3*k",
            "<1d2d>": "-2*k",
            "<tree1>": "-4*k",
            "<tree2>": "-4*k",
            "<1d1d>": "1/2-k",
            "<2d2d1d>": "1/2-3*k",
        }
        for name, deg in expected.items():
            assert str(tree_degree(basis_tree(name))) == deg, name

    def test_polynomial_degrees(self):
        assert str(tree_degree(ONE)) == "0"
        assert str(tree_degree(X1)) == "1"


class TestTrees:
    def test_parse_format_roundtrip(self):
        for name in BASIS_NAMES:
            tree = basis_tree(name)
            assert parse_tree(format_tree(tree)) == tree
            assert tree_name(tree) == name

    def test_parse_named_tokens(self):
        assert parse_tree("<1d>") == basis_tree("<1d>")
        assert parse_tree("<1d>*<2d1d>") == prod(
            basis_tree("<1d>"), basis_tree("<2d1d>")
        )
        assert dict(deriv_tree(basis_tree("<1>"))) == {basis_tree("<1d>"): 1}

    def test_product_is_canonical(self):
        a, b = basis_tree("<1d>"), basis_tree("<2d1d>")
        assert prod(a, b) == prod(b, a)

    def test_second_derivative_rejected(self):
        with pytest.raises(GrammarError):
            deriv_tree(basis_tree("<1d>"))


class TestCoproduct:
    def test_primitive_noise(self):
        delta = coproduct(XI)
        assert delta.terms == {(XI, ()): 1}

    def test_extended_rule_only_for_planted_psi(self):
        # I(Psi) carries X_1 corrections; I'(Psi^2) stays primitive.
        planted = coproduct(basis_tree("<1d1>")).terms
        assert any(right for (_, right) in planted), "expected X_1 corrections"
        prime = coproduct(basis_tree("<2d1d>")).terms
        assert prime == {(basis_tree("<2d1d>"), ()): 1}

    def test_domain_error_for_time_monomials(self):
        from openkpz.treealg.trees import Monomial

        with pytest.raises(CoproductDomainError):
            coproduct(Monomial(1, 0))

    def test_matches_golden_table(self):
        report = verify_golden_tables()
        assert report.table_status()["coproduct"]


class TestStructureGroup:
    def test_generic_character_properties(self):
        report = check_structure_group(generic_character())
        assert report.all_passed, str(report)

    def test_identity_composition(self):
        f = generic_character()
        e = zero_character()
        assert compose_gamma(f, e).as_dict() == f.as_dict()
        assert compose_gamma(e, f).as_dict() == f.as_dict()

    def test_composition_closure_on_basis(self):
        f = generic_character("f")
        g = generic_character("g")
        h = compose_gamma(f, g)
        for name in BASIS_NAMES:
            tree = basis_tree(name)
            lhs = gamma_f(f, gamma_f(g, TreeCombination.single(tree)))
            rhs = gamma_f(h, TreeCombination.single(tree))
            assert lhs == rhs, name

    def test_gamma_fixes_polynomials_degree_zero(self):
        f = generic_character()
        one = TreeCombination.single(ONE)
        assert gamma_f(f, one) == one


class TestRenormalization:
    def test_golden_table(self):
        report = verify_golden_tables()
        assert report.table_status()["renormalize"]

    def test_primitive_trees_fixed(self):
        params = RenormParams()
        for name in ("Xi", "<1d>", "<2d1>", "<1d1d>"):
            x = TreeCombination.single(basis_tree(name))
            assert renormalize(params, x) == x, name

    def test_pair_contraction(self):
        params = RenormParams()
        x = TreeCombination.single(basis_tree("<2d>"))
        out = renormalize(params, x)
        assert out.coeff(ONE) == -SYMBOLS["C1"]

    def test_zero_params_is_identity(self):
        params = RenormParams.zero()
        for name in BASIS_NAMES:
            x = TreeCombination.single(basis_tree(name))
            assert renormalize(params, x) == x, name


class TestExpansion:
    def test_w_contains_ansatz_terms(self):
        w = picard_W()
        half = sympy.Rational(1, 2)
        assert w.coeff(basis_tree("<2d1>")) == half
        assert w.coeff(basis_tree("<2d2d1>")) == sympy.Rational(1, 4)
        assert w.coeff(basis_tree("<1d1>")) == SYMBOLS["a10"] + half * SYMBOLS["wtilde"]
        assert w.coeff(ONE) == SYMBOLS["w"]
        assert w.coeff(X1) == SYMBOLS["wtilde"]

    def test_dw_is_derivative(self):
        assert picard_dW() == picard_W().deriv()

    def test_q_leq0_has_eight_terms(self):
        q = q_leq0_nonlinearity()
        assert len(q.items()) == 8

    def test_constants(self):
        c1, c2, c3 = renorm_constants()
        s = SYMBOLS
        assert sympy.expand(c1 - s["C0"]) == 0
        assert sympy.expand(c2 - 2 * s["C0"]) == 0
        want = (
            sympy.Rational(1, 4) * s["C2"]
            + sympy.Rational(1, 2) * s["C3"]
            + 2 * s["a10"] * s["C0"]
            + s["C1"]
        )
        assert sympy.expand(c3 - want) == 0


class TestSectors:
    def test_table_shape(self):
        table = sector_table()
        assert len(table) == 33  # 6 rows x 5 exponents + 3 headline values

    def test_headline_exponents(self):
        table = sector_table()
        assert table["gamma"] == ExactDegree(Fraction(3, 2), Fraction(1))
        assert table["eta"] == ExactDegree(Fraction(0), Fraction(1))
        assert table["sigma"] == ExactDegree(Fraction(1, 2), Fraction(2))
