import pytest

from splogic import (
    And,
    ArityMismatchError,
    Atom,
    Box,
    Const,
    Equal,
    Forall,
    FormulaSyntaxError,
    Not,
    UndeclaredSymbolError,
    Var,
    VocabularyError,
    all_variables,
    formula_size,
    free_variables,
    is_monodic,
    is_sentence,
    make_fosl_vocabulary,
    make_v1_vocabulary,
    parse_formula,
    print_formula,
)
from splogic.parser import parse_raw

VOCAB = make_fosl_vocabulary(
    {"P": 1, "Q": 0, "R": 2, "AridArea": 1, "Near": 2, "Desert": 1},
    ["c", "house"],
    ["s"],
)


class TestParsing:
    def test_box_over_conjunction(self):
        f = parse_formula("[*] (AridArea(?a) & Near(house, ?a))", VOCAB)
        assert f == Box(
            "*",
            And(
                Atom("AridArea", (Var("a"),)),
                Atom("Near", (Const("house"), Var("a"))),
            ),
        )

    def test_diamond_is_negated_box(self):
        f = parse_formula("<s> P(c)", VOCAB)
        assert f == Not(Box("s", Not(Atom("P", (Const("c"),)))))

    def test_exists_is_negated_forall(self):
        f = parse_formula("exists ?x P(?x)", VOCAB)
        assert f == Not(Forall("x", Not(Atom("P", (Var("x"),)))))

    def test_quantifier_dot_is_optional(self):
        assert parse_raw("forall ?x. P(?x)") == parse_raw("forall ?x P(?x)")

    def test_implication_desugars(self):
        f = parse_raw("P(c) -> Q")
        assert f == Not(And(Atom("P", (Const("c"),)), Not(Atom("Q"))))

    def test_disjunction_desugars(self):
        f = parse_raw("P(c) | Q")
        assert f == Not(And(Not(Atom("P", (Const("c"),))), Not(Atom("Q"))))

    def test_binary_operators_right_associate(self):
        assert parse_raw("P -> Q -> R0") == parse_raw("P -> (Q -> R0)")
        assert parse_raw("P & Q & R0") == And(
            Atom("P"), And(Atom("Q"), Atom("R0"))
        )

    def test_conjunction_binds_tighter_than_disjunction(self):
        assert parse_raw("P | Q & R0") == parse_raw("P | (Q & R0)")

    def test_inequality_desugars_to_negated_equality(self):
        f = parse_raw("?x != c")
        assert f == Not(Equal(Var("x"), Const("c")))

    def test_nullary_atom(self):
        assert parse_formula("Q", VOCAB) == Atom("Q")

    def test_lowercase_translation_predicates_parse_when_declared(self):
        v = make_fosl_vocabulary({"prec": 2, "ink": 1}, ["n"], [])
        f = parse_formula("prec(n, ?e) & ink(n)", v)
        assert f == And(
            Atom("prec", (Const("n"), Var("e"))), Atom("ink", (Const("n"),))
        )

    def test_truth_constants_are_closed(self):
        assert free_variables(parse_raw("true")) == frozenset()
        assert free_variables(parse_raw("false")) == frozenset()
        assert parse_raw("false") == Not(parse_raw("true"))


class TestParseErrors:
    def test_syntax_error_carries_position(self):
        with pytest.raises(FormulaSyntaxError) as err:
            parse_formula("P(c) &", VOCAB)
        assert err.value.position == 6

    def test_unexpected_character(self):
        with pytest.raises(FormulaSyntaxError) as err:
            parse_formula("P(c) @ Q", VOCAB)
        assert err.value.position == 5

    def test_undeclared_predicate(self):
        with pytest.raises(UndeclaredSymbolError) as err:
            parse_formula("Missing(c)", VOCAB)
        assert err.value.symbol == "Missing"

    def test_undeclared_constant(self):
        with pytest.raises(UndeclaredSymbolError) as err:
            parse_formula("P(zzz)", VOCAB)
        assert err.value.symbol == "zzz"

    def test_undeclared_standpoint(self):
        with pytest.raises(UndeclaredSymbolError) as err:
            parse_formula("[nope] P(c)", VOCAB)
        assert err.value.symbol == "nope"

    def test_arity_mismatch(self):
        with pytest.raises(ArityMismatchError) as err:
            parse_formula("P(c, c)", VOCAB)
        assert err.value.symbol == "P"

    def test_trailing_input(self):
        with pytest.raises(FormulaSyntaxError):
            parse_formula("P(c) P(c)", VOCAB)


class TestPrinting:
    def test_direct_rendering(self):
        assert print_formula(Box("*", Atom("P", (Const("c"),)))) == "[*] P(c)"

    def test_printer_resugars_diamond(self):
        f = Not(Box("s", Not(Atom("P", (Const("c"),)))))
        assert print_formula(f) == "<s> P(c)"

    def test_printer_resugars_exists(self):
        f = Not(Forall("x", Not(Atom("P", (Var("x"),)))))
        assert print_formula(f) == "exists ?x P(?x)"

    def test_roundtrip_on_a_thousand_random_formulas(self):
        from splogic import generate_formula, make_v1_vocabulary

        v1 = make_v1_vocabulary(
            ["Kind"], {"Attr": 1}, {"Shape": 2}, ["n"], ["s"]
        )
        for seed in range(500):
            f = generate_formula(VOCAB, seed, 4, free_vars=("x",))
            assert parse_raw(print_formula(f)) == f
            g = generate_formula(v1, seed, 4)
            assert parse_raw(print_formula(g)) == g

    @pytest.mark.parametrize(
        "text",
        [
            "P(c) & Q & R(c, c)",
            "(P(c) & Q) & R(c, c)",
            "!(P(c) | Q)",
            "forall ?x (P(?x) -> exists ?y R(?x, ?y))",
            "[s] <s> [*] P(c)",
            "?x = ?y & c != house",
            "P(c) <-> Q <-> R(c, c)",
            "!!P(c)",
            "true & false",
        ],
    )
    def test_parse_print_parse_fixed_point(self, text):
        first = parse_raw(text)
        printed = print_formula(first)
        assert parse_raw(printed) == first


class TestDesugaringTotality:
    def test_parser_output_uses_only_core_constructors(self):
        texts = [
            "P(c) -> Q | R(c, c) <-> <s> exists ?x P(?x)",
            "true | false",
            "?x != c & !forall ?y. P(?y)",
        ]
        core = (Atom, Equal, Not, And, Forall, Box)

        def walk(f):
            assert isinstance(f, core)
            if isinstance(f, (Not, Forall, Box)):
                walk(f.body)
            elif isinstance(f, And):
                walk(f.left)
                walk(f.right)

        for text in texts:
            walk(parse_raw(text))


class TestQueries:
    def test_free_variables_atom(self):
        assert free_variables(Atom("P", (Var("x"),))) == {"x"}

    def test_free_variables_forall_removes_bound(self):
        f = Forall("x", Atom("R", (Var("x"), Var("y"))))
        assert free_variables(f) == {"y"}

    def test_formula_a_is_sentence(self, formula_a):
        assert free_variables(formula_a) == frozenset()
        assert is_sentence(formula_a)

    def test_free_variables_invariant_under_box(self):
        body = Atom("R", (Var("x"), Var("y")))
        assert free_variables(Box("s", body)) == free_variables(body)

    def test_all_variables_includes_bound(self):
        f = Forall("x", Atom("R", (Var("x"), Var("y"))))
        assert all_variables(f) == {"x", "y"}

    def test_formula_size(self):
        assert formula_size(Atom("P", (Const("c"),))) == 1
        p = Atom("P", (Const("c"),))
        assert formula_size(And(p, p)) == 3
        assert formula_size(Box("*", Forall("x", Atom("P", (Var("x"),))))) == 3

    def test_monodic_single_free_variable_under_box(self):
        assert is_monodic(Box("s", Atom("P", (Var("x"),))))

    def test_not_monodic_two_free_variables_under_box(self):
        assert not is_monodic(Box("s", Atom("R", (Var("x"), Var("y")))))

    def test_formula_c_is_monodic(self, formula_c):
        # every box body in the arguably-part-of sentence keeps one free
        # variable at most
        assert is_monodic(formula_c)


class TestVocabularies:
    def test_universal_standpoint_always_present(self):
        v = make_fosl_vocabulary({"P": 1}, [], [])
        assert v.has_standpoint("*")

    def test_predicate_constant_name_overlap_rejected(self):
        with pytest.raises(VocabularyError):
            make_fosl_vocabulary({"P": 1, "c": 0}, ["c"], [])

    def test_lowercase_user_predicate_rejected(self):
        with pytest.raises(VocabularyError):
            make_fosl_vocabulary({"pred": 1}, [], [])

    def test_reserved_symbols_blocked_in_v1(self):
        with pytest.raises(VocabularyError):
            make_v1_vocabulary(["Kind"], {}, {}, ["prec"], [])

    def test_v1_partition_must_be_disjoint(self):
        with pytest.raises(VocabularyError):
            make_v1_vocabulary(["Kind"], {"Kind": 1}, {}, [], [])

    def test_v1_indefinite_arity_positive(self):
        with pytest.raises(VocabularyError):
            make_v1_vocabulary(["Kind"], {"Bad": 0}, {}, [], [])
