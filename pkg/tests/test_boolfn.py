"""
Testes para funções booleanas, ANF e decomposições
Execute: pytest tests/
"""

import json

import pytest

from ghz_smc.boolfn import (
    ANF,
    Degree2ViolationError,
    ExpressionSyntaxError,
    FunctionFileError,
    MissingVariableError,
    PartyCountError,
    TooManyVariablesError,
    UndeclaredVariableError,
    degree2_decomposition,
    degree2_pairs,
    eval_anf,
    inner_product_decomposition,
    load_function_file,
    max_party_span,
    parse_expression,
    to_anf,
)

TWO_PARTIES = {"x1": "alice", "y1": "bob"}
EQUALITY = {"x1": "alice", "x2": "alice", "y1": "bob", "y2": "bob"}
THREE = {"x": "alice", "y": "bob", "z": "charlie"}


# ===================================
# Parsing
# ===================================


def test_parse_and_truth_table():
    """Testa a tabela verdade do AND"""
    f = parse_expression("x1 & y1", TWO_PARTIES)

    assert f.truth_table.tolist() == [0, 0, 0, 1]
    assert f.parties == ("alice", "bob")


def test_parse_xor_truth_table():
    """Testa a tabela verdade do XOR"""
    assert parse_expression("x1 ^ y1", TWO_PARTIES).truth_table.tolist() == [0, 1, 1, 0]


def test_parse_or_identity():
    """Testa OR = a ⊕ b ⊕ ab"""
    left = parse_expression("(x1 | y1)", TWO_PARTIES)
    right = parse_expression("x1 ^ y1 ^ (x1 & y1)", TWO_PARTIES)

    assert left.truth_table.tolist() == right.truth_table.tolist()


def test_parse_keywords_and_not():
    """Testa palavras-chave e negação"""
    f = parse_expression("not x1 and y1", TWO_PARTIES)

    assert f.truth_table.tolist() == [0, 1, 0, 0]
    assert parse_expression("!x1", TWO_PARTIES).truth_table.tolist() == [1, 1, 0, 0]


def test_parse_precedence_and_over_xor():
    """Testa que AND tem precedência sobre XOR"""
    f = parse_expression("x1 ^ x1 & y1", TWO_PARTIES)

    assert f.truth_table.tolist() == [0, 0, 1, 0]


def test_parse_constants():
    """Testa constantes 0 e 1"""
    assert parse_expression("1", TWO_PARTIES).truth_table.tolist() == [1, 1, 1, 1]
    assert parse_expression("x1 & 0", TWO_PARTIES).truth_table.tolist() == [0, 0, 0, 0]


def test_parse_syntax_error_position():
    """Testa a posição reportada num erro de sintaxe"""
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_expression("x1 & & y1", TWO_PARTIES)

    assert info.value.position == 5


def test_parse_incomplete_expression():
    """Testa expressão incompleta"""
    with pytest.raises(ExpressionSyntaxError, match="incompleta"):
        parse_expression("x1 &", TWO_PARTIES)


def test_parse_unbalanced_parenthesis():
    """Testa parêntese sem fechamento"""
    with pytest.raises(ExpressionSyntaxError):
        parse_expression("(x1 & y1", TWO_PARTIES)


def test_parse_undeclared_variable():
    """Testa variável não declarada"""
    with pytest.raises(UndeclaredVariableError):
        parse_expression("x1 & w", TWO_PARTIES)


def test_parse_too_many_variables():
    """Testa o limite de 20 variáveis"""
    party_of = {f"v{k}": "alice" for k in range(21)}

    with pytest.raises(TooManyVariablesError):
        parse_expression("v0", party_of)


def test_evaluate_missing_variable():
    """Testa avaliação sem todas as variáveis"""
    f = parse_expression("x1 & y1", TWO_PARTIES)

    with pytest.raises(MissingVariableError):
        f.evaluate({"x1": 1})


# ===================================
# Arquivos de função
# ===================================


def test_load_function_file(tmp_path):
    """Testa leitura de um arquivo de função"""
    path = tmp_path / "and.json"
    path.write_text(json.dumps({"parties": {"alice": ["x1"], "bob": ["y1"]}, "expr": "x1 & y1"}))

    f = load_function_file(path)

    assert f.variables == ("x1", "y1")
    assert f.party_variables("bob") == ("y1",)
    assert f.evaluate({"x1": 1, "y1": 1}) == 1


def test_load_function_file_malformed(tmp_path):
    """Testa arquivo sem os campos obrigatórios"""
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"expr": "x1"}))

    with pytest.raises(FunctionFileError):
        load_function_file(path)


def test_load_function_file_missing(tmp_path):
    """Testa arquivo inexistente"""
    with pytest.raises(FunctionFileError):
        load_function_file(tmp_path / "nada.json")


def test_load_function_file_duplicate_variable(tmp_path):
    """Testa variável declarada em duas partes"""
    path = tmp_path / "dup.json"
    path.write_text(json.dumps({"parties": {"alice": ["x1"], "bob": ["x1"]}, "expr": "x1"}))

    with pytest.raises(FunctionFileError, match="duas partes"):
        load_function_file(path)


# ===================================
# ANF
# ===================================


def test_anf_of_and():
    """Testa ANF do AND: um único monômio"""
    anf = to_anf(parse_expression("x1 & y1", TWO_PARTIES))

    assert anf.monomials == frozenset({frozenset({"x1", "y1"})})
    assert str(anf) == "x1*y1"


def test_anf_of_constant_one():
    """Testa ANF da constante 1: monômio vazio"""
    anf = to_anf(parse_expression("1", TWO_PARTIES))

    assert anf.monomials == frozenset({frozenset()})
    assert str(anf) == "1"


def test_anf_of_majority():
    """Testa ANF da maioria e reconstrução da tabela verdade"""
    f = parse_expression("(a & b) | (b & c) | (a & c)", {"a": "alice", "b": "bob", "c": "charlie"})
    anf = to_anf(f)

    assert anf.monomials == frozenset({frozenset("ab"), frozenset("bc"), frozenset("ac")})
    for assignment in f.assignments():
        assert eval_anf(anf, assignment) == f.evaluate(assignment)
    assert eval_anf(anf, {"a": 1, "b": 1, "c": 0}) == 1


def test_eval_anf_constant_and_missing():
    """Testa o monômio vazio e variáveis ausentes"""
    one = ANF(("x1",), frozenset({frozenset()}))

    assert eval_anf(one, {}) == 1
    with pytest.raises(MissingVariableError):
        eval_anf(ANF(("x1",), frozenset({frozenset({"x1"})})), {})


# ===================================
# Decomposição de duas partes
# ===================================


def test_decomposition_of_and():
    """Testa AND: m = 1 com (x1, y1)"""
    decomp = inner_product_decomposition(parse_expression("x1 & y1", TWO_PARTIES))

    assert decomp.m == 1
    assert [(str(p), str(q)) for p, q in decomp.terms] == [("x1", "y1")]


def test_decomposition_of_xor():
    """Testa XOR: m = 2 com (x1, 1) e (1, y1)"""
    decomp = inner_product_decomposition(parse_expression("x1 ^ y1", TWO_PARTIES))

    assert decomp.m == 2
    assert sorted((str(p), str(q)) for p, q in decomp.terms) == [("1", "y1"), ("x1", "1")]
    for x in (0, 1):
        for y in (0, 1):
            assert decomp.evaluate((x,), (y,)) == x ^ y


def test_decomposition_of_equality_needs_four_terms():
    """Testa igualdade de cadeias de 2 bits: m = 4 e reconstrução exata"""
    f = parse_expression("~(x1 ^ y1) & ~(x2 ^ y2)", EQUALITY)
    decomp = inner_product_decomposition(f)

    assert decomp.m == 4
    for assignment in f.assignments():
        x = (assignment["x1"], assignment["x2"])
        y = (assignment["y1"], assignment["y2"])
        assert decomp.evaluate(x, y) == f.evaluate(assignment) == decomp.expected(x, y)


def test_decomposition_local_values():
    """Testa (P_i, Q_i) de cada termo"""
    decomp = inner_product_decomposition(parse_expression("x1 & y1", TWO_PARTIES))

    assert decomp.local_values((1,), (0,)) == [(1, 0)]


def test_decomposition_requires_two_parties():
    """Testa erro com três partes"""
    with pytest.raises(PartyCountError):
        inner_product_decomposition(parse_expression("x & y & z", THREE))


# ===================================
# Forma de grau 2
# ===================================


def test_degree2_pairwise_and():
    """Testa xy ⊕ yz ⊕ xz: três baldes com um termo cada"""
    f = parse_expression("(x & y) ^ (y & z) ^ (x & z)", THREE)
    form = degree2_decomposition(f, 3)

    assert set(form.pair_terms) == {(2, 1), (3, 1), (3, 2)}
    assert all(len(terms) == 1 for terms in form.pair_terms.values())
    assert form.lam == {(2, 1): 1, (3, 1): 1, (3, 2): 1}
    assert form.evaluate({1: (1,), 2: (1,), 3: (0,)}) == 1


def test_degree2_violation_names_monomial():
    """Testa xyz: monômio de três partes"""
    f = parse_expression("x & y & z", THREE)

    with pytest.raises(Degree2ViolationError) as info:
        degree2_decomposition(f, 3)

    assert info.value.monomial == frozenset({"x", "y", "z"})
    assert max_party_span(f) == 3


def test_degree2_folds_single_party_term():
    """Testa x1 ⊕ y1·z1: termo local dobrado num balde com parceiro 1"""
    f = parse_expression("x1 ^ (y1 & z1)", {"x1": "alice", "y1": "bob", "z1": "charlie"})
    form = degree2_decomposition(f, 3)

    assert [(str(p), str(q)) for p, q in form.pair_terms[(3, 2)]] == [("z1", "y1")]
    assert form.folded == ((1, frozenset({"x1"}), (2, 1)),)
    assert [(str(p), str(q)) for p, q in form.pair_terms[(2, 1)]] == [("1", "x1")]
    for assignment in f.assignments():
        inputs = {1: (assignment["x1"],), 2: (assignment["y1"],), 3: (assignment["z1"],)}
        assert form.evaluate(inputs) == f.evaluate(assignment) == form.expected(inputs)


def test_degree2_folds_into_existing_bucket():
    """Testa dobra num balde já existente que contém a parte"""
    f = parse_expression("z ^ (x & z)", THREE)
    form = degree2_decomposition(f, 3)

    assert set(form.pair_terms) == {(3, 1)}
    for assignment in f.assignments():
        inputs = {1: (assignment["x"],), 2: (assignment["y"],), 3: (assignment["z"],)}
        assert form.evaluate(inputs) == f.evaluate(assignment)


def test_degree2_four_parties_all_pairs():
    """Testa n = 4 com os seis pares e reconstrução exaustiva"""
    party_of = {"a": "p1", "b": "p2", "c": "p3", "d": "p4"}
    expr = " ^ ".join(f"({u} & {v})" for u, v in ["ab", "ac", "ad", "bc", "bd", "cd"])
    f = parse_expression(expr, party_of)
    form = degree2_decomposition(f, 4)

    assert sorted(form.pair_terms) == sorted(degree2_pairs(4))
    for assignment in f.assignments():
        inputs = {j: (assignment[name],) for j, name in enumerate("abcd", start=1)}
        assert form.evaluate(inputs) == f.evaluate(assignment)


def test_degree2_requires_matching_party_count():
    """Testa erro com número de partes incompatível"""
    with pytest.raises(PartyCountError):
        degree2_decomposition(parse_expression("x1 & y1", TWO_PARTIES), 2)


def test_degree2_pairs():
    """Testa a enumeração dos pares j1 > j2"""
    assert degree2_pairs(3) == [(2, 1), (3, 1), (3, 2)]
