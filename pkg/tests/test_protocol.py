"""
Testes para a execução dos esquemas A, B, B unilateral, C e n partes
Execute: pytest tests/
"""

from itertools import product

import pytest
from pydantic import ValidationError

from ghz_smc.boolfn import degree2_decomposition, inner_product_decomposition, parse_expression
from ghz_smc.protocol import (
    ArityError,
    CheatConfig,
    CheatConfigError,
    CheatStrategy,
    PolicyError,
    Scheme,
    TesterLieMode,
    TesterPolicy,
    Variant,
    branch_estimate,
    enumerate_views,
    nominate_third,
    run_multiparty,
    run_scheme,
    run_scheme_a,
    run_scheme_b,
    run_scheme_b_one_sided,
    run_scheme_c,
)
from ghz_smc.qsim import measurement_setting
from ghz_smc.randomness import EnumerationLimitError, ForcedSource, as_source, enumerate_branches
from ghz_smc.session import THREE_PARTIES, Party

ALICE, BOB, CHARLIE = THREE_PARTIES.as_tuple()
INPUTS = list(product((0, 1), repeat=2))
SEEDS = range(20)


@pytest.fixture
def and_decomp():
    return inner_product_decomposition(parse_expression("x1 & y1", {"x1": "alice", "y1": "bob"}))


@pytest.fixture
def xor_decomp():
    return inner_product_decomposition(parse_expression("x1 ^ y1", {"x1": "alice", "y1": "bob"}))


@pytest.fixture
def pairwise_form():
    f = parse_expression("(x & y) ^ (y & z) ^ (x & z)", {"x": "alice", "y": "bob", "z": "charlie"})
    return degree2_decomposition(f, 3)


def _payloads(view, step):
    return tuple(m.payload for m in view.received if m.step_label == step)


# ===================================
# Esquema A
# ===================================


def test_scheme_a_and_one_one(and_decomp):
    """Testa AND(1,1): saída 1 e paridade recebida por Charlie igual a 0"""
    result = run_scheme_a(and_decomp, (1,), (1,), 7)
    charlie = result.views[CHARLIE]
    masked_p = _payloads(charlie, "A.4")[0]
    masked_q = _payloads(charlie, "A.5")[0]

    assert result.output == 1
    assert masked_p ^ masked_q == 0
    assert charlie.output() == 1


@pytest.mark.parametrize("x,y", INPUTS)
def test_scheme_a_xor_all_seeds(xor_decomp, x, y):
    """Testa XOR (m = 2) em todas as entradas e sementes"""
    for seed in SEEDS:
        assert run_scheme_a(xor_decomp, (x,), (y,), seed).output == x ^ y


def test_scheme_a_transcript_steps(and_decomp):
    """Testa o formato da transcrição do esquema A"""
    result = run_scheme_a(and_decomp, (0,), (0,), 3)
    steps = [m.step_label for m in result.transcript.messages]

    assert steps == ["A.4", "A.5", "A.8", "A.8", "A.9"]


# ===================================
# Esquema B
# ===================================


@pytest.mark.parametrize("variant", list(Variant))
@pytest.mark.parametrize("x,y", INPUTS)
def test_scheme_b_correct(and_decomp, variant, x, y):
    """Testa AND em todas as entradas nas duas variantes"""
    for seed in SEEDS:
        result = run_scheme_b(and_decomp, (x,), (y,), seed, variant)
        assert result.output == x & y
        assert all(view.output() == x & y for view in result.views.values())


def test_scheme_b_forced_pads_cancel(and_decomp):
    """Testa pads p_a = p_b = 1: Charlie mede na base de P ⊕ Q"""
    source = ForcedSource(as_source(5), {"alice.pad[1]": 1, "bob.pad[1]": 1})
    result = run_scheme_b(and_decomp, (1,), (0,), source)
    charlie = result.views[CHARLIE]

    assert charlie.measured[0].basis == measurement_setting(1 ^ 0)
    assert result.output == 0


def test_scheme_b_qubit_swap_transcript(and_decomp):
    """Testa as entregas de qubits dos passos 4, 6 e 8"""
    result = run_scheme_b(and_decomp, (1,), (1,), 1, Variant.QUBIT_SWAP)
    handovers = [m.step_label for m in result.transcript.messages if m.channel == "QubitHandover"]

    assert handovers == ["B.4"] * 3 + ["B.6"] * 3 + ["B.8"] * 3


def test_scheme_b_ensemble_has_no_handovers(and_decomp):
    """Testa que o ensemble dispensa a troca de qubits"""
    result = run_scheme_b(and_decomp, (1,), (1,), 1, Variant.ENSEMBLE)

    assert all(m.channel != "QubitHandover" for m in result.transcript.messages)


@pytest.mark.parametrize("x,y", INPUTS)
def test_scheme_b_charlie_pair_uniform(and_decomp, x, y):
    """Testa que o par recebido por Charlie é uniforme e independente das entradas"""
    distribution = enumerate_views(Scheme.B, and_decomp, (x,), (y,))[CHARLIE]
    pairs = {}
    for view, probability in distribution.items():
        key = _payloads(view, "B.10")
        pairs[key] = pairs.get(key, 0.0) + probability

    assert set(pairs) == set(INPUTS)
    for probability in pairs.values():
        assert probability == pytest.approx(0.25)


def test_scheme_b_variants_give_same_views(and_decomp):
    """Testa que as duas variantes geram a mesma distribuição de visões"""
    swap = enumerate_views(Scheme.B, and_decomp, (1,), (0,), Variant.QUBIT_SWAP)
    ensemble = enumerate_views(Scheme.B, and_decomp, (1,), (0,), Variant.ENSEMBLE)

    for party in THREE_PARTIES.as_tuple():
        assert set(swap[party]) == set(ensemble[party])
        for view, probability in swap[party].items():
            assert ensemble[party][view] == pytest.approx(probability)


def _total_variation(p, q):
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in set(p) | set(q))


@pytest.mark.parametrize("variant", list(Variant))
@pytest.mark.parametrize("x,y", [(0, 1), (1, 0)])
def test_scheme_b_charlie_view_depends_only_on_output(and_decomp, variant, x, y):
    """Testa que Charlie vê a mesma distribuição para entradas com a mesma saída"""
    reference = enumerate_views(Scheme.B, and_decomp, (0,), (0,), variant)[CHARLIE]
    other = enumerate_views(Scheme.B, and_decomp, (x,), (y,), variant)[CHARLIE]

    assert _total_variation(reference, other) < 1e-9


def test_scheme_b_alice_view_independent_of_bob_input(and_decomp):
    """Testa que, com x = 0, a visão de Alice não depende de y"""
    with_zero = enumerate_views(Scheme.B, and_decomp, (0,), (0,))[ALICE]
    with_one = enumerate_views(Scheme.B, and_decomp, (0,), (1,))[ALICE]

    assert _total_variation(with_zero, with_one) < 1e-9


# ===================================
# Esquema B unilateral
# ===================================


def test_scheme_b_one_sided_only_bob_learns(and_decomp):
    """Testa que só Bob aprende f e nada é difundido"""
    result = run_scheme_b_one_sided(and_decomp, (1,), (1,), 7)

    assert result.output == 1
    assert result.views[BOB].output() == 1
    assert result.views[ALICE].output() is None
    assert result.views[ALICE].announced == ()
    assert _payloads(result.views[BOB], "B.13")


@pytest.mark.parametrize("x,y", INPUTS)
def test_scheme_b_one_sided_correct(and_decomp, x, y):
    """Testa o valor calculado por Bob em todas as entradas"""
    for seed in SEEDS:
        assert run_scheme_b_one_sided(and_decomp, (x,), (y,), seed).output == x & y


# ===================================
# Esquema C
# ===================================


def test_scheme_c_honest(and_decomp):
    """Testa sessão honesta: saída 1 e repetições sem testador consistentes"""
    result = run_scheme_c(and_decomp, (1,), (1,), 7, TesterPolicy(t_a=0.25, t_b=0.25, n_rep=20))

    assert not result.halted
    assert result.output == 1
    assert len(result.repetitions) == 20
    for record in result.repetitions:
        if not record.announced_testers:
            assert record.value == 1
        if ALICE in record.announced_testers or BOB in record.announced_testers:
            assert record.value == 0


@pytest.mark.parametrize("seed", range(30))
def test_scheme_c_single_repetition_never_halts(and_decomp, seed):
    """Testa a última repetição sem testadores quando não há referência"""
    result = run_scheme_c(and_decomp, (1,), (1,), seed, TesterPolicy(n_rep=1))

    assert result.output == 1
    assert result.repetitions[0].announced_testers == ()


def test_scheme_c_requires_policy(and_decomp):
    """Testa erro sem política de testadores"""
    with pytest.raises(PolicyError):
        run_scheme_c(and_decomp, (1,), (1,), 7)


def test_scheme_c_flip_sum_detected_at_step_16(and_decomp):
    """Testa FlipSum por Bob: detectado quando só Alice testa"""
    cheat = CheatConfig.parse("flip-sum:bob")
    result = run_scheme_c(and_decomp, (1,), (1,), 11, TesterPolicy(n_rep=200), cheat)

    assert result.halted
    assert result.output.step == "C.16"
    last = result.repetitions[-1]
    assert last.announced_testers == (ALICE,)
    assert last.index == result.detected_at


def test_scheme_c_fake_pad_detected(and_decomp):
    """Testa FakePad por Alice: resultado de Charlie vira moeda"""
    result = run_scheme_c(and_decomp, (1,), (1,), 3, TesterPolicy(n_rep=50), CheatConfig.parse("fake-pad:alice"))

    assert result.halted


def test_scheme_c_silent_tester_detected(and_decomp):
    """Testa TesterLie silencioso com f = 1: inconsistência entre repetições"""
    cheat = CheatConfig.parse("tester-lie:alice:silent")
    result = run_scheme_c(and_decomp, (1,), (1,), 5, TesterPolicy(n_rep=50), cheat)

    assert result.halted
    assert result.output.step == "C.17"


def test_scheme_c_false_claim_harmless_when_f_zero(and_decomp):
    """Testa TesterLie com falso anúncio e f = 0: sem efeito"""
    cheat = CheatConfig.parse("tester-lie:bob:false-claim")
    for seed in SEEDS:
        result = run_scheme_c(and_decomp, (0,), (0,), seed, TesterPolicy(n_rep=10), cheat)
        assert result.output == 0


@pytest.mark.parametrize("x,y", INPUTS)
def test_scheme_c_exhaustive_never_halts(and_decomp, x, y):
    """Testa todos os padrões de testadores e pads com N_rep = 2: nenhuma interrupção espúria"""
    leaves = enumerate_branches(lambda source: run_scheme_c(and_decomp, (x,), (y,), source, TesterPolicy(n_rep=2)))

    assert sum(p for p, _ in leaves) == pytest.approx(1.0)
    for _, result in leaves:
        assert not result.halted
        assert result.output == x & y


def test_run_scheme_rejects_cheat_outside_c(and_decomp):
    """Testa que trapaças só existem no esquema C"""
    with pytest.raises(CheatConfigError):
        run_scheme(Scheme.B, and_decomp, (1,), (1,), 7, cheat=CheatConfig.parse("flip-sum:bob"))


# ===================================
# Configurações
# ===================================


def test_cheat_config_parse():
    """Testa a forma de linha de comando das trapaças"""
    silent = CheatConfig.parse("tester-lie:alice:silent")

    assert CheatConfig.parse("flip-sum:bob").by == Party.BOB
    assert silent.strategy == CheatStrategy.TESTER_LIE
    assert silent.mode == TesterLieMode.SILENT_TESTER
    assert not CheatConfig.parse("none").active
    assert CheatConfig.parse("flip-sum:charlie").active


@pytest.mark.parametrize("text", ["fake-pad:charlie", "tester-lie:bob", "flip-sum", "jam:alice", "flip-sum:eve"])
def test_cheat_config_parse_errors(text):
    """Testa configurações de trapaça inválidas"""
    with pytest.raises(CheatConfigError):
        CheatConfig.parse(text)


@pytest.mark.parametrize("fields", [{"t_a": 0.5}, {"t_b": 0.0}, {"n_rep": 0}])
def test_tester_policy_validation(fields):
    """Testa limites da política de testadores"""
    with pytest.raises(ValidationError):
        TesterPolicy(**fields)


def test_arity_error(and_decomp):
    """Testa entradas com tamanho errado"""
    with pytest.raises(ArityError):
        run_scheme_b(and_decomp, (1, 0), (1,), 7)
    with pytest.raises(ArityError):
        run_scheme_b(and_decomp, (2,), (1,), 7)


def test_determinism(and_decomp):
    """Testa que a mesma semente reproduz a sessão"""
    first = run_scheme(Scheme.B, and_decomp, (1,), (1,), 42)
    second = run_scheme(Scheme.B, and_decomp, (1,), (1,), 42)

    assert first.transcript.to_jsonl() == second.transcript.to_jsonl()
    assert first.views == second.views


# ===================================
# Esquema de n partes
# ===================================


def test_nominate_third():
    """Testa a escolha de j3"""
    assert nominate_third(2, 1, 3) == 3
    assert nominate_third(3, 2, 4) == 1


def test_multiparty_pairwise_and(pairwise_form):
    """Testa xy ⊕ yz ⊕ xz com (1, 1, 0)"""
    result = run_multiparty(pairwise_form, {1: (1,), 2: (1,), 3: (0,)}, 7)

    assert result.output == 1
    assert all(view.output() == 1 for view in result.views.values())


@pytest.mark.parametrize("variant", list(Variant))
def test_multiparty_four_parties_exhaustive(variant):
    """Testa n = 4 com os seis pares em todas as 16 entradas"""
    party_of = {"a": "p1", "b": "p2", "c": "p3", "d": "p4"}
    expr = " ^ ".join(f"({u} & {v})" for u, v in ["ab", "ac", "ad", "bc", "bd", "cd"])
    f = parse_expression(expr, party_of)
    form = degree2_decomposition(f, 4)

    for bits in product((0, 1), repeat=4):
        inputs = {j: (bit,) for j, bit in enumerate(bits, start=1)}
        assert run_multiparty(form, inputs, sum(bits), variant=variant).output == form.expected(inputs)


def test_multiparty_folded_term():
    """Testa termo local dobrado (parceiro constante 1) em todas as entradas"""
    f = parse_expression("x1 ^ (y1 & z1)", {"x1": "alice", "y1": "bob", "z1": "charlie"})
    form = degree2_decomposition(f, 3)

    for bits in product((0, 1), repeat=3):
        inputs = {j: (bit,) for j, bit in enumerate(bits, start=1)}
        assert run_multiparty(form, inputs, 9).output == f.evaluate(dict(zip(f.variables, bits)))


def test_multiparty_inner_c(pairwise_form):
    """Testa o esquema de n partes com testadores"""
    inputs = {1: (1,), 2: (0,), 3: (1,)}
    result = run_multiparty(pairwise_form, inputs, 4, Scheme.C, TesterPolicy(n_rep=5))

    assert not result.halted
    assert result.output == pairwise_form.expected(inputs)
    assert len(result.repetitions) == 5


def test_multiparty_inner_c_requires_policy(pairwise_form):
    """Testa erro com inner=C sem política"""
    with pytest.raises(PolicyError):
        run_multiparty(pairwise_form, {1: (1,), 2: (0,), 3: (1,)}, 4, Scheme.C)


def test_multiparty_rejects_missing_party(pairwise_form):
    """Testa erro com entradas faltando"""
    with pytest.raises(ArityError):
        run_multiparty(pairwise_form, {1: (1,), 2: (0,)}, 4)


# ===================================
# Enumeração
# ===================================


def test_branch_estimate():
    """Testa as cotas de ramos por esquema"""
    assert branch_estimate(Scheme.A, 2) == 64
    assert branch_estimate(Scheme.B, 1) == 16
    assert branch_estimate(Scheme.C, 1, TesterPolicy(n_rep=2)) == 64**2


def test_enumerate_views_probabilities_sum_to_one(and_decomp):
    """Testa que cada distribuição de visões soma 1"""
    distributions = enumerate_views(Scheme.C, and_decomp, (1,), (1,), Variant.ENSEMBLE, TesterPolicy(n_rep=2))

    for distribution in distributions.values():
        assert sum(distribution.values()) == pytest.approx(1.0)


def test_enumerate_views_refuses_over_limit(and_decomp):
    """Testa recusa quando a estimativa excede o limite"""
    with pytest.raises(EnumerationLimitError):
        enumerate_views(Scheme.B, and_decomp, (1,), (1,), limit=10)


# ===================================
# Correção em grade
# ===================================

GRID_FUNCTIONS = {
    "and": ("x1 & y1", {"x1": "alice", "y1": "bob"}),
    "xor": ("x1 ^ y1", {"x1": "alice", "y1": "bob"}),
    "eq2": ("~(x1 ^ y1) & ~(x2 ^ y2)", {"x1": "alice", "x2": "alice", "y1": "bob", "y2": "bob"}),
    "maj3": ("(x1 & x2) | (x2 & y1) | (x1 & y1)", {"x1": "alice", "x2": "alice", "y1": "bob"}),
}

GRID_SCHEMES = {
    "A": (Scheme.A, Variant.QUBIT_SWAP, None),
    "B-QubitSwap": (Scheme.B, Variant.QUBIT_SWAP, None),
    "B-Ensemble": (Scheme.B, Variant.ENSEMBLE, None),
    "B1sided": (Scheme.B_ONE_SIDED, Variant.QUBIT_SWAP, None),
    "C": (Scheme.C, Variant.QUBIT_SWAP, TesterPolicy(n_rep=5)),
}


@pytest.mark.slow
@pytest.mark.parametrize("scheme_name", list(GRID_SCHEMES))
@pytest.mark.parametrize("function_name", list(GRID_FUNCTIONS))
def test_schemes_correct_on_grid(function_name, scheme_name):
    """Testa AND, XOR, igualdade de 2 bits e maioria em todas as entradas × 100 sementes"""
    expr, party_of = GRID_FUNCTIONS[function_name]
    f = parse_expression(expr, party_of)
    decomp = inner_product_decomposition(f)
    scheme, variant, policy = GRID_SCHEMES[scheme_name]

    for assignment in f.assignments():
        x = tuple(assignment[v] for v in f.party_variables("alice"))
        y = tuple(assignment[v] for v in f.party_variables("bob"))
        expected = f.evaluate(assignment)
        for seed in range(100):
            result = run_scheme(scheme, decomp, x, y, seed, variant, policy)
            assert not result.halted
            assert result.output == expected, f"{function_name} {scheme_name} {assignment} semente {seed}"
            if scheme == Scheme.B_ONE_SIDED:
                assert result.views[BOB].output() == expected
