"""
Interface de linha de comando: experimentos reproduzíveis baseados em arquivos

Para usar:
    python -m ghz_smc ghz-check --samples 10000
    python -m ghz_smc run --function and.json --scheme B --assign x1=1,y1=1
    python -m ghz_smc attack --function and.json --cheat flip-sum:bob --ta 0.25 --tb 0.25

Códigos de saída: 0 sucesso, 2 trapaça detectada (run), 1 erro de uso/configuração.
"""

import argparse
import logging
import sys
from itertools import combinations
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from .adversary import (
    Coalition,
    epr_attack,
    posterior_from_view,
    run_cheat_campaign,
    sample_coalition_view,
    threshold_audit,
)
from .boolfn import (
    BooleanFunction,
    Degree2ViolationError,
    MissingVariableError,
    degree2_decomposition,
    inner_product_decomposition,
    load_function_file,
    max_party_span,
    to_anf,
)
from .config import Config, setup_logging
from .protocol import (
    CheatConfig,
    Scheme,
    SessionResult,
    TesterPolicy,
    run_multiparty,
    run_scheme,
)
from .qsim import all_settings, measure_pauli, parity_law_settings, prepare_ghz, stabilizer_suite
from .randomness import EnumerationLimitError, RandomSource, spawn_seeds
from .reports import (
    ExperimentConfig,
    Report,
    ReportKind,
    get_output_dir,
    load_experiment_config,
    write_report,
    write_sweep_csv,
    write_transcript,
)
from .session import THREE_PARTIES, party_label, parse_party

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DETECTED = 2


class UsageError(ValueError):
    """Argumentos de linha de comando inválidos"""


class _Parser(argparse.ArgumentParser):
    # argparse sairia com 2, que aqui significa trapaça detectada
    def error(self, message):
        raise UsageError(message)


# ===================================
# Auxiliares
# ===================================


def parse_assignment(text: Optional[str]) -> Dict[str, int]:
    """ "x1=1,y1=0" -> {"x1": 1, "y1": 0}"""
    assignment: Dict[str, int] = {}
    if not text:
        return assignment
    for item in text.split(","):
        name, sep, value = item.partition("=")
        if not sep or value.strip() not in ("0", "1"):
            raise UsageError(f"Atribuição inválida: {item!r} (use nome=0 ou nome=1)")
        assignment[name.strip()] = int(value)
    return assignment


def _party_bits(f: BooleanFunction, party: str, assignment: Dict[str, int]) -> tuple:
    names = f.party_variables(party)
    missing = [n for n in names if n not in assignment]
    if missing:
        raise MissingVariableError(f"Sem valor para {', '.join(missing)} (use --assign)")
    return tuple(assignment[n] for n in names)


def _bits_label(bits: Sequence[int]) -> str:
    return "".join(str(b) for b in bits)


def _output_payload(result: SessionResult) -> dict:
    if result.halted:
        halt = result.output
        return {"halted": True, "detected_at": halt.detected_at, "reason": halt.reason, "step": halt.step}
    return {"halted": False, "value": result.output}


def _load_function(config: ExperimentConfig) -> BooleanFunction:
    if not config.function_file:
        raise UsageError("Informe --function (ou function_file em --config)")
    return load_function_file(config.function_file)


def _policy_from_args(args, base: Optional[dict] = None, n_rep: Optional[int] = None) -> TesterPolicy:
    fields = dict(base or {})
    if n_rep is not None and not base:
        fields["n_rep"] = n_rep
    flags = {"t_a": args.ta, "t_b": args.tb, "n_rep": args.nrep}
    fields.update({k: v for k, v in flags.items() if v is not None})
    return TesterPolicy(**fields)


def build_config(args, command: str) -> ExperimentConfig:
    """
    Monta a ExperimentConfig: arquivo de --config e, por cima, as flags explícitas

    --inner vale só para Multiparty; sem ele, o C interno é escolhido quando há
    política de testadores. Em privacy-audit, sem --nrep nem política no arquivo,
    o esquema C usa Config.AUDIT_NREP repetições.

    Args:
        args: Namespace do argparse
        command: Nome do subcomando

    Returns:
        ExperimentConfig validada
    """
    base = load_experiment_config(args.config).model_dump() if args.config else {}
    overrides = {
        "function_file": args.function,
        "scheme": args.scheme,
        "variant": args.variant,
        "seed": args.seed,
        "output_dir": args.out,
        "coalition": args.coalition.split(",") if args.coalition else None,
    }
    data = {**base, **{k: v for k, v in overrides.items() if v is not None}, "command": command}
    if args.cheat is not None:
        data["cheat"] = CheatConfig.parse(args.cheat).model_dump()

    scheme = Scheme(data.get("scheme", Scheme.B))
    wants_policy = any(v is not None for v in (args.ta, args.tb, args.nrep))
    if args.inner is not None:
        data["inner"] = args.inner

    if scheme == Scheme.MULTIPARTY:
        inner = data.get("inner")
        if inner is None:
            inner = Scheme.C if wants_policy or data.get("tester_policy") else Scheme.B
        data["inner"] = Scheme(inner)
        uses_policy = data["inner"] == Scheme.C
    else:
        data.pop("inner", None)
        uses_policy = scheme == Scheme.C

    if uses_policy:
        # enumeração exata só é viável com poucas repetições
        audit_nrep = Config.AUDIT_NREP if command == "privacy-audit" else None
        data["tester_policy"] = _policy_from_args(args, data.get("tester_policy"), audit_nrep).model_dump()
    else:
        if wants_policy:
            logger.warning("--ta/--tb/--nrep ignorados: o esquema %s não usa testadores", scheme.value)
        data.pop("tester_policy", None)
    return ExperimentConfig(**data)


def _coalitions_for(config: ExperimentConfig, n_parties: Optional[int] = None) -> List[frozenset]:
    if config.coalition:
        return [frozenset(parse_party(p) for p in config.coalition)]
    parties = THREE_PARTIES.as_tuple() if n_parties is None else tuple(range(1, n_parties + 1))
    return [frozenset(c) for size in range(1, len(parties)) for c in combinations(parties, size)]


# ===================================
# Comandos
# ===================================


def cmd_ghz_check(samples: int, seed: int) -> Report:
    """Verifica os estabilizadores exatamente e a lei de paridade por amostragem"""
    if samples < 1:
        raise UsageError("samples deve ser pelo menos 1")
    state = prepare_ghz()
    stabilizers = stabilizer_suite(state)
    source = RandomSource(np.random.default_rng(seed))

    settings = {}
    for a, b in all_settings():
        violations = 0
        ones = np.zeros(3, dtype=int)
        for _ in range(samples):
            current = state
            bits = []
            for qubit, basis in parity_law_settings(a, b):
                outcome, current = measure_pauli(current, qubit, basis, source)
                bits.append(outcome.bit)
            ones += bits
            if bits[0] ^ bits[1] ^ bits[2] != (a & b):
                violations += 1
        settings[f"a={a},b={b}"] = {
            "samples": samples,
            "violations": violations,
            "marginals": (ones / samples).tolist(),
        }

    stabilizers_ok = all(abs(v - 1.0) <= Config.ATOL for v in stabilizers.values())
    payload = {
        "stabilizers": stabilizers,
        "stabilizers_ok": stabilizers_ok,
        "parity_law": settings,
        "passed": stabilizers_ok and all(s["violations"] == 0 for s in settings.values()),
    }
    return Report(kind=ReportKind.GHZ_CHECK, seed=seed, payload=payload)


def cmd_decompose(function_file: str) -> Report:
    """ANF, decomposição de duas partes e classificação de grau 2"""
    f = load_function_file(function_file)
    anf = to_anf(f)
    payload = {"variables": list(f.variables), "parties": list(f.parties), "anf": str(anf)}

    if len(f.parties) == 2:
        decomp = inner_product_decomposition(f)
        reconstructed = all(
            decomp.evaluate(_party_bits(f, f.parties[0], a), _party_bits(f, f.parties[1], a)) == f.evaluate(a)
            for a in f.assignments()
        )
        payload["two_party"] = {
            "m": decomp.m,
            "terms": [[str(p), str(q)] for p, q in decomp.terms],
            "reconstructs": reconstructed,
        }

    span = max_party_span(f)
    degree2: dict = {"ok": span <= 2, "max_party_span": span}
    if len(f.parties) >= 3:
        try:
            form = degree2_decomposition(f, len(f.parties))
            degree2["pairs"] = {
                f"{j1},{j2}": [[str(p), str(q)] for p, q in terms] for (j1, j2), terms in form.pair_terms.items()
            }
        except Degree2ViolationError as e:
            degree2["ok"] = False
            degree2["monomial"] = sorted(e.monomial, key=f.variables.index)
            degree2["message"] = str(e)
    payload["degree2"] = degree2
    return Report(kind=ReportKind.DECOMPOSE, payload=payload)


def _execute(config: ExperimentConfig, f: BooleanFunction, assignment: Dict[str, int], seed: int) -> SessionResult:
    if config.scheme == Scheme.MULTIPARTY:
        form = degree2_decomposition(f, len(f.parties))
        inputs = {j: _party_bits(f, name, assignment) for j, name in enumerate(f.parties, start=1)}
        return run_multiparty(form, inputs, seed, config.inner_scheme, config.tester_policy, config.variant)
    decomp = inner_product_decomposition(f)
    x = _party_bits(f, f.parties[0], assignment)
    y = _party_bits(f, f.parties[1], assignment)
    return run_scheme(config.scheme, decomp, x, y, seed, config.variant, config.tester_policy, config.cheat)


def cmd_run(config: ExperimentConfig, assignment: Dict[str, int]) -> Report:
    """Executa uma sessão e grava a transcrição"""
    f = _load_function(config)
    result = _execute(config, f, assignment, config.seed)
    transcript = write_transcript(result.transcript.to_jsonl(), get_output_dir(config) / f"transcript_{config.seed}.jsonl")
    expected = f.evaluate(assignment)
    payload = {
        "scheme": config.scheme.value,
        "output": _output_payload(result),
        "expected": expected,
        "correct": (not result.halted) and result.output == expected,
        "messages": len(result.transcript.messages),
        "learned": {party_label(p): v.output() for p, v in result.views.items() if v.output() is not None},
        "repetitions": [
            {"index": r.index, "testers": [party_label(p) for p in r.announced_testers], "value": r.value}
            for r in result.repetitions
        ],
        "transcript_file": transcript.name,
    }
    return Report(kind=ReportKind.RUN, seed=config.seed, config=config, payload=payload)


def cmd_sweep(config: ExperimentConfig, seeds: int) -> Report:
    """Todas as entradas × sementes filhas; grava a grade em CSV"""
    f = _load_function(config)
    rows = []
    failures = 0
    for assignment in f.assignments():
        inputs = _bits_label(assignment[v] for v in f.variables)
        for seed in spawn_seeds(config.seed, seeds):
            result = _execute(config, f, assignment, seed)
            if not result.halted and result.output != f.evaluate(assignment):
                failures += 1
            rows.append(
                {
                    "inputs": inputs,
                    "seed": seed,
                    "output": "" if result.halted else result.output,
                    "halted": int(result.halted),
                    "detection_repetition": result.detected_at or "",
                }
            )
    path = write_sweep_csv(rows, get_output_dir(config) / f"sweep_{config.seed}.csv")
    payload = {"scheme": config.scheme.value, "rows": len(rows), "failures": failures, "csv_file": path.name}
    return Report(kind=ReportKind.SWEEP, seed=config.seed, config=config, payload=payload)


def cmd_privacy_audit(config: ExperimentConfig, assignment: Dict[str, int], quantum: bool) -> Report:
    """PosteriorReport por coalizão (duas partes) ou auditoria de limiar (n partes)"""
    f = _load_function(config)
    if config.scheme == Scheme.MULTIPARTY:
        form = degree2_decomposition(f, len(f.parties))
        threshold = threshold_audit(form.n, form, config.seed, may_exchange_quantum=quantum)
        payload = {"threshold": {str(k): v for k, v in threshold.items()}, "may_exchange_quantum": quantum}
        return Report(kind=ReportKind.PRIVACY, seed=config.seed, config=config, payload=payload)

    decomp = inner_product_decomposition(f)
    x = _party_bits(f, f.parties[0], assignment)
    y = _party_bits(f, f.parties[1], assignment)
    reports = []
    for members in _coalitions_for(config):
        coalition = Coalition(members, quantum)
        try:
            observed = sample_coalition_view(
                config.scheme, decomp, x, y, coalition, config.seed, config.variant, config.tester_policy
            )
            report = posterior_from_view(
                config.scheme, decomp, coalition, observed, None, config.variant, config.tester_policy
            )
        except EnumerationLimitError as e:
            raise UsageError(f"{e}; reduza --nrep (padrão da auditoria: {Config.AUDIT_NREP})") from e
        reports.append(report.model_dump())
    return Report(kind=ReportKind.PRIVACY, seed=config.seed, config=config, payload={"coalitions": reports})


def cmd_attack(config: ExperimentConfig, trials: int, assignment: Dict[str, int]) -> Report:
    """Campanha de trapaça no esquema C"""
    if config.scheme != Scheme.C:
        raise UsageError("attack exige --scheme C")
    f = _load_function(config)
    decomp = inner_product_decomposition(f)
    x = _party_bits(f, f.parties[0], assignment)
    y = _party_bits(f, f.parties[1], assignment)
    report = run_cheat_campaign(
        decomp, x, y, config.tester_policy, config.cheat, trials, config.seed, config.variant
    )
    payload = report.model_dump(mode="json", by_alias=True)
    return Report(kind=ReportKind.DETECTION, seed=config.seed, config=config, payload=payload)


def cmd_epr(config: ExperimentConfig, assignment: Dict[str, int], quantum: bool, trials: int) -> Report:
    """Ataque EPR ao esquema B unilateral"""
    f = _load_function(config)
    decomp = inner_product_decomposition(f)
    x = _party_bits(f, f.parties[0], assignment)
    results = [epr_attack(decomp, x, quantum, seed) for seed in spawn_seeds(config.seed, trials)]
    first = results[0]
    payload = {
        "quantum_channel_allowed": quantum,
        "trials": trials,
        "successes": sum(r.success for r in results),
        "polled_outputs": {_bits_label(y): v for y, v in first.polled_outputs.items()},
        "consistent_inputs": [_bits_label(c) for c in first.consistent_inputs],
    }
    return Report(kind=ReportKind.EPR, seed=config.seed, config=config, payload=payload)


# ===================================
# Parser e ponto de entrada
# ===================================


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--function", help="Arquivo JSON da função")
    common.add_argument("--scheme", choices=Config.AVAILABLE_SCHEMES)
    common.add_argument("--variant", choices=Config.AVAILABLE_VARIANTS)
    common.add_argument("--seed", type=int)
    common.add_argument("--ta", type=float)
    common.add_argument("--tb", type=float)
    common.add_argument("--nrep", type=int)
    common.add_argument("--inner", choices=["B", "C"], default=None, help="Esquema interno (Multiparty)")
    common.add_argument("--cheat", help='Ex: "flip-sum:bob", "fake-pad:alice", "tester-lie:alice:silent"')
    common.add_argument("--coalition", help='Ex: "bob,charlie" ou "1,2"')
    common.add_argument("--trials", type=int, default=1000)
    common.add_argument("--out", help="Diretório de saída (padrão: GHZ_SMC_OUTPUT_DIR)")
    common.add_argument("--config", help="ExperimentConfig em JSON; flags explícitas têm precedência")
    common.add_argument("--assign", help='Entradas por nome: "x1=1,y1=0"')
    common.add_argument("--seeds", type=int, default=100, help="Sementes por entrada (sweep)")
    common.add_argument("--quantum", action="store_true", help="Coalizão pode trocar qubits")
    common.add_argument("--samples", type=int, default=10_000)
    common.add_argument("--log-level", default=None)

    parser = _Parser(prog="ghz_smc", description="Computação multipartidária segura com estados GHZ")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("ghz-check", "decompose", "run", "sweep", "privacy-audit", "attack", "epr"):
        sub.add_parser(name, parents=[common])
    return parser


def _summary(report: Report) -> str:
    payload = report.payload
    if report.kind == ReportKind.RUN:
        output = payload["output"]
        if output["halted"]:
            return f"Trapaça detectada na repetição {output['detected_at']} ({output['reason']})"
        return f"f = {output['value']} (esperado {payload['expected']})"
    if report.kind == ReportKind.SWEEP:
        return f"{payload['rows']} linhas, {payload['failures']} falhas"
    if report.kind == ReportKind.DETECTION:
        return (
            f"{payload['detected']}/{payload['trials']} detectadas; média {payload['mean_detection_repetition']}; "
            f"1/(t_a(1-t_b)) = {payload['geometric_formula_value']:.3f}; (1-t_b)/t_a = {payload['paper_formula_value']:.3f}"
        )
    if report.kind == ReportKind.EPR:
        verdict = "sucesso" if payload["successes"] == payload["trials"] else "falha"
        return f"Ataque EPR: {verdict} ({payload['successes']}/{payload['trials']}); consultas {payload['polled_outputs']}"
    if report.kind == ReportKind.GHZ_CHECK:
        return "Verificação GHZ: " + ("ok" if payload["passed"] else "FALHOU")
    if report.kind == ReportKind.DECOMPOSE:
        m = payload.get("two_party", {}).get("m")
        return f"ANF: {payload['anf']}" + (f"; m={m}" if m is not None else "")
    return f"Relatório {report.kind.value} gravado"


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        setup_logging(args.log_level)
        Config.validate()
        command = args.command
        seed = args.seed if args.seed is not None else Config.DEFAULT_SEED

        if command == "ghz-check":
            report = cmd_ghz_check(args.samples, seed)
            directory = Path(args.out) if args.out else None
        elif command == "decompose":
            if not args.function:
                raise UsageError("decompose exige --function")
            report = cmd_decompose(args.function)
            directory = Path(args.out) if args.out else None
        else:
            config = build_config(args, command)
            assignment = parse_assignment(args.assign)
            directory = None
            if command == "run":
                report = cmd_run(config, assignment)
            elif command == "sweep":
                report = cmd_sweep(config, args.seeds)
            elif command == "privacy-audit":
                report = cmd_privacy_audit(config, assignment, args.quantum)
            elif command == "attack":
                report = cmd_attack(config, args.trials, assignment)
            else:
                report = cmd_epr(config, assignment, args.quantum, args.trials)

        path = write_report(report, directory)
        print(_summary(report))
        print(f"Relatório: {path}")
        if report.kind == ReportKind.RUN and report.payload["output"]["halted"]:
            return EXIT_DETECTED
        return EXIT_OK
    except (ValueError, OSError) as e:
        logger.warning("Falha: %s", e)
        print(f"Erro: {e}", file=sys.stderr)
        return EXIT_ERROR
