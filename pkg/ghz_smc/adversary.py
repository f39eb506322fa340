"""
Análise adversarial: vazamento de informação por posteriores exatas e os
ataques de coalizão, detecção de pad, EPR e trapaças do esquema C
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from .boolfn import Decomposition, Degree2Form, eval_anf
from .config import Config
from .protocol import (
    CheatConfig,
    CheatConfigError,
    Scheme,
    TesterPolicy,
    Variant,
    enumerate_views,
    nominate_third,
    padded_term,
    run_scheme,
    run_scheme_c,
)
from .qsim import (
    PauliOp,
    StateVector,
    measure_joint_pauli,
    measure_pauli,
    measurement_setting,
    prepare_padded_ensemble,
)
from .randomness import as_source, enumerate_branches, spawn_seeds
from .session import THREE_PARTIES, Party, PartyId, PartyView, Roles, Session, party_label

logger = logging.getLogger(__name__)

__all__ = [
    "AdversaryError",
    "AttackResult",
    "AttackUnavailableError",
    "CheatConfig",
    "Coalition",
    "CoalitionError",
    "DetectionReport",
    "PosteriorReport",
    "TesterPolicy",
    "ViewInconsistentError",
    "coalition_leakage",
    "epr_attack",
    "make_pad_tap",
    "multiparty_leakage",
    "pad_detection_attack",
    "posterior_from_view",
    "run_cheat_campaign",
    "single_qubit_pad_guess",
    "threshold_audit",
    "view_distribution",
]


class AdversaryError(ValueError):
    """Erro base do módulo adversarial"""


class CoalitionError(AdversaryError):
    """Coalizão vazia, com estranhos ou sem parte honesta"""


class ViewInconsistentError(AdversaryError):
    """A visão observada tem probabilidade zero para todas as entradas"""


class AttackUnavailableError(AdversaryError):
    """O atacante não possui os qubits necessários"""


@dataclass(frozen=True)
class Coalition:
    """Partes corrompidas que juntam suas visões"""

    members: FrozenSet[PartyId]
    may_exchange_quantum: bool = False

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(self.members))
        if not self.members:
            raise CoalitionError("Coalizão vazia")

    def check(self, parties: Sequence[PartyId]):
        """Exige membros participantes e ao menos uma parte honesta"""
        outsiders = self.members - set(parties)
        if outsiders:
            raise CoalitionError(f"Membros fora da sessão: {sorted(map(party_label, outsiders))}")
        if len(self.members) >= len(parties):
            raise CoalitionError("Coalizão sem parte honesta: privacidade não se aplica")

    def label(self) -> List[str]:
        return sorted(party_label(p) for p in self.members)


# ===================================
# Relatórios
# ===================================


class PosteriorReport(BaseModel):
    scheme: str
    coalition: List[str]
    may_exchange_quantum: bool = False
    prior: Dict[str, float]
    posterior: Dict[str, float]
    leakage_bits: float
    ideal_leakage_bits: float
    excess_leakage_bits: float = 0.0

    @model_validator(mode="after")
    def _check_distribution(self):
        total = sum(self.posterior.values())
        if abs(total - 1.0) > Config.PROBABILITY_ATOL:
            raise ValueError(f"Posterior soma {total}, esperado 1")
        if self.leakage_bits < -Config.PROBABILITY_ATOL:
            raise ValueError(f"Vazamento negativo: {self.leakage_bits}")
        self.excess_leakage_bits = self.leakage_bits - self.ideal_leakage_bits
        return self


class DetectionReport(BaseModel):
    cheat: CheatConfig
    t_a: float
    t_b: float
    n_rep: int
    nrep_capped: bool = False
    seed: int
    trials: int
    detected: int
    harmless: int = 0
    undetected_wrong: int = 0
    mean_detection_repetition: Optional[float] = None
    stated_formula_value: float = Field(serialization_alias="paper_formula_value")
    geometric_formula_value: float
    non_detection_rate: Dict[int, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_counts(self):
        if not 0 <= self.detected <= self.trials:
            raise ValueError(f"detected={self.detected} fora de [0, {self.trials}]")
        return self

    @property
    def detection_rate(self) -> float:
        return self.detected / self.trials if self.trials else 0.0


# ===================================
# Entropia e informação mútua
# ===================================


def _xlogx_ratio(p: np.ndarray, q: np.ndarray) -> float:
    mask = p > 0
    return float(np.sum(p[mask] * np.log2(p[mask] / q[mask])))


def entropy_bits(probabilities: Iterable[float]) -> float:
    p = np.array([v for v in probabilities if v > 0], dtype=float)
    return float(-np.sum(p * np.log2(p))) if p.size else 0.0


def mutual_information(prior: np.ndarray, likelihoods: np.ndarray) -> float:
    """
    I(U; V) em bits

    Args:
        prior: p(u), forma (U,)
        likelihoods: p(v|u), forma (U, V)

    Returns:
        Informação mútua (não negativa, arredondada a zero abaixo da tolerância)
    """
    joint = prior[:, None] * likelihoods
    marginal = joint.sum(axis=0)
    value = _xlogx_ratio(joint.ravel(), (prior[:, None] * marginal[None, :]).ravel())
    return 0.0 if abs(value) < Config.PROBABILITY_ATOL else value


def _clean(value: float) -> float:
    return 0.0 if abs(value) < Config.PROBABILITY_ATOL else value


# ===================================
# Esquemas de duas partes: visões e posteriores
# ===================================


def _bits(n: int) -> List[Tuple[int, ...]]:
    return list(product((0, 1), repeat=n))


def _input_key(names: Sequence[str], bits: Sequence[int]) -> str:
    return ",".join(f"{name}={bit}" for name, bit in zip(names, bits)) or "-"


def _learns_output(scheme: Scheme, members: FrozenSet[PartyId]) -> bool:
    if scheme == Scheme.B_ONE_SIDED:
        return Party.BOB in members
    return True


def make_pad_tap(coalition: Coalition):
    """
    Gancho quântico: a coalizão mede Y⊗Y no qubit com pad e em outro qubit seu

    Só age quando a coalizão possui o qubit de Charlie e mais um qubit do trio.
    O resultado entra na visão de quem faz o papel de Charlie.
    """

    def tap(session: Session, state: StateVector, roles: Roles, tag: str) -> StateVector:
        held = [q for q, party in enumerate(roles.as_tuple()) if party in coalition.members]
        if 2 not in held or len(held) < 2:
            return state
        partner = min(q for q in held if q != 2)
        op = PauliOp.on(state.n_qubits, {partner: "Y", 2: "Y"})
        outcome, state = measure_joint_pauli(state, op, session.source, f"{party_label(roles.charlie)}.tap[{tag}]")
        session.record_measurement(roles.charlie, f"tap[{tag}]", op.axes, outcome.bit)
        return state

    return tap


def _tap_for(coalition: Coalition):
    return make_pad_tap(coalition) if coalition.may_exchange_quantum else None


def view_distribution(
    scheme: Scheme,
    decomp: Decomposition,
    x: Sequence[int],
    y: Sequence[int],
    coalition: Coalition,
    variant: Variant = Variant.QUBIT_SWAP,
    policy: Optional[TesterPolicy] = None,
) -> Dict[PartyView, float]:
    """Distribuição exata da visão conjunta da coalizão"""
    coalition.check(THREE_PARTIES.as_tuple())
    distributions = enumerate_views(
        scheme, decomp, x, y, variant, policy, coalitions=[coalition.members], tap=_tap_for(coalition)
    )
    return distributions[coalition.members]


@dataclass
class _LeakageTable:
    names: Tuple[str, ...]
    candidates: List[Tuple[Tuple[int, ...], Tuple[int, ...]]]
    keys: List[str]
    prior: np.ndarray
    distributions: List[Dict[PartyView, float]]
    outputs: List[int]
    views: List[PartyView] = field(default_factory=list)

    def likelihoods(self) -> np.ndarray:
        if not self.views:
            seen = {}
            for dist in self.distributions:
                for view in dist:
                    seen.setdefault(view, len(seen))
            self.views = list(seen)
        index = {view: k for k, view in enumerate(self.views)}
        matrix = np.zeros((len(self.candidates), len(self.views)))
        for u, dist in enumerate(self.distributions):
            for view, probability in dist.items():
                matrix[u, index[view]] += probability
        return matrix


def _two_party_table(
    scheme: Scheme,
    decomp: Decomposition,
    coalition: Coalition,
    own_inputs: Mapping[str, int],
    prior: Optional[Mapping[str, float]],
    variant: Variant,
    policy: Optional[TesterPolicy],
) -> _LeakageTable:
    coalition.check(THREE_PARTIES.as_tuple())
    members = coalition.members
    alice_honest = Party.ALICE not in members
    bob_honest = Party.BOB not in members
    try:
        fixed_x = tuple(int(own_inputs[v]) for v in decomp.alice_vars) if not alice_honest else None
        fixed_y = tuple(int(own_inputs[v]) for v in decomp.bob_vars) if not bob_honest else None
    except KeyError as e:
        raise CoalitionError(f"Entrada própria da coalizão ausente: {e}") from e

    names: Tuple[str, ...] = ()
    if alice_honest:
        names += decomp.alice_vars
    if bob_honest:
        names += decomp.bob_vars

    candidates, keys = [], []
    for x in _bits(len(decomp.alice_vars)) if alice_honest else [fixed_x]:
        for y in _bits(len(decomp.bob_vars)) if bob_honest else [fixed_y]:
            honest_bits = (x if alice_honest else ()) + (y if bob_honest else ())
            candidates.append((x, y))
            keys.append(_input_key(names, honest_bits))

    if prior is None:
        weights = np.full(len(candidates), 1.0 / len(candidates))
    else:
        weights = np.array([float(prior.get(key, 0.0)) for key in keys])
        if abs(weights.sum() - 1.0) > Config.PROBABILITY_ATOL:
            raise AdversaryError(f"Prior soma {weights.sum()}, esperado 1")

    distributions = [
        view_distribution(scheme, decomp, x, y, coalition, variant, policy) for x, y in candidates
    ]
    outputs = [decomp.expected(x, y) for x, y in candidates]
    return _LeakageTable(names, candidates, keys, weights, distributions, outputs)


def _ideal_leakage(table: _LeakageTable, learns: bool) -> float:
    if not learns:
        return 0.0
    p_one = float(sum(w for w, out in zip(table.prior, table.outputs) if out))
    return _clean(entropy_bits((p_one, 1.0 - p_one)))


def coalition_leakage(
    scheme: Scheme,
    decomp: Decomposition,
    coalition: Coalition,
    own_inputs: Mapping[str, int],
    prior: Optional[Mapping[str, float]] = None,
    variant: Variant = Variant.QUBIT_SWAP,
    policy: Optional[TesterPolicy] = None,
) -> Tuple[float, float]:
    """
    Vazamento real e ideal (bits) sobre as entradas honestas

    Args:
        scheme: Esquema de duas partes
        decomp: Decomposição
        coalition: Coalizão corrompida
        own_inputs: Entradas dos membros (variável -> bit)
        prior: Prior sobre as entradas honestas (opcional, uniforme)
        variant: Variante do esquema B/C
        policy: Política (esquema C)

    Returns:
        Tupla (leakage_bits, ideal_leakage_bits)
    """
    scheme = Scheme(scheme)
    table = _two_party_table(scheme, decomp, coalition, own_inputs, prior, variant, policy)
    leakage = mutual_information(table.prior, table.likelihoods())
    return leakage, _ideal_leakage(table, _learns_output(scheme, coalition.members))


def posterior_from_view(
    scheme: Scheme,
    decomp: Decomposition,
    coalition: Coalition,
    observed: PartyView,
    prior: Optional[Mapping[str, float]] = None,
    variant: Variant = Variant.QUBIT_SWAP,
    policy: Optional[TesterPolicy] = None,
) -> PosteriorReport:
    """
    Bayes por força bruta sobre as entradas das partes honestas

    Args:
        scheme: Esquema de duas partes
        decomp: Decomposição
        coalition: Coalizão que observou a visão
        observed: Visão conjunta observada (define as entradas próprias)
        prior: Prior sobre as entradas honestas (opcional, uniforme)
        variant: Variante do esquema B/C
        policy: Política (esquema C)

    Returns:
        PosteriorReport com prior, posterior e vazamentos real e ideal
    """
    scheme = Scheme(scheme)
    if observed.party != coalition.members:
        raise CoalitionError("A visão observada não é da coalizão informada")
    table = _two_party_table(scheme, decomp, coalition, observed.inputs, prior, variant, policy)

    likelihood = np.array([dist.get(observed, 0.0) for dist in table.distributions])
    joint = table.prior * likelihood
    total = joint.sum()
    if total <= 0.0:
        raise ViewInconsistentError("Visão com probabilidade zero para todas as entradas candidatas")
    posterior = joint / total

    leakage = mutual_information(table.prior, table.likelihoods())
    report = PosteriorReport(
        scheme=scheme.value,
        coalition=coalition.label(),
        may_exchange_quantum=coalition.may_exchange_quantum,
        prior=dict(zip(table.keys, map(float, table.prior))),
        posterior=dict(zip(table.keys, map(float, posterior))),
        leakage_bits=leakage,
        ideal_leakage_bits=_ideal_leakage(table, _learns_output(scheme, coalition.members)),
    )
    logger.debug("Posterior de %s: %s", report.coalition, report.posterior)
    return report


# ===================================
# Esquema de n partes: vazamento por recursão fatorada nos termos
# ===================================


def _proportional_key(w: np.ndarray) -> Tuple[float, ...]:
    return tuple(np.round(w / w.sum(), 10).ravel().tolist())


def _term_table(
    roles: Roles,
    bits: Tuple[int, int],
    members: FrozenSet[int],
    honest_index: Mapping[int, int],
    variant: Variant,
    tap,
) -> Dict[Optional[PartyView], Dict[int, float]]:
    """(observação da coalizão, máscara das paridades honestas) -> probabilidade de um termo"""
    inside = [p for p in roles.as_tuple() if p in members]

    def run(source):
        session = Session(roles.as_tuple(), {}, source, tap=tap)
        measured = padded_term(session, roles, bits[0], bits[1], "t", variant)
        observation = session.coalition_view(inside) if inside else None
        delta = 0
        for party, bit in zip(roles.as_tuple(), measured):
            if party in honest_index:
                delta ^= bit << honest_index[party]
        return observation, delta

    table: Dict[Optional[PartyView], Dict[int, float]] = {}
    for probability, (observation, delta) in enumerate_branches(run):
        row = table.setdefault(observation, {})
        row[delta] = row.get(delta, 0.0) + probability
    return table


def multiparty_leakage(
    form: Degree2Form,
    coalition: Coalition,
    own_inputs: Mapping[int, Sequence[int]],
    variant: Variant = Variant.ENSEMBLE,
) -> Tuple[float, float]:
    """
    Vazamento exato da coalizão no esquema de n partes (entradas honestas uniformes)

    Os termos são independentes dadas as entradas; o estado da recursão é, para
    cada classe de visões parciais, a matriz w[u, h] = P(visão parcial, paridades
    honestas acumuladas = h | u). Visões parciais com matrizes proporcionais
    levam à mesma posterior e são somadas. No fim todas as paridades são
    anunciadas, então ℓ_v(u) = w[u, h].

    Args:
        form: Forma de grau 2
        coalition: Coalizão corrompida
        own_inputs: Bits dos membros (parte -> bits)
        variant: Variante do núcleo de cada termo

    Returns:
        Tupla (leakage_bits, ideal_leakage_bits)
    """
    parties = tuple(range(1, form.n + 1))
    coalition.check(parties)
    members = coalition.members
    honest = [j for j in parties if j not in members]
    honest_index = {j: k for k, j in enumerate(honest)}

    candidates = [
        dict(zip(honest, combo))
        for combo in product(*(_bits(len(form.party_vars[j])) for j in honest))
    ]
    fixed = {j: tuple(own_inputs[j]) for j in members}
    assignments = [form.assignment({**fixed, **cand}) for cand in candidates]
    prior = np.full(len(candidates), 1.0 / len(candidates))
    masks = 1 << len(honest)
    perms = [np.arange(masks) ^ delta for delta in range(masks)]
    tap = _tap_for(coalition)

    start = np.zeros((len(candidates), masks))
    start[:, 0] = 1.0
    state: Dict[Tuple[float, ...], np.ndarray] = {(): start}
    cache: Dict[Tuple[Roles, Tuple[int, int]], dict] = {}

    for (j1, j2), terms in form.pair_terms.items():
        roles = Roles(j1, j2, nominate_third(j1, j2, form.n))
        if all(p in members for p in roles.as_tuple()):
            continue
        for p_hi, p_lo in terms:
            per_u = [(eval_anf(p_hi, values), eval_anf(p_lo, values)) for values in assignments]
            tables = {}
            for bits in set(per_u):
                if (roles, bits) not in cache:
                    cache[(roles, bits)] = _term_table(roles, bits, members, honest_index, variant, tap)
                tables[bits] = cache[(roles, bits)]
            observations = set().union(*(t.keys() for t in tables.values()))

            new_state: Dict[Tuple[float, ...], np.ndarray] = {}
            for w in state.values():
                for observation in observations:
                    updated = np.zeros_like(w)
                    for u, bits in enumerate(per_u):
                        for delta, probability in tables[bits].get(observation, {}).items():
                            updated[u] += probability * w[u, perms[delta]]
                    if updated.sum() <= 0.0:
                        continue
                    key = _proportional_key(updated)
                    if key in new_state:
                        new_state[key] += updated
                    else:
                        new_state[key] = updated
            state = new_state
            logger.debug("Termo %s: %d classes de visão", roles, len(state))

    leakage = 0.0
    for w in state.values():
        joint = prior[:, None] * w
        marginal = joint.sum(axis=0)
        for h in range(masks):
            column = joint[:, h]
            if marginal[h] > 0:
                leakage += _xlogx_ratio(column, prior * marginal[h])

    p_one = float(sum(p for p, values in zip(prior, assignments) if form.function.evaluate(values)))
    return _clean(leakage), _clean(entropy_bits((p_one, 1.0 - p_one)))


def threshold_audit(
    n: int,
    form: Degree2Form,
    rng=None,
    sizes: Optional[Iterable[int]] = None,
    may_exchange_quantum: bool = False,
    max_assignments: int = 256,
    variant: Variant = Variant.ENSEMBLE,
) -> Dict[int, float]:
    """
    Maior vazamento excedente (sobre o ideal) por tamanho de coalizão

    Args:
        n: Número de partes
        form: Forma de grau 2 com n partes
        rng: Semente ou Generator para amostrar entradas próprias quando há muitas
        sizes: Tamanhos de coalizão (opcional, 1..n-1)
        may_exchange_quantum: Coalizões trocam informação quântica
        max_assignments: Acima disso as entradas próprias são amostradas
        variant: Variante do núcleo de cada termo

    Returns:
        Mapa tamanho -> maior vazamento excedente em bits
    """
    if form.n != n:
        raise CoalitionError(f"A forma tem {form.n} partes, esperado {n}")
    parties = tuple(range(1, n + 1))
    sizes = list(sizes) if sizes is not None else list(range(1, n))
    generator = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(
        Config.DEFAULT_SEED if rng is None else rng
    )

    result: Dict[int, float] = {}
    for size in sizes:
        if not 1 <= size < n:
            raise CoalitionError(f"Coalizão de tamanho {size} não deixa parte honesta entre {n}")
        worst = 0.0
        for members in combinations(parties, size):
            coalition = Coalition(frozenset(members), may_exchange_quantum)
            options = list(product(*(_bits(len(form.party_vars[j])) for j in members)))
            if len(options) > max_assignments:
                chosen = generator.choice(len(options), size=max_assignments, replace=False)
                options = [options[k] for k in sorted(chosen)]
            for combo in options:
                own = dict(zip(members, combo))
                leakage, ideal = multiparty_leakage(form, coalition, own, variant)
                worst = max(worst, leakage - ideal)
        result[size] = _clean(worst)
        logger.info("Auditoria n=%d, tamanho %d: excesso %.3g bits", n, size, result[size])
    return result


# ===================================
# Ataques quânticos
# ===================================


def pad_detection_attack(padded_state: StateVector, attacker_qubits: Iterable[int], rng=None) -> Tuple[int, StateVector]:
    """
    Mede Y⊗Y no qubit com pad e em outro qubit do atacante

    O sinal de 𝟙⊗Y⊗Y troca quando H^{pa⊕pb} é aplicado ao qubit 2, e o estado
    é autoestado desse operador, então a medição não o perturba.

    Args:
        padded_state: (𝟙⊗𝟙⊗H^{pa⊕pb})|ψ⟩
        attacker_qubits: Qubits reunidos pelo atacante
        rng: Semente, numpy Generator ou BranchSource

    Returns:
        Tupla (pa⊕pb inferido, estado pós-ataque)
    """
    qubits = set(attacker_qubits)
    if len(qubits) < 2 or 2 not in qubits:
        raise AttackUnavailableError("O ataque exige o qubit com pad e mais um qubit")
    partner = min(q for q in qubits if q != 2)
    op = PauliOp.on(padded_state.n_qubits, {partner: "Y", 2: "Y"})
    outcome, state = measure_joint_pauli(padded_state, op, rng, "attack.yy")
    return 1 ^ outcome.bit, state


def single_qubit_pad_guess(padded_state: StateVector, qubit: int = 2, rng=None) -> int:
    """Melhor palpite com um único qubit: medir Y (marginal maximamente misturada)"""
    outcome, _ = measure_pauli(padded_state, qubit, "Y", rng, "attack.y")
    return outcome.bit


@dataclass
class AttackResult:
    success: bool
    quantum_channel_allowed: bool
    polled_outputs: Dict[Tuple[int, ...], Optional[int]]
    consistent_inputs: List[Tuple[int, ...]]


def epr_attack(
    decomp: Decomposition,
    x: Sequence[int],
    quantum_channel_allowed: bool,
    rng=None,
    committed_y: Optional[Sequence[int]] = None,
) -> AttackResult:
    """
    Ataque EPR ao esquema B unilateral com Bob e Charlie corrompidos

    Com canal quântico, Bob entrega seu qubit a Charlie, que mede em cada termo
    os dois operadores conjuntos 𝟙⊗O_Q⊗O_{c_Q} (Q = 0 e Q = 1), que comutam,
    e assim obtém f para todo y candidato. Sem canal quântico, Bob se
    compromete com um único y e apenas esse valor é obtido.

    Args:
        decomp: Decomposição f = ⊕ P_i Q_i
        x: Entrada de Alice (honesta)
        quantum_channel_allowed: Se a coalizão pode trocar qubits
        rng: Semente, numpy Generator ou BranchSource
        committed_y: y enviado por Bob quando não há canal quântico (padrão: zeros)

    Returns:
        AttackResult com f consultado por candidato e as entradas de Alice compatíveis
    """
    source = as_source(rng)
    alice, bob, charlie = THREE_PARTIES.as_tuple()
    committed = tuple(committed_y) if committed_y is not None else (0,) * len(decomp.bob_vars)
    inputs = {alice: dict(zip(decomp.alice_vars, x)), bob: dict(zip(decomp.bob_vars, committed))}
    session = Session(THREE_PARTIES.as_tuple(), inputs, source)
    candidates = _bits(len(decomp.bob_vars))
    q_committed = [q for _, q in decomp.local_values(x, committed)]

    joint_bits: List[Tuple[int, int]] = []
    committed_bits: List[int] = []
    for i, (p_bit, _) in enumerate(decomp.local_values(x, committed), start=1):
        pad_a = session.coin(alice, f"pad[{i}]")
        pad_b = session.coin(bob, f"pad[{i}]")
        _, _, state = prepare_padded_ensemble(pads=(pad_a, pad_b))
        masked_p = session.send(alice, charlie, p_bit ^ pad_a, "B.10").payload
        sent_b = session.send(bob, charlie, q_committed[i - 1] ^ pad_b, "B.10").payload
        _, state = session.measure(alice, state, 0, measurement_setting(p_bit), f"m[{i}]")

        if quantum_channel_allowed:
            session.transfer(bob, charlie, 1, "B.11")
            pair = []
            for q in (0, 1):
                setting = masked_p ^ q ^ pad_b
                op = PauliOp.on(3, {1: measurement_setting(q), 2: measurement_setting(setting)})
                outcome, state = measure_joint_pauli(state, op, source, f"charlie.epr[{i}.{q}]")
                session.record_measurement(charlie, f"epr[{i}.{q}]", op.axes, outcome.bit)
                pair.append(outcome.bit)
            joint_bits.append(tuple(pair))
        else:
            bit_b, state = session.measure(bob, state, 1, measurement_setting(q_committed[i - 1]), f"m[{i}]")
            setting = masked_p ^ sent_b
            bit_c, state = session.measure(charlie, state, 2, measurement_setting(setting), f"m[{i}]")
            committed_bits.append(bit_b ^ bit_c)

    s_a = session.send(alice, charlie, session.parity(alice), "B.12").payload

    polled: Dict[Tuple[int, ...], Optional[int]] = {}
    for y in candidates:
        q_values = [q for _, q in decomp.local_values(x, y)]
        if quantum_channel_allowed:
            value = s_a
            for pair, q in zip(joint_bits, q_values):
                value ^= pair[q]
            polled[y] = value
        elif y == committed:
            value = s_a
            for bits in committed_bits:
                value ^= bits
            polled[y] = value
        else:
            polled[y] = None

    known = {y: v for y, v in polled.items() if v is not None}
    consistent = [
        x_candidate
        for x_candidate in _bits(len(decomp.alice_vars))
        if all(decomp.expected(x_candidate, y) == v for y, v in known.items())
    ]
    success = quantum_channel_allowed and len(known) == len(candidates) and all(
        decomp.expected(x, y) == v for y, v in known.items()
    )
    logger.debug("Ataque EPR: sucesso=%s consultas=%s", success, polled)
    return AttackResult(success, quantum_channel_allowed, polled, consistent)


# ===================================
# Campanhas de trapaça (esquema C)
# ===================================


def _campaign_seed(rng) -> int:
    if rng is None:
        return Config.DEFAULT_SEED
    if isinstance(rng, (int, np.integer)):
        return int(rng)
    if isinstance(rng, np.random.Generator):
        return int(rng.integers(2**32))
    raise TypeError(f"Semente de campanha não suportada: {type(rng).__name__}")


def run_cheat_campaign(
    decomp: Decomposition,
    x: Sequence[int],
    y: Sequence[int],
    policy: TesterPolicy,
    cheat: CheatConfig,
    trials: int,
    rng=None,
    variant: Variant = Variant.ENSEMBLE,
) -> DetectionReport:
    """
    Sessões independentes do esquema C com a trapaça ativa

    Args:
        decomp: Decomposição
        x, y: Entradas
        policy: t_a, t_b e N_rep (limitado por Config.ATTACK_NREP_CAP)
        cheat: Trapaça (não pode ser None)
        trials: Número de sessões
        rng: Semente da campanha (cada sessão recebe uma semente filha)
        variant: Variante das sessões

    Returns:
        DetectionReport com taxa de detecção, repetição média e as duas fórmulas
    """
    if cheat is None or not cheat.active:
        raise CheatConfigError("A campanha exige uma trapaça ativa")
    if trials < 1:
        raise AdversaryError("trials deve ser pelo menos 1")
    seed = _campaign_seed(rng)
    capped = policy.n_rep > Config.ATTACK_NREP_CAP
    if capped:
        logger.warning("N_rep %d limitado a %d", policy.n_rep, Config.ATTACK_NREP_CAP)
        policy = policy.model_copy(update={"n_rep": Config.ATTACK_NREP_CAP})
    expected = decomp.expected(x, y)

    detections: List[int] = []
    harmless = wrong = 0
    for child in spawn_seeds(seed, trials):
        result = run_scheme_c(decomp, x, y, child, policy, cheat, variant)
        if result.halted:
            detections.append(result.detected_at)
        elif result.output == expected:
            harmless += 1
        else:
            wrong += 1

    times = np.array(detections, dtype=float)
    non_detection = {k: float(trials - np.sum(times <= k)) / trials for k in (5, 10, 20)}
    report = DetectionReport(
        cheat=cheat,
        t_a=policy.t_a,
        t_b=policy.t_b,
        n_rep=policy.n_rep,
        nrep_capped=capped,
        seed=seed,
        trials=trials,
        detected=len(detections),
        harmless=harmless,
        undetected_wrong=wrong,
        mean_detection_repetition=float(times.mean()) if times.size else None,
        stated_formula_value=(1.0 - policy.t_b) / policy.t_a,
        geometric_formula_value=1.0 / (policy.t_a * (1.0 - policy.t_b)),
        non_detection_rate=non_detection,
    )
    logger.info(
        "Campanha %s: %d/%d detectadas, média %s",
        cheat.strategy,
        report.detected,
        trials,
        report.mean_detection_repetition,
    )
    return report


def sample_coalition_view(
    scheme: Scheme,
    decomp: Decomposition,
    x: Sequence[int],
    y: Sequence[int],
    coalition: Coalition,
    rng=None,
    variant: Variant = Variant.QUBIT_SWAP,
    policy: Optional[TesterPolicy] = None,
) -> PartyView:
    """Executa uma sessão e devolve a visão conjunta da coalizão"""
    coalition.check(THREE_PARTIES.as_tuple())
    result = run_scheme(scheme, decomp, x, y, rng, variant, policy, None, _tap_for(coalition))
    return result.coalition_view(coalition.members)
