"""
Execução dos esquemas A, B (troca de qubits e ensemble), B unilateral, C e
do esquema de n partes para funções de grau 2

Cada esquema é uma máquina de estados determinística dada a fonte de
escolhas: com uma semente a sessão é sorteada; com enumerate_views todas as
sessões possíveis são percorridas com probabilidades exatas.
"""

import logging
from dataclasses import dataclass, field
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        __str__ = str.__str__
        __format__ = str.__format__
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, Field, field_validator, model_validator

from .boolfn import Decomposition, Degree2Form, eval_anf
from .config import Config
from .qsim import measurement_setting, prepare_ghz, prepare_padded_ensemble
from .randomness import EnumerationLimitError, as_source, enumerate_branches
from .session import (
    THREE_PARTIES,
    Party,
    PartyId,
    PartyView,
    QuantumTap,
    Roles,
    Session,
    Transcript,
    merge_views,
)

logger = logging.getLogger(__name__)


class ProtocolError(ValueError):
    """Erro base do módulo de protocolo"""


class ArityError(ProtocolError):
    """Entradas incompatíveis com a decomposição"""


class PolicyError(ProtocolError):
    """Política de testadores ausente ou inválida"""


class CheatConfigError(ProtocolError):
    """Configuração de trapaça inválida"""


class Scheme(StrEnum):
    A = "A"
    B = "B"
    B_ONE_SIDED = "B1sided"
    C = "C"
    MULTIPARTY = "Multiparty"


class Variant(StrEnum):
    QUBIT_SWAP = "QubitSwap"
    ENSEMBLE = "Ensemble"


# ===================================
# Política de testadores e trapaças
# ===================================


class TesterPolicy(BaseModel):
    """Probabilidades de atuar como testador e número de repetições do esquema C"""

    t_a: float = 0.25
    t_b: float = 0.25
    n_rep: int = Field(default_factory=lambda: Config.DEFAULT_NREP)

    @field_validator("t_a", "t_b")
    @classmethod
    def _check_probability(cls, value: float) -> float:
        if not 0.0 < value < 0.5:
            raise ValueError(f"Probabilidade de testador deve estar em (0, 0.5), recebido {value}")
        return value

    @field_validator("n_rep")
    @classmethod
    def _check_repetitions(cls, value: int) -> int:
        if value < 1:
            raise ValueError(f"N_rep deve ser pelo menos 1, recebido {value}")
        return value


class CheatStrategy(StrEnum):
    NONE = "None"
    FAKE_PAD = "FakePad"
    FLIP_SUM = "FlipSum"
    TESTER_LIE = "TesterLie"


class TesterLieMode(StrEnum):
    SILENT_TESTER = "SilentTester"
    FALSE_CLAIM = "FalseClaim"


_CHEAT_ALIASES = {
    "none": CheatStrategy.NONE,
    "fake-pad": CheatStrategy.FAKE_PAD,
    "flip-sum": CheatStrategy.FLIP_SUM,
    "tester-lie": CheatStrategy.TESTER_LIE,
}

_MODE_ALIASES = {
    "silent": TesterLieMode.SILENT_TESTER,
    "false-claim": TesterLieMode.FALSE_CLAIM,
}


class CheatConfig(BaseModel):
    """Desvio ativo de uma parte corrompida no esquema C"""

    strategy: CheatStrategy = CheatStrategy.NONE
    by: Optional[Party] = None
    mode: Optional[TesterLieMode] = None

    @model_validator(mode="after")
    def _check_cheater(self):
        if self.strategy == CheatStrategy.NONE:
            if self.by is not None or self.mode is not None:
                raise ValueError("Sem trapaça não há trapaceiro nem modo")
            return self
        if self.by is None:
            raise ValueError(f"{self.strategy} exige a parte trapaceira")
        if self.strategy in (CheatStrategy.FAKE_PAD, CheatStrategy.TESTER_LIE) and self.by == Party.CHARLIE:
            raise ValueError(f"{self.strategy} só pode ser feito por alice ou bob")
        if (self.strategy == CheatStrategy.TESTER_LIE) != (self.mode is not None):
            raise ValueError("O modo só se aplica (e é obrigatório) em TesterLie")
        return self

    @property
    def active(self) -> bool:
        return self.strategy != CheatStrategy.NONE

    @classmethod
    def parse(cls, text: Optional[str]) -> "CheatConfig":
        """
        Lê a forma de linha de comando

        Args:
            text: "none", "flip-sum:bob", "fake-pad:alice", "tester-lie:alice:silent"
                ou "tester-lie:bob:false-claim"

        Returns:
            CheatConfig validada
        """
        if not text or text.strip().lower() == "none":
            return cls()
        fields = [part.strip().lower() for part in text.split(":")]
        strategy = _CHEAT_ALIASES.get(fields[0])
        if strategy is None or len(fields) < 2:
            raise CheatConfigError(f"Trapaça desconhecida: {text!r}")
        if fields[1] not in Party._value2member_map_:
            raise CheatConfigError(f"Trapaceiro deve ser alice, bob ou charlie: {text!r}")
        mode = None
        if strategy == CheatStrategy.TESTER_LIE:
            if len(fields) != 3 or fields[2] not in _MODE_ALIASES:
                raise CheatConfigError(f"TesterLie exige modo silent ou false-claim: {text!r}")
            mode = _MODE_ALIASES[fields[2]]
        elif len(fields) != 2:
            raise CheatConfigError(f"Campos demais em {text!r}")
        try:
            return cls(strategy=strategy, by=Party(fields[1]), mode=mode)
        except ValueError as e:
            raise CheatConfigError(str(e)) from e


NO_CHEAT = CheatConfig()


# ===================================
# Resultados
# ===================================


@dataclass(frozen=True)
class Halted:
    """Sessão interrompida por detecção de trapaça"""

    detected_at: int
    reason: str
    step: str

    def __str__(self) -> str:
        return f"Halted(repetição {self.detected_at}, {self.reason}, passo {self.step})"


@dataclass(frozen=True)
class RepetitionRecord:
    """Uma repetição j do esquema C"""

    index: int
    announced_testers: Tuple[PartyId, ...]
    value: int


@dataclass
class SessionResult:
    scheme: Scheme
    output: Union[int, Halted]
    transcript: Transcript
    views: Dict[PartyId, PartyView]
    repetitions: List[RepetitionRecord] = field(default_factory=list)

    @property
    def halted(self) -> bool:
        return isinstance(self.output, Halted)

    @property
    def detected_at(self) -> Optional[int]:
        return self.output.detected_at if self.halted else None

    def coalition_view(self, members: Iterable[PartyId]) -> PartyView:
        return merge_views(self.views[p] for p in members)


# ===================================
# Núcleo do esquema B (um termo)
# ===================================


@dataclass(frozen=True)
class _Steps:
    """Rótulos dos passos: esquema C reaproveita os passos de B deslocados de 2"""

    prefix: str
    offset: int = 0

    def __call__(self, number: int) -> str:
        return f"{self.prefix}.{number + self.offset}"


_B_STEPS = _Steps("B")
_C_STEPS = _Steps("C", 2)


def _measure_trio(
    session: Session, roles: Roles, state, settings: Tuple[int, int, int], tag: str
) -> Tuple[int, int, int]:
    bits = []
    for qubit, (party, setting) in enumerate(zip(roles.as_tuple(), settings)):
        bit, state = session.measure(party, state, qubit, measurement_setting(setting), f"m[{tag}]")
        bits.append(bit)
    return tuple(bits)


def padded_term(
    session: Session,
    roles: Roles,
    p_bit: int,
    q_bit: int,
    tag: str,
    variant: Variant,
    steps: _Steps = _B_STEPS,
    fake_pad: FrozenSet[PartyId] = frozenset(),
) -> Tuple[int, int, int]:
    """
    Passos 3-11 do esquema B para um termo P_i Q_i

    Args:
        session: Sessão em curso
        roles: Quem faz o papel de Alice, Bob e Charlie
        p_bit, q_bit: P_i e Q_i (já zerados por testadores, se for o caso)
        tag: Identificador do termo nos rótulos
        variant: Troca de qubits ou ensemble de cinco qubits
        steps: Numeração dos passos
        fake_pad: Partes que enviam o bit com pad invertido

    Returns:
        Bits medidos por (alice, bob, charlie) do trio
    """
    alice, bob, charlie = roles.as_tuple()
    pad_a = session.coin(alice, f"pad[{tag}]")
    pad_b = session.coin(bob, f"pad[{tag}]")

    if variant == Variant.ENSEMBLE:
        _, _, state = prepare_padded_ensemble(pads=(pad_a, pad_b))
    else:
        state = prepare_ghz()
        session.distribute(roles)
        session.permute({charlie: alice, alice: bob, bob: charlie}, steps(4))
        if pad_a:
            state = session.hadamard(alice, state, 2)
        session.permute({alice: bob, bob: charlie, charlie: alice}, steps(6))
        if pad_b:
            state = session.hadamard(bob, state, 2)
        session.permute({alice: bob, bob: charlie, charlie: alice}, steps(8))

    # passo 9: estado 𝟙⊗𝟙⊗H^{pa⊕pb}|ψ⟩
    if session.tap is not None:
        state = session.tap(session, state, roles, tag)

    sent_a = p_bit ^ pad_a ^ int(alice in fake_pad)
    sent_b = q_bit ^ pad_b ^ int(bob in fake_pad)
    session.send(alice, charlie, sent_a, steps(10))
    session.send(bob, charlie, sent_b, steps(10))

    bits = _measure_trio(session, roles, state, (p_bit, q_bit, sent_a ^ sent_b), tag)
    logger.debug("Termo %s: pads=(%d,%d) bits=%s", tag, pad_a, pad_b, bits)
    return bits


# ===================================
# Validação de entradas
# ===================================


def _check_bits(name: str, bits: Sequence[int], expected: int):
    if len(bits) != expected:
        raise ArityError(f"{name} tem {len(bits)} bits, a decomposição espera {expected}")
    if any(int(b) not in (0, 1) for b in bits):
        raise ArityError(f"{name} contém valores que não são bits: {list(bits)}")


def _two_party_session(decomp: Decomposition, x, y, rng, tap: Optional[QuantumTap]) -> Session:
    _check_bits("x", x, len(decomp.alice_vars))
    _check_bits("y", y, len(decomp.bob_vars))
    inputs = {
        Party.ALICE: dict(zip(decomp.alice_vars, map(int, x))),
        Party.BOB: dict(zip(decomp.bob_vars, map(int, y))),
    }
    return Session(THREE_PARTIES.as_tuple(), inputs, as_source(rng), tap=tap)


def _finish(session: Session, scheme: Scheme, output, repetitions=None) -> SessionResult:
    return SessionResult(
        scheme=scheme,
        output=output,
        transcript=session.transcript,
        views=session.views(),
        repetitions=list(repetitions or []),
    )


# ===================================
# Esquema A
# ===================================


def run_scheme_a(decomp: Decomposition, x: Sequence[int], y: Sequence[int], rng=None, tap=None) -> SessionResult:
    """
    Esquema A (quase privado): Charlie aprende a paridade P_i ⊕ Q_i de cada termo

    Args:
        decomp: Decomposição f = ⊕ P_i Q_i
        x: Bits de Alice
        y: Bits de Bob
        rng: Semente, numpy Generator ou BranchSource
        tap: Ignorado (sem pads não há o que detectar)

    Returns:
        SessionResult com saída sempre igual a f(x, y)
    """
    session = _two_party_session(decomp, x, y, rng, None)
    alice, bob, charlie = THREE_PARTIES.as_tuple()

    for i, (p_bit, q_bit) in enumerate(decomp.local_values(x, y), start=1):
        r = session.shared_coin((alice, bob), f"r[{i}]")
        masked_p = session.send(alice, charlie, p_bit ^ r, "A.4").payload
        masked_q = session.send(bob, charlie, q_bit ^ r, "A.5").payload
        parity = masked_p ^ masked_q
        _measure_trio(session, THREE_PARTIES, prepare_ghz(), (p_bit, q_bit, parity), str(i))

    session.send(alice, charlie, session.parity(alice), "A.8")
    session.send(bob, charlie, session.parity(bob), "A.8")
    output = session.parity(alice) ^ session.parity(bob) ^ session.parity(charlie)
    session.broadcast(charlie, output, "A.9", kind="output")
    for party in session.parties:
        session.learn(party, output)
    return _finish(session, Scheme.A, output)


# ===================================
# Esquema B e variante unilateral
# ===================================


def _scheme_b_terms(session: Session, decomp: Decomposition, x, y, variant: Variant):
    for i, (p_bit, q_bit) in enumerate(decomp.local_values(x, y), start=1):
        padded_term(session, THREE_PARTIES, p_bit, q_bit, str(i), variant)


def run_scheme_b(
    decomp: Decomposition,
    x: Sequence[int],
    y: Sequence[int],
    rng=None,
    variant: Variant = Variant.QUBIT_SWAP,
    tap: Optional[QuantumTap] = None,
) -> SessionResult:
    """
    Esquema B (passivamente seguro, t=2)

    Args:
        decomp: Decomposição f = ⊕ P_i Q_i
        x: Bits de Alice
        y: Bits de Bob
        rng: Semente, numpy Generator ou BranchSource
        variant: QubitSwap (passos 4-8) ou Ensemble (substitui os passos 3-8)
        tap: Gancho quântico opcional após o passo 9

    Returns:
        SessionResult com f anunciado por Charlie a todos
    """
    session = _two_party_session(decomp, x, y, rng, tap)
    alice, bob, charlie = THREE_PARTIES.as_tuple()
    _scheme_b_terms(session, decomp, x, y, Variant(variant))

    session.send(alice, charlie, session.parity(alice), "B.12")
    session.send(bob, charlie, session.parity(bob), "B.12")
    output = session.parity(alice) ^ session.parity(bob) ^ session.parity(charlie)
    session.broadcast(charlie, output, "B.13", kind="output")
    for party in session.parties:
        session.learn(party, output)
    return _finish(session, Scheme.B, output)


def run_scheme_b_one_sided(
    decomp: Decomposition,
    x: Sequence[int],
    y: Sequence[int],
    rng=None,
    variant: Variant = Variant.QUBIT_SWAP,
    tap: Optional[QuantumTap] = None,
) -> SessionResult:
    """Esquema B em que apenas Bob aprende f"""
    session = _two_party_session(decomp, x, y, rng, tap)
    alice, bob, charlie = THREE_PARTIES.as_tuple()
    _scheme_b_terms(session, decomp, x, y, Variant(variant))

    s_a = session.send(alice, charlie, session.parity(alice), "B.12").payload
    relayed = session.send(charlie, bob, s_a ^ session.parity(charlie), "B.13").payload
    output = relayed ^ session.parity(bob)
    session.learn(bob, output)
    return _finish(session, Scheme.B_ONE_SIDED, output)


# ===================================
# Esquema C
# ===================================


def _tester_roles(cheat: CheatConfig, party: Party, drawn: bool) -> Tuple[bool, bool]:
    """(zera as entradas, anuncia testador) de uma parte nesta repetição"""
    if cheat.strategy == CheatStrategy.TESTER_LIE and cheat.by == party:
        if cheat.mode == TesterLieMode.SILENT_TESTER:
            return drawn, False
        return False, drawn
    return drawn, drawn


def run_scheme_c(
    decomp: Decomposition,
    x: Sequence[int],
    y: Sequence[int],
    rng=None,
    policy: Optional[TesterPolicy] = None,
    cheat: Optional[CheatConfig] = None,
    variant: Variant = Variant.QUBIT_SWAP,
    tap: Optional[QuantumTap] = None,
) -> SessionResult:
    """
    Esquema C: repetições do esquema B com testadores de segurança

    Se nenhuma repetição sem testador ocorreu antes da última, os testadores
    se abstêm nela, de modo que uma sessão honesta sempre produz saída.

    Args:
        decomp: Decomposição f = ⊕ P_i Q_i
        x: Bits de Alice
        y: Bits de Bob
        rng: Semente, numpy Generator ou BranchSource
        policy: t_a, t_b e N_rep
        cheat: Desvio de uma parte corrompida (opcional)
        variant: QubitSwap ou Ensemble
        tap: Gancho quântico opcional

    Returns:
        SessionResult com o valor de referência ou Halted
    """
    if policy is None:
        raise PolicyError("Esquema C exige uma TesterPolicy")
    if policy.n_rep < 1:
        raise PolicyError("N_rep deve ser pelo menos 1")
    cheat = cheat or NO_CHEAT
    variant = Variant(variant)
    session = _two_party_session(decomp, x, y, rng, tap)
    alice, bob, charlie = THREE_PARTIES.as_tuple()
    values = decomp.local_values(x, y)
    fake_pad = frozenset({cheat.by}) if cheat.strategy == CheatStrategy.FAKE_PAD else frozenset()

    reference: Optional[int] = None
    repetitions: List[RepetitionRecord] = []
    output: Union[int, Halted, None] = None

    for j in range(1, policy.n_rep + 1):
        if j == policy.n_rep and reference is None:
            drawn_a = drawn_b = False
        else:
            drawn_a = session.bernoulli(alice, policy.t_a, f"tester[{j}]")
            drawn_b = session.bernoulli(bob, policy.t_b, f"tester[{j}]")
        zero_a, claim_a = _tester_roles(cheat, alice, drawn_a)
        zero_b, claim_b = _tester_roles(cheat, bob, drawn_b)

        for i, (p_bit, q_bit) in enumerate(values, start=1):
            padded_term(
                session,
                THREE_PARTIES,
                0 if zero_a else p_bit,
                0 if zero_b else q_bit,
                f"{j}.{i}",
                variant,
                _C_STEPS,
                fake_pad,
            )

        # passo 14: anúncio simultâneo (compromisso e revelação)
        real_tester = {alice: drawn_a, bob: drawn_b, charlie: False}
        sums = {}
        for party in (alice, bob, charlie):
            total = session.parity(party, f"m[{j}.")
            if cheat.strategy == CheatStrategy.FLIP_SUM and cheat.by == party and not real_tester[party]:
                total ^= 1
            sums[party] = total
            session.commit(party, total, "C.14", "sum")
            if party != charlie:
                session.commit(party, int(claim_a if party == alice else claim_b), "C.14", "tester")
        session.reveal()

        value = sums[alice] ^ sums[bob] ^ sums[charlie]
        announced = tuple(p for p, claimed in ((alice, claim_a), (bob, claim_b)) if claimed)
        repetitions.append(RepetitionRecord(j, announced, value))
        logger.debug("Repetição %d: testadores=%s f=%d", j, announced, value)

        if announced and value != 0:
            output = Halted(j, "testador anunciado e f != 0", "C.16")
        elif not announced:
            if reference is None:
                reference = value
            elif value != reference:
                output = Halted(j, "f inconsistente com repetições anteriores", "C.17")
        if isinstance(output, Halted):
            logger.info("Trapaça detectada: %s", output)
            break

    if output is None:
        output = reference
        for party in session.parties:
            session.learn(party, output)
    return _finish(session, Scheme.C, output, repetitions)


# ===================================
# Esquema de n partes (grau 2)
# ===================================


def nominate_third(j1: int, j2: int, n: int) -> int:
    """j3: menor índice fora do par"""
    return min(j for j in range(1, n + 1) if j not in (j1, j2))


def _multiparty_round(
    session: Session,
    form: Degree2Form,
    values: Mapping[str, int],
    variant: Variant,
    prefix: str = "",
    zeroed: FrozenSet[int] = frozenset(),
):
    for (j1, j2), terms in form.pair_terms.items():
        roles = Roles(j1, j2, nominate_third(j1, j2, form.n))
        for i, (p_hi, p_lo) in enumerate(terms, start=1):
            p_bit = 0 if j1 in zeroed else eval_anf(p_hi, values)
            q_bit = 0 if j2 in zeroed else eval_anf(p_lo, values)
            padded_term(session, roles, p_bit, q_bit, f"{prefix}{j1}-{j2}.{i}", variant)


def run_multiparty(
    form: Degree2Form,
    inputs: Mapping[int, Sequence[int]],
    rng=None,
    inner: Scheme = Scheme.B,
    policy: Optional[TesterPolicy] = None,
    variant: Variant = Variant.QUBIT_SWAP,
    tap: Optional[QuantumTap] = None,
) -> SessionResult:
    """
    Esquema de n partes para funções de grau 2

    Cada balde (j1, j2) roda o núcleo do esquema B com j3 nomeado; cada parte
    anuncia a paridade dos bits que mediu e f é o XOR dos anúncios. Com
    inner=C a rodada inteira é repetida N_rep vezes com testadores.

    Args:
        form: Forma de grau 2
        inputs: Bits de cada parte j (1..n)
        rng: Semente, numpy Generator ou BranchSource
        inner: Scheme.B ou Scheme.C
        policy: Política de testadores (obrigatória com inner=C; usa t_a)
        variant: QubitSwap ou Ensemble
        tap: Gancho quântico opcional

    Returns:
        SessionResult com f anunciado a todas as partes
    """
    inner = Scheme(inner)
    if inner not in (Scheme.B, Scheme.C):
        raise ProtocolError(f"Esquema interno deve ser B ou C, recebido {inner}")
    if form.n < 3:
        raise ArityError("O esquema de n partes exige n >= 3")
    parties = tuple(range(1, form.n + 1))
    for j in parties:
        _check_bits(f"entrada da parte {j}", inputs.get(j, ()), len(form.party_vars[j]))
    unknown = set(inputs) - set(parties)
    if unknown:
        raise ArityError(f"Partes fora da forma: {sorted(unknown)}")

    party_inputs = {j: dict(zip(form.party_vars[j], map(int, inputs[j]))) for j in parties}
    values = form.assignment(inputs)
    session = Session(parties, party_inputs, as_source(rng), tap=tap)
    variant = Variant(variant)

    if inner == Scheme.B:
        _multiparty_round(session, form, values, variant)
        for j in parties:
            session.commit(j, session.parity(j, "m["), "M.4", "parity")
        output = 0
        for item in session.reveal():
            output ^= item.value
        for j in parties:
            session.learn(j, output)
        return _finish(session, Scheme.MULTIPARTY, output)

    if policy is None:
        raise PolicyError("inner=C exige uma TesterPolicy")
    buckets = list(form.pair_terms)
    reference: Optional[int] = None
    repetitions: List[RepetitionRecord] = []
    output: Union[int, Halted, None] = None

    for rep in range(1, policy.n_rep + 1):
        if rep == policy.n_rep and reference is None:
            testers = frozenset()
        else:
            testers = frozenset(j for j in parties if session.bernoulli(j, policy.t_a, f"tester[{rep}]"))
        _multiparty_round(session, form, values, variant, f"{rep}:", testers)

        value = 0
        for j in parties:
            parity = session.parity(j, f"m[{rep}:")
            value ^= parity
            session.commit(j, parity, "M.4", "parity")
            session.commit(j, int(j in testers), "M.4", "tester")
        session.reveal()
        announced = tuple(sorted(testers))
        repetitions.append(RepetitionRecord(rep, announced, value))

        covered = all(j1 in testers or j2 in testers for j1, j2 in buckets)
        if testers and covered and value != 0:
            output = Halted(rep, "testadores cobrem todos os pares e f != 0", "C.16")
        elif not testers:
            if reference is None:
                reference = value
            elif value != reference:
                output = Halted(rep, "f inconsistente com repetições anteriores", "C.17")
        if isinstance(output, Halted):
            logger.info("Trapaça detectada: %s", output)
            break

    if output is None:
        output = reference
        for j in parties:
            session.learn(j, output)
    return _finish(session, Scheme.MULTIPARTY, output, repetitions)


# ===================================
# Despacho e enumeração exata
# ===================================


def run_scheme(
    scheme: Scheme,
    decomp: Decomposition,
    x: Sequence[int],
    y: Sequence[int],
    rng=None,
    variant: Variant = Variant.QUBIT_SWAP,
    policy: Optional[TesterPolicy] = None,
    cheat: Optional[CheatConfig] = None,
    tap: Optional[QuantumTap] = None,
) -> SessionResult:
    """Executa um esquema de duas partes pelo nome"""
    scheme = Scheme(scheme)
    if cheat is not None and cheat.active and scheme != Scheme.C:
        raise CheatConfigError("Trapaças só são simuladas no esquema C")
    if scheme == Scheme.A:
        return run_scheme_a(decomp, x, y, rng)
    if scheme == Scheme.B:
        return run_scheme_b(decomp, x, y, rng, variant, tap)
    if scheme == Scheme.B_ONE_SIDED:
        return run_scheme_b_one_sided(decomp, x, y, rng, variant, tap)
    if scheme == Scheme.C:
        return run_scheme_c(decomp, x, y, rng, policy, cheat, variant, tap)
    raise ProtocolError("Use run_multiparty para o esquema de n partes")


def branch_estimate(scheme: Scheme, m: int, policy: Optional[TesterPolicy] = None) -> int:
    """
    Cota superior do número de ramos de uma sessão

    Por termo: 2 bits aleatórios (r ou pads) e 4 ramos de medição.
    """
    scheme = Scheme(scheme)
    if scheme == Scheme.A:
        return 8**m
    if scheme in (Scheme.B, Scheme.B_ONE_SIDED):
        return 16**m
    if scheme == Scheme.C:
        if policy is None:
            raise PolicyError("Esquema C exige uma TesterPolicy")
        return (4 * 16**m) ** policy.n_rep
    raise ProtocolError(f"Enumeração não suportada para {scheme}")


ViewKey = Union[PartyId, FrozenSet[PartyId]]


def _accumulate(leaves, distributions: Dict[ViewKey, Dict[PartyView, float]]):
    for probability, views in leaves:
        for key, view in views.items():
            bucket = distributions.setdefault(key, {})
            bucket[view] = bucket.get(view, 0.0) + probability
    return distributions


def enumerate_views(
    scheme: Scheme,
    decomp: Decomposition,
    x: Sequence[int],
    y: Sequence[int],
    variant: Variant = Variant.QUBIT_SWAP,
    policy: Optional[TesterPolicy] = None,
    coalitions: Optional[Iterable[Iterable[PartyId]]] = None,
    tap: Optional[QuantumTap] = None,
    limit: Optional[int] = None,
) -> Dict[ViewKey, Dict[PartyView, float]]:
    """
    Distribuição exata das visões de cada parte (ou coalizão)

    Args:
        scheme: A, B, B1sided ou C
        decomp: Decomposição
        x, y: Entradas
        variant: Variante do esquema B/C
        policy: Política (esquema C)
        coalitions: Coalizões cujas visões conjuntas interessam (opcional)
        tap: Gancho quântico opcional
        limit: Limite de ramos (opcional, usa Config.ENUMERATION_LIMIT)

    Returns:
        Mapa parte (ou frozenset da coalizão) -> {visão: probabilidade}
    """
    if limit is None:
        limit = Config.ENUMERATION_LIMIT
    estimate = branch_estimate(scheme, decomp.m, policy)
    if estimate > limit:
        logger.warning("Enumeração recusada: %d ramos estimados", estimate)
        raise EnumerationLimitError(f"{estimate} ramos estimados excedem o limite {limit}")
    groups = [frozenset(c) for c in coalitions] if coalitions is not None else None

    def run(source):
        result = run_scheme(scheme, decomp, x, y, source, variant, policy, None, tap)
        if groups is None:
            return result.views
        return {group: result.coalition_view(group) for group in groups}

    return _accumulate(enumerate_branches(run, limit), {})


def enumerate_multiparty_views(
    form: Degree2Form,
    inputs: Mapping[int, Sequence[int]],
    coalitions: Iterable[Iterable[int]],
    variant: Variant = Variant.ENSEMBLE,
    tap: Optional[QuantumTap] = None,
    limit: Optional[int] = None,
) -> Dict[ViewKey, Dict[PartyView, float]]:
    """Enumeração direta do esquema de n partes (viável só para poucos termos)"""
    groups = [frozenset(c) for c in coalitions]

    def run(source):
        result = run_multiparty(form, inputs, source, Scheme.B, variant=variant, tap=tap)
        return {group: result.coalition_view(group) for group in groups}

    return _accumulate(enumerate_branches(run, limit), {})
