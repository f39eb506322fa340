"""
Escalonador de sessão: transcrição, registros por parte e visões

As partes são máquinas de estado passivas; toda comunicação, aleatoriedade e
medição passa pela Session, que numera as mensagens e monta as visões.
"""

import json
import logging
from dataclasses import dataclass, field
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        __str__ = str.__str__
        __format__ = str.__format__
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .qsim import StateVector, apply_hadamard, measure_pauli
from .randomness import BranchSource, bernoulli, coin

logger = logging.getLogger(__name__)


class Party(StrEnum):
    ALICE = "alice"
    BOB = "bob"
    CHARLIE = "charlie"


PartyId = Union[Party, int]

BROADCAST = "*"


class Channel(StrEnum):
    SECURE_CLASSICAL = "SecureClassical"
    BROADCAST = "Broadcast"
    QUBIT_HANDOVER = "QubitHandover"


class SchedulerError(ValueError):
    """Violação de uma regra do escalonador"""


def party_label(party: PartyId) -> str:
    return party.value if isinstance(party, Party) else f"p{party}"


def parse_party(text: str) -> PartyId:
    """ "alice" -> Party.ALICE; "3" ou "p3" -> 3"""
    text = text.strip().lower()
    if text in Party._value2member_map_:
        return Party(text)
    digits = text[1:] if text.startswith("p") else text
    if digits.isdigit():
        return int(digits)
    raise ValueError(f"Parte desconhecida: {text!r}")


def _member_order(party: PartyId):
    return (0, party.value) if isinstance(party, Party) else (1, party)


@dataclass(frozen=True)
class Message:
    seq: int = field(compare=False)
    sender: PartyId
    recipient: Union[PartyId, str]
    channel: Channel
    payload: Union[int, str]
    step_label: str

    def to_json_dict(self) -> dict:
        return {
            "seq": self.seq,
            "from": party_label(self.sender),
            "to": self.recipient if self.recipient == BROADCAST else party_label(self.recipient),
            "channel": self.channel.value,
            "payload": self.payload,
            "step_label": self.step_label,
        }


@dataclass(frozen=True)
class Announcement:
    party: PartyId
    value: int
    step_label: str
    kind: str = "value"


@dataclass(frozen=True)
class RandomnessRecord:
    party: PartyId
    label: str
    bit: int


@dataclass(frozen=True)
class MeasurementRecord:
    party: PartyId
    label: str
    basis: str
    bit: int


@dataclass
class Transcript:
    messages: List[Message] = field(default_factory=list)
    announcements: List[Announcement] = field(default_factory=list)

    def append(self, message: Message) -> Message:
        if self.messages and message.seq <= self.messages[-1].seq:
            raise SchedulerError("Número de sequência não crescente")
        if message.channel == Channel.SECURE_CLASSICAL and message.recipient == BROADCAST:
            raise SchedulerError("Canal seguro exige um único destinatário")
        self.messages.append(message)
        return message

    def to_jsonl(self) -> str:
        return "".join(json.dumps(m.to_json_dict()) + "\n" for m in self.messages)


@dataclass(frozen=True)
class PartyView:
    """
    O que uma parte (ou coalizão) observa numa sessão

    A igualdade ignora números de sequência e entregas de qubits, que não
    carregam informação clássica.
    """

    party: FrozenSet[PartyId]
    local_inputs: Tuple[Tuple[str, int], ...]
    local_randomness: Tuple[RandomnessRecord, ...]
    received: Tuple[Message, ...]
    measured: Tuple[MeasurementRecord, ...]
    announced: Tuple[Announcement, ...]
    learned: Tuple[Tuple[PartyId, int], ...] = ()
    handovers: Tuple[Message, ...] = field(default=(), compare=False)

    @property
    def inputs(self) -> Dict[str, int]:
        return dict(self.local_inputs)

    def output(self) -> Optional[int]:
        """Valor de f aprendido (None se nenhum membro aprendeu)"""
        return self.learned[0][1] if self.learned else None


def merge_views(views: Iterable[PartyView]) -> PartyView:
    """Visão conjunta de uma coalizão (membros em ordem canônica)"""
    views = sorted(views, key=lambda v: sorted(map(_member_order, v.party)))
    members = frozenset().union(*(v.party for v in views))
    announced = views[0].announced if views else ()
    return PartyView(
        party=members,
        local_inputs=tuple(item for v in views for item in v.local_inputs),
        local_randomness=tuple(item for v in views for item in v.local_randomness),
        received=tuple(item for v in views for item in v.received),
        measured=tuple(item for v in views for item in v.measured),
        announced=announced,
        learned=tuple(item for v in views for item in v.learned),
        handovers=tuple(item for v in views for item in v.handovers),
    )


# Gancho quântico: chamado após o pad (passo 9); pode medir e devolve o estado
QuantumTap = Callable[["Session", StateVector, "Roles", int], StateVector]


@dataclass(frozen=True)
class Roles:
    """Papéis de um trio GHZ: qubit 0 de alice, 1 de bob, 2 de charlie"""

    alice: PartyId
    bob: PartyId
    charlie: PartyId

    def as_tuple(self) -> Tuple[PartyId, PartyId, PartyId]:
        return (self.alice, self.bob, self.charlie)

    def qubit_of(self, party: PartyId) -> int:
        return self.as_tuple().index(party)


THREE_PARTIES = Roles(Party.ALICE, Party.BOB, Party.CHARLIE)


class Session:
    """
    Escalonador determinístico de uma sessão

    Args:
        parties: Partes participantes
        inputs: Entradas locais de cada parte (variável -> bit)
        source: Fonte de escolhas (amostragem ou enumeração)
        tap: Gancho quântico opcional (coalizões com troca quântica)
    """

    def __init__(
        self,
        parties: Sequence[PartyId],
        inputs: Mapping[PartyId, Mapping[str, int]],
        source: BranchSource,
        tap: Optional[QuantumTap] = None,
    ):
        self.parties = tuple(parties)
        if len(set(self.parties)) != len(self.parties):
            raise SchedulerError("Identificadores de parte repetidos")
        self.source = source
        self.tap = tap
        self.transcript = Transcript()
        self._seq = 0
        self._inputs = {p: tuple(dict(inputs.get(p, {})).items()) for p in self.parties}
        self._randomness: Dict[PartyId, List[RandomnessRecord]] = {p: [] for p in self.parties}
        self._measured: Dict[PartyId, List[MeasurementRecord]] = {p: [] for p in self.parties}
        self._learned: Dict[PartyId, int] = {}
        self._holding: Dict[PartyId, int] = {}
        self._pending: List[Announcement] = []

    # -------------------------------
    # Aleatoriedade local
    # -------------------------------

    def coin(self, party: PartyId, label: str) -> int:
        bit = coin(self.source, f"{party_label(party)}.{label}")
        self._randomness[party].append(RandomnessRecord(party, label, bit))
        return bit

    def shared_coin(self, parties: Sequence[PartyId], label: str) -> int:
        """Bit secreto compartilhado (primitiva ideal)"""
        bit = coin(self.source, "shared." + label)
        for party in parties:
            self._randomness[party].append(RandomnessRecord(party, label, bit))
        return bit

    def bernoulli(self, party: PartyId, p: float, label: str) -> bool:
        value = bernoulli(self.source, p, f"{party_label(party)}.{label}")
        self._randomness[party].append(RandomnessRecord(party, label, int(value)))
        return value

    # -------------------------------
    # Canais
    # -------------------------------

    def _next_seq(self) -> int:
        self._seq += 1
        return self._seq

    def send(self, sender: PartyId, recipient: PartyId, payload: int, step: str) -> Message:
        message = Message(self._next_seq(), sender, recipient, Channel.SECURE_CLASSICAL, int(payload), step)
        return self.transcript.append(message)

    def broadcast(self, sender: PartyId, value: int, step: str, kind: str = "value") -> Message:
        message = Message(self._next_seq(), sender, BROADCAST, Channel.BROADCAST, int(value), step)
        self.transcript.append(message)
        self.transcript.announcements.append(Announcement(sender, int(value), step, kind))
        return message

    def commit(self, party: PartyId, value: int, step: str, kind: str):
        """Compromete um valor para a rodada de anúncio simultâneo"""
        self._pending.append(Announcement(party, int(value), step, kind))

    def reveal(self):
        """Revela, na ordem de compromisso, todos os valores comprometidos"""
        pending, self._pending = self._pending, []
        for item in pending:
            self.broadcast(item.party, item.value, item.step_label, item.kind)
        return pending

    def learn(self, party: PartyId, value: int):
        self._learned[party] = int(value)

    # -------------------------------
    # Qubits
    # -------------------------------

    def distribute(self, roles: Roles):
        """Entrega o qubit k do trio ao k-ésimo papel"""
        self._holding = {party: k for k, party in enumerate(roles.as_tuple())}

    def permute(self, moves: Mapping[PartyId, PartyId], step: str):
        """
        Permutação simultânea dos qubits (remetente -> destinatário)

        Após a troca, cada parte do trio deve possuir exatamente um qubit.
        """
        new_holding = {}
        for sender, recipient in moves.items():
            qubit = self._holding[sender]
            message = Message(
                self._next_seq(), sender, recipient, Channel.QUBIT_HANDOVER, f"q{qubit}", step
            )
            self.transcript.append(message)
            if recipient in new_holding:
                raise SchedulerError(f"{party_label(recipient)} receberia dois qubits no passo {step}")
            new_holding[recipient] = qubit
        if set(new_holding) != set(self._holding):
            raise SchedulerError(f"Posse de qubits inconsistente no passo {step}")
        self._holding = new_holding

    def transfer(self, sender: PartyId, recipient: PartyId, qubit: int, step: str) -> Message:
        """Entrega fora do protocolo (ataques com canal quântico entre corrompidos)"""
        message = Message(self._next_seq(), sender, recipient, Channel.QUBIT_HANDOVER, f"q{qubit}", step)
        logger.debug("Entrega quântica fora do protocolo: %s", message)
        return self.transcript.append(message)

    def holder_of(self, qubit: int) -> PartyId:
        for party, held in self._holding.items():
            if held == qubit:
                return party
        raise SchedulerError(f"Qubit {qubit} sem dono")

    def hadamard(self, party: PartyId, state: StateVector, qubit: int) -> StateVector:
        if self._holding and self._holding.get(party) != qubit:
            raise SchedulerError(f"{party_label(party)} não possui o qubit {qubit}")
        return apply_hadamard(state, qubit)

    def measure(
        self, party: PartyId, state: StateVector, qubit: int, basis: str, label: str
    ) -> Tuple[int, StateVector]:
        outcome, state = measure_pauli(state, qubit, basis, self.source, f"{party_label(party)}.{label}")
        self._measured[party].append(MeasurementRecord(party, label, basis, outcome.bit))
        return outcome.bit, state

    def record_measurement(self, party: PartyId, label: str, basis: str, bit: int):
        self._measured[party].append(MeasurementRecord(party, label, basis, bit))

    def parity(self, party: PartyId, prefix: str = "") -> int:
        """Paridade dos bits medidos pela parte (filtrando pelo prefixo do rótulo)"""
        value = 0
        for record in self._measured[party]:
            if record.label.startswith(prefix) and not record.label.startswith("tap"):
                value ^= record.bit
        return value

    # -------------------------------
    # Visões
    # -------------------------------

    def view(self, party: PartyId) -> PartyView:
        received = []
        handovers = []
        for message in self.transcript.messages:
            if message.recipient != party:
                continue
            if message.channel == Channel.QUBIT_HANDOVER:
                handovers.append(message)
            else:
                received.append(message)
        learned = ((party, self._learned[party]),) if party in self._learned else ()
        return PartyView(
            party=frozenset({party}),
            local_inputs=self._inputs[party],
            local_randomness=tuple(self._randomness[party]),
            received=tuple(received),
            measured=tuple(self._measured[party]),
            announced=tuple(self.transcript.announcements),
            learned=learned,
            handovers=tuple(handovers),
        )

    def views(self) -> Dict[PartyId, PartyView]:
        return {party: self.view(party) for party in self.parties}

    def coalition_view(self, members: Iterable[PartyId]) -> PartyView:
        return merge_views(self.view(p) for p in members)
