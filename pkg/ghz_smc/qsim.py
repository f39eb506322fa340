"""
Simulador exato de vetor de estado para registradores de 1 a 5 qubits

Convenções fixas em todo o projeto:
- qubits indexados a partir de 0; o qubit 0 é o bit mais significativo do índice
- o bit de resultado b codifica o autovalor (-1)^b
"""

import json
import logging
from dataclasses import dataclass
from functools import reduce
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import Config
from .randomness import as_source, coin

logger = logging.getLogger(__name__)

MAX_QUBITS = 5

SQRT_HALF = 1.0 / np.sqrt(2.0)

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

HADAMARD = SQRT_HALF * np.array([[1, 1], [1, -1]], dtype=complex)

# Autovetores (+1, -1) de cada eixo
EIGENVECTORS = {
    "X": (SQRT_HALF * np.array([1, 1], dtype=complex), SQRT_HALF * np.array([1, -1], dtype=complex)),
    "Y": (SQRT_HALF * np.array([1, 1j], dtype=complex), SQRT_HALF * np.array([1, -1j], dtype=complex)),
    "Z": (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)),
}

Y_PLUS, Y_MINUS = EIGENVECTORS["Y"]


class QuantumStateError(ValueError):
    """Registrador, operador ou medição inválidos"""


@dataclass(frozen=True, eq=False)
class StateVector:
    """Registrador imutável de amplitudes complexas (qubit 0 = bit mais significativo)"""

    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.array(self.amplitudes, dtype=complex).reshape(-1)
        size = amplitudes.size
        n_qubits = size.bit_length() - 1
        if size < 2 or (1 << n_qubits) != size:
            raise QuantumStateError(f"Tamanho {size} não é potência de 2")
        if n_qubits > MAX_QUBITS:
            raise QuantumStateError(f"No máximo {MAX_QUBITS} qubits (recebido {n_qubits})")
        norm = float(np.vdot(amplitudes, amplitudes).real)
        if abs(norm - 1.0) > Config.ATOL:
            raise QuantumStateError(f"Estado não normalizado (norma² = {norm})")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def n_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    @classmethod
    def from_bits(cls, bits: str) -> "StateVector":
        """Estado da base computacional, ex: "010" """
        amplitudes = np.zeros(1 << len(bits), dtype=complex)
        amplitudes[int(bits, 2)] = 1.0
        return cls(amplitudes)

    def isclose(self, other: "StateVector", atol: float = Config.ATOL) -> bool:
        return self.n_qubits == other.n_qubits and bool(
            np.allclose(self.amplitudes, other.amplitudes, atol=atol, rtol=0.0)
        )

    def to_json(self) -> str:
        """Dump de depuração: lista de pares [re, im] na ordem dos índices"""
        return json.dumps([[float(a.real), float(a.imag)] for a in self.amplitudes])

    @classmethod
    def from_json(cls, text: str) -> "StateVector":
        pairs = json.loads(text)
        return cls(np.array([complex(re, im) for re, im in pairs]))


@dataclass(frozen=True)
class PauliOp:
    """Operador de Pauli com sinal, ex: PauliOp("XXZ", -1)"""

    axes: str
    sign: int = 1

    def __post_init__(self):
        if not self.axes or any(axis not in PAULI_MATRICES for axis in self.axes):
            raise QuantumStateError(f"String de Pauli inválida: {self.axes!r}")
        if self.sign not in (1, -1):
            raise QuantumStateError(f"Sinal inválido: {self.sign}")

    @classmethod
    def parse(cls, text: str) -> "PauliOp":
        """Lê "+ZZZ", "-XXZ" ou "IYY" """
        text = text.strip()
        sign = 1
        if text[:1] in "+-":
            sign = -1 if text[0] == "-" else 1
            text = text[1:]
        return cls(text.upper(), sign)

    @classmethod
    def on(cls, n_qubits: int, axes: Dict[int, str], sign: int = 1) -> "PauliOp":
        """Operador com os eixos dados nos qubits indicados e identidade no resto"""
        return cls("".join(axes.get(q, "I") for q in range(n_qubits)), sign)

    @property
    def n_qubits(self) -> int:
        return len(self.axes)

    @property
    def is_identity(self) -> bool:
        return set(self.axes) == {"I"}

    def matrix(self) -> np.ndarray:
        return self.sign * reduce(np.kron, (PAULI_MATRICES[a] for a in self.axes))

    def __str__(self) -> str:
        return ("+" if self.sign > 0 else "-") + self.axes


@dataclass(frozen=True)
class MeasurementSetting:
    """Bit de entrada que escolhe a base: 0 -> Z, 1 -> X"""

    input_bit: int

    def __post_init__(self):
        if self.input_bit not in (0, 1):
            raise QuantumStateError(f"Bit de configuração inválido: {self.input_bit}")

    @property
    def basis(self) -> str:
        return "X" if self.input_bit else "Z"


def measurement_setting(bit: int) -> str:
    """Base O_bit: O_0 = Z, O_1 = X"""
    return MeasurementSetting(bit).basis


@dataclass(frozen=True)
class MeasurementOutcome:
    bit: int

    @property
    def eigenvalue(self) -> int:
        return -1 if self.bit else 1


@dataclass(frozen=True, eq=False)
class Branch:
    """Um resultado possível de medição: bit, probabilidade e estado colapsado"""

    outcome: MeasurementOutcome
    probability: float
    state: Optional[StateVector]


def _check_qubit(state: StateVector, qubit: int):
    if not 0 <= qubit < state.n_qubits:
        raise QuantumStateError(f"Qubit {qubit} fora do registrador de {state.n_qubits} qubits")


def _check_op(state: StateVector, op: PauliOp):
    if op.n_qubits != state.n_qubits:
        raise QuantumStateError(
            f"Operador {op} tem {op.n_qubits} posições, registrador tem {state.n_qubits}"
        )


def _apply_single(amplitudes: np.ndarray, n_qubits: int, qubit: int, gate: np.ndarray) -> np.ndarray:
    psi = amplitudes.reshape((2,) * n_qubits)
    psi = np.tensordot(gate, psi, axes=([1], [qubit]))
    psi = np.moveaxis(psi, 0, qubit)
    return psi.reshape(-1)


def _collapse(projected: np.ndarray, bit: int) -> Branch:
    probability = float(np.vdot(projected, projected).real)
    if probability <= Config.ATOL:
        return Branch(MeasurementOutcome(bit), 0.0, None)
    return Branch(MeasurementOutcome(bit), probability, StateVector(projected / np.sqrt(probability)))


def prepare_ghz() -> StateVector:
    """
    Prepara |ψ⟩ = (|y-y-y+⟩ + |y+y+y-⟩)/√2

    Returns:
        Estado de 3 qubits estabilizado por +ZZZ, +ZXX, +XZX e -XXZ
    """
    first = reduce(np.kron, (Y_MINUS, Y_MINUS, Y_PLUS))
    second = reduce(np.kron, (Y_PLUS, Y_PLUS, Y_MINUS))
    return StateVector(SQRT_HALF * (first + second))


def apply_hadamard(state: StateVector, qubit: int) -> StateVector:
    """Aplica H ao qubit indicado"""
    _check_qubit(state, qubit)
    return StateVector(_apply_single(state.amplitudes, state.n_qubits, qubit, HADAMARD))


def pauli_branches(state: StateVector, qubit: int, basis: str) -> List[Branch]:
    """
    Variante determinística de measure_pauli: os dois ramos com suas probabilidades

    Args:
        state: Estado a medir
        qubit: Índice do qubit
        basis: "X", "Y" ou "Z"

    Returns:
        [ramo do bit 0, ramo do bit 1]; ramos impossíveis têm state=None
    """
    _check_qubit(state, qubit)
    if basis not in EIGENVECTORS:
        raise QuantumStateError(f"Base de medição inválida: {basis!r}")
    branches = []
    for bit, vector in enumerate(EIGENVECTORS[basis]):
        projector = np.outer(vector, vector.conj())
        projected = _apply_single(state.amplitudes, state.n_qubits, qubit, projector)
        branches.append(_collapse(projected, bit))
    return branches


def joint_pauli_branches(state: StateVector, op: PauliOp) -> List[Branch]:
    """Variante determinística de measure_joint_pauli"""
    _check_op(state, op)
    if op.is_identity:
        raise QuantumStateError("Medição da identidade não tem resultado")
    matrix = op.matrix()
    identity = np.eye(matrix.shape[0], dtype=complex)
    branches = []
    for bit in (0, 1):
        projector = 0.5 * (identity + (-1) ** bit * matrix)
        branches.append(_collapse(projector @ state.amplitudes, bit))
    return branches


def _sample(branches: List[Branch], rng, label: str) -> Tuple[MeasurementOutcome, StateVector]:
    index = as_source(rng).choose([b.probability for b in branches], label)
    chosen = branches[index]
    return chosen.outcome, chosen.state


def measure_pauli(
    state: StateVector, qubit: int, basis: str, rng=None, label: str = ""
) -> Tuple[MeasurementOutcome, StateVector]:
    """
    Mede um qubit num eixo de Pauli com colapso

    Args:
        state: Estado a medir
        qubit: Índice do qubit
        basis: "X", "Y" ou "Z" ("I" é rejeitado)
        rng: Semente, numpy Generator ou BranchSource
        label: Rótulo do ponto de escolha (para forçar/enumerar)

    Returns:
        Tupla (resultado, estado pós-medição normalizado)
    """
    return _sample(pauli_branches(state, qubit, basis), rng, label)


def measure_joint_pauli(
    state: StateVector, op: PauliOp, rng=None, label: str = ""
) -> Tuple[MeasurementOutcome, StateVector]:
    """Projeta no autoespaço ±1 do operador completo"""
    return _sample(joint_pauli_branches(state, op), rng, label)


def expectation(state: StateVector, op: PauliOp) -> float:
    """Valor esperado ⟨ψ|op|ψ⟩"""
    _check_op(state, op)
    value = np.vdot(state.amplitudes, op.matrix() @ state.amplitudes)
    if abs(value.imag) > Config.PROBABILITY_ATOL:
        raise QuantumStateError(f"Valor esperado com parte imaginária {value.imag}")
    return float(value.real)


def prepare_padded_ensemble(
    rng=None, pads: Optional[Tuple[int, int]] = None, labels: Tuple[str, str] = ("pad_a", "pad_b")
) -> Tuple[int, int, StateVector]:
    """
    Membro do ensemble de cinco qubits após Alice e Bob medirem seus qubits de pad

    Args:
        rng: Semente, numpy Generator ou BranchSource
        pads: (p_a, p_b) forçados (opcional)
        labels: Rótulos dos pontos de escolha dos pads

    Returns:
        Tupla (p_a, p_b, (𝟙⊗𝟙⊗H^{p_a⊕p_b})|ψ⟩)
    """
    if pads is None:
        source = as_source(rng)
        pads = (coin(source, labels[0]), coin(source, labels[1]))
    p_a, p_b = pads
    state = prepare_ghz()
    if p_a ^ p_b:
        state = apply_hadamard(state, 2)
    return p_a, p_b, state


def joint_outcome_distribution(
    state: StateVector, settings: Sequence[Tuple[int, str]]
) -> Dict[Tuple[int, ...], float]:
    """
    Distribuição exata de uma sequência de medições de um qubit

    Args:
        state: Estado inicial
        settings: Lista de (qubit, base) na ordem em que as medições ocorrem

    Returns:
        Mapa (bits ordenados por índice de qubit) -> probabilidade
    """
    distribution: Dict[Tuple[int, ...], float] = {}
    frontier = [((), 1.0, state)]
    for qubit, basis in settings:
        nxt = []
        for bits, probability, current in frontier:
            for branch in pauli_branches(current, qubit, basis):
                if branch.state is not None:
                    nxt.append((bits + ((qubit, branch.outcome.bit),), probability * branch.probability, branch.state))
        frontier = nxt
    for bits, probability, _ in frontier:
        key = tuple(bit for _, bit in sorted(bits))
        distribution[key] = distribution.get(key, 0.0) + probability
    return distribution


def stabilizer_suite(state: StateVector) -> Dict[str, float]:
    """Valores esperados dos quatro estabilizadores de |ψ⟩"""
    return {name: expectation(state, PauliOp.parse(name)) for name in ("+ZZZ", "+ZXX", "+XZX", "-XXZ")}


def parity_law_settings(a: int, b: int) -> List[Tuple[int, str]]:
    """Bases (O_a, O_b, O_{a⊕b}) dos três qubits"""
    return [(0, measurement_setting(a)), (1, measurement_setting(b)), (2, measurement_setting(a ^ b))]


def all_settings() -> List[Tuple[int, int]]:
    return list(product((0, 1), repeat=2))
