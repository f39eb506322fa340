"""
Fontes de aleatoriedade: amostragem com semente e enumeração exata de ramos

Todo ponto de escolha de um protocolo (bits aleatórios, resultados de medição,
papel de testador) passa por uma BranchSource. A mesma implementação do
protocolo serve assim tanto para sortear uma sessão quanto para enumerar todas
as sessões possíveis com suas probabilidades exatas.
"""

import logging
from typing import Callable, List, Mapping, Optional, Protocol, Sequence, Tuple, TypeVar

import numpy as np

from .config import Config

logger = logging.getLogger(__name__)

T = TypeVar("T")

# Pesos abaixo disso são tratados como ramos impossíveis
ZERO_WEIGHT = 1e-15


class EnumerationLimitError(ValueError):
    """Número de ramos excede o limite configurado"""


class BranchSource(Protocol):
    def choose(self, weights: Sequence[float], label: str = "") -> int: ...


class RandomSource:
    """Sorteia escolhas a partir de um numpy Generator"""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng

    def choose(self, weights: Sequence[float], label: str = "") -> int:
        u = self.rng.random()
        total = 0.0
        last = 0
        for index, weight in enumerate(weights):
            if weight <= ZERO_WEIGHT:
                continue
            total += weight
            last = index
            if u < total:
                return index
        # arredondamento: u ficou acima da soma acumulada
        return last


class ForcedSource:
    """
    Força escolhas nomeadas e delega as demais

    Args:
        inner: Fonte usada para os pontos de escolha não forçados
        forced: Mapa rótulo -> índice escolhido (ex: {"alice.pad[1]": 1})
    """

    def __init__(self, inner: BranchSource, forced: Mapping[str, int]):
        self.inner = inner
        self.forced = dict(forced)

    def choose(self, weights: Sequence[float], label: str = "") -> int:
        if label in self.forced:
            index = self.forced[label]
            if weights[index] <= ZERO_WEIGHT:
                raise ValueError(f"Escolha forçada impossível em {label}")
            return index
        return self.inner.choose(weights, label)


def as_source(rng=None) -> BranchSource:
    """
    Converte semente, numpy Generator ou BranchSource numa BranchSource

    Args:
        rng: None (usa Config.DEFAULT_SEED), int, np.random.Generator ou BranchSource

    Returns:
        BranchSource pronta para uso
    """
    if rng is None:
        return RandomSource(np.random.default_rng(Config.DEFAULT_SEED))
    if isinstance(rng, (int, np.integer)):
        return RandomSource(np.random.default_rng(int(rng)))
    if isinstance(rng, np.random.Generator):
        return RandomSource(rng)
    if hasattr(rng, "choose"):
        return rng
    raise TypeError(f"Fonte de aleatoriedade não suportada: {type(rng).__name__}")


def coin(source: BranchSource, label: str = "") -> int:
    """Bit uniforme"""
    return source.choose((0.5, 0.5), label)


def bernoulli(source: BranchSource, p: float, label: str = "") -> bool:
    """Verdadeiro com probabilidade p"""
    return source.choose((1.0 - p, p), label) == 1


class _PathSource:
    """Reproduz um prefixo de escolhas e registra os pontos de escolha seguintes"""

    def __init__(self, prefix: Tuple[int, ...]):
        self.prefix = prefix
        self.trail: List[Tuple[int, Tuple[float, ...]]] = []
        self.probability = 1.0

    def choose(self, weights: Sequence[float], label: str = "") -> int:
        depth = len(self.trail)
        if depth < len(self.prefix):
            index = self.prefix[depth]
        else:
            index = next(i for i, w in enumerate(weights) if w > ZERO_WEIGHT)
        self.trail.append((index, tuple(weights)))
        self.probability *= weights[index]
        return index


def enumerate_branches(
    run: Callable[[BranchSource], T], limit: Optional[int] = None
) -> List[Tuple[float, T]]:
    """
    Enumera exaustivamente todas as execuções de `run` com probabilidade não nula

    Busca em profundidade: cada execução reproduz um prefixo de escolhas e
    agenda as alternativas dos pontos de escolha novos.

    Args:
        run: Função que executa o experimento consumindo uma BranchSource
        limit: Número máximo de folhas (opcional, usa Config.ENUMERATION_LIMIT)

    Returns:
        Lista de (probabilidade, resultado), em ordem determinística
    """
    if limit is None:
        limit = Config.ENUMERATION_LIMIT

    leaves: List[Tuple[float, T]] = []
    stack: List[Tuple[int, ...]] = [()]

    while stack:
        prefix = stack.pop()
        source = _PathSource(prefix)
        result = run(source)
        leaves.append((source.probability, result))
        if len(leaves) > limit:
            logger.warning("Enumeração interrompida após %d ramos", limit)
            raise EnumerationLimitError(f"Mais de {limit} ramos na enumeração")

        taken = [index for index, _ in source.trail]
        for depth in range(len(prefix), len(source.trail)):
            index, weights = source.trail[depth]
            for alt in range(len(weights) - 1, index, -1):
                if weights[alt] > ZERO_WEIGHT:
                    stack.append(tuple(taken[:depth]) + (alt,))

    return leaves


def spawn_seeds(seed: int, count: int) -> List[int]:
    """
    Gera sementes filhas independentes (campanhas e varreduras)

    Args:
        seed: Semente da campanha
        count: Número de sementes

    Returns:
        Lista de inteiros de 32 bits
    """
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(child.generate_state(1)[0]) for child in children]
