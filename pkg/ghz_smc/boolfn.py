"""
Funções booleanas: parsing, forma normal algébrica (ANF) e decomposições

- inner_product_decomposition: f = ⊕ P_i(x) Q_i(y) entre duas partes
- degree2_decomposition: f = ⊕ P_i^{j1} P_i^{j2} por pares de partes
"""

import json
import logging
import re
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Dict, FrozenSet, List, Mapping, Sequence, Tuple

import numpy as np

from .config import Config

logger = logging.getLogger(__name__)

Monomial = FrozenSet[str]

ONE: Monomial = frozenset()


class BooleanFunctionError(ValueError):
    """Erro base do módulo de funções booleanas"""


class ExpressionSyntaxError(BooleanFunctionError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (posição {position})")
        self.position = position


class UndeclaredVariableError(BooleanFunctionError):
    pass


class TooManyVariablesError(BooleanFunctionError):
    pass


class MissingVariableError(BooleanFunctionError):
    pass


class PartyCountError(BooleanFunctionError):
    pass


class FunctionFileError(BooleanFunctionError):
    pass


class Degree2ViolationError(BooleanFunctionError):
    def __init__(self, monomial: Monomial, parties: Sequence[str]):
        names = ",".join(sorted(monomial))
        super().__init__(f"Monômio {{{names}}} envolve {len(parties)} partes: {', '.join(parties)}")
        self.monomial = monomial
        self.parties = tuple(parties)


@dataclass(frozen=True, eq=False)
class BooleanFunction:
    """Função com variáveis ordenadas (Alice primeiro) e tabela verdade completa"""

    variables: Tuple[str, ...]
    owners: Mapping[str, str]
    parties: Tuple[str, ...]
    truth_table: np.ndarray
    expression: str = ""

    def __post_init__(self):
        if self.truth_table.size != 1 << len(self.variables):
            raise BooleanFunctionError("Tabela verdade com tamanho incompatível")
        for name in self.variables:
            if self.owners.get(name) not in self.parties:
                raise BooleanFunctionError(f"Variável {name} sem parte dona")

    def party_variables(self, party: str) -> Tuple[str, ...]:
        return tuple(v for v in self.variables if self.owners[v] == party)

    def index_of(self, assignment: Mapping[str, int]) -> int:
        index = 0
        for name in self.variables:
            if name not in assignment:
                raise MissingVariableError(f"Variável {name} sem valor")
            index = (index << 1) | (int(assignment[name]) & 1)
        return index

    def evaluate(self, assignment: Mapping[str, int]) -> int:
        return int(self.truth_table[self.index_of(assignment)])

    def assignments(self):
        """Todas as atribuições na ordem da tabela verdade"""
        n = len(self.variables)
        for index in range(1 << n):
            yield {name: (index >> (n - 1 - k)) & 1 for k, name in enumerate(self.variables)}


# ===================================
# Parsing
# ===================================

_TOKEN = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<const>[01])|(?P<op>[\^&|~!()]))")

_KEYWORDS = {"xor": "^", "and": "&", "or": "|", "not": "~"}


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    position = 0
    while position < len(text):
        if text[position:].strip() == "":
            break
        match = _TOKEN.match(text, position)
        if not match:
            start = position + len(text[position:]) - len(text[position:].lstrip())
            raise ExpressionSyntaxError(f"Caractere inesperado {text[start]!r}", start)
        start = match.start(match.lastgroup)
        value = match.group(match.lastgroup)
        kind = match.lastgroup
        if kind == "name" and value.lower() in _KEYWORDS:
            kind, value = "op", _KEYWORDS[value.lower()]
        tokens.append((kind, value, start))
        position = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    """Descida recursiva: NOT > AND > XOR > OR; avalia direto sobre colunas numpy"""

    def __init__(self, text: str, columns: Dict[str, np.ndarray], size: int):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.columns = columns
        self.ones = np.ones(size, dtype=np.uint8)

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def parse(self) -> np.ndarray:
        value = self.or_expr()
        kind, text, position = self.peek()
        if kind != "end":
            raise ExpressionSyntaxError(f"Símbolo inesperado {text!r}", position)
        return value

    def or_expr(self):
        left = self.xor_expr()
        while self.peek()[:2] == ("op", "|"):
            self.take()
            right = self.xor_expr()
            # a ∨ b = a ⊕ b ⊕ ab
            left = left ^ right ^ (left & right)
        return left

    def xor_expr(self):
        left = self.and_expr()
        while self.peek()[:2] == ("op", "^"):
            self.take()
            left = left ^ self.and_expr()
        return left

    def and_expr(self):
        left = self.unary()
        while self.peek()[:2] == ("op", "&"):
            self.take()
            left = left & self.unary()
        return left

    def unary(self):
        kind, text, _ = self.peek()
        if kind == "op" and text in ("~", "!"):
            self.take()
            return self.unary() ^ self.ones
        return self.atom()

    def atom(self):
        kind, text, position = self.take()
        if kind == "name":
            if text not in self.columns:
                raise UndeclaredVariableError(f"Variável não declarada {text!r} (posição {position})")
            return self.columns[text]
        if kind == "const":
            return self.ones * int(text)
        if (kind, text) == ("op", "("):
            value = self.or_expr()
            kind, text, position = self.take()
            if (kind, text) != ("op", ")"):
                raise ExpressionSyntaxError("Esperado ')'", position)
            return value
        if kind == "end":
            raise ExpressionSyntaxError("Expressão incompleta", position)
        raise ExpressionSyntaxError(f"Símbolo inesperado {text!r}", position)


def parse_expression(text: str, party_of: Mapping[str, str]) -> BooleanFunction:
    """
    Lê uma expressão booleana e calcula sua tabela verdade

    Args:
        text: Expressão com ^ & | ~ ! (ou xor/and/or/not), parênteses e constantes 0/1
        party_of: Mapa variável -> parte, na ordem de declaração (Alice primeiro)

    Returns:
        BooleanFunction com a tabela verdade completa
    """
    variables = tuple(party_of)
    if len(variables) > Config.MAX_VARIABLES:
        raise TooManyVariablesError(
            f"{len(variables)} variáveis excedem o limite de {Config.MAX_VARIABLES}"
        )
    for name in variables:
        if name.lower() in _KEYWORDS:
            raise BooleanFunctionError(f"Nome de variável reservado: {name}")

    n = len(variables)
    size = 1 << n
    indices = np.arange(size)
    columns = {
        name: ((indices >> (n - 1 - k)) & 1).astype(np.uint8) for k, name in enumerate(variables)
    }
    table = _Parser(text, columns, size).parse()

    parties = tuple(dict.fromkeys(party_of.values()))
    return BooleanFunction(
        variables=variables,
        owners=dict(party_of),
        parties=parties,
        truth_table=np.array(table, dtype=np.uint8),
        expression=text,
    )


def load_function_file(path) -> BooleanFunction:
    """
    Carrega um arquivo de função JSON

    Formato: {"parties": {"alice": ["x1"], "bob": ["y1"]}, "expr": "x1 & y1"}

    Args:
        path: Caminho do arquivo

    Returns:
        BooleanFunction correspondente
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise FunctionFileError(f"Erro ao ler {path}: {e}") from e

    parties = data.get("parties")
    expr = data.get("expr")
    if not isinstance(parties, dict) or not isinstance(expr, str):
        raise FunctionFileError(f"{path}: campos 'parties' (objeto) e 'expr' (texto) são obrigatórios")

    party_of: Dict[str, str] = {}
    for party, names in parties.items():
        for name in names:
            if name in party_of:
                raise FunctionFileError(f"{path}: variável {name} declarada em duas partes")
            party_of[name] = str(party)
    return parse_expression(expr, party_of)


# ===================================
# Forma normal algébrica
# ===================================


def _monomial_key(variables: Sequence[str], monomial: Monomial):
    order = {name: k for k, name in enumerate(variables)}
    return (len(monomial), sorted(order[v] for v in monomial))


@dataclass(frozen=True)
class ANF:
    """Polinômio sobre GF(2): XOR de monômios (conjuntos de variáveis)"""

    variables: Tuple[str, ...]
    monomials: FrozenSet[Monomial] = field(default_factory=frozenset)

    def ordered(self) -> List[Monomial]:
        return sorted(self.monomials, key=lambda m: _monomial_key(self.variables, m))

    def evaluate(self, assignment: Mapping[str, int]) -> int:
        return eval_anf(self, assignment)

    def __str__(self) -> str:
        if not self.monomials:
            return "0"
        parts = []
        for monomial in self.ordered():
            names = sorted(monomial, key=self.variables.index)
            parts.append("*".join(names) if names else "1")
        return " ^ ".join(parts)


def to_anf(f: BooleanFunction) -> ANF:
    """
    Transformada de Möbius sobre GF(2)

    Args:
        f: Função booleana

    Returns:
        ANF que reproduz a tabela verdade de f
    """
    n = len(f.variables)
    coeffs = f.truth_table.astype(np.uint8).copy()
    for k in range(n):
        step = 1 << k
        view = coeffs.reshape(-1, 2, step)
        view[:, 1, :] ^= view[:, 0, :]

    monomials = set()
    for index in np.flatnonzero(coeffs):
        monomials.add(frozenset(f.variables[j] for j in range(n) if (index >> (n - 1 - j)) & 1))
    return ANF(f.variables, frozenset(monomials))


def eval_anf(p: ANF, assignment: Mapping[str, int]) -> int:
    """
    Avalia o polinômio: XOR dos ANDs de cada monômio

    Args:
        p: Polinômio
        assignment: Mapa variável -> bit cobrindo as variáveis de p

    Returns:
        Bit resultante
    """
    value = 0
    for monomial in p.monomials:
        term = 1
        for name in monomial:
            if name not in assignment:
                raise MissingVariableError(f"Variável {name} sem valor")
            term &= int(assignment[name]) & 1
        value ^= term
    return value


def _anf_of(variables: Sequence[str], monomials) -> ANF:
    result = set()
    for monomial in monomials:
        result ^= {monomial}
    return ANF(tuple(variables), frozenset(result))


def _split_by_party(f: BooleanFunction, monomial: Monomial) -> Dict[str, Monomial]:
    parts: Dict[str, set] = {}
    for name in monomial:
        parts.setdefault(f.owners[name], set()).add(name)
    return {party: frozenset(names) for party, names in parts.items()}


# ===================================
# Decomposição em produto interno (duas partes)
# ===================================


@dataclass(frozen=True, eq=False)
class Decomposition:
    """f = ⊕_i P_i(x) Q_i(y), P_i só sobre variáveis de Alice, Q_i só sobre as de Bob"""

    terms: Tuple[Tuple[ANF, ANF], ...]
    alice_vars: Tuple[str, ...]
    bob_vars: Tuple[str, ...]
    function: BooleanFunction

    @property
    def m(self) -> int:
        return len(self.terms)

    def assignment(self, x: Sequence[int], y: Sequence[int]) -> Dict[str, int]:
        return {**dict(zip(self.alice_vars, x)), **dict(zip(self.bob_vars, y))}

    def local_values(self, x: Sequence[int], y: Sequence[int]) -> List[Tuple[int, int]]:
        """(P_i(x), Q_i(y)) de cada termo"""
        xs = dict(zip(self.alice_vars, x))
        ys = dict(zip(self.bob_vars, y))
        return [(eval_anf(p, xs), eval_anf(q, ys)) for p, q in self.terms]

    def evaluate(self, x: Sequence[int], y: Sequence[int]) -> int:
        value = 0
        for p, q in self.local_values(x, y):
            value ^= p & q
        return value

    def expected(self, x: Sequence[int], y: Sequence[int]) -> int:
        """Valor de f na tabela verdade (oráculo)"""
        return self.function.evaluate(self.assignment(x, y))


def inner_product_decomposition(f: BooleanFunction) -> Decomposition:
    """
    Agrupa os monômios da ANF pela parte de Alice

    Cada parte distinta de Alice vira P_i; Q_i é o XOR das partes de Bob
    correspondentes. Os termos seguem a ordem de primeira ocorrência na ANF.

    Args:
        f: Função com exatamente duas partes (a primeira é Alice)

    Returns:
        Decomposition com reconstrução exata de f
    """
    if len(f.parties) != 2:
        raise PartyCountError(f"Decomposição de duas partes requer 2 partes, recebido {len(f.parties)}")
    alice, bob = f.parties
    alice_vars = f.party_variables(alice)
    bob_vars = f.party_variables(bob)
    anf = to_anf(f)

    groups: Dict[Monomial, List[Monomial]] = {}
    for monomial in anf.ordered():
        parts = _split_by_party(f, monomial)
        groups.setdefault(parts.get(alice, ONE), []).append(parts.get(bob, ONE))

    terms = tuple(
        (ANF(alice_vars, frozenset({a_part})), _anf_of(bob_vars, b_parts))
        for a_part, b_parts in groups.items()
    )
    logger.debug("Decomposição com m=%d termos", len(terms))
    return Decomposition(terms=terms, alice_vars=alice_vars, bob_vars=bob_vars, function=f)


# ===================================
# Forma de grau 2 (n partes)
# ===================================

PairKey = Tuple[int, int]


@dataclass(frozen=True, eq=False)
class Degree2Form:
    """
    f = ⊕_{j1>j2} ⊕_i λ_{j1,j2} P_i^{j1} P_i^{j2}

    Partes indexadas de 1 a n na ordem de declaração.
    """

    parties: Tuple[str, ...]
    party_vars: Mapping[int, Tuple[str, ...]]
    pair_terms: Mapping[PairKey, Tuple[Tuple[ANF, ANF], ...]]
    folded: Tuple[Tuple[int, Monomial, PairKey], ...]
    function: BooleanFunction

    @property
    def n(self) -> int:
        return len(self.parties)

    @property
    def lam(self) -> Dict[PairKey, int]:
        """λ_{j1,j2}: 1 se o par participa"""
        return {
            (j1, j2): int(bool(self.pair_terms.get((j1, j2))))
            for j1 in range(1, self.n + 1)
            for j2 in range(1, j1)
        }

    def assignment(self, inputs: Mapping[int, Sequence[int]]) -> Dict[str, int]:
        values: Dict[str, int] = {}
        for j, names in self.party_vars.items():
            values.update(zip(names, inputs.get(j, ())))
        return values

    def evaluate(self, inputs: Mapping[int, Sequence[int]]) -> int:
        values = self.assignment(inputs)
        result = 0
        for terms in self.pair_terms.values():
            for p_hi, p_lo in terms:
                result ^= eval_anf(p_hi, values) & eval_anf(p_lo, values)
        return result

    def expected(self, inputs: Mapping[int, Sequence[int]]) -> int:
        return self.function.evaluate(self.assignment(inputs))


def degree2_decomposition(f: BooleanFunction, parties: int) -> Degree2Form:
    """
    Distribui os monômios da ANF em baldes de pares (j1, j2), j1 > j2

    Monômios de uma única parte j (e a constante) vão para o balde existente de
    menor parceiro contendo j, ou para (j, menor índice ≠ j), com polinômio
    parceiro igual a 1.

    Args:
        f: Função com variáveis distribuídas entre n ≥ 3 partes
        parties: Número de partes esperado

    Returns:
        Degree2Form com reconstrução exata de f
    """
    if parties < 3 or len(f.parties) != parties:
        raise PartyCountError(f"Forma de grau 2 requer {max(parties, 3)} partes, recebido {len(f.parties)}")
    index_of = {name: j for j, name in enumerate(f.parties, start=1)}
    anf = to_anf(f)

    paired: Dict[PairKey, List[Tuple[Monomial, Monomial]]] = {}
    local: List[Tuple[int, Monomial]] = []
    for monomial in anf.ordered():
        parts = _split_by_party(f, monomial)
        if len(parts) > 2:
            raise Degree2ViolationError(monomial, sorted(parts, key=index_of.get))
        if len(parts) == 2:
            (pa, ma), (pb, mb) = sorted(parts.items(), key=lambda kv: -index_of[kv[0]])
            paired.setdefault((index_of[pa], index_of[pb]), []).append((ma, mb))
        else:
            owner = index_of[next(iter(parts))] if parts else 1
            local.append((owner, monomial))

    folded = []
    for owner, monomial in local:
        candidates = sorted(key for key in paired if owner in key)
        if candidates:
            key = min(candidates, key=lambda k: k[1] if k[0] == owner else k[0])
        else:
            partner = min(j for j in range(1, parties + 1) if j != owner)
            key = (max(owner, partner), min(owner, partner))
        hi_part, lo_part = (monomial, ONE) if key[0] == owner else (ONE, monomial)
        paired.setdefault(key, []).append((hi_part, lo_part))
        folded.append((owner, monomial, key))

    party_vars = {j: f.party_variables(name) for name, j in index_of.items()}
    pair_terms = {}
    for key in sorted(paired):
        j1, j2 = key
        groups: Dict[Monomial, List[Monomial]] = {}
        for hi_part, lo_part in paired[key]:
            groups.setdefault(hi_part, []).append(lo_part)
        pair_terms[key] = tuple(
            (ANF(party_vars[j1], frozenset({hi})), _anf_of(party_vars[j2], los))
            for hi, los in groups.items()
        )

    return Degree2Form(
        parties=tuple(f.parties),
        party_vars=party_vars,
        pair_terms=pair_terms,
        folded=tuple(folded),
        function=f,
    )


def max_party_span(f: BooleanFunction) -> int:
    """Maior número de partes tocadas por um monômio da ANF"""
    return max((len(_split_by_party(f, m)) for m in to_anf(f).monomials), default=0)


def degree2_pairs(n: int) -> List[PairKey]:
    """Todos os pares (j1, j2) com j1 > j2"""
    return [(j1, j2) for j2, j1 in combinations(range(1, n + 1), 2)]
