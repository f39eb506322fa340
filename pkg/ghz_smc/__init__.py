"""
ghz_smc - Computação multipartidária segura com estados GHZ

Simulador dos esquemas A, B, C e da extensão de n partes, com análise de
privacidade, ataques e detecção de trapaças.
"""

from .boolfn import BooleanFunction, inner_product_decomposition, load_function_file, parse_expression
from .config import Config
from .protocol import CheatConfig, Scheme, TesterPolicy, Variant, run_multiparty, run_scheme

__all__ = [
    "BooleanFunction",
    "CheatConfig",
    "Config",
    "Scheme",
    "TesterPolicy",
    "Variant",
    "inner_product_decomposition",
    "load_function_file",
    "parse_expression",
    "run_multiparty",
    "run_scheme",
]
