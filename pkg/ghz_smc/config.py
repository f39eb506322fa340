"""
Configurações centralizadas do simulador
"""

import logging
import os

from dotenv import load_dotenv

# Carrega variáveis de ambiente
load_dotenv()


class Config:
    """Classe de configuração centralizada"""

    # Diretório de saída dos relatórios
    OUTPUT_DIR = os.getenv("GHZ_SMC_OUTPUT_DIR", "results")

    # Semente padrão das sessões
    DEFAULT_SEED = int(os.getenv("GHZ_SMC_SEED", "7"))

    # Esquema C: repetições padrão e teto das campanhas de ataque
    DEFAULT_NREP = int(os.getenv("GHZ_SMC_NREP", "20"))
    ATTACK_NREP_CAP = int(os.getenv("GHZ_SMC_ATTACK_NREP_CAP", "200"))

    # N_rep padrão do esquema C na auditoria de privacidade (enumeração exata)
    AUDIT_NREP = int(os.getenv("GHZ_SMC_AUDIT_NREP", "2"))

    # Limite de ramos na enumeração exata
    ENUMERATION_LIMIT = int(os.getenv("GHZ_SMC_ENUMERATION_LIMIT", str(2**24)))

    # Limite de variáveis numa tabela verdade
    MAX_VARIABLES = int(os.getenv("GHZ_SMC_MAX_VARIABLES", "20"))

    LOG_LEVEL = os.getenv("GHZ_SMC_LOG_LEVEL", "WARNING")

    # Tolerâncias
    ATOL = 1e-12
    PROBABILITY_ATOL = 1e-9

    SCHEMA_VERSION = 1

    # Esquemas e variantes disponíveis
    AVAILABLE_SCHEMES = ["A", "B", "B1sided", "C", "Multiparty"]
    AVAILABLE_VARIANTS = ["QubitSwap", "Ensemble"]
    DEFAULT_VARIANT = "QubitSwap"

    @classmethod
    def validate(cls):
        """Valida se as configurações são consistentes"""
        if not cls.OUTPUT_DIR:
            raise ValueError("GHZ_SMC_OUTPUT_DIR não pode ser vazio")
        if cls.DEFAULT_NREP < 1:
            raise ValueError("GHZ_SMC_NREP deve ser pelo menos 1")
        if cls.ATTACK_NREP_CAP < 1:
            raise ValueError("GHZ_SMC_ATTACK_NREP_CAP deve ser pelo menos 1")
        if cls.AUDIT_NREP < 1:
            raise ValueError("GHZ_SMC_AUDIT_NREP deve ser pelo menos 1")
        if cls.ENUMERATION_LIMIT < 1:
            raise ValueError("GHZ_SMC_ENUMERATION_LIMIT deve ser pelo menos 1")
        if not 1 <= cls.MAX_VARIABLES <= 20:
            raise ValueError("GHZ_SMC_MAX_VARIABLES deve estar entre 1 e 20")
        if cls.DEFAULT_VARIANT not in cls.AVAILABLE_VARIANTS:
            raise ValueError(f"Variante padrão desconhecida: {cls.DEFAULT_VARIANT}")
        return True


_logging_configured = False


def setup_logging(level=None):
    """
    Configura o logging da aplicação (apenas uma vez)

    Args:
        level: Nível de log (opcional, usa Config.LOG_LEVEL)
    """
    global _logging_configured

    level = (level or Config.LOG_LEVEL).upper()
    if not _logging_configured:
        logging.basicConfig(
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
            level=level,
        )
        _logging_configured = True
    else:
        logging.getLogger().setLevel(level)
