from itertools import product

import numpy as np

from Models.Modulacao import MessageBatch, ModOrderCombo, SymbolVector
from Services.Excecoes import ConfiguracaoInvalidaErro, ForaDoAlfabetoErro


def _gerador(semente) -> np.random.Generator:
    if isinstance(semente, np.random.Generator):
        return semente
    return np.random.default_rng(semente)


class ModulationEngine:
    """
    Mapeamento PSK, enumeração das combinações de ordens e rótulos one-hot.

    Convenções:
      s = exp(j2π·m / 2^M), m ∈ {1..2^M}, sem offset de fase
      mensagens 1-indexadas; vetores de rótulo armazenados 0-indexados
    """

    # Gravada nos manifestos da MOP-NN: checkpoints de outra ordenação são rejeitados
    REGRA_ENUMERACAO = "lexicografica-v1"

    # ─────────────────────────────────────────────────────────────────────────
    # PSK
    # ─────────────────────────────────────────────────────────────────────────

    @staticmethod
    def _validar_mensagem(m: int, ordem: int):
        if ordem < 1:
            raise ForaDoAlfabetoErro(f"Ordem de modulação deve ser ≥ 1 (recebido {ordem}).")
        if not 1 <= m <= 2 ** ordem:
            raise ForaDoAlfabetoErro(f"Mensagem {m} fora do alfabeto {{1..{2 ** ordem}}} (M={ordem}).")

    @classmethod
    def MapearPsk(cls, m: int, ordem: int) -> complex:
        cls._validar_mensagem(m, ordem)
        return complex(np.exp(1j * cls.FasePsk(m, ordem)))

    @staticmethod
    def FasePsk(m, ordem):
        """Fase nominal 2π·(m mod 2^M)/2^M em [0, 2π); m = 2^M cai exatamente em 0."""
        tamanho = np.power(2, np.asarray(ordem))
        return 2.0 * np.pi * np.mod(np.asarray(m), tamanho) / tamanho

    @classmethod
    def MapearPskLote(cls, mensagens: np.ndarray, ordens: np.ndarray) -> np.ndarray:
        """mensagens e ordens com o mesmo shape (ou broadcast) → símbolos complexos."""
        mensagens = np.asarray(mensagens)
        ordens = np.broadcast_to(np.asarray(ordens), mensagens.shape)
        if np.any(mensagens < 1) or np.any(mensagens > np.power(2, ordens)):
            raise ForaDoAlfabetoErro("Lote contém mensagens fora do alfabeto da ordem correspondente.")
        return np.exp(1j * cls.FasePsk(mensagens, ordens))

    @classmethod
    def VetorSimbolos(cls, lote: MessageBatch) -> SymbolVector:
        return SymbolVector(Simbolos=cls.MapearPskLote(lote.Mensagens, np.asarray(lote.Combo.Ordens)))

    # ─────────────────────────────────────────────────────────────────────────
    # COMBINAÇÕES DE ORDENS
    # ─────────────────────────────────────────────────────────────────────────

    @staticmethod
    def EnumerarCombinacoes(num_usuarios: int, ordem_maxima: int, taxa_minima: int) -> list[ModOrderCombo]:
        """
        Todas as tuplas de {1..B}^K com soma ≥ R, em ordem lexicográfica crescente,
        numeradas 0..N_m−1. Lista vazia quando K·B < R.
        """
        if num_usuarios < 1 or ordem_maxima < 1 or taxa_minima < 0:
            raise ConfiguracaoInvalidaErro(
                f"Parâmetros inválidos: K={num_usuarios}, B={ordem_maxima}, R={taxa_minima}."
            )
        # product() já percorre em ordem lexicográfica
        admissiveis = (
            ordens for ordens in product(range(1, ordem_maxima + 1), repeat=num_usuarios)
            if sum(ordens) >= taxa_minima
        )
        return [ModOrderCombo(Ordens=ordens, Indice=indice) for indice, ordens in enumerate(admissiveis)]

    @classmethod
    def CombinacoesDoSistema(cls, cfg) -> list[ModOrderCombo]:
        return cls.EnumerarCombinacoes(cfg.num_usuarios, cfg.ordem_maxima, cfg.taxa_minima)

    @staticmethod
    def MatrizOrdens(combos: list[ModOrderCombo]) -> np.ndarray:
        """[N_m, K] com as ordens de cada categoria."""
        return np.asarray([c.Ordens for c in combos], dtype=np.int64)

    # ─────────────────────────────────────────────────────────────────────────
    # RÓTULOS
    # ─────────────────────────────────────────────────────────────────────────

    @classmethod
    def OneHot(cls, m: int, ordem: int) -> np.ndarray:
        cls._validar_mensagem(m, ordem)
        vetor = np.zeros(2 ** ordem, dtype=np.int8)
        vetor[m - 1] = 1
        return vetor

    @classmethod
    def OneHotEstendido(cls, m: int, ordem: int, ordem_maxima: int) -> np.ndarray:
        """one_hot(m, M) seguido de 2^B − 2^M zeros."""
        if ordem > ordem_maxima:
            raise ForaDoAlfabetoErro(f"Ordem M={ordem} maior que a máxima B={ordem_maxima}.")
        vetor = np.zeros(2 ** ordem_maxima, dtype=np.int8)
        vetor[: 2 ** ordem] = cls.OneHot(m, ordem)
        return vetor

    @staticmethod
    def RotulosEstendidosLote(mensagens: np.ndarray, ordem_maxima: int) -> np.ndarray:
        """mensagens [...] (1-indexadas) → one-hot estendido [..., 2^B]."""
        return np.eye(2 ** ordem_maxima, dtype=np.float64)[np.asarray(mensagens) - 1]

    # ─────────────────────────────────────────────────────────────────────────
    # FONTE DE MENSAGENS
    # ─────────────────────────────────────────────────────────────────────────

    @staticmethod
    def SortearMensagensLote(ordens: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Mensagens i.i.d. uniformes em {1..2^{M}} para cada entrada de `ordens`."""
        ordens = np.asarray(ordens)
        return rng.integers(1, np.power(2, ordens) + 1, size=ordens.shape)

    @classmethod
    def AmostrarMensagens(cls, combo: ModOrderCombo, quantidade: int, semente) -> list[MessageBatch]:
        rng = _gerador(semente)
        ordens = np.broadcast_to(np.asarray(combo.Ordens), (quantidade, len(combo.Ordens)))
        mensagens = cls.SortearMensagensLote(ordens, rng)
        return [MessageBatch(Mensagens=linha, Combo=combo) for linha in mensagens]
