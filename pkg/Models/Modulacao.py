from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ModOrderCombo:
    """
    Uma atribuição admissível (M_1, ..., M_K) e seu número de categoria
    na enumeração canônica (lexicográfica crescente).
    """

    Ordens: tuple[int, ...]
    Indice: int

    @property
    def TaxaTotal(self) -> int:
        return sum(self.Ordens)

    @property
    def TamanhosAlfabeto(self) -> tuple[int, ...]:
        return tuple(2 ** m for m in self.Ordens)

    def ParaLinhaCsv(self) -> list[int]:
        return [self.Indice, *self.Ordens]


@dataclass(frozen=True, eq=False)
class MessageBatch:
    """Mensagens m_k ∈ {1..2^{M_k}} de um slot, uma por usuário."""

    Mensagens: np.ndarray   # int64 [K]
    Combo: ModOrderCombo


@dataclass(frozen=True, eq=False)
class SymbolVector:
    """Símbolos PSK s_l (|s_k| = 1)."""

    Simbolos: np.ndarray    # complex128 [K]
