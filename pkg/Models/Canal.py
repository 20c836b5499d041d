from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """
    Uma realização de canal H = [h_1, ..., h_K] (N_t × K).
    Cada coluna é Ganhos[k] · steering(Angulos[k]): um único caminho por usuário.
    """

    Matriz: np.ndarray    # complex128 [N_t, K]
    Angulos: np.ndarray   # float64 [K], graus
    Ganhos: np.ndarray    # complex128 [K]

    @property
    def NumAntenas(self) -> int:
        return self.Matriz.shape[0]

    @property
    def NumUsuarios(self) -> int:
        return self.Matriz.shape[1]

    def Coluna(self, k: int) -> np.ndarray:
        return self.Matriz[:, k]


@dataclass(eq=False)
class ChannelDataset(Sequence):
    """
    Conjunto de realizações guardado em blocos (eficiente para treino em lote).
    Indexar com int devolve um ChannelRealization; com slice/array devolve outro dataset.
    """

    Matrizes: np.ndarray   # complex128 [n, N_t, K]
    Angulos: np.ndarray    # float64 [n, K]
    Ganhos: np.ndarray     # complex128 [n, K]
    Semente: int = 0
    # nome → (inicio, fim) em índices do próprio dataset
    Particoes: dict[str, tuple[int, int]] = field(default_factory=dict)

    def __len__(self) -> int:
        return self.Matrizes.shape[0]

    def __getitem__(self, indice):
        if isinstance(indice, (int, np.integer)):
            return ChannelRealization(
                Matriz=self.Matrizes[indice],
                Angulos=self.Angulos[indice],
                Ganhos=self.Ganhos[indice],
            )
        return ChannelDataset(
            Matrizes=self.Matrizes[indice],
            Angulos=self.Angulos[indice],
            Ganhos=self.Ganhos[indice],
            Semente=self.Semente,
        )

    def Particao(self, nome: str) -> "ChannelDataset":
        if nome not in self.Particoes:
            raise KeyError(f"Partição '{nome}' não existe (disponíveis: {sorted(self.Particoes)}).")
        inicio, fim = self.Particoes[nome]
        return self[slice(inicio, fim)]

    @classmethod
    def DeRealizacoes(cls, realizacoes: Sequence[ChannelRealization], semente: int = 0) -> "ChannelDataset":
        return cls(
            Matrizes=np.stack([r.Matriz for r in realizacoes]),
            Angulos=np.stack([r.Angulos for r in realizacoes]),
            Ganhos=np.stack([r.Ganhos for r in realizacoes]),
            Semente=semente,
        )
