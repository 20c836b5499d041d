from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class MopLabelSet:
    """
    Rótulos do estágio II: para cada canal de treino, o índice da combinação
    com menor entropia cruzada e o valor atingido.
    """

    Rotulos: np.ndarray     # int32 [n_canais]
    Entropias: np.ndarray   # float64 [n_canais]

    def __len__(self) -> int:
        return int(self.Rotulos.shape[0])


@dataclass(frozen=True)
class ResultadoEpoca:
    """Uma linha do metricas.csv."""

    epoca: int
    estagio: int
    perda: float
    lr: float
    ser_validacao: float = float('nan')
    acuracia_validacao: float = float('nan')
