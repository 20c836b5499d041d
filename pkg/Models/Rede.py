from dataclasses import dataclass, field

import numpy as np
import torch


@dataclass(eq=False)
class NetworkParams:
    """
    Manifesto da arquitetura + pesos treináveis de uma rede.

    Tipo:
      'transmissor'   parte da SLPD-NN que roda na estação base
      'decodificador' bloco de decodificação compartilhado pelos usuários
      'slpd'          as duas partes juntas (treino ponta a ponta)
      'mop'           MOP-NN
    """

    Tipo: str
    Manifesto: dict
    Modulo: torch.nn.Module
    Versao: str = "0.0.0"

    def Pesos(self) -> dict[str, np.ndarray]:
        """Pesos endereçáveis por nome de camada (inclui estatísticas do batch norm)."""
        return {
            nome: tensor.detach().cpu().numpy()
            for nome, tensor in self.Modulo.state_dict().items()
        }

    def PesosFinitos(self) -> bool:
        return all(
            bool(torch.isfinite(tensor).all())
            for tensor in self.Modulo.state_dict().values()
            if tensor.is_floating_point()
        )


@dataclass(frozen=True, eq=False)
class PrecodedSignal:
    """x_l ∈ C^{N_t} já normalizado: ‖x‖² = P."""

    X: np.ndarray    # complex128 [N_t]

    @property
    def Potencia(self) -> float:
        return float(np.vdot(self.X, self.X).real)


@dataclass(frozen=True, eq=False)
class DetectionOutput:
    """Distribuição p̃ sobre as 2^B mensagens e a mensagem decodificada (1-indexada)."""

    Probabilidades: np.ndarray   # float [2^B]
    Decodificada: int


@dataclass(frozen=True, eq=False)
class MopOutput:
    """p_MOP sobre a enumeração canônica e os k melhores índices."""

    Probabilidades: np.ndarray   # float [N_m]
    TopK: list[int] = field(default_factory=list)
