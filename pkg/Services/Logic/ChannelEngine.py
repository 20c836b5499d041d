import numpy as np

from Models.Canal import ChannelDataset, ChannelRealization
from Services.Excecoes import ConfiguracaoInvalidaErro, DimensaoIncompativelErro
from Services.LogService import LogService
from Services.Logic.LinkConfig import SystemConfig
from Utils.Geometria import GrausParaRadianos


def _gerador(semente) -> np.random.Generator:
    if isinstance(semente, np.random.Generator):
        return semente
    return np.random.default_rng(semente)


class ChannelEngine:
    """
    Engine do canal MU-MISO com espalhamento limitado (um caminho por usuário)
    e do downlink ruidoso r_k = h_kᴴ x + n_k.

    Funções puras após a semente: cada chamada paralela deve receber o seu
    próprio gerador (ver EvaluationService, que deriva sementes por shard).
    """

    @staticmethod
    def VetorDirecional(angulo_graus: float, num_antenas: int) -> np.ndarray:
        """
        Resposta do arranjo linear uniforme de meio comprimento de onda:
        elemento n (0-indexado) = exp(jπ n sin θ).
        """
        if num_antenas < 1:
            raise DimensaoIncompativelErro(f"num_antenas deve ser ≥ 1 (recebido {num_antenas}).")
        n = np.arange(num_antenas)
        return np.exp(1j * np.pi * n * np.sin(GrausParaRadianos(angulo_graus)))

    @staticmethod
    def _matriz_direcional(angulos_graus: np.ndarray, num_antenas: int) -> np.ndarray:
        """angulos [..., K] → steering [..., N_t, K]"""
        senos = np.sin(GrausParaRadianos(angulos_graus))
        n = np.arange(num_antenas).reshape(-1, 1)
        return np.exp(1j * np.pi * n * senos[..., np.newaxis, :])

    @classmethod
    def GerarCanais(
        cls,
        cfg: SystemConfig,
        quantidade: int,
        semente: int,
        modo_fixo: bool = False,
    ) -> ChannelDataset:
        """
        Sorteia `quantidade` realizações:
          θ_k ~ U[φ_k − espalhamento, φ_k + espalhamento]
          α_k ~ CN(0, 1)
          h_k = α_k · steering(θ_k)

        modo_fixo=True força θ_k = φ_k e α_k = 1 (canal determinístico para testes).
        """
        if quantidade <= 0:
            raise ConfiguracaoInvalidaErro(f"Quantidade de canais deve ser ≥ 1 (recebido {quantidade}).")

        K, N_t = cfg.num_usuarios, cfg.num_antenas
        centros = np.asarray(cfg.angulos_centrais, dtype=np.float64)
        rng = _gerador(semente)

        if modo_fixo:
            angulos = np.broadcast_to(centros, (quantidade, K)).copy()
            ganhos = np.ones((quantidade, K), dtype=np.complex128)
        else:
            espalhamento = cfg.espalhamento_angular
            angulos = rng.uniform(centros - espalhamento, centros + espalhamento, size=(quantidade, K))
            ganhos = (rng.standard_normal((quantidade, K)) + 1j * rng.standard_normal((quantidade, K))) / np.sqrt(2.0)
            if cfg.normalizar_ganho:
                # Só a fase do ganho sobrevive: ‖h_k‖² = N_t
                ganhos = ganhos / np.abs(ganhos)

        matrizes = ganhos[:, np.newaxis, :] * cls._matriz_direcional(angulos, N_t)

        if not np.isfinite(matrizes).all():
            raise ConfiguracaoInvalidaErro("Geração de canais produziu valores não finitos.")

        LogService.Debug(
            "ChannelEngine",
            f"{quantidade} canais gerados (N_t={N_t}, K={K}, semente={semente}, fixo={modo_fixo})",
        )
        return ChannelDataset(
            Matrizes=matrizes,
            Angulos=angulos,
            Ganhos=ganhos,
            Semente=int(semente) if isinstance(semente, (int, np.integer)) else 0,
        )

    @staticmethod
    def AplicarCanal(canal: ChannelRealization, x: np.ndarray, variancia_ruido: float, semente) -> np.ndarray:
        """
        r_k = h_kᴴ x + n_k,   n_k ~ CN(0, σ²) com σ²/2 por dimensão real.
        σ² = 0 devolve o sinal recebido sem ruído (usado nas constelações).
        """
        x = np.asarray(x, dtype=np.complex128)
        if x.ndim != 1 or x.shape[0] != canal.NumAntenas:
            raise DimensaoIncompativelErro(
                f"x deve ter {canal.NumAntenas} elementos (recebido shape {x.shape})."
            )
        if variancia_ruido < 0:
            raise DimensaoIncompativelErro(f"Variância de ruído negativa: {variancia_ruido}.")

        recebido = canal.Matriz.conj().T @ x
        if variancia_ruido == 0:
            return recebido

        rng = _gerador(semente)
        K = canal.NumUsuarios
        ruido = np.sqrt(variancia_ruido / 2.0) * (rng.standard_normal(K) + 1j * rng.standard_normal(K))
        return recebido + ruido

    @staticmethod
    def AplicarCanalLote(matrizes: np.ndarray, x: np.ndarray, variancia_ruido, rng: np.random.Generator) -> np.ndarray:
        """
        Versão em lote: matrizes [n, N_t, K], x [n, N_t], σ² escalar ou [n] → r [n, K].
        """
        if matrizes.shape[:2] != x.shape:
            raise DimensaoIncompativelErro(f"Lote incompatível: H {matrizes.shape}, x {x.shape}.")
        recebido = np.einsum('nik,ni->nk', matrizes.conj(), x)
        variancia = np.broadcast_to(np.asarray(variancia_ruido, dtype=np.float64), (x.shape[0],))
        if not np.any(variancia > 0):
            return recebido
        forma = recebido.shape
        ruido = rng.standard_normal(forma) + 1j * rng.standard_normal(forma)
        return recebido + np.sqrt(variancia / 2.0)[:, np.newaxis] * ruido

    @staticmethod
    def SnrParaVarianciaRuido(snr_db, potencia: float):
        """σ² = P / 10^(Γ/10), com Γ = 10 log10(P/σ²)."""
        if potencia <= 0:
            raise ConfiguracaoInvalidaErro(f"Orçamento de potência deve ser > 0 (P={potencia}).")
        variancia = potencia / np.power(10.0, np.asarray(snr_db, dtype=np.float64) / 10.0)
        return float(variancia) if np.ndim(variancia) == 0 else variancia
