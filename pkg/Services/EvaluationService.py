"""
EvaluationService — SER Monte Carlo, Top-k e Constelações
=========================================================

Todos os sistemas expõem a mesma interface (SistemaAvaliacao):

    Ordens(H)                   → ordens [n, K]   (fixas ou previstas pela MOP-NN)
    Precodificar(H, s, ordens)  → x [n, N_t]
    Detectar(H, r, ordens, rng) → m̂ [n, K]

e são avaliados pelo mesmo laço:

    canal sorteado → mensagens → x → r = Hᴴx + n → m̂ → contagem de erros

SHARDS
──────
O total de slots é fatiado em shards de `tamanho_bloco`; o shard i usa a
semente SeedSequence([semente, i]). O resultado não depende de quantos
workers rodam os shards: a fusão é soma de contagens.

TENTATIVAS ADAPTATIVAS
──────────────────────
Roda min_tentativas; enquanto a soma de erros (todos os usuários) ficar abaixo
de min_erros, estende em blocos de min_tentativas até max_tentativas.

TOP-K (genie)
─────────────
Para cada canal de teste, mede a SER de cada uma das k combinações mais
prováveis da MOP-NN e fica com a menor. Cada par (canal, combinação) tem sua
própria semente: o conjunto top-(k+1) contém o top-k com as mesmas medições,
logo SER(top-3) ≤ SER(top-2) ≤ SER(top-1) exatamente.

O top-1 mede a mesma cadeia que o MonteCarloSer do sistema "ampd", mas com
outro esquema de sorteio: slots_por_canal fixos em todo canal de teste e
sementes por (canal, combinação), contra shards que sorteiam o canal a cada
slot. Os dois concordam dentro dos intervalos de confiança, não bit a bit.
"""

import math
from typing import Optional

import numpy as np
from joblib import Parallel, delayed
from scipy.stats import beta

from Models.Avaliacao import AmostraConstelacao, EvalReport, PontoSer
from Models.Canal import ChannelDataset, ChannelRealization
from Models.Modulacao import ModOrderCombo
from Models.Rede import NetworkParams
from Models.Treino import MopLabelSet
from Services.Excecoes import ArtefatoAusenteErro, ConfiguracaoInvalidaErro, DimensaoIncompativelErro
from Services.LogService import LogService
from Services.Logic.BaselineEngine import BaselineEngine
from Services.Logic.ChannelEngine import ChannelEngine
from Services.Logic.LinkConfig import EvalConfig, SystemConfig
from Services.Logic.ModulationEngine import ModulationEngine
from Services.Logic.MopNetwork import MopNetwork
from Services.Logic.SlpdNetwork import SlpdNetwork
from Services.Logic.TrainingEngine import TrainingEngine

CONFIANCA = 0.95
SISTEMAS = ('ampd', 'slpd-qpsk', 'zf', 'ci-slp')


# ─────────────────────────────────────────────────────────────────────────────
#  SISTEMAS
# ─────────────────────────────────────────────────────────────────────────────

class SistemaAvaliacao:
    """Precodificador + detector com ordem fixa para todos os usuários."""

    Nome = "base"

    def __init__(self, cfg: SystemConfig, ordem: int = 2):
        if not 1 <= ordem <= cfg.ordem_maxima:
            raise ConfiguracaoInvalidaErro(f"Ordem fixa M={ordem} fora de [1, B={cfg.ordem_maxima}].")
        self.cfg = cfg
        self.ordem = ordem

    def Ordens(self, matrizes: np.ndarray) -> np.ndarray:
        return np.full((matrizes.shape[0], matrizes.shape[-1]), self.ordem, dtype=np.int64)

    def Precodificar(self, matrizes, simbolos, ordens) -> np.ndarray:
        raise NotImplementedError

    def Detectar(self, matrizes, recebidos, ordens, rng: np.random.Generator) -> np.ndarray:
        return BaselineEngine.DetectarFasePskLote(recebidos, ordens)


class SistemaZF(SistemaAvaliacao):
    Nome = "zf"

    def Precodificar(self, matrizes, simbolos, ordens):
        return BaselineEngine.PrecodificarZFLote(matrizes, simbolos, self.cfg.potencia)


class SistemaCiSlp(SistemaAvaliacao):
    Nome = "ci-slp"

    def __init__(self, cfg: SystemConfig, ev: EvalConfig, ordem: int = 2):
        super().__init__(cfg, ordem)
        self.tol = ev.tol_solver
        self.max_iter = ev.max_iter_solver

    def Precodificar(self, matrizes, simbolos, ordens):
        return BaselineEngine.PrecodificarCiSlpLote(
            matrizes, simbolos, ordens, self.cfg.potencia, self.tol, self.max_iter
        )


class SistemaSlpd(SistemaAvaliacao):
    Nome = "slpd-qpsk"

    def __init__(self, slpd: NetworkParams, cfg: SystemConfig, ordem: int = 2):
        super().__init__(cfg, ordem)
        SlpdNetwork.ValidarCompatibilidade(slpd, cfg)
        self.slpd = slpd

    def Precodificar(self, matrizes, simbolos, ordens):
        return SlpdNetwork.PrecodificarLote(self.slpd, matrizes, simbolos, self.cfg.potencia)

    def Detectar(self, matrizes, recebidos, ordens, rng):
        return SlpdNetwork.DecodificarLote(self.slpd, matrizes, recebidos, ordens)[1]


class SistemaAmpd(SistemaSlpd):
    """Cadeia adaptativa: MOP-NN escolhe a combinação (top-1), SLPD-NN transmite e decodifica."""

    Nome = "ampd"

    def __init__(self, mop: NetworkParams, slpd: NetworkParams, cfg: SystemConfig):
        super().__init__(slpd, cfg)
        MopNetwork.ValidarCompatibilidade(mop, cfg)
        self.mop = mop
        self.combinacoes = ModulationEngine.MatrizOrdens(ModulationEngine.CombinacoesDoSistema(cfg))

    def Ordens(self, matrizes):
        probabilidades = MopNetwork.ProbabilidadesLote(self.mop, matrizes)
        return self.combinacoes[MopNetwork.TopK(probabilidades, 1)[:, 0]]


class SistemaChuteAleatorio(SistemaAvaliacao):
    """Mesmo precodificador de outro sistema, detector que chuta uniformemente (referência 1 − 2^−M)."""

    Nome = "aleatorio"

    def __init__(self, base: SistemaAvaliacao):
        super().__init__(base.cfg, base.ordem)
        self.base = base

    def Ordens(self, matrizes):
        return self.base.Ordens(matrizes)

    def Precodificar(self, matrizes, simbolos, ordens):
        return self.base.Precodificar(matrizes, simbolos, ordens)

    def Detectar(self, matrizes, recebidos, ordens, rng):
        return ModulationEngine.SortearMensagensLote(ordens, rng)


def _executar_shard(sistema: SistemaAvaliacao, matrizes: np.ndarray, tamanho: int, semente, variancia: float):
    """Um shard de slots: devolve (erros por usuário [K], slots)."""
    rng = np.random.default_rng(semente)
    escolhidas = matrizes[rng.integers(matrizes.shape[0], size=tamanho)]
    ordens = sistema.Ordens(escolhidas)
    mensagens = ModulationEngine.SortearMensagensLote(ordens, rng)
    simbolos = ModulationEngine.MapearPskLote(mensagens, ordens)
    x = sistema.Precodificar(escolhidas, simbolos, ordens)
    recebidos = ChannelEngine.AplicarCanalLote(escolhidas, x, variancia, rng)
    decodificadas = sistema.Detectar(escolhidas, recebidos, ordens, rng)
    return np.count_nonzero(decodificadas != mensagens, axis=0), tamanho


# ─────────────────────────────────────────────────────────────────────────────
#  SERVIÇO
# ─────────────────────────────────────────────────────────────────────────────

class EvaluationService:

    @staticmethod
    def CriarSistema(
        nome: str,
        cfg: SystemConfig,
        ev: EvalConfig,
        slpd: Optional[NetworkParams] = None,
        mop: Optional[NetworkParams] = None,
    ) -> SistemaAvaliacao:
        if nome not in SISTEMAS:
            raise ConfiguracaoInvalidaErro(f"Sistema desconhecido '{nome}' (opções: {', '.join(SISTEMAS)}).")
        if nome == 'zf':
            return SistemaZF(cfg)
        if nome == 'ci-slp':
            return SistemaCiSlp(cfg, ev)
        if slpd is None:
            raise ArtefatoAusenteErro(f"Sistema '{nome}' exige o checkpoint da SLPD-NN (estágio I ou II).")
        if nome == 'slpd-qpsk':
            return SistemaSlpd(slpd, cfg)
        if mop is None:
            raise ArtefatoAusenteErro("Sistema 'ampd' exige o checkpoint da MOP-NN (estágio III).")
        return SistemaAmpd(mop, slpd, cfg)

    @staticmethod
    def IntervaloConfianca(erros: int, tentativas: int, confianca: float = CONFIANCA) -> tuple[float, float]:
        """Clopper–Pearson bilateral."""
        if tentativas < 1:
            raise ConfiguracaoInvalidaErro("Intervalo de confiança exige ao menos uma tentativa.")
        alfa = 1.0 - confianca
        inferior = 0.0 if erros == 0 else float(beta.ppf(alfa / 2, erros, tentativas - erros + 1))
        superior = 1.0 if erros == tentativas else float(beta.ppf(1 - alfa / 2, erros + 1, tentativas - erros))
        return inferior, superior

    @classmethod
    def _pontos(cls, snr_db: float, erros: np.ndarray, tentativas: int) -> list[PontoSer]:
        """Um ponto por usuário e um para a média (tentativas = slots em todos)."""
        pontos = []
        for usuario, e in enumerate(erros):
            pontos.append(PontoSer(snr_db, usuario, int(e), tentativas, e / tentativas,
                                   *cls.IntervaloConfianca(int(e), tentativas)))
        total = int(erros.sum())
        simbolos = tentativas * erros.size
        pontos.append(PontoSer(snr_db, EvalReport.USUARIO_MEDIA, total, tentativas, total / simbolos,
                               *cls.IntervaloConfianca(total, simbolos)))
        return pontos

    @staticmethod
    def _matrizes(canais) -> np.ndarray:
        matrizes = canais.Matrizes if isinstance(canais, ChannelDataset) else np.asarray(canais)
        if matrizes.ndim != 3 or matrizes.shape[0] == 0:
            raise DimensaoIncompativelErro(f"Canais de avaliação devem ser [n ≥ 1, N_t, K] (recebido {matrizes.shape}).")
        return matrizes

    @staticmethod
    def _tamanhos_shards(slots: int, tamanho_bloco: int) -> list[int]:
        completos, resto = divmod(slots, tamanho_bloco)
        return [tamanho_bloco] * completos + ([resto] if resto else [])

    @staticmethod
    def SementeDerivada(semente: int, *chaves: int) -> int:
        return int(np.random.SeedSequence([int(semente), *map(int, chaves)]).generate_state(1)[0])

    # ─────────────────────────────────────────────────────────────────────────
    # MONTE CARLO
    # ─────────────────────────────────────────────────────────────────────────

    @classmethod
    def MonteCarloSer(
        cls,
        sistema: SistemaAvaliacao,
        canais,
        snr_db: float,
        ev: EvalConfig,
        semente: int,
        trabalhadores: int = 1,
        tentativas: Optional[int] = None,
    ) -> list[PontoSer]:
        """
        SER por usuário e média em um SNR. `tentativas` fixa o número de slots;
        sem ele vale a regra adaptativa do EvalConfig. snr_db = inf → sem ruído.
        """
        matrizes = cls._matrizes(canais)
        if matrizes.shape[-1] != sistema.cfg.num_usuarios or matrizes.shape[-2] != sistema.cfg.num_antenas:
            raise DimensaoIncompativelErro(
                f"Canais {matrizes.shape[1:]} incompatíveis com o sistema "
                f"({sistema.cfg.num_antenas}×{sistema.cfg.num_usuarios})."
            )
        if tentativas is not None and tentativas < 1:
            raise ConfiguracaoInvalidaErro(f"Número de tentativas deve ser ≥ 1 (recebido {tentativas}).")

        variancia = ChannelEngine.SnrParaVarianciaRuido(snr_db, sistema.cfg.potencia)
        adaptativo = tentativas is None
        alvo = ev.min_tentativas if adaptativo else tentativas
        teto = max(ev.max_tentativas, alvo) if adaptativo else tentativas

        erros = np.zeros(matrizes.shape[-1], dtype=np.int64)
        total = 0
        proximo_shard = 0
        paralelo = Parallel(n_jobs=max(1, trabalhadores))
        while True:
            tamanhos = cls._tamanhos_shards(alvo - total, ev.tamanho_bloco)
            resultados = paralelo(
                delayed(_executar_shard)(
                    sistema, matrizes, tamanho, np.random.SeedSequence([int(semente), proximo_shard + i]), variancia
                )
                for i, tamanho in enumerate(tamanhos)
            )
            proximo_shard += len(tamanhos)
            for erros_shard, slots in resultados:
                erros += erros_shard
                total += slots

            if not adaptativo or erros.sum() >= ev.min_erros or total >= teto:
                break
            alvo = min(total + ev.min_tentativas, teto)

        pontos = cls._pontos(float(snr_db), erros, total)
        LogService.Info(
            "EvaluationService",
            f"{sistema.Nome} | SNR {snr_db:g} dB | SER média {pontos[-1].ser:.3e} | "
            f"{int(erros.sum())} erros em {total} slots",
        )
        return pontos

    @classmethod
    def AvaliarSistema(
        cls,
        sistema: SistemaAvaliacao,
        canais,
        grade_snr_db,
        ev: EvalConfig,
        semente: int,
        trabalhadores: int = 1,
        tentativas: Optional[int] = None,
    ) -> EvalReport:
        """Curva de SER na grade; a semente de cada SNR depende só da posição na grade."""
        relatorio = EvalReport(Sistema=sistema.Nome)
        for indice, snr_db in enumerate(grade_snr_db):
            relatorio.Pontos.extend(cls.MonteCarloSer(
                sistema, canais, snr_db, ev, cls.SementeDerivada(semente, indice), trabalhadores, tentativas
            ))
        relatorio.Metadados.update({
            'semente': int(semente),
            'grade_snr_db': [float(s) for s in grade_snr_db],
            'num_canais': int(cls._matrizes(canais).shape[0]),
        })
        return relatorio

    # ─────────────────────────────────────────────────────────────────────────
    # TOP-K
    # ─────────────────────────────────────────────────────────────────────────

    @classmethod
    def _erros_por_combo(
        cls,
        slpd: NetworkParams,
        cfg: SystemConfig,
        matrizes: np.ndarray,
        indices_canais: np.ndarray,
        ordens_combo: np.ndarray,
        indice_combo: int,
        slots: int,
        variancia: float,
        semente: int,
        tamanho_bloco: int,
    ) -> np.ndarray:
        """Erros por usuário [len(indices_canais), K] da SLPD-NN com uma combinação fixa."""
        K = matrizes.shape[-1]
        erros = np.empty((indices_canais.size, K), dtype=np.int64)
        ordens = np.broadcast_to(ordens_combo, (slots, K))
        canais_por_bloco = max(1, tamanho_bloco // slots)
        escala = math.sqrt(variancia / 2.0)

        for inicio in range(0, indices_canais.size, canais_por_bloco):
            bloco = indices_canais[inicio:inicio + canais_por_bloco]
            mensagens, ruidos = [], []
            for c in bloco:
                rng = np.random.default_rng(np.random.SeedSequence([int(semente), int(c), int(indice_combo)]))
                mensagens.append(ModulationEngine.SortearMensagensLote(ordens, rng))
                ruidos.append(rng.standard_normal((slots, K)) + 1j * rng.standard_normal((slots, K)))
            mensagens = np.concatenate(mensagens)
            ordens_bloco = np.broadcast_to(ordens_combo, mensagens.shape)
            repetidas = np.repeat(matrizes[bloco], slots, axis=0)

            simbolos = ModulationEngine.MapearPskLote(mensagens, ordens_bloco)
            x = SlpdNetwork.PrecodificarLote(slpd, repetidas, simbolos, cfg.potencia)
            recebidos = ChannelEngine.AplicarCanalLote(repetidas, x, 0.0, None) + escala * np.concatenate(ruidos)
            _, decodificadas = SlpdNetwork.DecodificarLote(slpd, repetidas, recebidos, ordens_bloco)
            erradas = (decodificadas != mensagens).reshape(bloco.size, slots, K)
            erros[inicio:inicio + bloco.size] = erradas.sum(axis=1)
        return erros

    @classmethod
    def AvaliarTopK(
        cls,
        mop: NetworkParams,
        slpd: NetworkParams,
        canais,
        k: int,
        snr_db: float,
        cfg: SystemConfig,
        ev: EvalConfig,
        semente: int,
        rotulos: Optional[MopLabelSet] = None,
        slots_por_canal: Optional[int] = None,
    ) -> EvalReport:
        """
        SER genie top-k (mínimo entre as k combinações mais prováveis, canal a canal).
        Acuracia[j] traz a SER top-j para j = 1..k e, com rótulos, a acurácia top-j.
        A SER top-1 só coincide estatisticamente com MonteCarloSer(SistemaAmpd):
        cada canal recebe exatamente slots_por_canal slots, com sementes próprias.
        """
        MopNetwork.ValidarCompatibilidade(mop, cfg)
        SlpdNetwork.ValidarCompatibilidade(slpd, cfg)
        matrizes = cls._matrizes(canais)
        n, K = matrizes.shape[0], matrizes.shape[-1]
        combinacoes = ModulationEngine.MatrizOrdens(ModulationEngine.CombinacoesDoSistema(cfg))

        probabilidades = MopNetwork.ProbabilidadesLote(mop, matrizes)
        melhores = MopNetwork.TopK(probabilidades, k)     # [n, k]
        slots = slots_por_canal or max(1, math.ceil(ev.min_tentativas / n))
        variancia = ChannelEngine.SnrParaVarianciaRuido(snr_db, cfg.potencia)

        erros = np.zeros((n, k, K), dtype=np.int64)
        for indice_combo in np.unique(melhores):
            linhas, posicoes = np.nonzero(melhores == indice_combo)
            erros[linhas, posicoes] = cls._erros_por_combo(
                slpd, cfg, matrizes, linhas, combinacoes[indice_combo], int(indice_combo),
                slots, variancia, semente, ev.tamanho_bloco,
            )

        ser_canal = erros.sum(axis=-1) / (K * slots)     # [n, k]
        relatorio = EvalReport(Sistema=f"ampd-top{k}")
        for j in range(1, k + 1):
            escolha = np.argmin(ser_canal[:, :j], axis=1)
            relatorio.Acuracia[j] = {'ser': float(ser_canal[np.arange(n), escolha].mean())}
            if rotulos is not None:
                if len(rotulos) != n:
                    raise DimensaoIncompativelErro(f"{len(rotulos)} rótulos para {n} canais de avaliação.")
                relatorio.Acuracia[j]['acuracia_teste'] = TrainingEngine.AcuraciaTopK(
                    probabilidades, rotulos.Rotulos, j
                )

        escolha = np.argmin(ser_canal, axis=1)
        erros_usuario = erros[np.arange(n), escolha].sum(axis=0)
        relatorio.Pontos = cls._pontos(float(snr_db), erros_usuario, n * slots)
        relatorio.Metadados.update({
            'genie_topk': True,
            'k': int(k),
            'slots_por_canal': int(slots),
            'semente': int(semente),
        })
        LogService.Info(
            "EvaluationService",
            f"Top-{k} genie | SNR {snr_db:g} dB | "
            + " | ".join(f"top-{j} SER={v['ser']:.3e}" for j, v in relatorio.Acuracia.items()),
        )
        return relatorio

    @classmethod
    def AvaliarAmpd(
        cls,
        mop: NetworkParams,
        slpd: NetworkParams,
        canais,
        grade_snr_db,
        k: int,
        cfg: SystemConfig,
        ev: EvalConfig,
        semente: int,
        rotulos: Optional[MopLabelSet] = None,
        slots_por_canal: Optional[int] = None,
    ) -> EvalReport:
        """Curva top-k na grade + tabela de acurácia em ev.snr_topk_db."""
        relatorio = EvalReport(Sistema=f"ampd-top{k}")
        grade = [float(s) for s in grade_snr_db]
        for indice, snr_db in enumerate(grade):
            ponto = cls.AvaliarTopK(
                mop, slpd, canais, k, snr_db, cfg, ev, cls.SementeDerivada(semente, indice), rotulos, slots_por_canal
            )
            relatorio.Pontos.extend(ponto.Pontos)
            if snr_db == ev.snr_topk_db:
                relatorio.Acuracia = ponto.Acuracia
            relatorio.Metadados.update(ponto.Metadados)

        if not relatorio.Acuracia:
            tabela = cls.AvaliarTopK(
                mop, slpd, canais, k, ev.snr_topk_db, cfg, ev,
                cls.SementeDerivada(semente, len(grade)), rotulos, slots_por_canal,
            )
            relatorio.Acuracia = tabela.Acuracia
        relatorio.Metadados.update({
            'semente': int(semente),
            'grade_snr_db': grade,
            'snr_topk_db': float(ev.snr_topk_db),
        })
        return relatorio

    # ─────────────────────────────────────────────────────────────────────────
    # CONSTELAÇÃO
    # ─────────────────────────────────────────────────────────────────────────

    @staticmethod
    def ExportarConstelacao(
        sistema: SistemaAvaliacao,
        canal: ChannelRealization,
        combo: Optional[ModOrderCombo | tuple[int, ...]],
        num_simbolos: int,
        semente: int,
    ) -> list[AmostraConstelacao]:
        """h_kᴴx sem ruído para `num_simbolos` slots sorteados; combo None = o sistema escolhe."""
        if num_simbolos < 1:
            raise ConfiguracaoInvalidaErro(f"num_simbolos deve ser ≥ 1 (recebido {num_simbolos}).")
        K = canal.NumUsuarios
        matrizes = np.broadcast_to(canal.Matriz, (num_simbolos, *canal.Matriz.shape)).copy()
        if combo is None:
            ordens = sistema.Ordens(matrizes)
        else:
            ordens_combo = np.asarray(combo.Ordens if isinstance(combo, ModOrderCombo) else combo, dtype=np.int64)
            if ordens_combo.shape != (K,):
                raise DimensaoIncompativelErro(f"Combinação com {ordens_combo.size} ordens para K={K} usuários.")
            ordens = np.broadcast_to(ordens_combo, (num_simbolos, K))

        rng = np.random.default_rng(semente)
        mensagens = ModulationEngine.SortearMensagensLote(ordens, rng)
        simbolos = ModulationEngine.MapearPskLote(mensagens, ordens)
        x = sistema.Precodificar(matrizes, simbolos, ordens)
        recebidos = ChannelEngine.AplicarCanalLote(matrizes, x, 0.0, rng)

        return [
            AmostraConstelacao(
                usuario=k,
                real=float(recebidos[slot, k].real),
                imag=float(recebidos[slot, k].imag),
                mensagem=int(mensagens[slot, k]),
                ordem=int(ordens[slot, k]),
            )
            for k in range(K)
            for slot in range(num_simbolos)
        ]
