"""
TrainingEngine — Estratégia de Treino em Três Estágios
======================================================

O QUE É ISSO?
─────────────
Treina a SLPD-NN e a MOP-NN sobre um dataset de canais já gerado.

CICLO DE VIDA
─────────────
  ESTÁGIO I   → TreinarEstagio1()
                SLPD-NN ponta a ponta com ordem fixa (QPSK) para todos os usuários.
                Cada época visita cada canal `sorteios_por_canal` vezes com novos
                (mensagem, SNR, ruído).

  ESTÁGIO II  → TreinarEstagio2()
                Parte dos pesos do estágio I. Para cada (canal, sorteio) uma
                combinação de ordens é sorteada uniformemente entre as admissíveis.
                No fim, GerarRotulosMop() avalia as N_m combinações em cada canal
                (E sorteios cada) e a de menor entropia cruzada vira o rótulo.

  ESTÁGIO III → TreinarEstagio3()
                MOP-NN supervisionada com os rótulos do estágio II.

CHECKPOINTS
───────────
  Os estágios não escrevem em disco: recebem `salvar(nome, params)` e
  `registrar(ResultadoEpoca)` de quem orquestra (Routes/Treinamento.py).
    estagio{n}_epoca{e}  a cada fronteira de período do lr
    estagio{n}_melhor    sempre que a métrica de validação melhora
    estagio{n}_final     ao fim do estágio
"""

import copy
from typing import Callable, Optional

import numpy as np
import torch
from sklearn.metrics import accuracy_score, top_k_accuracy_score

from Models.Canal import ChannelDataset
from Models.Rede import NetworkParams
from Models.Treino import MopLabelSet, ResultadoEpoca
from Services.Excecoes import (
    ArtefatoAusenteErro,
    ConfiguracaoInvalidaErro,
    DimensaoIncompativelErro,
    TreinamentoDivergiuErro,
)
from Services.LogService import LogService
from Services.Logic.ChannelEngine import ChannelEngine
from Services.Logic.LinkConfig import SystemConfig, TrainConfig, validar_treino
from Services.Logic.ModulationEngine import ModulationEngine
from Services.Logic.MopNetwork import MopNetwork
from Services.Logic.SlpdNetwork import SlpdNetwork

PISO_LOG = 1e-12

Salvar = Callable[[str, NetworkParams], None]
Registrar = Callable[[ResultadoEpoca], None]


def _nada(*_):
    pass


class TrainingEngine:

    # ─────────────────────────────────────────────────────────────────────────
    # PERDAS E AGENDA
    # ─────────────────────────────────────────────────────────────────────────

    @staticmethod
    def _entropia(rotulos: torch.Tensor, probabilidades: torch.Tensor) -> torch.Tensor:
        if rotulos.shape != probabilidades.shape:
            raise DimensaoIncompativelErro(
                f"Rótulos {tuple(rotulos.shape)} e probabilidades {tuple(probabilidades.shape)} diferem."
            )
        return -(rotulos * torch.log(torch.clamp(probabilidades, min=PISO_LOG))).sum(dim=-1)

    @classmethod
    def EntropiaPorAmostra(cls, rotulos: torch.Tensor, probabilidades: torch.Tensor) -> torch.Tensor:
        """[n, K, 2^B] → [n]: entropia cruzada média sobre os K usuários de cada amostra."""
        entropias = cls._entropia(rotulos, probabilidades)
        return entropias.mean(dim=-1) if entropias.dim() > 1 else entropias

    @classmethod
    def PerdaSlpd(cls, rotulos: torch.Tensor, probabilidades: torch.Tensor) -> torch.Tensor:
        return cls.EntropiaPorAmostra(rotulos, probabilidades).mean()

    @classmethod
    def PerdaMop(cls, rotulos: torch.Tensor, probabilidades: torch.Tensor) -> torch.Tensor:
        """rotulos one-hot [n, N_m]."""
        return cls._entropia(rotulos, probabilidades).mean()

    @staticmethod
    def TaxaAprendizado(epoca: int, tc: TrainConfig) -> float:
        if epoca < 0:
            raise ConfiguracaoInvalidaErro(f"Época negativa: {epoca}.")
        return tc.lr_inicial * tc.fator_decaimento ** (epoca // tc.periodo_decaimento)

    # ─────────────────────────────────────────────────────────────────────────
    # INFRAESTRUTURA
    # ─────────────────────────────────────────────────────────────────────────

    @staticmethod
    def ConfigurarDeterminismo(deterministico: bool):
        """Uma thread e kernels determinísticos: mesma semente → pesos idênticos bit a bit."""
        if deterministico:
            torch.use_deterministic_algorithms(True)
            torch.set_num_threads(1)

    @staticmethod
    def SortearVariancias(cfg: SystemConfig, quantidade: int, rng: np.random.Generator, snr_db=None) -> np.ndarray:
        """σ² por amostra: fixo no cenário, fixo por SNR dado, ou SNR ~ U[faixa]."""
        if cfg.variancia_ruido is not None:
            return np.full(quantidade, cfg.variancia_ruido)
        if snr_db is None:
            snr_db = rng.uniform(*cfg.faixa_snr_db, size=quantidade)
        return np.broadcast_to(ChannelEngine.SnrParaVarianciaRuido(snr_db, cfg.potencia), (quantidade,)).copy()

    @staticmethod
    def _particao(dataset: ChannelDataset, nome: str, obrigatoria: bool = False) -> Optional[ChannelDataset]:
        if nome in dataset.Particoes:
            particao = dataset.Particao(nome)
            return particao if len(particao) else None
        if nome == 'treino' and not dataset.Particoes:
            return dataset
        if obrigatoria:
            raise ArtefatoAusenteErro(f"Dataset sem a partição '{nome}'.")
        return None

    @staticmethod
    def _otimizador(params: NetworkParams, tc: TrainConfig) -> torch.optim.Adam:
        return torch.optim.Adam(
            params.Modulo.parameters(),
            lr=tc.lr_inicial,
            betas=(tc.beta1, tc.beta2),
            eps=tc.eps_adam,
        )

    @staticmethod
    def _verificar_perda(perda: torch.Tensor, estagio: int, epoca: int, lote: int):
        if not bool(torch.isfinite(perda)):
            LogService.Warning(
                "TrainingEngine",
                f"Perda não finita no estágio {estagio}, época {epoca}, lote {lote}: abortando.",
            )
            raise TreinamentoDivergiuErro(estagio, epoca, lote, float(perda))

    @staticmethod
    def _tensor_parametros(params: NetworkParams):
        referencia = next(params.Modulo.parameters())
        return referencia.dtype, referencia.device

    # ─────────────────────────────────────────────────────────────────────────
    # SLPD-NN (ESTÁGIOS I E II)
    # ─────────────────────────────────────────────────────────────────────────

    @classmethod
    def SerValidacao(
        cls,
        params: NetworkParams,
        cfg: SystemConfig,
        canais: ChannelDataset,
        sortear_ordens: Callable[[int, np.random.Generator], np.ndarray],
        sorteios: int,
        semente: int,
        tamanho_bloco: int = 1000,
    ) -> float:
        """SER média da SLPD-NN em modo de inferência (mesmos sorteios em todas as épocas)."""
        rng = np.random.default_rng(semente)
        erros = tentativas = 0
        indices = np.tile(np.arange(len(canais)), sorteios)
        for inicio in range(0, indices.size, tamanho_bloco):
            matrizes = canais.Matrizes[indices[inicio:inicio + tamanho_bloco]]
            n = matrizes.shape[0]
            ordens = sortear_ordens(n, rng)
            mensagens = ModulationEngine.SortearMensagensLote(ordens, rng)
            simbolos = ModulationEngine.MapearPskLote(mensagens, ordens)
            x = SlpdNetwork.PrecodificarLote(params, matrizes, simbolos, cfg.potencia)
            recebidos = ChannelEngine.AplicarCanalLote(matrizes, x, cls.SortearVariancias(cfg, n, rng), rng)
            _, decodificadas = SlpdNetwork.DecodificarLote(params, matrizes, recebidos, ordens)
            erros += int(np.count_nonzero(decodificadas != mensagens))
            tentativas += mensagens.size
        return erros / tentativas

    @classmethod
    def _treinar_slpd(
        cls,
        params: NetworkParams,
        cfg: SystemConfig,
        tc: TrainConfig,
        dataset: ChannelDataset,
        estagio: int,
        epocas: int,
        sortear_ordens: Callable[[int, np.random.Generator], np.ndarray],
        semente: int,
        salvar: Salvar,
        registrar: Registrar,
    ) -> NetworkParams:
        treino = cls._particao(dataset, 'treino', obrigatoria=True)
        validacao = cls._particao(dataset, 'validacao')
        if treino is None:
            raise ArtefatoAusenteErro("Partição de treino vazia.")

        dtype, dispositivo = cls._tensor_parametros(params)
        otimizador = cls._otimizador(params, tc)
        rng = np.random.default_rng(semente)
        semente_validacao = int(np.random.SeedSequence(semente).generate_state(1)[0])
        melhor = np.inf

        LogService.Info(
            "TrainingEngine",
            f"Estágio {estagio}: {epocas} épocas, {len(treino)} canais × {tc.sorteios_por_canal} sorteios, "
            f"lote {tc.tamanho_lote}",
        )

        for epoca in range(epocas):
            lr = cls.TaxaAprendizado(epoca, tc)
            for grupo in otimizador.param_groups:
                grupo['lr'] = lr

            params.Modulo.train()
            indices = rng.permutation(np.tile(np.arange(len(treino)), tc.sorteios_por_canal))
            soma_perdas = 0.0
            num_lotes = 0
            for numero_lote, inicio in enumerate(range(0, indices.size, tc.tamanho_lote)):
                matrizes = treino.Matrizes[indices[inicio:inicio + tc.tamanho_lote]]
                n = matrizes.shape[0]
                ordens = sortear_ordens(n, rng)
                mensagens = ModulationEngine.SortearMensagensLote(ordens, rng)
                lote = SlpdNetwork.MontarLote(
                    matrizes, mensagens, ordens, cls.SortearVariancias(cfg, n, rng), rng, cfg,
                    dtype=dtype, dispositivo=dispositivo,
                )

                otimizador.zero_grad()
                perda = cls.PerdaSlpd(lote.rotulos, params.Modulo(lote))
                cls._verificar_perda(perda, estagio, epoca, numero_lote)
                perda.backward()
                otimizador.step()

                soma_perdas += float(perda.detach())
                num_lotes += 1

            ser_validacao = float('nan')
            if validacao is not None:
                ser_validacao = cls.SerValidacao(
                    params, cfg, validacao, sortear_ordens, tc.sorteios_validacao, semente_validacao, tc.tamanho_lote
                )

            resultado = ResultadoEpoca(
                epoca=epoca + 1, estagio=estagio, perda=soma_perdas / num_lotes, lr=lr, ser_validacao=ser_validacao
            )
            registrar(resultado)
            LogService.Info(
                "TrainingEngine",
                f"Estágio {estagio} | época {epoca + 1}/{epocas} | perda={resultado.perda:.5f} | "
                f"lr={lr:.1e} | SER val={ser_validacao:.4e}",
            )

            if (epoca + 1) % tc.periodo_decaimento == 0:
                salvar(f"estagio{estagio}_epoca{epoca + 1:03d}", params)
            if validacao is not None and ser_validacao < melhor:
                melhor = ser_validacao
                salvar(f"estagio{estagio}_melhor", params)

        salvar(f"estagio{estagio}_final", params)
        return params

    @classmethod
    def TreinarEstagio1(
        cls,
        cfg: SystemConfig,
        tc: TrainConfig,
        dataset: ChannelDataset,
        semente: int,
        salvar: Salvar = _nada,
        registrar: Registrar = _nada,
        params: Optional[NetworkParams] = None,
    ) -> NetworkParams:
        """Pré-treino com ordem fixa `ordem_estagio1` (QPSK) em todos os usuários."""
        if len(dataset) == 0:
            raise ArtefatoAusenteErro("Dataset vazio: nada a treinar.")
        validar_treino(tc, cfg, len(dataset))
        if params is None:
            params = SlpdNetwork.ConstruirSlpd(cfg, semente)
        K = cfg.num_usuarios

        def sortear_ordens(n, _rng):
            return np.full((n, K), tc.ordem_estagio1, dtype=np.int64)

        return cls._treinar_slpd(
            params, cfg, tc, dataset, 1, tc.epocas_estagio1, sortear_ordens, semente, salvar, registrar
        )

    @classmethod
    def TreinarEstagio2(
        cls,
        cfg: SystemConfig,
        tc: TrainConfig,
        dataset: ChannelDataset,
        inicial: NetworkParams,
        semente: int,
        salvar: Salvar = _nada,
        registrar: Registrar = _nada,
    ) -> tuple[NetworkParams, MopLabelSet]:
        """
        Transferência: parte dos pesos do estágio I (cópia; `inicial` não é alterado),
        treina com combinações sorteadas e gera os rótulos da MOP-NN para todo o dataset.
        """
        if inicial.Tipo != 'slpd':
            raise ArtefatoAusenteErro(f"Estágio II exige a SLPD-NN do estágio I (recebido '{inicial.Tipo}').")
        SlpdNetwork.ValidarCompatibilidade(inicial, cfg)
        validar_treino(tc, cfg, len(dataset))

        combinacoes = ModulationEngine.MatrizOrdens(ModulationEngine.CombinacoesDoSistema(cfg))
        if combinacoes.size == 0:
            raise ConfiguracaoInvalidaErro("Nenhuma combinação admissível para o estágio II.")

        def sortear_ordens(n, rng):
            return combinacoes[rng.integers(combinacoes.shape[0], size=n)]

        params = copy.deepcopy(inicial)
        params = cls._treinar_slpd(
            params, cfg, tc, dataset, 2, tc.epocas_estagio2, sortear_ordens, semente, salvar, registrar
        )
        rotulos = cls.GerarRotulosMop(params, cfg, tc, dataset, semente)
        return params, rotulos

    # ─────────────────────────────────────────────────────────────────────────
    # RÓTULOS DA MOP-NN
    # ─────────────────────────────────────────────────────────────────────────

    @staticmethod
    def EscolherRotulos(entropias: np.ndarray) -> MopLabelSet:
        """[n_canais, N_m] → argmin por canal (empates → menor índice)."""
        entropias = np.asarray(entropias, dtype=np.float64)
        if entropias.ndim != 2 or entropias.shape[1] == 0:
            raise DimensaoIncompativelErro(f"Matriz de entropias inválida: shape {entropias.shape}.")
        rotulos = np.argmin(entropias, axis=1)
        return MopLabelSet(
            Rotulos=rotulos.astype(np.int32),
            Entropias=entropias[np.arange(entropias.shape[0]), rotulos],
        )

    @classmethod
    def MatrizEntropias(
        cls,
        params: NetworkParams,
        cfg: SystemConfig,
        tc: TrainConfig,
        canais: ChannelDataset,
        semente: int,
    ) -> np.ndarray:
        """
        [n_canais, N_m]: entropia cruzada média de E sorteios por (canal, combinação).
        Cada combinação tem sua própria semente derivada: o resultado não depende
        da ordem em que as combinações são avaliadas.
        """
        combos = ModulationEngine.CombinacoesDoSistema(cfg)
        E = tc.sorteios_rotulo
        dtype, dispositivo = cls._tensor_parametros(params)
        canais_por_bloco = max(1, tc.tamanho_lote // E)
        entropias = np.empty((len(canais), len(combos)))

        params.Modulo.eval()
        with torch.no_grad():
            for combo in combos:
                rng = np.random.default_rng(np.random.SeedSequence([semente, combo.Indice]))
                ordens_combo = np.asarray(combo.Ordens)
                for inicio in range(0, len(canais), canais_por_bloco):
                    fim = min(inicio + canais_por_bloco, len(canais))
                    matrizes = np.repeat(canais.Matrizes[inicio:fim], E, axis=0)
                    n = matrizes.shape[0]
                    ordens = np.broadcast_to(ordens_combo, (n, ordens_combo.size))
                    mensagens = ModulationEngine.SortearMensagensLote(ordens, rng)
                    lote = SlpdNetwork.MontarLote(
                        matrizes, mensagens, ordens,
                        cls.SortearVariancias(cfg, n, rng, tc.snr_rotulo_db), rng, cfg,
                        dtype=dtype, dispositivo=dispositivo,
                    )
                    por_amostra = cls.EntropiaPorAmostra(lote.rotulos, params.Modulo(lote)).double().cpu().numpy()
                    entropias[inicio:fim, combo.Indice] = por_amostra.reshape(fim - inicio, E).mean(axis=1)
        return entropias

    @classmethod
    def GerarRotulosMop(
        cls,
        params: NetworkParams,
        cfg: SystemConfig,
        tc: TrainConfig,
        dataset: ChannelDataset,
        semente: int,
    ) -> MopLabelSet:
        """Rótulos para todos os canais do dataset, alinhados por índice."""
        LogService.Info(
            "TrainingEngine",
            f"Gerando rótulos da MOP-NN: {len(dataset)} canais × "
            f"{len(ModulationEngine.CombinacoesDoSistema(cfg))} combinações × {tc.sorteios_rotulo} sorteios",
        )
        rotulos = cls.EscolherRotulos(cls.MatrizEntropias(params, cfg, tc, dataset, semente))
        frequencias = np.bincount(rotulos.Rotulos)
        LogService.Info(
            "TrainingEngine",
            f"Rótulos gerados: {np.count_nonzero(frequencias)} combinações distintas, "
            f"mais frequente = {int(np.argmax(frequencias))} ({frequencias.max() / len(rotulos):.1%})",
        )
        return rotulos

    # ─────────────────────────────────────────────────────────────────────────
    # MOP-NN (ESTÁGIO III)
    # ─────────────────────────────────────────────────────────────────────────

    @staticmethod
    def AcuraciaTopK(probabilidades: np.ndarray, rotulos: np.ndarray, k: int) -> float:
        """Fração de canais cujo rótulo está entre as k maiores probabilidades."""
        probabilidades = np.asarray(probabilidades)
        rotulos = np.asarray(rotulos)
        num_combinacoes = probabilidades.shape[1]
        if k < 1:
            raise ConfiguracaoInvalidaErro(f"k deve ser ≥ 1 (recebido {k}).")
        if rotulos.size == 0:
            return float('nan')
        if k >= num_combinacoes:
            return 1.0
        if num_combinacoes <= 2:
            return float(accuracy_score(rotulos, np.argmax(probabilidades, axis=1)))
        return float(top_k_accuracy_score(rotulos, probabilidades, k=k, labels=np.arange(num_combinacoes)))

    @classmethod
    def _rotulos_da_particao(cls, dataset: ChannelDataset, rotulos: MopLabelSet, nome: str):
        if nome in dataset.Particoes:
            inicio, fim = dataset.Particoes[nome]
            return dataset.Particao(nome), rotulos.Rotulos[inicio:fim]
        if nome == 'treino' and not dataset.Particoes:
            return dataset, rotulos.Rotulos
        return None, None

    @classmethod
    def TreinarEstagio3(
        cls,
        cfg: SystemConfig,
        tc: TrainConfig,
        dataset: ChannelDataset,
        rotulos: MopLabelSet,
        semente: int,
        salvar: Salvar = _nada,
        registrar: Registrar = _nada,
    ) -> NetworkParams:
        if len(rotulos) != len(dataset):
            raise ArtefatoAusenteErro(
                f"Rótulos cobrem {len(rotulos)} canais, dataset tem {len(dataset)}: gere-os de novo no estágio II."
            )
        validar_treino(tc, cfg, len(dataset))
        num_combinacoes = len(ModulationEngine.CombinacoesDoSistema(cfg))
        if int(rotulos.Rotulos.max(initial=0)) >= num_combinacoes:
            raise DimensaoIncompativelErro("Rótulo fora da enumeração de combinações do cenário.")

        treino, y_treino = cls._rotulos_da_particao(dataset, rotulos, 'treino')
        validacao, y_validacao = cls._rotulos_da_particao(dataset, rotulos, 'validacao')
        if validacao is not None and len(validacao) == 0:
            validacao = None

        params = MopNetwork.ConstruirMop(cfg, num_combinacoes, semente)
        dtype, dispositivo = cls._tensor_parametros(params)
        otimizador = cls._otimizador(params, tc)
        rng = np.random.default_rng(semente)
        entradas = torch.as_tensor(MopNetwork.EntradaLote(treino.Matrizes), dtype=dtype, device=dispositivo)
        alvos = torch.nn.functional.one_hot(
            torch.as_tensor(y_treino, dtype=torch.long, device=dispositivo), num_combinacoes
        ).to(dtype)
        melhor = -np.inf

        LogService.Info(
            "TrainingEngine",
            f"Estágio 3: {tc.epocas_estagio3} épocas, {len(treino)} canais, N_m={num_combinacoes}",
        )

        for epoca in range(tc.epocas_estagio3):
            lr = cls.TaxaAprendizado(epoca, tc)
            for grupo in otimizador.param_groups:
                grupo['lr'] = lr

            params.Modulo.train()
            indices = torch.as_tensor(rng.permutation(len(treino)), device=dispositivo)
            soma_perdas = 0.0
            num_lotes = 0
            for numero_lote, inicio in enumerate(range(0, len(treino), tc.tamanho_lote)):
                selecao = indices[inicio:inicio + tc.tamanho_lote]
                # batch norm não estima variância com uma amostra
                if selecao.numel() < 2:
                    continue
                otimizador.zero_grad()
                perda = cls.PerdaMop(alvos[selecao], params.Modulo(entradas[selecao]))
                cls._verificar_perda(perda, 3, epoca, numero_lote)
                perda.backward()
                otimizador.step()
                soma_perdas += float(perda.detach())
                num_lotes += 1

            acuracia = float('nan')
            if validacao is not None:
                acuracia = cls.AcuraciaTopK(MopNetwork.ProbabilidadesLote(params, validacao.Matrizes), y_validacao, 1)

            resultado = ResultadoEpoca(
                epoca=epoca + 1, estagio=3, perda=soma_perdas / max(num_lotes, 1), lr=lr,
                acuracia_validacao=acuracia,
            )
            registrar(resultado)
            LogService.Info(
                "TrainingEngine",
                f"Estágio 3 | época {epoca + 1}/{tc.epocas_estagio3} | perda={resultado.perda:.5f} | "
                f"lr={lr:.1e} | top-1 val={acuracia:.4f}",
            )

            if (epoca + 1) % tc.periodo_decaimento == 0:
                salvar(f"estagio3_epoca{epoca + 1:03d}", params)
            if validacao is not None and acuracia > melhor:
                melhor = acuracia
                salvar("estagio3_melhor", params)

        salvar("estagio3_final", params)
        return params

    @classmethod
    def RelatorioAcuracia(
        cls,
        params: NetworkParams,
        dataset: ChannelDataset,
        rotulos: MopLabelSet,
        ks: tuple[int, ...] = (1, 2, 3),
    ) -> dict[int, dict[str, float]]:
        """Top-k de treino e teste no formato da tabela de acurácia."""
        relatorio = {k: {} for k in ks}
        for particao, coluna in (('treino', 'acuracia_treino'), ('teste', 'acuracia_teste')):
            canais, y = cls._rotulos_da_particao(dataset, rotulos, particao)
            if canais is None or len(canais) == 0:
                continue
            probabilidades = MopNetwork.ProbabilidadesLote(params, canais.Matrizes)
            for k in ks:
                relatorio[k][coluna] = cls.AcuraciaTopK(probabilidades, y, k)
        for k, valores in relatorio.items():
            LogService.Info(
                "TrainingEngine",
                "Top-{} | ".format(k) + " | ".join(f"{nome}={valor:.4f}" for nome, valor in valores.items()),
            )
        return relatorio
