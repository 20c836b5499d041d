"""Flags e utilitários compartilhados pelos comandos da CLI."""

import argparse
import sys
from pathlib import Path

import numpy as np

from Configuracoes import ConfiguracaoAtual
from Models.Canal import ChannelDataset
from Models.Treino import MopLabelSet
from Services.CheckpointService import CheckpointService
from Services.DatasetService import DatasetService
from Services.LogService import LogService
from Services.Logic.ChannelEngine import ChannelEngine
from Services.Logic.LinkConfig import SystemConfig, TrainConfig, carregar_configuracao
from Services.Logic.TrainingEngine import TrainingEngine


def ParserComum() -> argparse.ArgumentParser:
    """Flags aceitas por todos os subcomandos (padrões vindos do ambiente AMPD_*)."""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--config', default=None,
                        help='Arquivo TOML do cenário (padrão: AMPD_CONFIG ou Config/<escala>.toml).')
    parser.add_argument('--seed', type=int, default=None,
                        help='Semente (padrão: AMPD_SEMENTE ou [treino] semente do cenário).')
    parser.add_argument('--workers', type=int, default=ConfiguracaoAtual.TRABALHADORES,
                        help='Processos para os shards Monte Carlo.')
    parser.add_argument('--deterministic', action='store_true', default=ConfiguracaoAtual.DETERMINISTICO,
                        help='Uma thread, kernels determinísticos, saídas idênticas byte a byte.')
    parser.add_argument('--device', default=ConfiguracaoAtual.DISPOSITIVO,
                        help='Dispositivo torch dos estágios 1 e 2 (padrão: AMPD_DISPOSITIVO).')
    parser.add_argument('--out', default=None, help='Arquivo ou diretório de saída.')
    return parser


def CarregarCenario(args, sobrescritas=None):
    caminho = args.config or ConfiguracaoAtual.ObterArquivoCenario()
    if not args.config and not Path(caminho).exists():
        # Sem arquivo de escala: valem os padrões das dataclasses
        caminho = None
    LogService.Debug("Route.Comum", f"Cenário: {caminho or 'padrões embutidos'}")
    return carregar_configuracao(caminho, sobrescritas)


def ResolverSemente(args, tc: TrainConfig) -> int:
    if args.seed is not None:
        return args.seed
    if ConfiguracaoAtual.SEMENTE is not None:
        return ConfiguracaoAtual.SEMENTE
    return tc.semente


def ResolverTrabalhadores(args) -> int:
    """Modo determinístico roda tudo num único processo."""
    TrainingEngine.ConfigurarDeterminismo(args.deterministic)
    return 1 if args.deterministic else max(1, args.workers)


def CaminhoDatasetPadrao() -> Path:
    return Path(ConfiguracaoAtual.DIR_DADOS) / f"canais_{ConfiguracaoAtual.ESCALA}.npz"


def CarregarDatasetOuPadrao(caminho, cfg: SystemConfig) -> ChannelDataset:
    return DatasetService.CarregarDataset(caminho or CaminhoDatasetPadrao(), cfg)


FLUXO_CANAIS_AVALIACAO = 1


def SementeCanaisAvaliacao(semente: int) -> int:
    return int(np.random.SeedSequence([int(semente), FLUXO_CANAIS_AVALIACAO]).generate_state(1)[0])


def CanaisDeAvaliacao(args, cfg: SystemConfig, tc: TrainConfig, semente: int):
    """
    Partição de teste do dataset (--data) com os rótulos alinhados, ou, sem
    dataset, n_teste canais novos de um fluxo derivado da semente (disjunto do
    fluxo do gen-data, que usa a semente direto).
    """
    if args.data:
        dataset = DatasetService.CarregarDataset(args.data, cfg)
        inicio, fim = dataset.Particoes.get('teste', (0, len(dataset)))
        canais = dataset[slice(inicio, fim)]
        rotulos = None
        if getattr(args, 'labels', None):
            completos = CheckpointService.CarregarRotulos(args.labels, len(dataset))
            rotulos = MopLabelSet(Rotulos=completos.Rotulos[inicio:fim], Entropias=completos.Entropias[inicio:fim])
        return canais, rotulos

    quantidade = max(1, tc.n_teste)
    semente_canais = SementeCanaisAvaliacao(semente)
    LogService.Info("Route.Comum", f"Sem --data: {quantidade} canais de teste novos (semente {semente_canais}).")
    return ChannelEngine.GerarCanais(cfg, quantidade, semente_canais), None


def EscreverCsv(tabela, caminho=None):
    """DataFrame → arquivo, ou stdout quando não há caminho."""
    if caminho is None:
        tabela.to_csv(sys.stdout, index=False, lineterminator='\n')
        return None
    caminho = Path(caminho)
    caminho.parent.mkdir(parents=True, exist_ok=True)
    tabela.to_csv(caminho, index=False, lineterminator='\n')
    return caminho
