from dataclasses import asdict
from datetime import datetime
from pathlib import Path
from typing import Optional

import pandas as pd

from Configuracoes import ConfiguracaoAtual
from Models.Rede import NetworkParams
from Models.Treino import ResultadoEpoca
from Services.CheckpointService import CheckpointService
from Services.LogService import LogService
from Services.Logic.LinkConfig import configuracao_para_dict
from Services.VersaoService import VersaoService
from Utils.Arquivos import HashConteudo, SalvarJson


class ExecucaoService:
    """
    Diretório de execução de um comando de treino ou avaliação:

      <run>/config.json          cenário resolvido (arquivo + flags)
      <run>/metricas.csv         uma linha por época
      <run>/checkpoints/*.json|npz
    """

    @staticmethod
    def CriarDiretorio(destino: Optional[str | Path], prefixo: str) -> Path:
        """--out explícito ou Data/Runs/<prefixo>_<data-hora>."""
        if destino:
            diretorio = Path(destino)
        else:
            carimbo = datetime.now().strftime('%Y%m%d_%H%M%S')
            diretorio = Path(ConfiguracaoAtual.DIR_RUNS) / f"{prefixo}_{carimbo}"
        diretorio.mkdir(parents=True, exist_ok=True)
        LogService.AnexarExecucao(diretorio)
        LogService.Debug("ExecucaoService", f"Diretório de execução: {diretorio}")
        return diretorio

    @staticmethod
    def SalvarSnapshot(diretorio: Path, *configs, extras: Optional[dict] = None) -> str:
        """Grava config.json e devolve o hash curto do cenário (vai para os relatórios)."""
        conteudo = configuracao_para_dict(*configs)
        hash_config = HashConteudo(conteudo)
        SalvarJson(Path(diretorio) / 'config.json', {
            **conteudo,
            'hash_config': hash_config,
            'versao': VersaoService.VersaoAtual(),
            **(extras or {}),
        })
        return hash_config

    @staticmethod
    def SalvadorCheckpoints(diretorio: Path):
        """Callback `salvar(nome, params)` das engines de treino."""
        pasta = Path(diretorio) / 'checkpoints'

        def salvar(nome: str, params: NetworkParams):
            CheckpointService.SalvarCheckpoint(params, pasta / nome)

        return salvar


class RegistradorMetricas:
    """Callback `registrar(ResultadoEpoca)`: reescreve o metricas.csv a cada época."""

    COLUNAS = ['estagio', 'epoca', 'perda', 'lr', 'ser_validacao', 'acuracia_validacao']

    def __init__(self, diretorio: Path, nome_arquivo: str = 'metricas.csv'):
        self.caminho = Path(diretorio) / nome_arquivo
        self.linhas: list[dict] = []

    def __call__(self, resultado: ResultadoEpoca):
        self.linhas.append(asdict(resultado))
        pd.DataFrame(self.linhas, columns=self.COLUNAS).to_csv(self.caminho, index=False)

    def __len__(self):
        return len(self.linhas)
