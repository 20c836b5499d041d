from dataclasses import asdict
from pathlib import Path
from typing import Optional

import numpy as np

from Models.Canal import ChannelDataset
from Services.Excecoes import ArtefatoAusenteErro, ConfiguracaoInvalidaErro
from Services.LogService import LogService
from Services.Logic.ChannelEngine import ChannelEngine
from Services.Logic.LinkConfig import SystemConfig, TrainConfig, sistema_de_dict, validar_sistema, validar_treino
from Services.VersaoService import VersaoService
from Utils.Arquivos import CarregarArraysNomeados, CarregarJson, HashArquivo, SalvarArraysNomeados, SalvarJson

FORMATO_DATASET = "ampd-canais-v1"
ORDEM_PARTICOES = ('treino', 'teste', 'validacao')


class DatasetService:
    """
    Geração e persistência dos datasets de canais.

    Arquivo .npz com os blocos (partes real e imaginária separadas) e um .json
    ao lado com o cenário, a semente e os limites das partições.
    """

    @staticmethod
    def Particoes(tc: TrainConfig) -> dict[str, tuple[int, int]]:
        """treino | teste | validação, contíguas e nessa ordem."""
        limites = {}
        inicio = 0
        for nome, tamanho in zip(ORDEM_PARTICOES, (tc.n_treino, tc.n_teste, tc.n_validacao)):
            limites[nome] = (inicio, inicio + tamanho)
            inicio += tamanho
        return limites

    @classmethod
    def GerarDataset(
        cls,
        cfg: SystemConfig,
        tc: TrainConfig,
        quantidade: Optional[int] = None,
        semente: Optional[int] = None,
    ) -> ChannelDataset:
        quantidade = tc.total_canais if quantidade is None else int(quantidade)
        semente = tc.semente if semente is None else int(semente)
        validar_sistema(cfg)
        validar_treino(tc, cfg, quantidade)

        dataset = ChannelEngine.GerarCanais(cfg, quantidade, semente)
        dataset.Particoes = cls.Particoes(tc)
        if quantidade > tc.total_canais:
            LogService.Warning(
                "DatasetService",
                f"{quantidade - tc.total_canais} canais ficam fora das partições (total {quantidade}).",
            )
        LogService.Info(
            "DatasetService",
            f"Dataset gerado: {quantidade} canais, semente {semente}, partições "
            + ", ".join(f"{nome}={fim - inicio}" for nome, (inicio, fim) in dataset.Particoes.items()),
        )
        return dataset

    @staticmethod
    def SalvarDataset(dataset: ChannelDataset, caminho, cfg: SystemConfig) -> Path:
        caminho = Path(caminho)
        if caminho.suffix != '.npz':
            caminho = caminho.with_suffix('.npz')
        arquivo = SalvarArraysNomeados(caminho, {
            # [n, 2, N_t, K]: parte real e imaginária
            'canais': np.stack([dataset.Matrizes.real, dataset.Matrizes.imag], axis=1),
            'angulos': dataset.Angulos,
            'ganhos': np.stack([dataset.Ganhos.real, dataset.Ganhos.imag], axis=1),
        })
        SalvarJson(caminho.with_suffix('.json'), {
            'formato': FORMATO_DATASET,
            'versao': VersaoService.VersaoAtual(),
            'sistema': asdict(cfg),
            'semente': dataset.Semente,
            'quantidade': len(dataset),
            'particoes': {nome: list(limites) for nome, limites in dataset.Particoes.items()},
            'arquivo': arquivo.name,
            'hash': HashArquivo(arquivo),
        })
        LogService.Info("DatasetService", f"Dataset salvo em {arquivo}")
        return arquivo

    @staticmethod
    def CarregarDataset(caminho, cfg: Optional[SystemConfig] = None) -> ChannelDataset:
        """Lê o dataset; com `cfg`, recusa arquivos gerados para outro N_t ou K."""
        caminho = Path(caminho)
        if caminho.suffix != '.npz':
            caminho = caminho.with_suffix('.npz')
        arquivo_manifesto = caminho.with_suffix('.json')
        if not caminho.exists() or not arquivo_manifesto.exists():
            raise ArtefatoAusenteErro(f"Dataset de canais não encontrado: {caminho} (+ manifesto .json).")

        manifesto = CarregarJson(arquivo_manifesto)
        if manifesto.get('formato') != FORMATO_DATASET:
            raise ConfiguracaoInvalidaErro(f"{arquivo_manifesto} não é um manifesto de dataset reconhecido.")
        dados = CarregarArraysNomeados(caminho)
        canais, ganhos = dados['canais'], dados['ganhos']

        if cfg is not None:
            gerado = sistema_de_dict(manifesto['sistema'])
            if (gerado.num_antenas, gerado.num_usuarios) != (cfg.num_antenas, cfg.num_usuarios):
                raise ConfiguracaoInvalidaErro(
                    f"Dataset gerado para N_t={gerado.num_antenas}, K={gerado.num_usuarios}; "
                    f"cenário ativo tem N_t={cfg.num_antenas}, K={cfg.num_usuarios}."
                )

        return ChannelDataset(
            Matrizes=canais[:, 0] + 1j * canais[:, 1],
            Angulos=dados['angulos'],
            Ganhos=ganhos[:, 0] + 1j * ganhos[:, 1],
            Semente=int(manifesto.get('semente', 0)),
            Particoes={nome: tuple(limites) for nome, limites in manifesto.get('particoes', {}).items()},
        )
