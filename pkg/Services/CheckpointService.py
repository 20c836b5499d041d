"""
CheckpointService — Persistência de Redes e Rótulos
===================================================

Um checkpoint são dois arquivos com o mesmo nome-base:

  <nome>.json   manifesto da arquitetura, tipo da rede, versão e hash dos pesos
  <nome>.npz    pesos nomeados pelas chaves do state_dict (inclui estatísticas do BN)

Os dois são determinísticos: mesmos pesos → mesmos bytes.
Ao carregar, a arquitetura é reconstruída do manifesto, os pesos entram com
load_state_dict(strict=True) e, se um cenário for informado, o manifesto é
conferido contra ele (N_t, K, B, N_m, regra de enumeração).
"""

from pathlib import Path
from typing import Optional

import numpy as np
import torch

from Models.Rede import NetworkParams
from Models.Treino import MopLabelSet
from Services.Excecoes import ArtefatoAusenteErro, CheckpointIncompativelErro
from Services.LogService import LogService
from Services.Logic.LinkConfig import SystemConfig
from Services.Logic.MopNetwork import MopNetwork
from Services.Logic.SlpdNetwork import SlpdNetwork
from Services.VersaoService import VersaoService
from Utils.Arquivos import CarregarArraysNomeados, CarregarJson, HashArquivo, SalvarArraysNomeados, SalvarJson

FORMATO_CHECKPOINT = "ampd-checkpoint-v1"
FORMATO_ROTULOS = "ampd-rotulos-v1"


class CheckpointService:

    @staticmethod
    def _base(caminho) -> Path:
        """Aceita o nome-base ou qualquer um dos dois arquivos."""
        caminho = Path(caminho)
        return caminho.with_suffix('') if caminho.suffix in {'.json', '.npz'} else caminho

    @staticmethod
    def _rede(tipo: str):
        if tipo == 'mop':
            return MopNetwork
        if tipo in {'slpd', 'transmissor', 'decodificador'}:
            return SlpdNetwork
        raise CheckpointIncompativelErro(f"Tipo de rede desconhecido no checkpoint: {tipo!r}.")

    # ─────────────────────────────────────────────────────────────────────────
    # REDES
    # ─────────────────────────────────────────────────────────────────────────

    @classmethod
    def SalvarCheckpoint(cls, params: NetworkParams, caminho) -> Path:
        base = cls._base(caminho)
        arquivo_pesos = SalvarArraysNomeados(base.with_suffix('.npz'), params.Pesos())
        versao = VersaoService.VersaoAtual()
        SalvarJson(base.with_suffix('.json'), {
            'formato': FORMATO_CHECKPOINT,
            'tipo': params.Tipo,
            'versao': versao,
            'manifesto': params.Manifesto,
            'pesos': arquivo_pesos.name,
            'hash_pesos': HashArquivo(arquivo_pesos),
        })
        params.Versao = versao
        LogService.Debug("CheckpointService", f"Checkpoint '{params.Tipo}' salvo em {base}")
        return base.with_suffix('.json')

    @classmethod
    def CarregarCheckpoint(cls, caminho, cfg: Optional[SystemConfig] = None) -> NetworkParams:
        base = cls._base(caminho)
        arquivo_manifesto, arquivo_pesos = base.with_suffix('.json'), base.with_suffix('.npz')
        for arquivo in (arquivo_manifesto, arquivo_pesos):
            if not arquivo.exists():
                raise ArtefatoAusenteErro(f"Checkpoint incompleto: {arquivo} não encontrado.")

        cabecalho = CarregarJson(arquivo_manifesto)
        if cabecalho.get('formato') != FORMATO_CHECKPOINT:
            raise CheckpointIncompativelErro(
                f"{arquivo_manifesto} não é um checkpoint reconhecido (formato={cabecalho.get('formato')!r})."
            )
        if cabecalho.get('hash_pesos') != HashArquivo(arquivo_pesos):
            raise CheckpointIncompativelErro(f"Pesos em {arquivo_pesos} não correspondem ao manifesto.")

        tipo, manifesto = cabecalho['tipo'], cabecalho['manifesto']
        rede = cls._rede(tipo)
        try:
            modulo = rede.ModuloDeManifesto(manifesto)
        except KeyError as e:
            raise CheckpointIncompativelErro(f"Manifesto sem o campo {e} ({arquivo_manifesto}).") from e

        pesos = {nome: torch.as_tensor(valor) for nome, valor in CarregarArraysNomeados(arquivo_pesos).items()}
        try:
            modulo.load_state_dict(pesos, strict=True)
        except RuntimeError as e:
            raise CheckpointIncompativelErro(f"Pesos não encaixam na arquitetura do manifesto: {e}") from e
        modulo.eval()

        params = NetworkParams(Tipo=tipo, Manifesto=manifesto, Modulo=modulo, Versao=cabecalho.get('versao', '0.0.0'))
        if cfg is not None:
            rede.ValidarCompatibilidade(params, cfg)
        if params.Versao != VersaoService.VersaoAtual():
            LogService.Warning(
                "CheckpointService",
                f"Checkpoint {base.name} gravado pela versão {params.Versao} (atual {VersaoService.VersaoAtual()}).",
            )
        LogService.Info("CheckpointService", f"Checkpoint '{tipo}' carregado de {base}")
        return params

    # ─────────────────────────────────────────────────────────────────────────
    # RÓTULOS DA MOP-NN
    # ─────────────────────────────────────────────────────────────────────────

    @classmethod
    def SalvarRotulos(cls, rotulos: MopLabelSet, caminho, metadados: Optional[dict] = None) -> Path:
        base = cls._base(caminho)
        arquivo = SalvarArraysNomeados(base.with_suffix('.npz'), {
            'rotulos': np.asarray(rotulos.Rotulos, dtype=np.int32),
            'entropias': np.asarray(rotulos.Entropias, dtype=np.float64),
        })
        SalvarJson(base.with_suffix('.json'), {
            'formato': FORMATO_ROTULOS,
            'versao': VersaoService.VersaoAtual(),
            'quantidade': len(rotulos),
            'hash': HashArquivo(arquivo),
            **(metadados or {}),
        })
        LogService.Info("CheckpointService", f"{len(rotulos)} rótulos salvos em {arquivo}")
        return arquivo

    @classmethod
    def CarregarRotulos(cls, caminho, total_canais: Optional[int] = None) -> MopLabelSet:
        arquivo = cls._base(caminho).with_suffix('.npz')
        if not arquivo.exists():
            raise ArtefatoAusenteErro(f"Arquivo de rótulos do estágio II não encontrado: {arquivo}")
        dados = CarregarArraysNomeados(arquivo)
        if 'rotulos' not in dados or 'entropias' not in dados:
            raise CheckpointIncompativelErro(f"{arquivo} não contém rótulos da MOP-NN.")
        rotulos = MopLabelSet(
            Rotulos=dados['rotulos'].astype(np.int32),
            Entropias=dados['entropias'].astype(np.float64),
        )
        if total_canais is not None and len(rotulos) != total_canais:
            raise ArtefatoAusenteErro(
                f"Rótulos cobrem {len(rotulos)} canais, dataset tem {total_canais}: gere-os de novo no estágio II."
            )
        return rotulos
