import numpy as np
import torch
from torch import nn

from Models.Canal import ChannelRealization
from Models.Rede import MopOutput, NetworkParams
from Services.Excecoes import CheckpointIncompativelErro, ConfiguracaoInvalidaErro, DimensaoIncompativelErro
from Services.Logic.LinkConfig import SystemConfig, validar_sistema
from Services.Logic.ModulationEngine import ModulationEngine

FILTROS_MOP = 4
CAMADAS_CONV_MOP = 3
LARGURA_FC1 = 32
TAXA_DROPOUT = 0.5
BN_EPS = 1e-3
BN_MOMENTO = 0.01


class RedeMop(nn.Module):
    """
    Classificador CSI → combinação de ordens.

    [2, K, N_t] (|H|, ∠H) → 3× conv 4×(1,1) (ReLU → BN) → vetor
      → FC-1 32 (ReLU → dropout) → FC-2 N_m (ReLU → BN) → FC-3 N_m (BN → softmax)
    """

    def __init__(self, num_antenas: int, num_usuarios: int, num_combinacoes: int):
        super().__init__()
        camadas = []
        entrada = 2
        for _ in range(CAMADAS_CONV_MOP):
            camadas += [
                nn.Conv2d(entrada, FILTROS_MOP, kernel_size=(1, 1)),
                nn.ReLU(),
                nn.BatchNorm2d(FILTROS_MOP, eps=BN_EPS, momentum=BN_MOMENTO),
            ]
            entrada = FILTROS_MOP
        self.convolucoes = nn.Sequential(*camadas)
        self.fc1 = nn.Sequential(
            nn.Linear(FILTROS_MOP * num_usuarios * num_antenas, LARGURA_FC1), nn.ReLU(), nn.Dropout(TAXA_DROPOUT)
        )
        self.fc2 = nn.Sequential(
            nn.Linear(LARGURA_FC1, num_combinacoes), nn.ReLU(),
            nn.BatchNorm1d(num_combinacoes, eps=BN_EPS, momentum=BN_MOMENTO),
        )
        # BN antes do softmax: a saída continua no simplex
        self.fc3 = nn.Sequential(
            nn.Linear(num_combinacoes, num_combinacoes),
            nn.BatchNorm1d(num_combinacoes, eps=BN_EPS, momentum=BN_MOMENTO),
        )

    def forward(self, entrada):
        """entrada [n, 2, K, N_t] → p_MOP [n, N_m]"""
        caracteristicas = self.convolucoes(entrada).flatten(start_dim=1)
        return torch.softmax(self.fc3(self.fc2(self.fc1(caracteristicas))), dim=-1)


class MopNetwork:

    @staticmethod
    def EntradaLote(matrizes: np.ndarray) -> np.ndarray:
        """matrizes [n, N_t, K] → [n, 2, K, N_t] com amplitude no canal 0 e fase no canal 1."""
        return np.stack([np.abs(matrizes), np.angle(matrizes)], axis=1).transpose(0, 1, 3, 2)

    @staticmethod
    def _manifesto(cfg: SystemConfig, num_combinacoes: int) -> dict:
        N_t, K = cfg.num_antenas, cfg.num_usuarios
        convolucoes = [
            {
                'nome': f"convolucoes.{3 * i}",
                'tipo': 'conv2d',
                'kernel': [1, 1],
                'entrada': [2 if i == 0 else FILTROS_MOP, K, N_t],
                'saida': [FILTROS_MOP, K, N_t],
                'ativacao': 'relu',
                'normalizacao': 'batch_norm',
            }
            for i in range(CAMADAS_CONV_MOP)
        ]
        densas = [
            {'nome': 'fc1.0', 'tipo': 'denso', 'entrada': FILTROS_MOP * K * N_t, 'saida': LARGURA_FC1,
             'ativacao': 'relu', 'dropout': TAXA_DROPOUT},
            {'nome': 'fc2.0', 'tipo': 'denso', 'entrada': LARGURA_FC1, 'saida': num_combinacoes,
             'ativacao': 'relu', 'normalizacao': 'batch_norm'},
            {'nome': 'fc3.0', 'tipo': 'denso', 'entrada': num_combinacoes, 'saida': num_combinacoes,
             'ativacao': 'softmax', 'normalizacao': 'batch_norm_pre_ativacao'},
        ]
        return {
            'tipo': 'mop',
            'num_antenas': N_t,
            'num_usuarios': K,
            'ordem_maxima': cfg.ordem_maxima,
            'taxa_minima': cfg.taxa_minima,
            'num_combinacoes': num_combinacoes,
            'regra_enumeracao': ModulationEngine.REGRA_ENUMERACAO,
            'convolucoes': convolucoes,
            'densas': densas,
        }

    @classmethod
    def ConstruirMop(cls, cfg: SystemConfig, num_combinacoes: int, semente: int) -> NetworkParams:
        validar_sistema(cfg)
        if num_combinacoes < 1:
            raise ConfiguracaoInvalidaErro(f"N_m deve ser ≥ 1 (recebido {num_combinacoes}).")
        with torch.random.fork_rng(devices=[]):
            torch.manual_seed(int(semente))
            modulo = RedeMop(cfg.num_antenas, cfg.num_usuarios, num_combinacoes)
        return NetworkParams(Tipo='mop', Manifesto=cls._manifesto(cfg, num_combinacoes), Modulo=modulo)

    @staticmethod
    def ValidarManifesto(manifesto: dict) -> dict:
        convolucoes, densas = manifesto['convolucoes'], manifesto['densas']
        pares = list(zip(convolucoes, convolucoes[1:])) + list(zip(densas, densas[1:]))
        for anterior, atual in pares:
            if anterior['saida'] != atual['entrada']:
                raise CheckpointIncompativelErro(f"MOP-NN: {anterior['nome']} → {atual['nome']} inconsistente.")
        if int(np.prod(convolucoes[-1]['saida'])) != densas[0]['entrada']:
            raise CheckpointIncompativelErro("MOP-NN: vetorização das convoluções não bate com FC-1.")
        if densas[-1]['saida'] != manifesto['num_combinacoes']:
            raise CheckpointIncompativelErro("Saída da MOP-NN não corresponde a N_m.")
        return manifesto

    @classmethod
    def ModuloDeManifesto(cls, manifesto: dict) -> RedeMop:
        if manifesto.get('tipo') != 'mop':
            raise CheckpointIncompativelErro(f"Manifesto de '{manifesto.get('tipo')}' não descreve uma MOP-NN.")
        cls.ValidarManifesto(manifesto)
        return RedeMop(manifesto['num_antenas'], manifesto['num_usuarios'], manifesto['num_combinacoes'])

    @staticmethod
    def ValidarCompatibilidade(params: NetworkParams, cfg: SystemConfig):
        """Rejeita checkpoints de outro cenário ou de outra ordenação das combinações."""
        manifesto = params.Manifesto
        num_combinacoes = len(ModulationEngine.CombinacoesDoSistema(cfg))
        esperado = {
            'num_antenas': cfg.num_antenas,
            'num_usuarios': cfg.num_usuarios,
            'ordem_maxima': cfg.ordem_maxima,
            'taxa_minima': cfg.taxa_minima,
            'num_combinacoes': num_combinacoes,
            'regra_enumeracao': ModulationEngine.REGRA_ENUMERACAO,
        }
        for chave, valor in esperado.items():
            if manifesto.get(chave) != valor:
                raise CheckpointIncompativelErro(
                    f"Checkpoint MOP tem {chave}={manifesto.get(chave)!r}, cenário exige {valor!r}."
                )

    @staticmethod
    def ProbabilidadesLote(params: NetworkParams, matrizes: np.ndarray) -> np.ndarray:
        """[n, N_t, K] → p_MOP [n, N_m] com dropout desligado e BN em estatísticas acumuladas."""
        modulo = params.Modulo
        referencia = next(modulo.parameters())
        entrada = torch.as_tensor(
            MopNetwork.EntradaLote(matrizes), dtype=referencia.dtype, device=referencia.device
        )
        modulo.eval()
        with torch.no_grad():
            return modulo(entrada).double().cpu().numpy()

    @staticmethod
    def TopK(probabilidades: np.ndarray, k: int) -> np.ndarray:
        """Índices das k maiores probabilidades, decrescente; empates → menor índice."""
        probabilidades = np.asarray(probabilidades)
        num_combinacoes = probabilidades.shape[-1]
        if not 1 <= k <= num_combinacoes:
            raise ConfiguracaoInvalidaErro(f"k={k} fora de [1, N_m={num_combinacoes}].")
        ordem = np.argsort(-probabilidades, axis=-1, kind='stable')
        return ordem[..., :k]

    @classmethod
    def PredizerOrdens(cls, params: NetworkParams, canal: ChannelRealization, k: int) -> MopOutput:
        if canal.NumAntenas != params.Manifesto['num_antenas'] or canal.NumUsuarios != params.Manifesto['num_usuarios']:
            raise DimensaoIncompativelErro(
                f"Canal {canal.Matriz.shape} incompatível com a MOP-NN "
                f"({params.Manifesto['num_antenas']}×{params.Manifesto['num_usuarios']})."
            )
        probabilidades = cls.ProbabilidadesLote(params, canal.Matriz[np.newaxis])[0]
        return MopOutput(Probabilidades=probabilidades, TopK=[int(i) for i in cls.TopK(probabilidades, k)])
