"""
SlpdNetwork — Precodificador e Detector Aprendidos (SLPD-NN)
=============================================================

Duas partes treinadas ponta a ponta:

  TRANSMISSOR  (estação base, conhece H e s_l)
      H̃ = ∠H + 1∠sᵀ  e |H|  → tensor [C, K, N_t]
      4 ramos paralelos de blocos convolucionais (CB), kernels (1,d) ao longo das antenas:
          ramo 1: CB(1)
          ramo 2: CB(3) → CB(1)
          ramo 3: CB(5) → CB(3) → CB(1)
          ramo 4: CB(7) → CB(3) → CB(1)
      concat no eixo de canais → vetor ─┐
      ∠s_l → FC-4 (32, LeakyReLU) ──────┴→ FC-5 (256, LeakyReLU) → FC-6 (2N_t)
      x = bloco real + j·bloco imaginário, escalado para ‖x‖² = P

  DECODIFICADOR  (um por usuário, pesos compartilhados)
      [Re r_k, Im r_k, Re h_k, Im h_k] → 128 → 64 → 32 (LeakyReLU) → 2^B (softmax)
      m̂_k = argmax das 2^{M_k} primeiras entradas (1-indexado)

Cada CB = 4 camadas convolucionais (CL): a primeira com 8×(1,1), as outras três 8×(1,d).
Cada CL = conv ('same') → LeakyReLU → batch norm.
"""

import copy
from dataclasses import dataclass
from typing import Optional

import numpy as np
import torch
from torch import nn

from Models.Canal import ChannelRealization
from Models.Modulacao import SymbolVector
from Models.Rede import DetectionOutput, NetworkParams, PrecodedSignal
from Services.Excecoes import (
    CheckpointIncompativelErro,
    DimensaoIncompativelErro,
    ForaDoAlfabetoErro,
    SaidaDegeneradaErro,
)
from Services.LogService import LogService
from Services.Logic.LinkConfig import SystemConfig, validar_sistema
from Services.Logic.ModulationEngine import ModulationEngine

# ─────────────────────────────────────────────────────────────────────────────
#  HIPERPARÂMETROS DA ARQUITETURA
# ─────────────────────────────────────────────────────────────────────────────

INCLINACAO_LEAKY = 0.3
BN_EPS = 1e-3
BN_MOMENTO = 0.01           # equivale a média móvel com decaimento 0.99
FILTROS_CB = 8
CAMADAS_POR_CB = 4
RAMOS: tuple[tuple[int, ...], ...] = ((1,), (3, 1), (5, 3, 1), (7, 3, 1))
LARGURA_FC4 = 32
LARGURA_FC5 = 256
LARGURAS_DECODIFICADOR = (128, 64, 32)


# ─────────────────────────────────────────────────────────────────────────────
#  MÓDULOS TORCH
# ─────────────────────────────────────────────────────────────────────────────

class BlocoConvolucional(nn.Module):

    def __init__(self, canais_entrada: int, d: int):
        super().__init__()
        camadas = []
        entrada = canais_entrada
        for largura in (1,) + (d,) * (CAMADAS_POR_CB - 1):
            camadas += [
                nn.Conv2d(entrada, FILTROS_CB, kernel_size=(1, largura), padding='same'),
                nn.LeakyReLU(INCLINACAO_LEAKY),
                nn.BatchNorm2d(FILTROS_CB, eps=BN_EPS, momentum=BN_MOMENTO),
            ]
            entrada = FILTROS_CB
        self.camadas = nn.Sequential(*camadas)

    def forward(self, x):
        return self.camadas(x)


class TransmissorSlpd(nn.Module):

    def __init__(self, num_antenas: int, num_usuarios: int, canais_entrada: int):
        super().__init__()
        self.num_antenas = num_antenas
        self.ramos = nn.ModuleList()
        for ramo in RAMOS:
            blocos = []
            entrada = canais_entrada
            for d in ramo:
                blocos.append(BlocoConvolucional(entrada, d))
                entrada = FILTROS_CB
            self.ramos.append(nn.Sequential(*blocos))

        largura_cnn = len(RAMOS) * FILTROS_CB * num_usuarios * num_antenas
        self.fc4 = nn.Sequential(nn.Linear(num_usuarios, LARGURA_FC4), nn.LeakyReLU(INCLINACAO_LEAKY))
        self.fc5 = nn.Sequential(nn.Linear(largura_cnn + LARGURA_FC4, LARGURA_FC5), nn.LeakyReLU(INCLINACAO_LEAKY))
        self.fc6 = nn.Linear(LARGURA_FC5, 2 * num_antenas)

    def forward(self, entrada, fases):
        """entrada [n, C, K, N_t], fases [n, K] → saída bruta [n, 2N_t]"""
        caracteristicas = torch.cat([ramo(entrada) for ramo in self.ramos], dim=1).flatten(start_dim=1)
        lateral = self.fc4(fases)
        return self.fc6(self.fc5(torch.cat([caracteristicas, lateral], dim=1)))


class DecodificadorSlpd(nn.Module):

    def __init__(self, num_antenas: int, ordem_maxima: int):
        super().__init__()
        camadas = []
        entrada = 2 + 2 * num_antenas
        for largura in LARGURAS_DECODIFICADOR:
            camadas += [nn.Linear(entrada, largura), nn.LeakyReLU(INCLINACAO_LEAKY)]
            entrada = largura
        camadas.append(nn.Linear(entrada, 2 ** ordem_maxima))
        self.camadas = nn.Sequential(*camadas)

    def forward(self, entrada):
        """entrada [..., 2 + 2N_t] → probabilidades [..., 2^B]"""
        return torch.softmax(self.camadas(entrada), dim=-1)


@dataclass
class LoteSlpd:
    """Tensores de um minilote já preparados para o passo direto ponta a ponta."""

    entrada: torch.Tensor     # [n, C, K, N_t]
    fases: torch.Tensor       # [n, K]  ∠s
    canal_re: torch.Tensor    # [n, N_t, K]
    canal_im: torch.Tensor
    ruido_re: torch.Tensor    # [n, K]  já escalado por √(σ²/2)
    ruido_im: torch.Tensor
    rotulos: torch.Tensor     # [n, K, 2^B]  one-hot estendido
    potencia: float


def NormalizarPotencia(bruto: torch.Tensor, potencia: float) -> torch.Tensor:
    """Escala cada linha [n, 2N_t] para ‖x‖² = P (a norma real dos blocos é a norma complexa)."""
    norma = torch.linalg.vector_norm(bruto, dim=-1, keepdim=True)
    if bool((norma == 0).any()):
        raise SaidaDegeneradaErro("Transmissor produziu x = 0; normalização de potência indefinida.")
    return bruto * (float(np.sqrt(potencia)) / norma)


def AplicarCanalTorch(canal_re, canal_im, x_re, x_im):
    """r_k = h_kᴴ x em aritmética real: (Hr − jHi)ᵀ(xr + jxi)."""
    r_re = torch.einsum('nik,ni->nk', canal_re, x_re) + torch.einsum('nik,ni->nk', canal_im, x_im)
    r_im = torch.einsum('nik,ni->nk', canal_re, x_im) - torch.einsum('nik,ni->nk', canal_im, x_re)
    return r_re, r_im


def EntradaDecodificador(r_re, r_im, canal_re, canal_im):
    """[n, K, 2 + 2N_t]: (Re r, Im r) seguido de (Re h_k, Im h_k)."""
    return torch.cat(
        [r_re.unsqueeze(-1), r_im.unsqueeze(-1), canal_re.transpose(1, 2), canal_im.transpose(1, 2)],
        dim=-1,
    )


class RedeSlpd(nn.Module):

    def __init__(self, transmissor: TransmissorSlpd, decodificador: DecodificadorSlpd):
        super().__init__()
        self.transmissor = transmissor
        self.decodificador = decodificador

    def forward(self, lote: LoteSlpd):
        """Transmissor → normalização → canal + ruído (sem gradiente próprio) → decodificador."""
        x = NormalizarPotencia(self.transmissor(lote.entrada, lote.fases), lote.potencia)
        num_antenas = x.shape[-1] // 2
        r_re, r_im = AplicarCanalTorch(lote.canal_re, lote.canal_im, x[:, :num_antenas], x[:, num_antenas:])
        r_re = r_re + lote.ruido_re
        r_im = r_im + lote.ruido_im
        return self.decodificador(EntradaDecodificador(r_re, r_im, lote.canal_re, lote.canal_im))


# ─────────────────────────────────────────────────────────────────────────────
#  ENGINE
# ─────────────────────────────────────────────────────────────────────────────

class SlpdNetwork:

    # ─────────────────────────────────────────────────────────────────────────
    # PRÉ-PROCESSAMENTO
    # ─────────────────────────────────────────────────────────────────────────

    @staticmethod
    def PreprocessarFusao(canal: ChannelRealization, simbolos: SymbolVector) -> np.ndarray:
        """H̃[n,k] = ∠H[n,k] + ∠s_k, sem re-embrulhar a soma (N_t × K)."""
        s = np.asarray(simbolos.Simbolos)
        if s.shape != (canal.NumUsuarios,):
            raise DimensaoIncompativelErro(
                f"Esperados {canal.NumUsuarios} símbolos, recebidos shape {s.shape}."
            )
        return np.angle(canal.Matriz) + np.angle(s)[np.newaxis, :]

    @staticmethod
    def PreprocessarFusaoLote(matrizes: np.ndarray, simbolos: np.ndarray, incluir_amplitude: bool) -> np.ndarray:
        """matrizes [n, N_t, K], simbolos [n, K] → entrada da CNN [n, C, K, N_t]."""
        fundido = np.angle(matrizes) + np.angle(simbolos)[:, np.newaxis, :]
        planos = [fundido]
        if incluir_amplitude:
            planos.append(np.abs(matrizes))
        return np.stack(planos, axis=1).transpose(0, 1, 3, 2)

    # ─────────────────────────────────────────────────────────────────────────
    # CONSTRUÇÃO
    # ─────────────────────────────────────────────────────────────────────────

    @staticmethod
    def _com_semente(semente: int, fabrica):
        # Não contamina o gerador global do torch
        with torch.random.fork_rng(devices=[]):
            torch.manual_seed(int(semente))
            return fabrica()

    @staticmethod
    def _manifesto_transmissor(cfg: SystemConfig) -> dict:
        N_t, K = cfg.num_antenas, cfg.num_usuarios
        canais = 2 if cfg.incluir_amplitude else 1
        ramos = []
        for indice_ramo, ramo in enumerate(RAMOS):
            camadas = []
            entrada = canais
            for indice_bloco, d in enumerate(ramo):
                for indice_cl, largura in enumerate((1,) + (d,) * (CAMADAS_POR_CB - 1)):
                    camadas.append({
                        'nome': f"ramos.{indice_ramo}.{indice_bloco}.camadas.{3 * indice_cl}",
                        'tipo': 'conv2d',
                        'kernel': [1, largura],
                        'entrada': [entrada, K, N_t],
                        'saida': [FILTROS_CB, K, N_t],
                        'ativacao': 'leaky_relu',
                        'normalizacao': 'batch_norm',
                    })
                    entrada = FILTROS_CB
            ramos.append(camadas)

        largura_cnn = len(RAMOS) * FILTROS_CB * K * N_t
        return {
            'tipo': 'transmissor',
            'num_antenas': N_t,
            'num_usuarios': K,
            'ordem_maxima': cfg.ordem_maxima,
            'incluir_amplitude': cfg.incluir_amplitude,
            'inclinacao_leaky': INCLINACAO_LEAKY,
            'ramos': ramos,
            'lateral': [
                {'nome': 'fc4.0', 'tipo': 'denso', 'entrada': K, 'saida': LARGURA_FC4, 'ativacao': 'leaky_relu'},
            ],
            'cabeca': [
                {'nome': 'fc5.0', 'tipo': 'denso', 'entrada': largura_cnn + LARGURA_FC4,
                 'saida': LARGURA_FC5, 'ativacao': 'leaky_relu'},
                {'nome': 'fc6', 'tipo': 'denso', 'entrada': LARGURA_FC5, 'saida': 2 * N_t, 'ativacao': None},
            ],
        }

    @staticmethod
    def _manifesto_decodificador(cfg: SystemConfig) -> dict:
        camadas = []
        entrada = 2 + 2 * cfg.num_antenas
        for indice, largura in enumerate(LARGURAS_DECODIFICADOR + (cfg.num_mensagens_max,)):
            final = indice == len(LARGURAS_DECODIFICADOR)
            camadas.append({
                'nome': f"camadas.{2 * indice}",
                'tipo': 'denso',
                'entrada': entrada,
                'saida': largura,
                'ativacao': 'softmax' if final else 'leaky_relu',
            })
            entrada = largura
        return {
            'tipo': 'decodificador',
            'num_antenas': cfg.num_antenas,
            'ordem_maxima': cfg.ordem_maxima,
            'compartilhado': True,
            'camadas': camadas,
        }

    @classmethod
    def ConstruirTransmissor(cls, cfg: SystemConfig, semente: int) -> NetworkParams:
        validar_sistema(cfg)
        canais = 2 if cfg.incluir_amplitude else 1
        modulo = cls._com_semente(
            semente, lambda: TransmissorSlpd(cfg.num_antenas, cfg.num_usuarios, canais)
        )
        return NetworkParams(Tipo='transmissor', Manifesto=cls._manifesto_transmissor(cfg), Modulo=modulo)

    @classmethod
    def ConstruirDecodificador(cls, cfg: SystemConfig, semente: int) -> NetworkParams:
        validar_sistema(cfg)
        modulo = cls._com_semente(semente, lambda: DecodificadorSlpd(cfg.num_antenas, cfg.ordem_maxima))
        return NetworkParams(Tipo='decodificador', Manifesto=cls._manifesto_decodificador(cfg), Modulo=modulo)

    @classmethod
    def ConstruirSlpd(cls, cfg: SystemConfig, semente: int) -> NetworkParams:
        """Transmissor e decodificador com sementes derivadas da mesma semente."""
        filhas = np.random.SeedSequence(semente).generate_state(2)
        params = cls.Combinar(
            cls.ConstruirTransmissor(cfg, int(filhas[0])),
            cls.ConstruirDecodificador(cfg, int(filhas[1])),
        )
        LogService.Debug(
            "SlpdNetwork",
            f"SLPD-NN construída (N_t={cfg.num_antenas}, K={cfg.num_usuarios}): "
            f"{sum(p.numel() for p in params.Modulo.parameters())} parâmetros treináveis",
        )
        return params

    @staticmethod
    def Combinar(transmissor: NetworkParams, decodificador: NetworkParams) -> NetworkParams:
        if transmissor.Tipo != 'transmissor' or decodificador.Tipo != 'decodificador':
            raise CheckpointIncompativelErro(
                f"Combinar espera transmissor + decodificador (recebido {transmissor.Tipo} + {decodificador.Tipo})."
            )
        if transmissor.Manifesto['num_antenas'] != decodificador.Manifesto['num_antenas']:
            raise CheckpointIncompativelErro("Transmissor e decodificador foram construídos para N_t diferentes.")
        return NetworkParams(
            Tipo='slpd',
            Manifesto={'tipo': 'slpd', 'transmissor': transmissor.Manifesto, 'decodificador': decodificador.Manifesto},
            Modulo=RedeSlpd(transmissor.Modulo, decodificador.Modulo),
            Versao=transmissor.Versao,
        )

    @staticmethod
    def Separar(params: NetworkParams) -> tuple[NetworkParams, NetworkParams]:
        """Cópias independentes das duas metades (estação base | receptores)."""
        if params.Tipo != 'slpd':
            raise CheckpointIncompativelErro(f"Separar espera uma SLPD-NN completa (recebido '{params.Tipo}').")
        transmissor = NetworkParams(
            Tipo='transmissor',
            Manifesto=copy.deepcopy(params.Manifesto['transmissor']),
            Modulo=copy.deepcopy(params.Modulo.transmissor),
            Versao=params.Versao,
        )
        decodificador = NetworkParams(
            Tipo='decodificador',
            Manifesto=copy.deepcopy(params.Manifesto['decodificador']),
            Modulo=copy.deepcopy(params.Modulo.decodificador),
            Versao=params.Versao,
        )
        return transmissor, decodificador

    # ─────────────────────────────────────────────────────────────────────────
    # MANIFESTO
    # ─────────────────────────────────────────────────────────────────────────

    @staticmethod
    def _conferir_cadeia(camadas: list[dict], rotulo: str):
        for anterior, atual in zip(camadas, camadas[1:]):
            if anterior['saida'] != atual['entrada']:
                raise CheckpointIncompativelErro(
                    f"Manifesto inconsistente em {rotulo}: {anterior['nome']} sai {anterior['saida']}, "
                    f"{atual['nome']} espera {atual['entrada']}."
                )

    @classmethod
    def ValidarManifesto(cls, manifesto: dict) -> dict:
        """Confere o encadeamento de formas camada a camada."""
        tipo = manifesto.get('tipo')
        if tipo == 'slpd':
            cls.ValidarManifesto(manifesto['transmissor'])
            cls.ValidarManifesto(manifesto['decodificador'])
            return manifesto
        if tipo == 'decodificador':
            camadas = manifesto['camadas']
            cls._conferir_cadeia(camadas, 'decodificador')
            if camadas[0]['entrada'] != 2 + 2 * manifesto['num_antenas']:
                raise CheckpointIncompativelErro("Entrada do decodificador não corresponde a 2 + 2N_t.")
            if camadas[-1]['saida'] != 2 ** manifesto['ordem_maxima']:
                raise CheckpointIncompativelErro("Saída do decodificador não corresponde a 2^B.")
            return manifesto
        if tipo == 'transmissor':
            largura_cnn = 0
            for indice, ramo in enumerate(manifesto['ramos']):
                cls._conferir_cadeia(ramo, f"ramo {indice + 1}")
                for camada in ramo:
                    if camada['entrada'][1:] != camada['saida'][1:]:
                        raise CheckpointIncompativelErro(f"{camada['nome']} não preserva a forma [K, N_t].")
                largura_cnn += int(np.prod(ramo[-1]['saida']))
            lateral, cabeca = manifesto['lateral'], manifesto['cabeca']
            if cabeca[0]['entrada'] != largura_cnn + lateral[-1]['saida']:
                raise CheckpointIncompativelErro("Entrada do FC-5 não bate com CNN vetorizada + FC-4.")
            cls._conferir_cadeia(cabeca, 'cabeça densa')
            if cabeca[-1]['saida'] != 2 * manifesto['num_antenas']:
                raise CheckpointIncompativelErro("Saída do FC-6 não corresponde a 2N_t.")
            return manifesto
        raise CheckpointIncompativelErro(f"Tipo de manifesto desconhecido: {tipo!r}.")

    @classmethod
    def ModuloDeManifesto(cls, manifesto: dict) -> nn.Module:
        """Reconstrói a arquitetura (pesos não inicializados com semente) a partir do manifesto."""
        tipo = cls.ValidarManifesto(manifesto)['tipo']
        if tipo == 'transmissor':
            canais = 2 if manifesto['incluir_amplitude'] else 1
            return TransmissorSlpd(manifesto['num_antenas'], manifesto['num_usuarios'], canais)
        if tipo == 'decodificador':
            return DecodificadorSlpd(manifesto['num_antenas'], manifesto['ordem_maxima'])
        return RedeSlpd(
            cls.ModuloDeManifesto(manifesto['transmissor']),
            cls.ModuloDeManifesto(manifesto['decodificador']),
        )

    @staticmethod
    def ValidarCompatibilidade(params: NetworkParams, cfg: SystemConfig):
        """Checkpoint carregado contra o cenário ativo."""
        manifestos = (
            [params.Manifesto['transmissor'], params.Manifesto['decodificador']]
            if params.Tipo == 'slpd' else [params.Manifesto]
        )
        esperado = {
            'num_antenas': cfg.num_antenas,
            'num_usuarios': cfg.num_usuarios,
            'ordem_maxima': cfg.ordem_maxima,
            'incluir_amplitude': cfg.incluir_amplitude,
        }
        for manifesto in manifestos:
            for chave, valor in esperado.items():
                if chave in manifesto and manifesto[chave] != valor:
                    raise CheckpointIncompativelErro(
                        f"Checkpoint '{manifesto['tipo']}' tem {chave}={manifesto[chave]}, cenário exige {valor}."
                    )

    # ─────────────────────────────────────────────────────────────────────────
    # INFERÊNCIA
    # ─────────────────────────────────────────────────────────────────────────

    @staticmethod
    def _transmissor(params: NetworkParams) -> TransmissorSlpd:
        if params.Tipo == 'slpd':
            return params.Modulo.transmissor
        if params.Tipo == 'transmissor':
            return params.Modulo
        raise CheckpointIncompativelErro(f"Rede '{params.Tipo}' não tem transmissor.")

    @staticmethod
    def _decodificador(params: NetworkParams) -> DecodificadorSlpd:
        if params.Tipo == 'slpd':
            return params.Modulo.decodificador
        if params.Tipo == 'decodificador':
            return params.Modulo
        raise CheckpointIncompativelErro(f"Rede '{params.Tipo}' não tem decodificador.")

    @staticmethod
    def _parametros_tensor(modulo: nn.Module):
        referencia = next(modulo.parameters())
        return referencia.dtype, referencia.device

    @classmethod
    def PrecodificarLote(
        cls,
        params: NetworkParams,
        matrizes: np.ndarray,
        simbolos: np.ndarray,
        potencia: float,
    ) -> np.ndarray:
        """matrizes [n, N_t, K], simbolos [n, K] → x complexo [n, N_t] com ‖x‖² = P."""
        transmissor = cls._transmissor(params)
        incluir_amplitude = (
            params.Manifesto['transmissor'] if params.Tipo == 'slpd' else params.Manifesto
        )['incluir_amplitude']
        dtype, dispositivo = cls._parametros_tensor(transmissor)

        entrada = torch.as_tensor(
            cls.PreprocessarFusaoLote(matrizes, simbolos, incluir_amplitude), dtype=dtype, device=dispositivo
        )
        fases = torch.as_tensor(np.angle(simbolos), dtype=dtype, device=dispositivo)

        transmissor.eval()
        with torch.no_grad():
            bruto = transmissor(entrada, fases).double()
            # Normalização refeita em float64 para cumprir |‖x‖² − P| ≤ 1e-6·P
            x = NormalizarPotencia(bruto, potencia).cpu().numpy()
        num_antenas = x.shape[-1] // 2
        return x[:, :num_antenas] + 1j * x[:, num_antenas:]

    @classmethod
    def Precodificar(
        cls,
        params: NetworkParams,
        canal: ChannelRealization,
        simbolos: SymbolVector,
        potencia: float,
    ) -> PrecodedSignal:
        s = np.asarray(simbolos.Simbolos)
        if s.shape != (canal.NumUsuarios,):
            raise DimensaoIncompativelErro(
                f"Esperados {canal.NumUsuarios} símbolos, recebidos shape {s.shape}."
            )
        x = cls.PrecodificarLote(params, canal.Matriz[np.newaxis], s[np.newaxis], potencia)[0]
        return PrecodedSignal(X=x)

    @classmethod
    def ProbabilidadesLote(cls, params: NetworkParams, matrizes: np.ndarray, recebidos: np.ndarray) -> np.ndarray:
        """matrizes [n, N_t, K], recebidos [n, K] → p̃ [n, K, 2^B] (um decodificador por usuário)."""
        decodificador = cls._decodificador(params)
        dtype, dispositivo = cls._parametros_tensor(decodificador)

        def tensor(valores):
            return torch.as_tensor(np.ascontiguousarray(valores), dtype=dtype, device=dispositivo)

        entrada = EntradaDecodificador(
            tensor(recebidos.real), tensor(recebidos.imag), tensor(matrizes.real), tensor(matrizes.imag)
        )
        decodificador.eval()
        with torch.no_grad():
            return decodificador(entrada).double().cpu().numpy()

    @staticmethod
    def DecidirMensagens(probabilidades: np.ndarray, ordens: np.ndarray) -> np.ndarray:
        """argmax restrito às 2^{M_k} primeiras entradas; empates → menor índice. Saída 1-indexada."""
        ordens = np.broadcast_to(np.asarray(ordens), probabilidades.shape[:-1])
        indices = np.arange(probabilidades.shape[-1])
        validos = indices < np.power(2, ordens)[..., np.newaxis]
        restritas = np.where(validos, probabilidades, -np.inf)
        return np.argmax(restritas, axis=-1) + 1

    @classmethod
    def DecodificarLote(cls, params, matrizes, recebidos, ordens) -> tuple[np.ndarray, np.ndarray]:
        probabilidades = cls.ProbabilidadesLote(params, matrizes, recebidos)
        return probabilidades, cls.DecidirMensagens(probabilidades, ordens)

    @classmethod
    def Decodificar(cls, params: NetworkParams, h_k: np.ndarray, r_k: complex, ordem: int) -> DetectionOutput:
        manifesto = params.Manifesto['decodificador'] if params.Tipo == 'slpd' else params.Manifesto
        h_k = np.asarray(h_k, dtype=np.complex128)
        if h_k.shape != (manifesto['num_antenas'],):
            raise DimensaoIncompativelErro(
                f"h_k deve ter {manifesto['num_antenas']} elementos (recebido shape {h_k.shape})."
            )
        if not 1 <= ordem <= manifesto['ordem_maxima']:
            raise ForaDoAlfabetoErro(f"Ordem M={ordem} fora de [1, B={manifesto['ordem_maxima']}].")

        probabilidades, decodificadas = cls.DecodificarLote(
            params,
            h_k.reshape(1, -1, 1),
            np.asarray([[r_k]], dtype=np.complex128),
            np.asarray([[ordem]]),
        )
        return DetectionOutput(Probabilidades=probabilidades[0, 0], Decodificada=int(decodificadas[0, 0]))

    # ─────────────────────────────────────────────────────────────────────────
    # LOTE DE TREINO
    # ─────────────────────────────────────────────────────────────────────────

    @classmethod
    def MontarLote(
        cls,
        matrizes: np.ndarray,
        mensagens: np.ndarray,
        ordens: np.ndarray,
        variancias: np.ndarray,
        rng: np.random.Generator,
        cfg: SystemConfig,
        dtype=torch.float32,
        dispositivo: Optional[str] = None,
    ) -> LoteSlpd:
        """
        Converte um minilote numpy em tensores: símbolos PSK, entrada da CNN,
        ruído CN(0, σ²) por amostra e rótulos one-hot estendidos.
        """
        simbolos = ModulationEngine.MapearPskLote(mensagens, ordens)
        forma = mensagens.shape
        escala = np.sqrt(np.asarray(variancias, dtype=np.float64) / 2.0)[:, np.newaxis]
        ruido_re = escala * rng.standard_normal(forma)
        ruido_im = escala * rng.standard_normal(forma)

        def tensor(valores):
            return torch.as_tensor(np.ascontiguousarray(valores), dtype=dtype, device=dispositivo)

        return LoteSlpd(
            entrada=tensor(cls.PreprocessarFusaoLote(matrizes, simbolos, cfg.incluir_amplitude)),
            fases=tensor(np.angle(simbolos)),
            canal_re=tensor(matrizes.real),
            canal_im=tensor(matrizes.imag),
            ruido_re=tensor(ruido_re),
            ruido_im=tensor(ruido_im),
            rotulos=tensor(ModulationEngine.RotulosEstendidosLote(mensagens, cfg.ordem_maxima)),
            potencia=cfg.potencia,
        )
