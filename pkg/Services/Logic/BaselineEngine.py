"""
BaselineEngine — Precodificadores Clássicos e Detector de Fase
==============================================================

  ZF (block-level):        x = c · H(HᴴH)⁻¹ s,   c > 0 tal que ‖x‖² = P
  CI-SLP (symbol-level):   max t
                           s.a.  Re(r̃_k)·tan(π/2^{M_k}) − |Im(r̃_k)| ≥ t   (M_k ≥ 2)
                                 Re(r̃_k) ≥ t                              (M_k = 1)
                                 ‖x‖ ≤ √P
                           com r̃_k = h_kᴴx · conj(s_k)
  Detector:                m̂ = argmin_m |∠r − ∠s(m)|, empates → menor m

O programa CI é montado uma vez por (N_t, ordens) com cvxpy.Parameter e
reaproveitado entre slots (apenas H, s e P mudam).
"""

import cvxpy as cvx
import numpy as np

from Models.Canal import ChannelRealization
from Models.Modulacao import ModOrderCombo, SymbolVector
from Models.Rede import PrecodedSignal
from Services.Excecoes import (
    ConfiguracaoInvalidaErro,
    DimensaoIncompativelErro,
    ForaDoAlfabetoErro,
    MatrizSingularErro,
    SolverNaoConvergiuErro,
)
from Services.LogService import LogService
from Services.Logic.ModulationEngine import ModulationEngine
from Utils.Geometria import DistanciaAngular

TOLERANCIA_EMPATE = 1e-12


class _ProgramaCi:
    """Problema CI-SLP parametrizado (variável real z = [Re x; Im x])."""

    def __init__(self, num_antenas: int, ordens: tuple[int, ...]):
        ordens_arr = np.asarray(ordens)
        self.linhas_bpsk = np.flatnonzero(ordens_arr == 1)
        self.linhas_psk = np.flatnonzero(ordens_arr >= 2)

        self.z = cvx.Variable(2 * num_antenas)
        self.t = cvx.Variable()
        self.raiz_potencia = cvx.Parameter(nonneg=True)
        restricoes = [cvx.norm(self.z, 2) <= self.raiz_potencia]

        self.real_psk = self.imag_psk = self.real_bpsk = None
        if self.linhas_psk.size:
            tangentes = np.tan(np.pi / np.power(2.0, ordens_arr[self.linhas_psk]))
            self.real_psk = cvx.Parameter((self.linhas_psk.size, 2 * num_antenas))
            self.imag_psk = cvx.Parameter((self.linhas_psk.size, 2 * num_antenas))
            restricoes.append(
                cvx.multiply(tangentes, self.real_psk @ self.z) - cvx.abs(self.imag_psk @ self.z) >= self.t
            )
        if self.linhas_bpsk.size:
            self.real_bpsk = cvx.Parameter((self.linhas_bpsk.size, 2 * num_antenas))
            restricoes.append(self.real_bpsk @ self.z >= self.t)

        self.problema = cvx.Problem(cvx.Maximize(self.t), restricoes)

    def Resolver(self, rotacionada: np.ndarray, potencia: float, tol: float, max_iter: int):
        # r̃ = a x com a = conj(s)·h^H; separa em blocos reais
        real = np.hstack([rotacionada.real, -rotacionada.imag])
        imag = np.hstack([rotacionada.imag, rotacionada.real])
        self.raiz_potencia.value = float(np.sqrt(potencia))
        if self.real_psk is not None:
            self.real_psk.value = real[self.linhas_psk]
            self.imag_psk.value = imag[self.linhas_psk]
        if self.real_bpsk is not None:
            self.real_bpsk.value = real[self.linhas_bpsk]

        try:
            self.problema.solve(
                solver=cvx.CLARABEL,
                tol_gap_abs=tol, tol_gap_rel=tol, tol_feas=tol,
                max_iter=max_iter,
            )
        except cvx.error.SolverError as e:
            raise SolverNaoConvergiuErro("CI-SLP: falha do solver.", {'erro': str(e)}) from e

        status = self.problema.status
        diagnostico = {
            'status': status,
            'iteracoes': getattr(self.problema.solver_stats, 'num_iters', None),
            'margem': self.problema.value,
        }
        if status == cvx.OPTIMAL_INACCURATE:
            LogService.Warning("BaselineEngine", f"CI-SLP convergiu com baixa precisão: {diagnostico}")
        elif status != cvx.OPTIMAL:
            raise SolverNaoConvergiuErro("CI-SLP não convergiu.", diagnostico)
        return np.asarray(self.z.value, dtype=np.float64), float(self.t.value)


class BaselineEngine:

    # Um programa compilado por (N_t, ordens); cada processo do joblib tem o seu
    _programas: dict[tuple, _ProgramaCi] = {}

    # ─────────────────────────────────────────────────────────────────────────
    # ZERO-FORCING
    # ─────────────────────────────────────────────────────────────────────────

    @staticmethod
    def PrecodificarZFLote(matrizes: np.ndarray, simbolos: np.ndarray, potencia: float) -> np.ndarray:
        """matrizes [n, N_t, K], simbolos [n, K] → x [n, N_t] com Hᴴx = c·s e ‖x‖² = P."""
        num_antenas, num_usuarios = matrizes.shape[-2:]
        if num_usuarios > num_antenas:
            raise MatrizSingularErro(f"ZF exige K ≤ N_t (K={num_usuarios}, N_t={num_antenas}).")
        if np.any(np.linalg.matrix_rank(matrizes) < num_usuarios):
            raise MatrizSingularErro("Hᴴ sem posto completo de linhas: zero-forcing indefinido.")

        gram = np.conj(np.swapaxes(matrizes, -1, -2)) @ matrizes           # HᴴH [n, K, K]
        try:
            coeficientes = np.linalg.solve(gram, simbolos[..., np.newaxis])  # (HᴴH)⁻¹ s
        except np.linalg.LinAlgError as e:
            raise MatrizSingularErro(f"HᴴH singular: {e}") from e

        x = (matrizes @ coeficientes)[..., 0]
        normas = np.linalg.norm(x, axis=-1, keepdims=True)
        return x * (np.sqrt(potencia) / normas)

    @classmethod
    def PrecodificarZF(cls, canal: ChannelRealization, simbolos: SymbolVector, potencia: float) -> PrecodedSignal:
        s = np.asarray(simbolos.Simbolos, dtype=np.complex128)
        if s.shape != (canal.NumUsuarios,):
            raise DimensaoIncompativelErro(f"Esperados {canal.NumUsuarios} símbolos, recebidos {s.shape}.")
        if potencia <= 0:
            raise ConfiguracaoInvalidaErro(f"Orçamento de potência deve ser > 0 (P={potencia}).")
        x = cls.PrecodificarZFLote(canal.Matriz[np.newaxis], s[np.newaxis], potencia)[0]
        return PrecodedSignal(X=x)

    # ─────────────────────────────────────────────────────────────────────────
    # CI-SLP
    # ─────────────────────────────────────────────────────────────────────────

    @classmethod
    def _programa(cls, num_antenas: int, ordens: tuple[int, ...]) -> _ProgramaCi:
        chave = (num_antenas, tuple(int(m) for m in ordens))
        if chave not in cls._programas:
            cls._programas[chave] = _ProgramaCi(*chave)
        return cls._programas[chave]

    @classmethod
    def ResolverCiSlp(
        cls,
        matriz: np.ndarray,
        simbolos: np.ndarray,
        ordens: tuple[int, ...],
        potencia: float,
        tol: float = 1e-6,
        max_iter: int = 200,
    ) -> tuple[np.ndarray, float]:
        """Devolve (x, t*) para um slot. x é reescalado se exceder P por imprecisão do solver."""
        if potencia <= 0:
            raise ConfiguracaoInvalidaErro(f"Orçamento de potência deve ser > 0 (P={potencia}).")
        num_antenas, num_usuarios = matriz.shape
        if len(ordens) != num_usuarios or simbolos.shape != (num_usuarios,):
            raise DimensaoIncompativelErro(
                f"CI-SLP: H {matriz.shape}, {simbolos.shape[0]} símbolos, {len(ordens)} ordens."
            )

        rotacionada = np.conj(simbolos)[:, np.newaxis] * np.conj(matriz.T)   # [K, N_t]
        z, margem = cls._programa(num_antenas, ordens).Resolver(rotacionada, potencia, tol, max_iter)
        x = z[:num_antenas] + 1j * z[num_antenas:]

        energia = float(np.vdot(x, x).real)
        if energia > potencia:
            x = x * np.sqrt(potencia / energia)
        return x, margem

    @classmethod
    def PrecodificarCiSlp(
        cls,
        canal: ChannelRealization,
        simbolos: SymbolVector,
        ordens: ModOrderCombo,
        potencia: float,
        tol: float = 1e-6,
        max_iter: int = 200,
    ) -> PrecodedSignal:
        x, _ = cls.ResolverCiSlp(
            canal.Matriz, np.asarray(simbolos.Simbolos, dtype=np.complex128), ordens.Ordens, potencia, tol, max_iter
        )
        return PrecodedSignal(X=x)

    @classmethod
    def PrecodificarCiSlpLote(cls, matrizes, simbolos, ordens, potencia, tol=1e-6, max_iter=200) -> np.ndarray:
        """Um programa por slot; ordens [n, K]."""
        return np.stack([
            cls.ResolverCiSlp(matrizes[i], simbolos[i], tuple(ordens[i]), potencia, tol, max_iter)[0]
            for i in range(matrizes.shape[0])
        ])

    @staticmethod
    def MargemSeguranca(matriz: np.ndarray, x: np.ndarray, simbolos: np.ndarray, ordens) -> np.ndarray:
        """Margem construtiva por usuário para qualquer x (mesma métrica maximizada pelo CI-SLP)."""
        rotacionado = (np.conj(matriz.T) @ x) * np.conj(simbolos)
        ordens = np.asarray(ordens)
        tangentes = np.tan(np.pi / np.power(2.0, ordens))
        margens = rotacionado.real * tangentes - np.abs(rotacionado.imag)
        return np.where(ordens == 1, rotacionado.real, margens)

    # ─────────────────────────────────────────────────────────────────────────
    # DETECTOR DE FASE
    # ─────────────────────────────────────────────────────────────────────────

    @staticmethod
    def DetectarFasePskLote(recebidos: np.ndarray, ordens: np.ndarray) -> np.ndarray:
        """recebidos [...], ordens [...] → mensagens 1-indexadas (r = 0 → 1)."""
        recebidos = np.asarray(recebidos)
        ordens = np.broadcast_to(np.asarray(ordens), recebidos.shape)
        if np.any(ordens < 1):
            raise ForaDoAlfabetoErro("Ordem de modulação deve ser ≥ 1.")

        tamanho_max = int(np.power(2, ordens.max())) if ordens.size else 1
        candidatos = np.arange(1, tamanho_max + 1)
        fases = ModulationEngine.FasePsk(candidatos, ordens[..., np.newaxis])
        distancias = DistanciaAngular(np.angle(recebidos)[..., np.newaxis], fases)
        distancias = np.where(candidatos <= np.power(2, ordens)[..., np.newaxis], distancias, np.inf)

        minimo = distancias.min(axis=-1, keepdims=True)
        # primeiro candidato dentro da tolerância de empate
        mensagens = np.argmax(distancias <= minimo + TOLERANCIA_EMPATE, axis=-1) + 1
        return np.where(recebidos == 0, 1, mensagens)

    @classmethod
    def DetectarFasePsk(cls, r: complex, ordem: int) -> int:
        return int(cls.DetectarFasePskLote(np.asarray([r]), np.asarray([ordem]))[0])
