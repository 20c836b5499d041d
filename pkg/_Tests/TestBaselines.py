"""ZF, CI-SLP e o detector de fase."""

from itertools import product

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from Models.Canal import ChannelRealization
from Models.Modulacao import ModOrderCombo, SymbolVector
from Services.Excecoes import ConfiguracaoInvalidaErro, MatrizSingularErro
from Services.Logic.BaselineEngine import BaselineEngine
from Services.Logic.ChannelEngine import ChannelEngine


def _canal(matriz):
    K = matriz.shape[1]
    return ChannelRealization(Matriz=matriz, Angulos=np.zeros(K), Ganhos=np.ones(K, dtype=np.complex128))


class TestZeroForcing:

    def test_anula_interferencia_e_respeita_potencia(self, canais_pequenos):
        canal = canais_pequenos[0]
        s = np.array([1j, -1.0])
        x = BaselineEngine.PrecodificarZF(canal, SymbolVector(Simbolos=s), 2.0).X
        assert np.vdot(x, x).real == pytest.approx(2.0)
        r = canal.Matriz.conj().T @ x
        escala = r / s
        np.testing.assert_allclose(escala.imag, 0.0, atol=1e-10)
        assert escala.real[0] == pytest.approx(escala.real[1]) and escala.real[0] > 0

    def test_lote_igual_ao_escalar(self, canais_pequenos):
        rng = np.random.default_rng(0)
        s = np.exp(1j * np.pi / 2 * rng.integers(1, 5, size=(len(canais_pequenos), 2)))
        lote = BaselineEngine.PrecodificarZFLote(canais_pequenos.Matrizes, s, 1.0)
        for i in range(len(canais_pequenos)):
            np.testing.assert_allclose(
                lote[i], BaselineEngine.PrecodificarZF(canais_pequenos[i], SymbolVector(Simbolos=s[i]), 1.0).X
            )

    def test_canal_sem_posto_completo(self):
        h = ChannelEngine.VetorDirecional(10.0, 4)
        canal = _canal(np.stack([h, 2 * h], axis=1))
        with pytest.raises(MatrizSingularErro):
            BaselineEngine.PrecodificarZF(canal, SymbolVector(Simbolos=np.array([1.0, 1j])), 1.0)

    def test_mais_usuarios_que_antenas(self):
        rng = np.random.default_rng(1)
        canal = _canal(rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3)))
        with pytest.raises(MatrizSingularErro):
            BaselineEngine.PrecodificarZF(canal, SymbolVector(Simbolos=np.ones(3, dtype=complex)), 1.0)

    def test_potencia_invalida(self, canais_pequenos):
        with pytest.raises(ConfiguracaoInvalidaErro):
            BaselineEngine.PrecodificarZF(canais_pequenos[0], SymbolVector(Simbolos=np.array([1.0, 1.0])), 0.0)


class TestCiSlp:

    @pytest.mark.parametrize("ordem", [1, 2, 3])
    def test_usuario_unico_e_filtro_casado(self, ordem):
        rng = np.random.default_rng(ordem)
        h = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        s = np.exp(2j * np.pi / 2 ** ordem)
        x, margem = BaselineEngine.ResolverCiSlp(h[:, np.newaxis], np.array([s]), (ordem,), 1.0, tol=1e-9)
        # solução fechada: x = √P · h s / ‖h‖
        esperado = h * s / np.linalg.norm(h)
        np.testing.assert_allclose(x, esperado, atol=1e-4)
        fator = 1.0 if ordem == 1 else np.tan(np.pi / 2 ** ordem)
        assert margem == pytest.approx(fator * np.linalg.norm(h), rel=1e-5)

    def test_restricoes_satisfeitas(self, canais_pequenos):
        canal = canais_pequenos[3]
        s = np.array([np.exp(1j * np.pi / 2), np.exp(1j * np.pi / 4)])
        ordens = (2, 3)
        x, margem = BaselineEngine.ResolverCiSlp(canal.Matriz, s, ordens, 1.0)
        assert np.vdot(x, x).real <= 1.0 + 1e-9
        margens = BaselineEngine.MargemSeguranca(canal.Matriz, x, s, ordens)
        assert np.all(margens >= margem - 1e-5)
        assert margem > 0

    def test_margem_cresce_com_a_potencia(self, canais_pequenos):
        canal = canais_pequenos[3]
        s = np.array([1j, np.exp(1j * np.pi / 4)])
        potencias = [0.25, 0.5, 1.0, 2.0, 4.0]
        margens = [
            BaselineEngine.ResolverCiSlp(canal.Matriz, s, (2, 3), p, tol=1e-9)[1] for p in potencias
        ]
        assert all(b >= a - 1e-6 for a, b in zip(margens, margens[1:]))
        # restrições homogêneas em x: a margem escala com √P
        assert margens[-1] == pytest.approx(4.0 * margens[0], rel=1e-4)

    def test_otimo_nao_perde_para_o_zf(self, canais_pequenos):
        for i in range(5):
            canal = canais_pequenos[i]
            s = np.array([1j, -1.0])
            _, margem = BaselineEngine.ResolverCiSlp(canal.Matriz, s, (2, 2), 1.0)
            x_zf = BaselineEngine.PrecodificarZF(canal, SymbolVector(Simbolos=s), 1.0).X
            assert BaselineEngine.MargemSeguranca(canal.Matriz, x_zf, s, (2, 2)).min() <= margem + 1e-5

    def test_grade_nao_supera_o_solver(self):
        """Oráculo por força bruta em N_t = 2, K = 2 (z ∈ R⁴)."""
        rng = np.random.default_rng(7)
        H = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        s = np.array([1j, np.exp(1j * np.pi / 4)])
        ordens = (2, 3)
        _, otimo = BaselineEngine.ResolverCiSlp(H, s, ordens, 1.0, tol=1e-9)

        pontos = 25
        eixo = np.linspace(-1.0, 1.0, pontos)
        z = np.array(list(product(eixo, repeat=4)))
        normas = np.linalg.norm(z, axis=1, keepdims=True)
        z = np.where(normas > 1.0, z / normas, z)
        x = z[:, :2] + 1j * z[:, 2:]

        rotacionado = (x @ H.conj()) * np.conj(s)
        tangentes = np.tan(np.pi / np.power(2.0, ordens))
        margens = (rotacionado.real * tangentes - np.abs(rotacionado.imag)).min(axis=1)
        melhor_grade = margens.max()

        # Lipschitz de cada restrição em z: (tan + 1)·‖h_k‖; espaçamento da grade cobre raio h
        espacamento = 2.0 / (pontos - 1)
        lipschitz = max((t + 1) * np.linalg.norm(H[:, k]) for k, t in enumerate(tangentes))
        assert melhor_grade <= otimo + 1e-6
        assert otimo - melhor_grade <= lipschitz * espacamento

    def test_programa_reaproveitado_por_ordens(self, canais_pequenos):
        canal = canais_pequenos[0]
        BaselineEngine.ResolverCiSlp(canal.Matriz, np.array([1j, 1j]), (2, 2), 1.0)
        programa = BaselineEngine._programa(4, (2, 2))
        BaselineEngine.ResolverCiSlp(canais_pequenos[1].Matriz, np.array([-1, 1j]), (2, 2), 1.0)
        assert BaselineEngine._programa(4, (2, 2)) is programa

    def test_precodificar_com_combo(self, canais_pequenos):
        combo = ModOrderCombo(Ordens=(1, 2), Indice=0)
        simbolos = SymbolVector(Simbolos=np.array([1.0, 1j]))
        sinal = BaselineEngine.PrecodificarCiSlp(canais_pequenos[0], simbolos, combo, 1.0)
        assert sinal.Potencia <= 1.0 + 1e-9


class TestDetectorFase:

    @pytest.mark.parametrize("ordem", [1, 2, 3])
    def test_simbolos_nominais(self, ordem):
        for m in range(1, 2 ** ordem + 1):
            r = 0.7 * np.exp(2j * np.pi * m / 2 ** ordem)
            assert BaselineEngine.DetectarFasePsk(r, ordem) == m

    def test_empate_fica_com_menor_mensagem(self):
        # π/4 equidista de m = 1 (π/2) e m = 4 (0)
        assert BaselineEngine.DetectarFasePsk(np.exp(1j * np.pi / 4), 2) == 1

    def test_recebido_nulo(self):
        assert BaselineEngine.DetectarFasePsk(0j, 3) == 1

    def test_lote_com_ordens_mistas(self):
        recebidos = np.array([[-1.0 + 0.1j, 1j], [0.1 - 1j, np.exp(1j * np.pi / 4)]])
        ordens = np.array([[1, 2], [2, 3]])
        np.testing.assert_array_equal(BaselineEngine.DetectarFasePskLote(recebidos, ordens), [[1, 1], [3, 1]])

    @settings(max_examples=200, deadline=None)
    @given(
        fase=st.floats(-np.pi, np.pi),
        modulo=st.floats(1e-3, 1e3),
        escala=st.floats(1e-6, 1e6),
        ordem=st.sampled_from([1, 2, 3]),
    )
    def test_invariante_a_escala_positiva(self, fase, modulo, escala, ordem):
        # longe das fronteiras de decisão π(2m+1)/2^M, onde o arredondamento decide
        passo = 2 * np.pi / 2 ** ordem
        resto = (fase - passo / 2) % passo
        assume(min(resto, passo - resto) > 1e-6)
        r = modulo * np.exp(1j * fase)
        assert BaselineEngine.DetectarFasePsk(escala * r, ordem) == BaselineEngine.DetectarFasePsk(r, ordem)
