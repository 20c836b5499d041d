"""Mapeamento PSK, enumeração de combinações e rótulos one-hot."""

from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from Services.Excecoes import ConfiguracaoInvalidaErro, ForaDoAlfabetoErro
from Services.Logic.ModulationEngine import ModulationEngine


class TestMapeamentoPsk:

    @pytest.mark.parametrize("ordem", [1, 2, 3, 4])
    def test_simbolos_unitarios_e_distintos(self, ordem):
        simbolos = [ModulationEngine.MapearPsk(m, ordem) for m in range(1, 2 ** ordem + 1)]
        np.testing.assert_allclose(np.abs(simbolos), 1.0, atol=1e-12)
        assert len({(round(s.real, 9), round(s.imag, 9)) for s in simbolos}) == 2 ** ordem

    @pytest.mark.parametrize("ordem", [1, 2, 3])
    def test_ultima_mensagem_cai_em_fase_zero(self, ordem):
        assert ModulationEngine.MapearPsk(2 ** ordem, ordem) == pytest.approx(1.0 + 0j, abs=1e-12)

    def test_qpsk_nominal(self):
        esperado = [1j, -1, -1j, 1]
        obtido = [ModulationEngine.MapearPsk(m, 2) for m in range(1, 5)]
        np.testing.assert_allclose(obtido, esperado, atol=1e-12)

    @pytest.mark.parametrize("m, ordem", [(0, 2), (5, 2), (3, 1), (1, 0)])
    def test_fora_do_alfabeto(self, m, ordem):
        with pytest.raises(ForaDoAlfabetoErro):
            ModulationEngine.MapearPsk(m, ordem)

    def test_lote_igual_ao_escalar(self):
        mensagens = np.array([[1, 4], [8, 2], [3, 1]])
        ordens = np.array([[2, 2], [3, 1], [3, 1]])
        lote = ModulationEngine.MapearPskLote(mensagens, ordens)
        escalar = [[ModulationEngine.MapearPsk(int(m), int(o)) for m, o in zip(lm, lo)] for lm, lo in zip(mensagens, ordens)]
        np.testing.assert_allclose(lote, escalar, atol=1e-12)


class TestEnumeracao:

    def test_cenario_padrao_tem_50_combinacoes(self):
        combos = ModulationEngine.EnumerarCombinacoes(4, 3, 8)
        assert len(combos) == 50
        assert combos[0].Ordens == (1, 1, 3, 3)
        assert combos[-1].Ordens == (3, 3, 3, 3)
        assert [c.Indice for c in combos] == list(range(50))

    def test_ordem_lexicografica_e_taxa(self):
        combos = ModulationEngine.EnumerarCombinacoes(4, 3, 8)
        ordens = [c.Ordens for c in combos]
        assert ordens == sorted(ordens)
        assert all(c.TaxaTotal >= 8 for c in combos)

    def test_inviavel_devolve_lista_vazia(self):
        assert ModulationEngine.EnumerarCombinacoes(2, 2, 5) == []

    def test_parametros_invalidos(self):
        with pytest.raises(ConfiguracaoInvalidaErro):
            ModulationEngine.EnumerarCombinacoes(0, 3, 2)

    @settings(max_examples=60, deadline=None)
    @given(
        K=st.integers(min_value=1, max_value=5),
        B=st.integers(min_value=1, max_value=4),
        R=st.integers(min_value=0, max_value=20),
    )
    def test_contagem_bate_com_forca_bruta(self, K, B, R):
        esperado = sum(1 for ordens in product(range(1, B + 1), repeat=K) if sum(ordens) >= R)
        combos = ModulationEngine.EnumerarCombinacoes(K, B, R)
        assert len(combos) == esperado
        assert len({c.Ordens for c in combos}) == esperado

    def test_matriz_de_ordens(self):
        combos = ModulationEngine.EnumerarCombinacoes(2, 2, 3)
        np.testing.assert_array_equal(ModulationEngine.MatrizOrdens(combos), [[1, 2], [2, 1], [2, 2]])


class TestRotulos:

    def test_one_hot_estendido(self):
        vetor = ModulationEngine.OneHotEstendido(3, 2, 3)
        np.testing.assert_array_equal(vetor, [0, 0, 1, 0, 0, 0, 0, 0])

    def test_one_hot_ordem_acima_da_maxima(self):
        with pytest.raises(ForaDoAlfabetoErro):
            ModulationEngine.OneHotEstendido(1, 4, 3)

    def test_lote_estendido(self):
        rotulos = ModulationEngine.RotulosEstendidosLote(np.array([[1, 2], [4, 1]]), 2)
        assert rotulos.shape == (2, 2, 4)
        np.testing.assert_array_equal(rotulos.argmax(axis=-1), [[0, 1], [3, 0]])
        np.testing.assert_array_equal(rotulos.sum(axis=-1), 1)


class TestFonteMensagens:

    def test_mensagens_dentro_do_alfabeto(self):
        rng = np.random.default_rng(0)
        ordens = np.tile([1, 2, 3], (5000, 1))
        mensagens = ModulationEngine.SortearMensagensLote(ordens, rng)
        assert mensagens.min() == 1
        np.testing.assert_array_equal(mensagens.max(axis=0), [2, 4, 8])

    def test_amostragem_reprodutivel(self):
        combo = ModulationEngine.EnumerarCombinacoes(4, 3, 8)[10]
        a = ModulationEngine.AmostrarMensagens(combo, 20, 3)
        b = ModulationEngine.AmostrarMensagens(combo, 20, 3)
        np.testing.assert_array_equal([lote.Mensagens for lote in a], [lote.Mensagens for lote in b])
        assert all(lote.Combo == combo for lote in a)

    @pytest.mark.parametrize("B, esperado", [(1, 0.5), (2, 0.25)])
    def test_frequencias_uniformes(self, B, esperado):
        # K = 2 usuários na ordem máxima (única combinação com R = K·B)
        combo = ModulationEngine.EnumerarCombinacoes(2, B, 2 * B)[0]
        assert combo.Ordens == (B, B)
        mensagens = np.stack([lote.Mensagens for lote in ModulationEngine.AmostrarMensagens(combo, 100_000, 5)])
        for usuario in range(2):
            frequencias = np.bincount(mensagens[:, usuario], minlength=2 ** B + 1)[1:] / len(mensagens)
            np.testing.assert_allclose(frequencias, esperado, atol=0.01)
