"""MOP-NN: saída no simplex, top-k e compatibilidade com o cenário."""

import copy
from dataclasses import replace

import numpy as np
import pytest

from Services.Excecoes import CheckpointIncompativelErro, ConfiguracaoInvalidaErro, DimensaoIncompativelErro
from Services.Logic.ChannelEngine import ChannelEngine
from Services.Logic.MopNetwork import MopNetwork


@pytest.fixture
def mop(cfg_pequeno):
    return MopNetwork.ConstruirMop(cfg_pequeno, num_combinacoes=4, semente=5)


class TestInferencia:

    def test_entrada_amplitude_e_fase(self, canais_pequenos):
        entrada = MopNetwork.EntradaLote(canais_pequenos.Matrizes)
        assert entrada.shape == (16, 2, 2, 4)
        np.testing.assert_allclose(entrada[:, 1], np.angle(canais_pequenos.Matrizes).transpose(0, 2, 1))

    def test_probabilidades_no_simplex(self, mop, canais_pequenos):
        p = MopNetwork.ProbabilidadesLote(mop, canais_pequenos.Matrizes)
        assert p.shape == (16, 4)
        assert np.all(p >= 0)
        np.testing.assert_allclose(p.sum(axis=1), 1.0, atol=1e-6)

    def test_inferencia_deterministica(self, mop, canais_pequenos):
        # dropout desligado fora do treino
        a = MopNetwork.ProbabilidadesLote(mop, canais_pequenos.Matrizes)
        b = MopNetwork.ProbabilidadesLote(mop, canais_pequenos.Matrizes)
        np.testing.assert_array_equal(a, b)

    def test_predizer_ordens(self, mop, canais_pequenos):
        saida = MopNetwork.PredizerOrdens(mop, canais_pequenos[0], 3)
        assert len(saida.TopK) == 3
        assert saida.Probabilidades[saida.TopK[0]] == saida.Probabilidades.max()

    def test_canal_de_outra_dimensao(self, mop, cfg_pequeno):
        outro = replace(cfg_pequeno, num_antenas=8)
        canal = ChannelEngine.GerarCanais(outro, 1, semente=0)[0]
        with pytest.raises(DimensaoIncompativelErro):
            MopNetwork.PredizerOrdens(mop, canal, 1)


class TestTopK:

    def test_ordem_decrescente(self):
        p = np.array([0.1, 0.4, 0.2, 0.3])
        np.testing.assert_array_equal(MopNetwork.TopK(p, 3), [1, 3, 2])

    def test_empate_fica_com_menor_indice(self):
        p = np.array([0.3, 0.2, 0.3, 0.2])
        np.testing.assert_array_equal(MopNetwork.TopK(p, 4), [0, 2, 1, 3])

    def test_lote(self):
        p = np.array([[0.5, 0.3, 0.2], [0.1, 0.1, 0.8]])
        np.testing.assert_array_equal(MopNetwork.TopK(p, 2), [[0, 1], [2, 0]])

    @pytest.mark.parametrize("k", [0, 5])
    def test_k_fora_da_faixa(self, k):
        with pytest.raises(ConfiguracaoInvalidaErro):
            MopNetwork.TopK(np.full(4, 0.25), k)


class TestManifesto:

    def test_modulo_do_manifesto(self, mop):
        modulo = MopNetwork.ModuloDeManifesto(mop.Manifesto)
        modulo.load_state_dict(mop.Modulo.state_dict(), strict=True)

    def test_manifesto_de_outra_rede(self, mop):
        manifesto = copy.deepcopy(mop.Manifesto)
        manifesto['tipo'] = 'slpd'
        with pytest.raises(CheckpointIncompativelErro):
            MopNetwork.ModuloDeManifesto(manifesto)

    def test_saida_diferente_de_n_m(self, mop):
        manifesto = copy.deepcopy(mop.Manifesto)
        manifesto['num_combinacoes'] = 7
        with pytest.raises(CheckpointIncompativelErro):
            MopNetwork.ValidarManifesto(manifesto)

    def test_compatibilidade(self, mop, cfg_pequeno):
        MopNetwork.ValidarCompatibilidade(mop, cfg_pequeno)
        with pytest.raises(CheckpointIncompativelErro):
            MopNetwork.ValidarCompatibilidade(mop, replace(cfg_pequeno, taxa_minima=3))

    def test_n_m_invalido(self, cfg_pequeno):
        with pytest.raises(ConfiguracaoInvalidaErro):
            MopNetwork.ConstruirMop(cfg_pequeno, 0, semente=0)
