"""Modelo de canal de espalhamento limitado e downlink ruidoso."""

import numpy as np
import pytest

from Services.Excecoes import ConfiguracaoInvalidaErro, DimensaoIncompativelErro
from Services.Logic.ChannelEngine import ChannelEngine
from Services.Logic.LinkConfig import SystemConfig


class TestVetorDirecional:

    def test_broadside_e_vetor_de_uns(self):
        np.testing.assert_allclose(ChannelEngine.VetorDirecional(0.0, 8), np.ones(8), atol=1e-12)

    def test_modulo_unitario_e_progressao_de_fase(self):
        a = ChannelEngine.VetorDirecional(30.0, 16)
        np.testing.assert_allclose(np.abs(a), 1.0, atol=1e-12)
        # sin 30° = 1/2 → passo de fase π/2 entre antenas vizinhas
        np.testing.assert_allclose(a[1:] / a[:-1], np.exp(1j * np.pi / 2), atol=1e-12)

    def test_tres_antenas_a_trinta_graus(self):
        np.testing.assert_allclose(ChannelEngine.VetorDirecional(30.0, 3), [1.0, 1j, -1.0], atol=1e-12)

    def test_antenas_invalidas(self):
        with pytest.raises(DimensaoIncompativelErro):
            ChannelEngine.VetorDirecional(10.0, 0)


class TestGeracao:

    def test_forma_e_reprodutibilidade(self, cfg_pequeno):
        a = ChannelEngine.GerarCanais(cfg_pequeno, 50, semente=5)
        b = ChannelEngine.GerarCanais(cfg_pequeno, 50, semente=5)
        assert a.Matrizes.shape == (50, 4, 2)
        np.testing.assert_array_equal(a.Matrizes, b.Matrizes)
        assert not np.array_equal(a.Matrizes, ChannelEngine.GerarCanais(cfg_pequeno, 50, semente=6).Matrizes)

    def test_semente_inteira_do_numpy_fica_registrada(self, cfg_pequeno):
        canais = ChannelEngine.GerarCanais(cfg_pequeno, 3, semente=np.int64(5))
        assert canais.Semente == 5
        assert isinstance(canais.Semente, int)
        np.testing.assert_array_equal(canais.Matrizes, ChannelEngine.GerarCanais(cfg_pequeno, 3, semente=5).Matrizes)
        assert ChannelEngine.GerarCanais(cfg_pequeno, 3, semente=np.random.default_rng(5)).Semente == 0

    def test_angulos_dentro_do_setor(self, cfg_pequeno):
        canais = ChannelEngine.GerarCanais(cfg_pequeno, 2000, semente=1)
        centros = np.asarray(cfg_pequeno.angulos_centrais)
        assert np.all(np.abs(canais.Angulos - centros) <= cfg_pequeno.espalhamento_angular + 1e-9)

    def test_coluna_e_ganho_vezes_steering(self, cfg_pequeno):
        canal = ChannelEngine.GerarCanais(cfg_pequeno, 3, semente=2)[1]
        for k in range(canal.NumUsuarios):
            esperado = canal.Ganhos[k] * ChannelEngine.VetorDirecional(canal.Angulos[k], canal.NumAntenas)
            np.testing.assert_allclose(canal.Coluna(k), esperado, atol=1e-12)

    def test_ganho_complexo_de_variancia_unitaria(self, cfg_pequeno):
        canais = ChannelEngine.GerarCanais(cfg_pequeno, 20000, semente=3)
        assert np.mean(np.abs(canais.Ganhos) ** 2) == pytest.approx(1.0, abs=0.05)

    def test_modo_fixo(self, cfg_pequeno):
        canais = ChannelEngine.GerarCanais(cfg_pequeno, 4, semente=9, modo_fixo=True)
        np.testing.assert_array_equal(canais.Angulos, np.tile(cfg_pequeno.angulos_centrais, (4, 1)))
        np.testing.assert_array_equal(canais.Matrizes[0], canais.Matrizes[3])

    def test_ganho_normalizado(self):
        cfg = SystemConfig(num_antenas=8, num_usuarios=2, ordem_maxima=2, taxa_minima=2,
                           angulos_centrais=(0.0, 40.0), normalizar_ganho=True)
        canais = ChannelEngine.GerarCanais(cfg, 10, semente=0)
        np.testing.assert_allclose(np.linalg.norm(canais.Matrizes, axis=1) ** 2, 8.0, rtol=1e-12)

    def test_quantidade_invalida(self, cfg_pequeno):
        with pytest.raises(ConfiguracaoInvalidaErro):
            ChannelEngine.GerarCanais(cfg_pequeno, 0, semente=0)


class TestDownlink:

    def test_sem_ruido_e_hermitiano_vezes_x(self, canais_pequenos):
        canal = canais_pequenos[0]
        x = np.array([1.0, 1j, -0.5, 0.25 - 0.5j])
        np.testing.assert_allclose(ChannelEngine.AplicarCanal(canal, x, 0.0, None), canal.Matriz.conj().T @ x)

    def test_linear_sem_ruido(self, canais_pequenos):
        canal = canais_pequenos[5]
        rng = np.random.default_rng(8)
        x1, x2 = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
        a, b = 0.7 - 1.2j, -2.5 + 0.3j
        r1 = ChannelEngine.AplicarCanal(canal, x1, 0.0, None)
        r2 = ChannelEngine.AplicarCanal(canal, x2, 0.0, None)
        np.testing.assert_allclose(ChannelEngine.AplicarCanal(canal, a * x1 + b * x2, 0.0, None), a * r1 + b * r2, atol=1e-12)

    def test_variancia_do_ruido(self, canais_pequenos):
        canal = canais_pequenos[0]
        x = np.zeros(4, dtype=np.complex128)
        rng = np.random.default_rng(4)
        amostras = np.array([ChannelEngine.AplicarCanal(canal, x, 0.5, rng) for _ in range(20000)])
        assert np.var(amostras.real) == pytest.approx(0.25, rel=0.05)
        assert np.var(amostras.imag) == pytest.approx(0.25, rel=0.05)

    def test_dimensao_de_x(self, canais_pequenos):
        with pytest.raises(DimensaoIncompativelErro):
            ChannelEngine.AplicarCanal(canais_pequenos[0], np.ones(3), 0.1, 0)

    def test_lote_sem_ruido_igual_ao_escalar(self, canais_pequenos):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((len(canais_pequenos), 4)) + 1j * rng.standard_normal((len(canais_pequenos), 4))
        lote = ChannelEngine.AplicarCanalLote(canais_pequenos.Matrizes, x, 0.0, rng)
        for i in range(len(canais_pequenos)):
            np.testing.assert_allclose(lote[i], ChannelEngine.AplicarCanal(canais_pequenos[i], x[i], 0.0, None))

    @pytest.mark.parametrize("snr_db, esperado", [(0.0, 1.0), (10.0, 0.1), (20.0, 0.01)])
    def test_snr_para_variancia(self, snr_db, esperado):
        assert ChannelEngine.SnrParaVarianciaRuido(snr_db, 1.0) == pytest.approx(esperado)

    def test_snr_infinito_sem_ruido(self):
        assert ChannelEngine.SnrParaVarianciaRuido(float('inf'), 1.0) == 0.0
