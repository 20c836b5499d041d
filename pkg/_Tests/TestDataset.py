"""Geração e persistência do dataset de canais."""

from dataclasses import replace

import numpy as np
import pytest

from Services.DatasetService import DatasetService
from Services.Excecoes import ArtefatoAusenteErro, ConfiguracaoInvalidaErro
from Utils.Arquivos import CarregarJson, HashArquivo


class TestGeracao:

    def test_particoes_contiguas(self, cfg_pequeno, tc_pequeno):
        dataset = DatasetService.GerarDataset(cfg_pequeno, tc_pequeno, semente=1)
        assert len(dataset) == 64
        assert dataset.Particoes == {'treino': (0, 48), 'teste': (48, 56), 'validacao': (56, 64)}
        assert len(dataset.Particao('teste')) == 8

    def test_semente_padrao_do_treino(self, cfg_pequeno, tc_pequeno):
        a = DatasetService.GerarDataset(cfg_pequeno, tc_pequeno)
        b = DatasetService.GerarDataset(cfg_pequeno, tc_pequeno, semente=tc_pequeno.semente)
        np.testing.assert_array_equal(a.Matrizes, b.Matrizes)

    def test_menos_canais_que_as_particoes(self, cfg_pequeno, tc_pequeno):
        with pytest.raises(ConfiguracaoInvalidaErro):
            DatasetService.GerarDataset(cfg_pequeno, tc_pequeno, quantidade=10)

    def test_particao_inexistente(self, cfg_pequeno, tc_pequeno):
        dataset = DatasetService.GerarDataset(cfg_pequeno, tc_pequeno, semente=1)
        with pytest.raises(KeyError):
            dataset.Particao('producao')


class TestPersistencia:

    def test_mesma_semente_mesmos_bytes(self, cfg_pequeno, tc_pequeno, tmp_path):
        a = DatasetService.SalvarDataset(DatasetService.GerarDataset(cfg_pequeno, tc_pequeno, semente=5), tmp_path / "a", cfg_pequeno)
        b = DatasetService.SalvarDataset(DatasetService.GerarDataset(cfg_pequeno, tc_pequeno, semente=5), tmp_path / "b", cfg_pequeno)
        assert a.suffix == '.npz'
        assert HashArquivo(a) == HashArquivo(b)
        assert HashArquivo(a.with_suffix('.json')) == HashArquivo(b.with_suffix('.json'))

    def test_ida_e_volta(self, cfg_pequeno, tc_pequeno, tmp_path):
        original = DatasetService.GerarDataset(cfg_pequeno, tc_pequeno, semente=5)
        arquivo = DatasetService.SalvarDataset(original, tmp_path / "canais.npz", cfg_pequeno)
        carregado = DatasetService.CarregarDataset(arquivo, cfg_pequeno)
        np.testing.assert_array_equal(carregado.Matrizes, original.Matrizes)
        np.testing.assert_array_equal(carregado.Ganhos, original.Ganhos)
        assert carregado.Particoes == original.Particoes
        assert carregado.Semente == 5
        assert CarregarJson(arquivo.with_suffix('.json'))['hash'] == HashArquivo(arquivo)

    def test_cenario_diferente(self, cfg_pequeno, tc_pequeno, tmp_path):
        arquivo = DatasetService.SalvarDataset(
            DatasetService.GerarDataset(cfg_pequeno, tc_pequeno, semente=5), tmp_path / "canais", cfg_pequeno
        )
        with pytest.raises(ConfiguracaoInvalidaErro):
            DatasetService.CarregarDataset(arquivo, replace(cfg_pequeno, num_antenas=8))

    def test_arquivo_ausente(self, tmp_path, cfg_pequeno):
        with pytest.raises(ArtefatoAusenteErro):
            DatasetService.CarregarDataset(tmp_path / "nada.npz", cfg_pequeno)
