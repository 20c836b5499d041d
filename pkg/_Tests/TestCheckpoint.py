"""Checkpoints (manifesto + pesos) e rótulos do estágio II."""

from dataclasses import replace

import numpy as np
import pytest

from Models.Treino import MopLabelSet
from Services.CheckpointService import CheckpointService
from Services.Excecoes import ArtefatoAusenteErro, CheckpointIncompativelErro
from Services.Logic.MopNetwork import MopNetwork
from Services.Logic.SlpdNetwork import SlpdNetwork
from Utils.Arquivos import CarregarJson, HashArquivo, SalvarJson


@pytest.fixture
def slpd(cfg_pequeno):
    return SlpdNetwork.ConstruirSlpd(cfg_pequeno, semente=12)


class TestCheckpointRede:

    def test_ida_e_volta_preserva_as_previsoes(self, cfg_pequeno, slpd, canais_pequenos, tmp_path):
        arquivo = CheckpointService.SalvarCheckpoint(slpd, tmp_path / "slpd")
        assert arquivo.suffix == '.json'
        carregada = CheckpointService.CarregarCheckpoint(arquivo, cfg_pequeno)

        simbolos = np.tile(np.array([1j, -1.0]), (len(canais_pequenos), 1))
        np.testing.assert_array_equal(
            SlpdNetwork.PrecodificarLote(slpd, canais_pequenos.Matrizes, simbolos, 1.0),
            SlpdNetwork.PrecodificarLote(carregada, canais_pequenos.Matrizes, simbolos, 1.0),
        )

    def test_mop_ida_e_volta(self, cfg_pequeno, canais_pequenos, tmp_path):
        mop = MopNetwork.ConstruirMop(cfg_pequeno, 4, semente=1)
        carregada = CheckpointService.CarregarCheckpoint(
            CheckpointService.SalvarCheckpoint(mop, tmp_path / "mop.json"), cfg_pequeno
        )
        assert carregada.Tipo == 'mop'
        np.testing.assert_array_equal(
            MopNetwork.ProbabilidadesLote(mop, canais_pequenos.Matrizes),
            MopNetwork.ProbabilidadesLote(carregada, canais_pequenos.Matrizes),
        )

    def test_mesmos_pesos_mesmos_bytes(self, slpd, tmp_path):
        a = CheckpointService.SalvarCheckpoint(slpd, tmp_path / "a" / "slpd")
        b = CheckpointService.SalvarCheckpoint(slpd, tmp_path / "b" / "slpd")
        assert HashArquivo(a) == HashArquivo(b)
        assert HashArquivo(a.with_suffix('.npz')) == HashArquivo(b.with_suffix('.npz'))

    def test_arquivo_ausente(self, tmp_path):
        with pytest.raises(ArtefatoAusenteErro):
            CheckpointService.CarregarCheckpoint(tmp_path / "nada")

    def test_pesos_adulterados(self, slpd, tmp_path):
        arquivo = CheckpointService.SalvarCheckpoint(slpd, tmp_path / "slpd")
        pesos = arquivo.with_suffix('.npz')
        pesos.write_bytes(pesos.read_bytes() + b"\0")
        with pytest.raises(CheckpointIncompativelErro):
            CheckpointService.CarregarCheckpoint(arquivo)

    def test_formato_desconhecido(self, slpd, tmp_path):
        arquivo = CheckpointService.SalvarCheckpoint(slpd, tmp_path / "slpd")
        cabecalho = CarregarJson(arquivo)
        cabecalho['formato'] = 'outro'
        SalvarJson(arquivo, cabecalho)
        with pytest.raises(CheckpointIncompativelErro):
            CheckpointService.CarregarCheckpoint(arquivo)

    def test_cenario_incompativel(self, cfg_pequeno, slpd, tmp_path):
        arquivo = CheckpointService.SalvarCheckpoint(slpd, tmp_path / "slpd")
        with pytest.raises(CheckpointIncompativelErro):
            CheckpointService.CarregarCheckpoint(arquivo, replace(cfg_pequeno, num_antenas=8))

    def test_partes_separadas(self, cfg_pequeno, slpd, tmp_path):
        transmissor, decodificador = SlpdNetwork.Separar(slpd)
        CheckpointService.SalvarCheckpoint(transmissor, tmp_path / "tx")
        carregado = CheckpointService.CarregarCheckpoint(tmp_path / "tx.npz", cfg_pequeno)
        assert carregado.Tipo == 'transmissor'
        assert set(carregado.Pesos()) == set(transmissor.Pesos())


class TestRotulos:

    def test_ida_e_volta(self, tmp_path):
        rotulos = MopLabelSet(Rotulos=np.array([0, 3, 1], dtype=np.int32), Entropias=np.array([0.1, 0.5, 0.2]))
        arquivo = CheckpointService.SalvarRotulos(rotulos, tmp_path / "rotulos", {'semente': 3})
        carregados = CheckpointService.CarregarRotulos(arquivo, total_canais=3)
        np.testing.assert_array_equal(carregados.Rotulos, rotulos.Rotulos)
        np.testing.assert_array_equal(carregados.Entropias, rotulos.Entropias)
        assert CarregarJson(arquivo.with_suffix('.json'))['semente'] == 3

    def test_quantidade_diferente_do_dataset(self, tmp_path):
        rotulos = MopLabelSet(Rotulos=np.zeros(5, dtype=np.int32), Entropias=np.zeros(5))
        arquivo = CheckpointService.SalvarRotulos(rotulos, tmp_path / "rotulos")
        with pytest.raises(ArtefatoAusenteErro):
            CheckpointService.CarregarRotulos(arquivo, total_canais=6)

    def test_arquivo_ausente(self, tmp_path):
        with pytest.raises(ArtefatoAusenteErro):
            CheckpointService.CarregarRotulos(tmp_path / "rotulos.npz")
