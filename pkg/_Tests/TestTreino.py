"""Perdas, agenda de lr, rótulos da MOP-NN e os três estágios em miniatura."""

import math
from dataclasses import replace

import numpy as np
import pytest
import torch

from Models.Canal import ChannelDataset
from Models.Treino import MopLabelSet
from Services.DatasetService import DatasetService
from Services.Excecoes import ArtefatoAusenteErro, ConfiguracaoInvalidaErro, TreinamentoDivergiuErro
from Services.Logic.ChannelEngine import ChannelEngine
from Services.Logic.LinkConfig import SystemConfig, TrainConfig
from Services.Logic.ModulationEngine import ModulationEngine
from Services.Logic.SlpdNetwork import SlpdNetwork
from Services.Logic.TrainingEngine import TrainingEngine


@pytest.fixture
def dataset(cfg_pequeno, tc_pequeno):
    return DatasetService.GerarDataset(cfg_pequeno, tc_pequeno, semente=21)


class TestPerdas:

    def test_perda_uniforme_e_log_do_alfabeto(self):
        rotulos = torch.nn.functional.one_hot(torch.tensor([[0, 3, 5, 7]]), 8).double()
        uniforme = torch.full((1, 4, 8), 1 / 8, dtype=torch.float64)
        assert float(TrainingEngine.PerdaSlpd(rotulos, uniforme)) == pytest.approx(math.log(8))

    def test_perda_mop_uniforme(self):
        rotulos = torch.nn.functional.one_hot(torch.tensor([0, 17, 49]), 50).double()
        uniforme = torch.full((3, 50), 1 / 50, dtype=torch.float64)
        assert float(TrainingEngine.PerdaMop(rotulos, uniforme)) == pytest.approx(math.log(50))

    def test_previsao_perfeita_zera_a_perda(self):
        rotulos = torch.nn.functional.one_hot(torch.tensor([[1, 2]]), 4).double()
        assert float(TrainingEngine.PerdaSlpd(rotulos, rotulos.clone())) == pytest.approx(0.0, abs=1e-12)

    def test_rotulo_estendido_igual_a_perda_sem_preenchimento(self):
        # Usuários BPSK (M = 1) num sistema com B = 2: o alfabeto ocupa 2 das 4 saídas
        mensagens = np.array([[1, 2], [2, 2], [1, 1]])
        estendidos = torch.as_tensor(ModulationEngine.RotulosEstendidosLote(mensagens, 2))
        curtos = torch.as_tensor(np.stack([
            np.stack([ModulationEngine.OneHot(int(m), 1) for m in linha]) for linha in mensagens
        ]).astype(np.float64))
        probabilidades = torch.softmax(torch.as_tensor(np.random.default_rng(2).standard_normal((3, 2, 4))), dim=-1)

        np.testing.assert_array_equal(estendidos[..., 2:].numpy(), 0.0)
        np.testing.assert_array_equal(estendidos[..., :2].numpy(), curtos.numpy())
        completa = float(TrainingEngine.PerdaSlpd(estendidos, probabilidades))
        assert completa == pytest.approx(float(TrainingEngine.PerdaSlpd(curtos, probabilidades[..., :2])), abs=1e-12)

    def test_probabilidade_zero_no_rotulo_e_finita(self):
        rotulos = torch.tensor([[1.0, 0.0]])
        assert math.isfinite(float(TrainingEngine.PerdaMop(rotulos, torch.tensor([[0.0, 1.0]]))))


class TestAgenda:

    @pytest.mark.parametrize("epoca, esperado", [(0, 1e-3), (49, 1e-3), (50, 1e-4), (99, 1e-4), (100, 1e-5)])
    def test_decaimento_a_cada_50_epocas(self, tc_pequeno, epoca, esperado):
        assert TrainingEngine.TaxaAprendizado(epoca, tc_pequeno) == pytest.approx(esperado)

    def test_epoca_negativa(self, tc_pequeno):
        with pytest.raises(ConfiguracaoInvalidaErro):
            TrainingEngine.TaxaAprendizado(-1, tc_pequeno)


class TestRotulos:

    def test_argmin_por_canal(self):
        entropias = np.array([[0.5, 0.2, 0.9], [0.1, 0.3, 0.1]])
        rotulos = TrainingEngine.EscolherRotulos(entropias)
        np.testing.assert_array_equal(rotulos.Rotulos, [1, 0])
        np.testing.assert_allclose(rotulos.Entropias, [0.2, 0.1])

    def test_acuracia_top_k(self):
        p = np.array([[0.5, 0.3, 0.2], [0.2, 0.3, 0.5], [0.4, 0.35, 0.25]])
        rotulos = np.array([1, 2, 2])
        assert TrainingEngine.AcuraciaTopK(p, rotulos, 1) == pytest.approx(1 / 3)
        assert TrainingEngine.AcuraciaTopK(p, rotulos, 2) == pytest.approx(2 / 3)
        assert TrainingEngine.AcuraciaTopK(p, rotulos, 3) == 1.0

    def test_matriz_de_entropias_reprodutivel(self, cfg_pequeno, tc_pequeno, dataset):
        params = SlpdNetwork.ConstruirSlpd(cfg_pequeno, semente=1)
        canais = dataset[slice(0, 6)]
        a = TrainingEngine.MatrizEntropias(params, cfg_pequeno, tc_pequeno, canais, semente=4)
        b = TrainingEngine.MatrizEntropias(params, cfg_pequeno, tc_pequeno, canais, semente=4)
        assert a.shape == (6, 4)
        assert np.all(a > 0)
        np.testing.assert_array_equal(a, b)
        outra = TrainingEngine.MatrizEntropias(params, cfg_pequeno, tc_pequeno, canais, semente=5)
        assert not np.array_equal(a, outra)


class TestEstagios:

    def test_estagio1_registra_e_salva(self, cfg_pequeno, tc_pequeno, dataset):
        salvos, epocas = [], []
        params = TrainingEngine.TreinarEstagio1(
            cfg_pequeno, tc_pequeno, dataset, 3,
            salvar=lambda nome, _: salvos.append(nome), registrar=epocas.append,
        )
        assert params.Tipo == 'slpd'
        assert params.PesosFinitos()
        assert [e.epoca for e in epocas] == [1]
        assert 0.0 <= epocas[0].ser_validacao <= 1.0
        assert salvos[-1] == "estagio1_final"
        assert "estagio1_melhor" in salvos

    def test_estagio1_perda_cai(self, cfg_pequeno, tc_pequeno, dataset):
        tc = replace(tc_pequeno, epocas_estagio1=20, sorteios_por_canal=8)
        epocas = []
        TrainingEngine.TreinarEstagio1(cfg_pequeno, tc, dataset, 3, registrar=epocas.append)
        assert len(epocas) == 20
        assert all(math.isfinite(e.perda) for e in epocas)
        assert epocas[-1].perda < epocas[0].perda

    def test_mesma_semente_mesmos_pesos(self, cfg_pequeno, tc_pequeno, dataset):
        TrainingEngine.ConfigurarDeterminismo(True)
        a = TrainingEngine.TreinarEstagio1(cfg_pequeno, tc_pequeno, dataset, 3)
        b = TrainingEngine.TreinarEstagio1(cfg_pequeno, tc_pequeno, dataset, 3)
        for nome, peso in a.Pesos().items():
            np.testing.assert_array_equal(peso, b.Pesos()[nome])

    def test_estagio2_nao_altera_o_inicial_e_rotula_tudo(self, cfg_pequeno, tc_pequeno, dataset):
        inicial = TrainingEngine.TreinarEstagio1(cfg_pequeno, tc_pequeno, dataset, 3)
        antes = {nome: peso.copy() for nome, peso in inicial.Pesos().items()}
        params, rotulos = TrainingEngine.TreinarEstagio2(cfg_pequeno, tc_pequeno, dataset, inicial, 3)
        for nome, peso in inicial.Pesos().items():
            np.testing.assert_array_equal(peso, antes[nome])
        assert params is not inicial
        assert len(rotulos) == len(dataset)
        assert rotulos.Rotulos.min() >= 0 and rotulos.Rotulos.max() < 4

    def test_estagio2_exige_slpd(self, cfg_pequeno, tc_pequeno, dataset):
        decodificador = SlpdNetwork.ConstruirDecodificador(cfg_pequeno, 0)
        with pytest.raises(ArtefatoAusenteErro):
            TrainingEngine.TreinarEstagio2(cfg_pequeno, tc_pequeno, dataset, decodificador, 3)

    def test_estagio3_e_relatorio(self, cfg_pequeno, tc_pequeno, dataset):
        rng = np.random.default_rng(0)
        rotulos = MopLabelSet(
            Rotulos=rng.integers(0, 4, size=len(dataset)).astype(np.int32),
            Entropias=rng.uniform(0.1, 1.0, size=len(dataset)),
        )
        epocas = []
        params = TrainingEngine.TreinarEstagio3(cfg_pequeno, tc_pequeno, dataset, rotulos, 3, registrar=epocas.append)
        assert params.Tipo == 'mop'
        assert len(epocas) == tc_pequeno.epocas_estagio3
        relatorio = TrainingEngine.RelatorioAcuracia(params, dataset, rotulos)
        for k in (1, 2, 3):
            assert 0.0 <= relatorio[k]['acuracia_teste'] <= 1.0
        assert relatorio[1]['acuracia_treino'] <= relatorio[2]['acuracia_treino'] <= relatorio[3]['acuracia_treino']

    def test_estagio3_rotulos_desalinhados(self, cfg_pequeno, tc_pequeno, dataset):
        rotulos = MopLabelSet(Rotulos=np.zeros(3, dtype=np.int32), Entropias=np.zeros(3))
        with pytest.raises(ArtefatoAusenteErro):
            TrainingEngine.TreinarEstagio3(cfg_pequeno, tc_pequeno, dataset, rotulos, 3)

    def test_perda_nao_finita_aborta(self):
        with pytest.raises(TreinamentoDivergiuErro):
            TrainingEngine._verificar_perda(torch.tensor(float('nan')), 1, 0, 0)


class TestMopSeparavel:

    def test_dois_agrupamentos_angulares(self):
        # K = 1, B = 2, R = 1 → N_m = 2; ganho unitário: só a direção distingue as classes
        cfg = SystemConfig(
            num_antenas=4, num_usuarios=1, ordem_maxima=2, taxa_minima=1,
            angulos_centrais=(-40.0,), espalhamento_angular=3.0,
        )
        tc = TrainConfig(
            tamanho_lote=8, epocas_estagio3=60, n_treino=96, n_teste=16, n_validacao=16, semente=0,
        )
        esquerda = ChannelEngine.GerarCanais(cfg, 64, semente=1)
        direita = ChannelEngine.GerarCanais(replace(cfg, angulos_centrais=(40.0,)), 64, semente=2)
        ordem = np.random.default_rng(3).permutation(128)
        matrizes = np.concatenate([
            esquerda.Matrizes / esquerda.Ganhos[:, np.newaxis, :],
            direita.Matrizes / direita.Ganhos[:, np.newaxis, :],
        ])[ordem]
        dataset = ChannelDataset(
            Matrizes=matrizes,
            Angulos=np.concatenate([esquerda.Angulos, direita.Angulos])[ordem],
            Ganhos=np.ones((128, 1), dtype=np.complex128),
            Particoes=DatasetService.Particoes(tc),
        )
        rotulos = MopLabelSet(
            Rotulos=np.repeat([0, 1], 64).astype(np.int32)[ordem],
            Entropias=np.zeros(128),
        )

        params = TrainingEngine.TreinarEstagio3(cfg, tc, dataset, rotulos, semente=0)
        relatorio = TrainingEngine.RelatorioAcuracia(params, dataset, rotulos, ks=(1,))
        assert relatorio[1]['acuracia_treino'] >= 0.95
