"""SLPD-NN: pré-processamento, potência, decodificação, manifesto e gradientes."""

import copy
from dataclasses import replace

import numpy as np
import pytest
import torch

from Models.Modulacao import SymbolVector
from Services.Excecoes import (
    CheckpointIncompativelErro,
    DimensaoIncompativelErro,
    ForaDoAlfabetoErro,
    SaidaDegeneradaErro,
)
from Services.Logic.ChannelEngine import ChannelEngine
from Services.Logic.ModulationEngine import ModulationEngine
from Services.Logic.SlpdNetwork import NormalizarPotencia, SlpdNetwork
from Services.Logic.TrainingEngine import TrainingEngine


@pytest.fixture
def slpd(cfg_pequeno):
    return SlpdNetwork.ConstruirSlpd(cfg_pequeno, semente=3)


def _simbolos_qpsk(n, K, semente=0):
    rng = np.random.default_rng(semente)
    ordens = np.full((n, K), 2)
    return ModulationEngine.MapearPskLote(ModulationEngine.SortearMensagensLote(ordens, rng), ordens)


class TestPreprocessamento:

    def test_fusao_soma_fases_sem_reembrulhar(self, canais_pequenos):
        canal = canais_pequenos[0]
        s = np.array([np.exp(3j), np.exp(-2j)])
        fundido = SlpdNetwork.PreprocessarFusao(canal, SymbolVector(Simbolos=s))
        np.testing.assert_allclose(fundido, np.angle(canal.Matriz) + np.angle(s))

    def test_fusao_dimensao_errada(self, canais_pequenos):
        with pytest.raises(DimensaoIncompativelErro):
            SlpdNetwork.PreprocessarFusao(canais_pequenos[0], SymbolVector(Simbolos=np.ones(3)))

    def test_entrada_da_cnn_com_amplitude(self, canais_pequenos):
        s = _simbolos_qpsk(len(canais_pequenos), 2)
        entrada = SlpdNetwork.PreprocessarFusaoLote(canais_pequenos.Matrizes, s, incluir_amplitude=True)
        assert entrada.shape == (len(canais_pequenos), 2, 2, 4)
        np.testing.assert_allclose(entrada[:, 1], np.abs(canais_pequenos.Matrizes).transpose(0, 2, 1))


class TestPotencia:

    @pytest.mark.parametrize("potencia", [1.0, 2.5])
    def test_restricao_de_potencia_em_dez_mil_slots(self, cfg_pequeno, slpd, potencia):
        canais = ChannelEngine.GerarCanais(cfg_pequeno, 10_000, semente=1)
        x = SlpdNetwork.PrecodificarLote(slpd, canais.Matrizes, _simbolos_qpsk(10_000, 2), potencia)
        energia = np.sum(np.abs(x) ** 2, axis=1)
        assert np.max(np.abs(energia - potencia)) <= 1e-6 * potencia

    def test_precodificar_um_slot(self, slpd, canais_pequenos):
        sinal = SlpdNetwork.Precodificar(slpd, canais_pequenos[2], SymbolVector(Simbolos=np.array([1j, -1])), 1.0)
        assert sinal.X.shape == (4,)
        assert sinal.Potencia == pytest.approx(1.0, abs=1e-6)

    def test_saida_nula_e_degenerada(self):
        with pytest.raises(SaidaDegeneradaErro):
            NormalizarPotencia(torch.zeros(2, 8), 1.0)


class TestDecodificador:

    def test_probabilidades_no_simplex(self, slpd, canais_pequenos):
        rng = np.random.default_rng(0)
        recebidos = rng.standard_normal((16, 2)) + 1j * rng.standard_normal((16, 2))
        p = SlpdNetwork.ProbabilidadesLote(slpd, canais_pequenos.Matrizes, recebidos)
        assert p.shape == (16, 2, 4)
        assert np.all(p >= 0)
        np.testing.assert_allclose(p.sum(axis=-1), 1.0, atol=1e-6)

    def test_decisao_restrita_ao_alfabeto(self):
        p = np.array([[0.1, 0.2, 0.6, 0.1], [0.1, 0.2, 0.6, 0.1]])
        np.testing.assert_array_equal(SlpdNetwork.DecidirMensagens(p, np.array([1, 2])), [2, 3])

    def test_empate_fica_com_menor_indice(self):
        p = np.array([[0.4, 0.4, 0.1, 0.1]])
        np.testing.assert_array_equal(SlpdNetwork.DecidirMensagens(p, np.array([2])), [1])

    def test_decodificar_valida_entrada(self, slpd, canais_pequenos):
        h = canais_pequenos[0].Coluna(0)
        saida = SlpdNetwork.Decodificar(slpd, h, 0.3 + 0.2j, 1)
        assert saida.Decodificada in (1, 2)
        with pytest.raises(ForaDoAlfabetoErro):
            SlpdNetwork.Decodificar(slpd, h, 0.3 + 0.2j, 3)
        with pytest.raises(DimensaoIncompativelErro):
            SlpdNetwork.Decodificar(slpd, h[:3], 0.3 + 0.2j, 1)

    def test_pesos_compartilhados_entre_usuarios(self, slpd, canais_pequenos):
        rng = np.random.default_rng(4)
        matrizes = canais_pequenos.Matrizes.copy()
        recebidos = rng.standard_normal((16, 2)) + 1j * rng.standard_normal((16, 2))
        antes = SlpdNetwork.ProbabilidadesLote(slpd, matrizes, recebidos)

        # Mexer em (h_2, r_2) não toca na saída do usuário 1
        matrizes[:, :, 1] = rng.standard_normal((16, 4)) + 1j * rng.standard_normal((16, 4))
        recebidos[:, 1] = 10.0 * (rng.standard_normal(16) + 1j * rng.standard_normal(16))
        depois = SlpdNetwork.ProbabilidadesLote(slpd, matrizes, recebidos)
        np.testing.assert_array_equal(depois[:, 0], antes[:, 0])

        # Mesma entrada nos dois usuários → mesma saída
        matrizes[:, :, 1] = matrizes[:, :, 0]
        recebidos[:, 1] = recebidos[:, 0]
        iguais = SlpdNetwork.ProbabilidadesLote(slpd, matrizes, recebidos)
        np.testing.assert_allclose(iguais[:, 1], iguais[:, 0], atol=1e-12)


class TestManifesto:

    def test_construcao_e_valida_e_reprodutivel(self, cfg_pequeno, slpd):
        SlpdNetwork.ValidarManifesto(slpd.Manifesto)
        outra = SlpdNetwork.ConstruirSlpd(cfg_pequeno, semente=3)
        for nome, peso in slpd.Pesos().items():
            np.testing.assert_array_equal(peso, outra.Pesos()[nome])

    def test_forma_inconsistente_e_rejeitada(self, slpd):
        manifesto = copy.deepcopy(slpd.Manifesto)
        manifesto['decodificador']['camadas'][1]['entrada'] = 99
        with pytest.raises(CheckpointIncompativelErro):
            SlpdNetwork.ValidarManifesto(manifesto)

    def test_separar_e_combinar(self, slpd):
        transmissor, decodificador = SlpdNetwork.Separar(slpd)
        assert (transmissor.Tipo, decodificador.Tipo) == ('transmissor', 'decodificador')
        recombinada = SlpdNetwork.Combinar(transmissor, decodificador)
        assert set(recombinada.Pesos()) == set(slpd.Pesos())
        with pytest.raises(CheckpointIncompativelErro):
            SlpdNetwork.Combinar(decodificador, transmissor)

    def test_modulo_do_manifesto_aceita_os_pesos(self, slpd):
        modulo = SlpdNetwork.ModuloDeManifesto(slpd.Manifesto)
        modulo.load_state_dict(slpd.Modulo.state_dict(), strict=True)

    def test_cenario_diferente_e_incompativel(self, slpd, cfg_pequeno):
        with pytest.raises(CheckpointIncompativelErro):
            SlpdNetwork.ValidarCompatibilidade(slpd, replace(cfg_pequeno, ordem_maxima=3, taxa_minima=2))


class TestGradiente:

    def test_gradiente_confere_com_diferencas_finitas(self, cfg_pequeno, canais_pequenos, slpd):
        modulo = slpd.Modulo.double()
        # BN em estatísticas acumuladas: a perda vira função suave dos pesos
        modulo.eval()
        rng = np.random.default_rng(0)
        n = 8
        ordens = np.full((n, 2), 2)
        mensagens = ModulationEngine.SortearMensagensLote(ordens, rng)
        lote = SlpdNetwork.MontarLote(
            canais_pequenos.Matrizes[:n], mensagens, ordens, np.full(n, 0.1), rng, cfg_pequeno, dtype=torch.float64
        )

        def perda():
            return TrainingEngine.PerdaSlpd(lote.rotulos, modulo(lote))

        modulo.zero_grad()
        perda().backward()

        parametros = [p for p in modulo.parameters() if p.requires_grad]
        passo = 1e-5
        for _ in range(20):
            p = parametros[rng.integers(len(parametros))]
            j = int(rng.integers(p.numel()))
            analitico = float(p.grad.reshape(-1)[j])
            plano = p.data.reshape(-1)
            original = float(plano[j])
            with torch.no_grad():
                plano[j] = original + passo
                acima = float(perda())
                plano[j] = original - passo
                abaixo = float(perda())
                plano[j] = original
            numerico = (acima - abaixo) / (2 * passo)
            assert abs(analitico - numerico) <= 1e-4 * max(abs(analitico), abs(numerico), 1e-5)
