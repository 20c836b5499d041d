"""SER Monte Carlo, intervalos de confiança, top-k genie e constelações."""

from dataclasses import replace

import numpy as np
import pytest

from Models.Avaliacao import EvalReport
from Models.Treino import MopLabelSet
from Services.EvaluationService import EvaluationService, SistemaAmpd, SistemaChuteAleatorio, SistemaCiSlp, SistemaZF
from Services.Excecoes import ArtefatoAusenteErro, ConfiguracaoInvalidaErro, DimensaoIncompativelErro
from Services.Logic.BaselineEngine import BaselineEngine
from Services.Logic.ChannelEngine import ChannelEngine
from Services.Logic.MopNetwork import MopNetwork
from Services.Logic.SlpdNetwork import SlpdNetwork

INFINITO = float('inf')


@pytest.fixture
def redes(cfg_pequeno):
    return SlpdNetwork.ConstruirSlpd(cfg_pequeno, 1), MopNetwork.ConstruirMop(cfg_pequeno, 4, 2)


class TestMonteCarlo:

    def test_zf_sem_ruido_nao_erra(self, cfg_pequeno, ev_pequeno, canais_pequenos):
        pontos = EvaluationService.MonteCarloSer(
            SistemaZF(cfg_pequeno), canais_pequenos, INFINITO, ev_pequeno, semente=1, tentativas=2000
        )
        assert len(pontos) == cfg_pequeno.num_usuarios + 1
        assert all(p.erros == 0 and p.ser == 0.0 for p in pontos)
        assert pontos[-1].usuario == EvalReport.USUARIO_MEDIA

    def test_chute_aleatorio_qpsk(self, cfg_pequeno, ev_pequeno, canais_pequenos):
        sistema = SistemaChuteAleatorio(SistemaZF(cfg_pequeno))
        pontos = EvaluationService.MonteCarloSer(
            sistema, canais_pequenos, 10.0, replace(ev_pequeno, tamanho_bloco=10_000), semente=2, tentativas=50_000
        )
        assert pontos[-1].ser == pytest.approx(0.75, abs=0.01)

    def test_mesma_semente_mesmo_resultado(self, cfg_pequeno, ev_pequeno, canais_pequenos):
        sistema = SistemaZF(cfg_pequeno)
        a = EvaluationService.MonteCarloSer(sistema, canais_pequenos, 5.0, ev_pequeno, 9, tentativas=500)
        b = EvaluationService.MonteCarloSer(sistema, canais_pequenos, 5.0, ev_pequeno, 9, tentativas=500)
        assert a == b

    def test_resultado_independe_dos_trabalhadores(self, cfg_pequeno, ev_pequeno, canais_pequenos):
        sistema = SistemaZF(cfg_pequeno)
        serial = EvaluationService.MonteCarloSer(sistema, canais_pequenos, 0.0, ev_pequeno, 4, trabalhadores=1, tentativas=450)
        paralelo = EvaluationService.MonteCarloSer(sistema, canais_pequenos, 0.0, ev_pequeno, 4, trabalhadores=2, tentativas=450)
        assert serial == paralelo

    def test_tentativas_adaptativas_ate_o_teto(self, cfg_pequeno, ev_pequeno, canais_pequenos):
        pontos = EvaluationService.MonteCarloSer(SistemaZF(cfg_pequeno), canais_pequenos, INFINITO, ev_pequeno, 3)
        assert pontos[-1].tentativas == ev_pequeno.max_tentativas

    def test_tentativas_adaptativas_param_com_erros_suficientes(self, cfg_pequeno, ev_pequeno, canais_pequenos):
        sistema = SistemaChuteAleatorio(SistemaZF(cfg_pequeno))
        pontos = EvaluationService.MonteCarloSer(sistema, canais_pequenos, 0.0, ev_pequeno, 3)
        assert pontos[-1].tentativas == ev_pequeno.min_tentativas

    def test_canais_de_outro_cenario(self, cfg_pequeno, ev_pequeno):
        outro = replace(cfg_pequeno, num_antenas=8)
        canais = ChannelEngine.GerarCanais(outro, 4, semente=0)
        with pytest.raises(DimensaoIncompativelErro):
            EvaluationService.MonteCarloSer(SistemaZF(cfg_pequeno), canais, 0.0, ev_pequeno, 0, tentativas=10)

    def test_curva_tem_uma_linha_por_usuario_e_media(self, cfg_pequeno, ev_pequeno, canais_pequenos):
        relatorio = EvaluationService.AvaliarSistema(
            SistemaZF(cfg_pequeno), canais_pequenos, [0.0, 10.0, 20.0], ev_pequeno, 5, tentativas=300
        )
        tabela = relatorio.CurvaSerDataFrame()
        assert len(tabela) == 3 * (cfg_pequeno.num_usuarios + 1)
        assert list(tabela.columns) == ['snr_db', 'user', 'ser', 'ci_low', 'ci_high', 'trials']
        assert relatorio.SerMedia(0.0) >= relatorio.SerMedia(20.0)

    def test_zf_nao_piora_com_o_snr(self, cfg_pequeno, ev_pequeno, canais_pequenos):
        grade = (0.0, 5.0, 10.0, 20.0)
        relatorio = EvaluationService.AvaliarSistema(
            SistemaZF(cfg_pequeno), canais_pequenos, grade, ev_pequeno, 12, tentativas=2000
        )
        pontos = [relatorio.PontoMedia(snr) for snr in grade]
        for anterior, seguinte in zip(pontos, pontos[1:]):
            assert seguinte.ser <= anterior.ser or seguinte.ic_inferior <= anterior.ic_superior
        assert pontos[-1].ser < pontos[0].ser

    def test_ci_slp_supera_zf_em_snr_baixo(self, cfg_pequeno, ev_pequeno, canais_pequenos):
        ci = EvaluationService.MonteCarloSer(SistemaCiSlp(cfg_pequeno, ev_pequeno), canais_pequenos, 0.0, ev_pequeno, 6, tentativas=400)
        zf = EvaluationService.MonteCarloSer(SistemaZF(cfg_pequeno), canais_pequenos, 0.0, ev_pequeno, 6, tentativas=400)
        assert ci[-1].ser <= zf[-1].ser + 0.02


class TestIntervaloConfianca:

    def test_sem_erros(self):
        inferior, superior = EvaluationService.IntervaloConfianca(0, 100)
        assert inferior == 0.0
        assert superior == pytest.approx(1 - 0.025 ** (1 / 100))

    def test_contem_a_estimativa(self):
        inferior, superior = EvaluationService.IntervaloConfianca(50, 100)
        assert inferior < 0.5 < superior

    def test_todos_errados(self):
        assert EvaluationService.IntervaloConfianca(100, 100)[1] == 1.0

    def test_sem_tentativas(self):
        with pytest.raises(ConfiguracaoInvalidaErro):
            EvaluationService.IntervaloConfianca(0, 0)


class TestSistemas:

    def test_nome_desconhecido(self, cfg_pequeno, ev_pequeno):
        with pytest.raises(ConfiguracaoInvalidaErro):
            EvaluationService.CriarSistema('mmse', cfg_pequeno, ev_pequeno)

    def test_sistemas_aprendidos_exigem_checkpoint(self, cfg_pequeno, ev_pequeno, redes):
        with pytest.raises(ArtefatoAusenteErro):
            EvaluationService.CriarSistema('slpd-qpsk', cfg_pequeno, ev_pequeno)
        with pytest.raises(ArtefatoAusenteErro):
            EvaluationService.CriarSistema('ampd', cfg_pequeno, ev_pequeno, slpd=redes[0])

    def test_ampd_usa_o_top1_da_mop(self, cfg_pequeno, ev_pequeno, redes, canais_pequenos):
        slpd, mop = redes
        sistema = EvaluationService.CriarSistema('ampd', cfg_pequeno, ev_pequeno, slpd=slpd, mop=mop)
        ordens = sistema.Ordens(canais_pequenos.Matrizes)
        top1 = MopNetwork.TopK(MopNetwork.ProbabilidadesLote(mop, canais_pequenos.Matrizes), 1)[:, 0]
        np.testing.assert_array_equal(ordens, sistema.combinacoes[top1])

    def test_slpd_qpsk_roda_o_laco(self, cfg_pequeno, ev_pequeno, redes, canais_pequenos):
        sistema = EvaluationService.CriarSistema('slpd-qpsk', cfg_pequeno, ev_pequeno, slpd=redes[0])
        pontos = EvaluationService.MonteCarloSer(sistema, canais_pequenos, 10.0, ev_pequeno, 1, tentativas=200)
        assert 0.0 <= pontos[-1].ser <= 1.0


class TestTopK:

    def test_ser_nao_aumenta_com_k(self, cfg_pequeno, ev_pequeno, redes, canais_pequenos):
        slpd, mop = redes
        rotulos = MopLabelSet(
            Rotulos=np.arange(len(canais_pequenos), dtype=np.int32) % 4,
            Entropias=np.ones(len(canais_pequenos)),
        )
        relatorio = EvaluationService.AvaliarTopK(
            mop, slpd, canais_pequenos, 3, 5.0, cfg_pequeno, ev_pequeno, 8, rotulos, slots_por_canal=20
        )
        sers = [relatorio.Acuracia[j]['ser'] for j in (1, 2, 3)]
        acuracias = [relatorio.Acuracia[j]['acuracia_teste'] for j in (1, 2, 3)]
        assert sers[0] >= sers[1] >= sers[2]
        assert acuracias[0] <= acuracias[1] <= acuracias[2]
        assert relatorio.Metadados['genie_topk'] is True
        assert relatorio.PontoMedia(5.0).ser == pytest.approx(sers[2])

    def test_top1_concorda_com_o_monte_carlo_do_ampd(self, cfg_pequeno, ev_pequeno, redes, canais_pequenos):
        # mesma cadeia, sorteios diferentes: a concordância é dentro dos intervalos
        slpd, mop = redes
        monte_carlo = EvaluationService.MonteCarloSer(
            SistemaAmpd(mop, slpd, cfg_pequeno), canais_pequenos, 10.0, ev_pequeno, 13, tentativas=4000
        )[-1]
        top1 = EvaluationService.AvaliarTopK(
            mop, slpd, canais_pequenos, 1, 10.0, cfg_pequeno, ev_pequeno, 13, slots_por_canal=250
        ).PontoMedia(10.0)
        assert top1.tentativas == monte_carlo.tentativas
        assert top1.ic_inferior <= monte_carlo.ic_superior
        assert monte_carlo.ic_inferior <= top1.ic_superior

    def test_curva_ampd_com_tabela(self, cfg_pequeno, ev_pequeno, redes, canais_pequenos):
        slpd, mop = redes
        relatorio = EvaluationService.AvaliarAmpd(
            mop, slpd, canais_pequenos, [0.0, 10.0], 2, cfg_pequeno, ev_pequeno, 3, slots_por_canal=10
        )
        assert relatorio.GradeSnr == [0.0, 10.0]
        assert sorted(relatorio.Acuracia) == [1, 2]
        assert relatorio.Metadados['snr_topk_db'] == ev_pequeno.snr_topk_db

    def test_tabela_fora_da_grade(self, cfg_pequeno, ev_pequeno, redes, canais_pequenos):
        slpd, mop = redes
        relatorio = EvaluationService.AvaliarAmpd(
            mop, slpd, canais_pequenos, [0.0], 1, cfg_pequeno, ev_pequeno, 3, slots_por_canal=10
        )
        assert relatorio.GradeSnr == [0.0]
        assert list(relatorio.Acuracia) == [1]


class TestConstelacao:

    def test_zf_cai_na_fase_nominal(self, cfg_pequeno, canais_pequenos):
        amostras = EvaluationService.ExportarConstelacao(SistemaZF(cfg_pequeno), canais_pequenos[0], (2, 1), 50, 4)
        assert len(amostras) == 2 * 50
        assert [a.usuario for a in amostras[:50]] == [0] * 50
        recebidos = np.array([complex(a.real, a.imag) for a in amostras])
        fases = np.array([2 * np.pi * a.mensagem / 2 ** a.ordem for a in amostras])
        np.testing.assert_allclose(recebidos / np.abs(recebidos), np.exp(1j * fases), atol=1e-8)

    def test_ci_slp_fica_no_cone_correto(self, cfg_pequeno, ev_pequeno, canais_pequenos):
        amostras = EvaluationService.ExportarConstelacao(
            SistemaCiSlp(cfg_pequeno, ev_pequeno), canais_pequenos[1], None, 30, 5
        )
        recebidos = np.array([complex(a.real, a.imag) for a in amostras])
        ordens = np.array([a.ordem for a in amostras])
        mensagens = np.array([a.mensagem for a in amostras])
        np.testing.assert_array_equal(BaselineEngine.DetectarFasePskLote(recebidos, ordens), mensagens)

    def test_dataframe(self, cfg_pequeno, canais_pequenos):
        amostras = EvaluationService.ExportarConstelacao(SistemaZF(cfg_pequeno), canais_pequenos[0], None, 10, 0)
        tabela = EvalReport(Sistema='zf', Constelacao=amostras).ConstelacaoDataFrame()
        assert list(tabela.columns) == ['user', 're', 'im', 'message', 'M_k']
        assert sorted(tabela['user'].unique()) == [1, 2]

    def test_combo_com_tamanho_errado(self, cfg_pequeno, canais_pequenos):
        with pytest.raises(DimensaoIncompativelErro):
            EvaluationService.ExportarConstelacao(SistemaZF(cfg_pequeno), canais_pequenos[0], (2, 2, 2), 10, 0)
