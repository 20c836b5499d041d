"""CLI chamada em processo: códigos de saída, arquivos gerados e a cadeia completa em miniatura."""

import argparse
import io

import numpy as np
import pandas as pd

from App import Principal
from Routes.Comum import CanaisDeAvaliacao, ParserComum
from Services.DatasetService import DatasetService
from Services.ExecucaoService import ExecucaoService
from Services.LogService import LogService
from Utils.Arquivos import CarregarJson, HashArquivo


def _ultima_linha(capsys) -> str:
    return capsys.readouterr().out.strip().splitlines()[-1]


class TestEnumerarCombinacoes:

    def test_lista_as_50_combinacoes(self, capsys):
        assert Principal(['enumerate-combos', '--K', '4', '--B', '3', '--R', '8']) == 0
        tabela = pd.read_csv(io.StringIO(capsys.readouterr().out))
        assert list(tabela.columns) == ['index', 'M_1', 'M_2', 'M_3', 'M_4']
        assert len(tabela) == 50
        assert tabela.iloc[0, 1:].tolist() == [1, 1, 3, 3]
        assert (tabela.iloc[:, 1:].sum(axis=1) >= 8).all()

    def test_para_arquivo_com_o_cenario(self, arquivo_cenario, tmp_path):
        destino = tmp_path / "combos.csv"
        assert Principal(['enumerate-combos', '--config', str(arquivo_cenario), '--out', str(destino)]) == 0
        assert len(pd.read_csv(destino)) == 4

    def test_inviavel_sai_com_2(self, capsys):
        assert Principal(['enumerate-combos', '--K', '2', '--B', '1', '--R', '3']) == 2
        assert "Nenhuma combinação" in capsys.readouterr().err


class TestPrerequisitos:

    def test_estagio2_sem_init(self, arquivo_cenario, capsys):
        assert Principal(['train', '--stage', '2', '--config', str(arquivo_cenario)]) == 2
        assert "estágio 1" in capsys.readouterr().err

    def test_estagio3_sem_rotulos(self, arquivo_cenario, capsys):
        assert Principal(['train', '--stage', '3', '--config', str(arquivo_cenario)]) == 2
        assert "--labels" in capsys.readouterr().err

    def test_dataset_ausente(self, arquivo_cenario, tmp_path):
        codigo = Principal([
            'train', '--stage', '1', '--config', str(arquivo_cenario),
            '--data', str(tmp_path / "nada.npz"), '--out', str(tmp_path / "run"),
        ])
        assert codigo == 2

    def test_sistema_desconhecido(self, arquivo_cenario, tmp_path):
        codigo = Principal(['eval', '--system', 'mmse', '--config', str(arquivo_cenario), '--out', str(tmp_path)])
        assert codigo == 2

    def test_ampd_sem_mop(self, arquivo_cenario, tmp_path):
        codigo = Principal(['eval', '--system', 'ampd', '--config', str(arquivo_cenario), '--out', str(tmp_path)])
        assert codigo == 2


class TestGerarDados:

    def test_mesma_semente_mesmos_bytes(self, arquivo_cenario, tmp_path, capsys):
        for nome in ("a", "b"):
            destino = tmp_path / nome / "canais.npz"
            assert Principal(['gen-data', '--config', str(arquivo_cenario), '--seed', '3', '--out', str(destino)]) == 0
        assert _ultima_linha(capsys).endswith("canais.npz")
        assert HashArquivo(tmp_path / "a" / "canais.npz") == HashArquivo(tmp_path / "b" / "canais.npz")

    def test_quantidade_explicita(self, arquivo_cenario, tmp_path):
        destino = tmp_path / "canais.npz"
        assert Principal(['gen-data', '--config', str(arquivo_cenario), '--count', '80', '--out', str(destino)]) == 0
        assert CarregarJson(destino.with_suffix('.json'))['quantidade'] == 80


class TestAvaliarBaselines:

    def test_curva_zf(self, arquivo_cenario, tmp_path, capsys):
        codigo = Principal([
            'eval', '--system', 'zf', '--config', str(arquivo_cenario),
            '--snr', '0,10', '--trials', '200', '--out', str(tmp_path / "aval"),
        ])
        assert codigo == 0
        assert _ultima_linha(capsys) == str(tmp_path / "aval")
        tabela = pd.read_csv(tmp_path / "aval" / "zf" / "ser_curve.csv")
        assert len(tabela) == 2 * (2 + 1)
        assert set(tabela['user'].astype(str)) == {'1', '2', 'avg'}
        assert (tabela['trials'] >= 200).all()
        resumo = CarregarJson(tmp_path / "aval" / "avaliacao.json")
        assert resumo['grade_snr_db'] == [0.0, 10.0]
        assert (tmp_path / "aval" / "config.json").exists()

    def test_snr_invalido(self, arquivo_cenario, tmp_path):
        codigo = Principal([
            'eval', '--system', 'zf', '--config', str(arquivo_cenario), '--snr', 'dez', '--out', str(tmp_path),
        ])
        assert codigo == 2

    def test_constelacao_ci_slp(self, arquivo_cenario, tmp_path, capsys):
        codigo = Principal([
            'export-constellation', '--system', 'ci-slp', '--config', str(arquivo_cenario),
            '--num-symbols', '20', '--combo', '2,1', '--out', str(tmp_path),
        ])
        assert codigo == 0
        assert _ultima_linha(capsys) == str(tmp_path / "constellation.csv")
        tabela = pd.read_csv(tmp_path / "constellation.csv")
        assert len(tabela) == 2 * 20
        assert sorted(tabela['M_k'].unique()) == [1, 2]

    def test_combo_invalido(self, arquivo_cenario, tmp_path):
        codigo = Principal([
            'export-constellation', '--system', 'zf', '--config', str(arquivo_cenario),
            '--combo', '2,x', '--out', str(tmp_path),
        ])
        assert codigo == 2


class TestCadeiaCompleta:

    def test_tres_estagios_e_avaliacao(self, arquivo_cenario, tmp_path, capsys):
        cenario = ['--config', str(arquivo_cenario), '--seed', '5']
        dados = tmp_path / "canais.npz"
        assert Principal(['gen-data', *cenario, '--out', str(dados)]) == 0

        assert Principal(['train', '--stage', '1', *cenario, '--data', str(dados), '--out', str(tmp_path / "e1")]) == 0
        estagio1 = tmp_path / "e1" / "checkpoints" / "estagio1_final"
        assert estagio1.with_suffix('.json').exists()
        assert (tmp_path / "e1" / "metricas.csv").exists()

        assert Principal([
            'train', '--stage', '2', *cenario, '--data', str(dados),
            '--init', str(estagio1), '--out', str(tmp_path / "e2"),
        ]) == 0
        rotulos = tmp_path / "e2" / "rotulos.npz"
        assert rotulos.exists()

        assert Principal([
            'train', '--stage', '3', *cenario, '--data', str(dados),
            '--labels', str(rotulos), '--out', str(tmp_path / "e3"),
        ]) == 0
        acuracia = pd.read_csv(tmp_path / "e3" / "accuracy.csv")
        assert acuracia['k'].tolist() == [1, 2, 3]

        capsys.readouterr()
        codigo = Principal([
            'eval', '--system', 'ampd,slpd-qpsk', *cenario, '--data', str(dados),
            '--checkpoint', str(estagio1),
            '--slpd-ampd', str(tmp_path / "e2" / "checkpoints" / "estagio2_final"),
            '--mop', str(tmp_path / "e3" / "checkpoints" / "estagio3_final"),
            '--labels', str(rotulos), '--snr', '10', '--trials', '40', '--out', str(tmp_path / "aval"),
        ])
        assert codigo == 0
        assert (tmp_path / "aval" / "slpd-qpsk" / "ser_curve.csv").exists()
        tabela = pd.read_csv(tmp_path / "aval" / "ampd" / "accuracy.csv")
        assert tabela['k'].tolist() == [1, 2]
        assert (tabela['ser'].diff().dropna() <= 0).all()
        relatorio = CarregarJson(tmp_path / "aval" / "ampd" / "relatorio.json")
        assert relatorio['genie_topk'] is True
        assert relatorio['checkpoints']['mop'].endswith("estagio3_final")


class TestCanaisDeAvaliacao:

    def test_sem_dataset_nao_repete_os_canais_do_gen_data(self, cfg_pequeno, tc_pequeno):
        avaliacao, rotulos = CanaisDeAvaliacao(argparse.Namespace(data=None), cfg_pequeno, tc_pequeno, 7)
        assert rotulos is None
        assert len(avaliacao) == tc_pequeno.n_teste
        gerados = DatasetService.GerarDataset(cfg_pequeno, tc_pequeno, semente=7).Matrizes
        for matriz in avaliacao.Matrizes:
            assert not any(np.allclose(matriz, outra) for outra in gerados)

    def test_mesma_semente_mesmos_canais(self, cfg_pequeno, tc_pequeno):
        a, _ = CanaisDeAvaliacao(argparse.Namespace(data=None), cfg_pequeno, tc_pequeno, 7)
        b, _ = CanaisDeAvaliacao(argparse.Namespace(data=None), cfg_pequeno, tc_pequeno, 7)
        np.testing.assert_array_equal(a.Matrizes, b.Matrizes)


class TestConfiguracaoPelaCli:

    def test_faixa_de_snr_com_tres_valores_sai_com_2(self, tmp_path, capsys):
        cenario = tmp_path / "faixa.toml"
        cenario.write_text("[sistema]\nfaixa_snr_db = [0.0, 10.0, 20.0]\n", encoding='utf-8')
        codigo = Principal(['gen-data', '--config', str(cenario), '--out', str(tmp_path / "canais.npz")])
        assert codigo == 2
        assert "faixa_snr_db" in capsys.readouterr().err

    def test_dispositivo_explicito(self, arquivo_cenario, tmp_path):
        assert ParserComum().parse_args(['--device', 'cpu']).device == 'cpu'
        cenario = ['--config', str(arquivo_cenario), '--seed', '5']
        dados = tmp_path / "canais.npz"
        assert Principal(['gen-data', *cenario, '--out', str(dados)]) == 0
        codigo = Principal([
            'train', '--stage', '1', *cenario, '--device', 'cpu',
            '--data', str(dados), '--out', str(tmp_path / "e1"),
        ])
        assert codigo == 0
        assert (tmp_path / "e1" / "checkpoints" / "estagio1_final.json").exists()


class TestLogDaExecucao:

    def test_diretorio_de_execucao_recebe_o_log(self, tmp_path):
        primeiro = ExecucaoService.CriarDiretorio(tmp_path / "a", "teste")
        LogService.Info("Teste", "mensagem da execucao a")
        segundo = ExecucaoService.CriarDiretorio(tmp_path / "b", "teste")
        LogService.Debug("Teste", "mensagem da execucao b")

        texto_a = (primeiro / LogService.ARQUIVO_EXECUCAO).read_text(encoding='utf-8')
        texto_b = (segundo / LogService.ARQUIVO_EXECUCAO).read_text(encoding='utf-8')
        assert "mensagem da execucao a" in texto_a
        assert "mensagem da execucao b" not in texto_a
        assert "mensagem da execucao b" in texto_b
        assert "| DEBUG    | AMPD-Sim.Teste" in texto_b
        LogService.DesanexarExecucao()

    def test_treino_deixa_log_no_out(self, arquivo_cenario, tmp_path):
        cenario = ['--config', str(arquivo_cenario), '--seed', '2']
        dados = tmp_path / "canais.npz"
        assert Principal(['gen-data', *cenario, '--out', str(dados)]) == 0
        assert Principal(['train', '--stage', '1', *cenario, '--data', str(dados), '--out', str(tmp_path / "e1")]) == 0
        assert (tmp_path / "e1" / LogService.ARQUIVO_EXECUCAO).stat().st_size > 0
