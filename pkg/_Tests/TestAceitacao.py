"""
Cenários em escala desk (N_t = 16, K = 4, 1.2e4 canais).

Demoram de minutos a horas na CPU; ficam fora da execução padrão:

    pytest -m lento
"""

from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from App import Principal
from Configuracoes import ConfiguracaoAtual
from Utils.Arquivos import HashArquivo

pytestmark = pytest.mark.lento

SEMENTES = (1, 2, 3)

# Avaliação com teto baixo: a SER em 20 dB não pode levar o Monte Carlo até 10⁷ slots
AVALIACAO_CURTA = """
[avaliacao]
grade_snr_db = [0.0, 5.0, 10.0, 15.0, 20.0]
min_tentativas = 4000
min_erros = 100
max_tentativas = 4000
tamanho_bloco = 1000
topk = 3
snr_topk_db = 15.0
"""


@pytest.fixture(scope="module")
def cenario_desk(tmp_path_factory) -> Path:
    texto = (Path(ConfiguracaoAtual.DIR_CONFIG) / "desk.toml").read_text(encoding='utf-8')
    caminho = tmp_path_factory.mktemp("desk") / "desk.toml"
    caminho.write_text(texto.split("[avaliacao]")[0] + AVALIACAO_CURTA, encoding='utf-8')
    return caminho


@pytest.fixture(scope="module")
def dados_desk(cenario_desk, tmp_path_factory) -> Path:
    destino = tmp_path_factory.mktemp("canais") / "canais.npz"
    assert Principal(['gen-data', '--config', str(cenario_desk), '--out', str(destino)]) == 0
    return destino


def _media(diretorio: Path, sistema: str) -> pd.DataFrame:
    tabela = pd.read_csv(diretorio / sistema / "ser_curve.csv")
    return tabela[tabela['user'].astype(str) == 'avg'].set_index('snr_db')


def _monotona(curva: pd.DataFrame) -> bool:
    """SER não cresce com o SNR, a menos de sobreposição dos intervalos de 95%."""
    linhas = curva.sort_index()
    return all(
        atual['ser'] <= anterior['ser'] or atual['ci_low'] <= anterior['ci_high']
        for (_, anterior), (_, atual) in zip(linhas.iterrows(), list(linhas.iterrows())[1:])
    )


class TestBaselinesDesk:

    def test_curvas_zf_e_ci_slp(self, cenario_desk, dados_desk, tmp_path):
        destino = tmp_path / "aval"
        assert Principal([
            'eval', '--system', 'zf,ci-slp', '--config', str(cenario_desk),
            '--data', str(dados_desk), '--out', str(destino), '--plot',
        ]) == 0
        zf, ci = _media(destino, 'zf'), _media(destino, 'ci-slp')
        assert _monotona(zf) and _monotona(ci)
        assert ci.loc[0.0, 'ser'] <= zf.loc[0.0, 'ser'] + 0.01
        assert (destino / "ser_curve.png").exists()


class TestReprodutibilidadeDesk:

    def test_bytes_identicos_no_modo_deterministico(self, cenario_desk, tmp_path):
        for rodada in ("a", "b"):
            base = tmp_path / rodada
            comum = ['--config', str(cenario_desk), '--seed', '9', '--deterministic']
            assert Principal(['gen-data', *comum, '--out', str(base / "canais.npz")]) == 0
            assert Principal([
                'train', '--stage', '1', *comum, '--data', str(base / "canais.npz"),
                '--epochs', '1', '--out', str(base / "e1"),
            ]) == 0
            assert Principal([
                'eval', '--system', 'zf', *comum, '--data', str(base / "canais.npz"),
                '--snr', '0,10', '--out', str(base / "aval"),
            ]) == 0

        for relativo in ("canais.npz", "e1/checkpoints/estagio1_final.npz",
                         "e1/checkpoints/estagio1_final.json", "aval/zf/ser_curve.csv"):
            assert HashArquivo(tmp_path / "a" / relativo) == HashArquivo(tmp_path / "b" / relativo), relativo


class TestAprendizadoDesk:

    def _estagio1(self, cenario, dados, semente, destino) -> Path:
        assert Principal([
            'train', '--stage', '1', '--config', str(cenario), '--seed', str(semente),
            '--data', str(dados), '--out', str(destino),
        ]) == 0
        return destino / "checkpoints" / "estagio1_final"

    def test_slpd_qpsk_nao_perde_para_o_zf(self, cenario_desk, dados_desk, tmp_path):
        slpd, zf = [], []
        for semente in SEMENTES:
            checkpoint = self._estagio1(cenario_desk, dados_desk, semente, tmp_path / f"e1_{semente}")
            destino = tmp_path / f"aval_{semente}"
            assert Principal([
                'eval', '--system', 'slpd-qpsk,zf', '--config', str(cenario_desk), '--seed', str(semente),
                '--data', str(dados_desk), '--checkpoint', str(checkpoint), '--snr', '10', '--out', str(destino),
            ]) == 0
            slpd.append(_media(destino, 'slpd-qpsk').loc[10.0, 'ser'])
            zf.append(_media(destino, 'zf').loc[10.0, 'ser'])
        assert np.mean(slpd) <= np.mean(zf)

    def test_ampd_top3_nao_perde_para_slpd_qpsk(self, cenario_desk, dados_desk, tmp_path):
        ampd, slpd = [], []
        for semente in SEMENTES:
            base = tmp_path / str(semente)
            comum = ['--config', str(cenario_desk), '--seed', str(semente), '--data', str(dados_desk)]
            estagio1 = self._estagio1(cenario_desk, dados_desk, semente, base / "e1")
            assert Principal(['train', '--stage', '2', *comum, '--init', str(estagio1), '--out', str(base / "e2")]) == 0
            rotulos = base / "e2" / "rotulos.npz"
            assert Principal(['train', '--stage', '3', *comum, '--labels', str(rotulos), '--out', str(base / "e3")]) == 0
            assert Principal([
                'eval', '--system', 'ampd,slpd-qpsk', *comum, '--snr', '15', '--topk', '3',
                '--checkpoint', str(estagio1),
                '--slpd-ampd', str(base / "e2" / "checkpoints" / "estagio2_final"),
                '--mop', str(base / "e3" / "checkpoints" / "estagio3_final"),
                '--labels', str(rotulos), '--out', str(base / "aval"),
            ]) == 0

            tabela = pd.read_csv(base / "aval" / "ampd" / "accuracy.csv").set_index('k')
            assert tabela.loc[3, 'ser'] <= tabela.loc[2, 'ser'] <= tabela.loc[1, 'ser']
            ampd.append(_media(base / "aval", 'ampd').loc[15.0, 'ser'])
            slpd.append(_media(base / "aval", 'slpd-qpsk').loc[15.0, 'ser'])
        assert np.mean(ampd) <= np.mean(slpd)
