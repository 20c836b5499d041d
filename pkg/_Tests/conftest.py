"""
Fixtures compartilhadas da suíte.

Os diretórios de trabalho (logs, execuções, datasets) apontam para uma pasta
temporária ANTES de importar Configuracoes: a ConfiguracaoAtual é resolvida
no import.
"""

import os
import sys
import tempfile

_DIR_TESTES = tempfile.mkdtemp(prefix="ampd-testes-")
os.environ.setdefault("AMPD_DIR_LOGS", os.path.join(_DIR_TESTES, "Logs"))
os.environ.setdefault("AMPD_DIR_RUNS", os.path.join(_DIR_TESTES, "Runs"))
os.environ.setdefault("AMPD_DIR_DADOS", os.path.join(_DIR_TESTES, "Canais"))
os.environ.pop("AMPD_SEMENTE", None)
os.environ.pop("AMPD_CONFIG", None)

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import pytest

from Services.Logic.ChannelEngine import ChannelEngine
from Services.Logic.LinkConfig import EvalConfig, SystemConfig, TrainConfig

# Cenário mínimo: N_t = 4, K = 2, B = 2, R = 2 → N_m = 4 combinações
TOML_PEQUENO = """
[sistema]
num_antenas = 4
num_usuarios = 2
ordem_maxima = 2
taxa_minima = 2
angulos_centrais = [-20.0, 25.0]
espalhamento_angular = 5.0

[treino]
tamanho_lote = 64
epocas_estagio1 = 1
epocas_estagio2 = 1
epocas_estagio3 = 2
periodo_decaimento = 50
sorteios_por_canal = 1
n_treino = 48
n_teste = 8
n_validacao = 8
sorteios_rotulo = 4
semente = 7

[avaliacao]
grade_snr_db = [0.0, 10.0]
min_tentativas = 200
min_erros = 10
max_tentativas = 1000
tamanho_bloco = 100
topk = 2
snr_topk_db = 10.0
"""


@pytest.fixture
def cfg_pequeno() -> SystemConfig:
    return SystemConfig(
        num_antenas=4,
        num_usuarios=2,
        ordem_maxima=2,
        taxa_minima=2,
        angulos_centrais=(-20.0, 25.0),
        espalhamento_angular=5.0,
    )


@pytest.fixture
def tc_pequeno() -> TrainConfig:
    return TrainConfig(
        tamanho_lote=64,
        epocas_estagio1=1,
        epocas_estagio2=1,
        epocas_estagio3=2,
        sorteios_por_canal=1,
        n_treino=48,
        n_teste=8,
        n_validacao=8,
        sorteios_rotulo=4,
        semente=7,
    )


@pytest.fixture
def ev_pequeno() -> EvalConfig:
    return EvalConfig(
        grade_snr_db=(0.0, 10.0),
        min_tentativas=200,
        min_erros=10,
        max_tentativas=1000,
        tamanho_bloco=100,
        topk=2,
        snr_topk_db=10.0,
    )


@pytest.fixture
def canais_pequenos(cfg_pequeno):
    return ChannelEngine.GerarCanais(cfg_pequeno, 16, semente=11)


@pytest.fixture
def arquivo_cenario(tmp_path):
    caminho = tmp_path / "pequeno.toml"
    caminho.write_text(TOML_PEQUENO, encoding='utf-8')
    return caminho
