"""Arquivo de cenário, validações e versão."""

from dataclasses import asdict, replace
from pathlib import Path

import pytest

from Configuracoes import ConfiguracaoAtual
from Services.Excecoes import ConfiguracaoInvalidaErro
from Services.Logic.LinkConfig import (
    EvalConfig,
    TrainConfig,
    carregar_configuracao,
    configuracao_para_dict,
    sistema_de_dict,
    validar_avaliacao,
    validar_sistema,
    validar_treino,
)
from Services.VersaoService import VersaoService


class TestArquivoCenario:

    def test_carrega_as_tres_tabelas(self, arquivo_cenario, cfg_pequeno, tc_pequeno, ev_pequeno):
        cfg, tc, ev = carregar_configuracao(arquivo_cenario)
        assert cfg == cfg_pequeno
        assert tc == tc_pequeno
        assert ev == ev_pequeno

    def test_sem_arquivo_valem_os_padroes(self):
        cfg, tc, ev = carregar_configuracao(None)
        assert cfg.num_antenas == 16
        assert tc == TrainConfig()
        assert ev == EvalConfig()

    def test_sobrescritas_da_cli(self, arquivo_cenario):
        _, tc, _ = carregar_configuracao(
            arquivo_cenario, {'treino': {'epocas_estagio1': 5, 'tamanho_lote': None}}
        )
        assert tc.epocas_estagio1 == 5
        assert tc.tamanho_lote == 64

    def test_chave_desconhecida(self, tmp_path):
        caminho = tmp_path / "erro.toml"
        caminho.write_text("[sistema]\nnum_antenass = 4\n", encoding='utf-8')
        with pytest.raises(ConfiguracaoInvalidaErro, match="num_antenass"):
            carregar_configuracao(caminho)

    def test_tabela_desconhecida(self, tmp_path):
        caminho = tmp_path / "erro.toml"
        caminho.write_text("[canal]\nx = 1\n", encoding='utf-8')
        with pytest.raises(ConfiguracaoInvalidaErro, match="canal"):
            carregar_configuracao(caminho)

    def test_toml_invalido(self, tmp_path):
        caminho = tmp_path / "erro.toml"
        caminho.write_text("[sistema\n", encoding='utf-8')
        with pytest.raises(ConfiguracaoInvalidaErro):
            carregar_configuracao(caminho)

    def test_arquivo_inexistente(self, tmp_path):
        with pytest.raises(ConfiguracaoInvalidaErro):
            carregar_configuracao(tmp_path / "nada.toml")

    @pytest.mark.parametrize("escala, antenas", [("desk", 16), ("completa", 128)])
    def test_presets_das_escalas(self, escala, antenas):
        cfg, tc, ev = carregar_configuracao(Path(ConfiguracaoAtual.DIR_CONFIG) / f"{escala}.toml")
        assert cfg.num_antenas == antenas
        assert (cfg.num_usuarios, cfg.ordem_maxima, cfg.taxa_minima) == (4, 3, 8)
        assert ev.topk == 3

    def test_snapshot_volta_ao_sistema(self, cfg_pequeno, tc_pequeno):
        snapshot = configuracao_para_dict(cfg_pequeno, tc_pequeno)
        assert set(snapshot) == {'sistema', 'treino'}
        assert sistema_de_dict(snapshot['sistema']) == cfg_pequeno
        assert snapshot['sistema'] == asdict(cfg_pequeno)


class TestValidacao:

    def test_cenario_inviavel(self, cfg_pequeno):
        with pytest.raises(ConfiguracaoInvalidaErro, match="K·B ≥ R ≥ K"):
            validar_sistema(replace(cfg_pequeno, taxa_minima=5))

    @pytest.mark.parametrize("campos", [
        {'potencia': 0.0},
        {'angulos_centrais': (0.0,)},
        {'espalhamento_angular': -1.0},
        {'faixa_snr_db': (20.0, 0.0)},
        {'variancia_ruido': 0.0},
        {'num_antenas': 0},
        {'faixa_snr_db': (0.0, 10.0, 20.0)},
        {'faixa_snr_db': (5.0,)},
    ])
    def test_sistema_invalido(self, cfg_pequeno, campos):
        with pytest.raises(ConfiguracaoInvalidaErro):
            validar_sistema(replace(cfg_pequeno, **campos))

    def test_treino_invalido(self, cfg_pequeno, tc_pequeno):
        with pytest.raises(ConfiguracaoInvalidaErro, match="tamanho_lote"):
            validar_treino(replace(tc_pequeno, tamanho_lote=0), cfg_pequeno)
        with pytest.raises(ConfiguracaoInvalidaErro):
            validar_treino(replace(tc_pequeno, ordem_estagio1=3), cfg_pequeno)
        with pytest.raises(ConfiguracaoInvalidaErro):
            validar_treino(tc_pequeno, cfg_pequeno, total_canais=10)

    @pytest.mark.parametrize("campos", [
        {'grade_snr_db': ()},
        {'min_tentativas': 0},
        {'max_tentativas': 10},
        {'min_erros': -1},
        {'topk': 0},
        {'tol_solver': 0.0},
        {'tamanho_bloco': 0},
    ])
    def test_avaliacao_invalida(self, ev_pequeno, campos):
        with pytest.raises(ConfiguracaoInvalidaErro):
            validar_avaliacao(replace(ev_pequeno, **campos))

    def test_avaliacao_valida_passa_intacta(self, ev_pequeno):
        assert validar_avaliacao(ev_pequeno) is ev_pequeno


class TestVersao:

    def test_formato_chave_valor(self, tmp_path):
        arquivo = tmp_path / "VERSION"
        arquivo.write_text("# comentário\nNUMERO=1.2.3\nESTAGIO=Beta\n", encoding='utf-8')
        assert VersaoService.LerVersaoArquivo(arquivo) == {'NumeroVersao': '1.2.3', 'Estagio': 'Beta'}

    def test_formato_antigo(self, tmp_path):
        arquivo = tmp_path / "VERSION"
        arquivo.write_text("0.9.1\n", encoding='utf-8')
        assert VersaoService.LerVersaoArquivo(arquivo)['NumeroVersao'] == '0.9.1'

    def test_arquivo_ausente(self, tmp_path):
        assert VersaoService.LerVersaoArquivo(tmp_path / "VERSION") == {'NumeroVersao': '0.0.0', 'Estagio': 'Alpha'}

    def test_versao_do_repositorio(self):
        assert VersaoService.VersaoAtual() == '0.1.0'
