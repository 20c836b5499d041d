import argparse
import sys

from Configuracoes import ConfiguracaoAtual # Importação da Configuração
from Services.Excecoes import SimulacaoErro
from Services.LogService import LogService
from Services.VersaoService import VersaoService
# Importação dos comandos (um módulo por domínio)
from Routes import Avaliacao, Dados, Modulacao, Treinamento
from Routes.Comum import ParserComum

# --- REGISTRO DOS COMANDOS ---
# Cada módulo de Routes expõe Registrar(subparsers, parser_comum)
MODULOS_COMANDOS = (Dados, Treinamento, Avaliacao, Modulacao)


def CriarParser() -> argparse.ArgumentParser:
    versao = VersaoService.LerVersaoArquivo()
    parser = argparse.ArgumentParser(
        prog='ampd-sim',
        description=f"{ConfiguracaoAtual.APP_NAME}: precodificação e detecção aprendidas com modulação adaptativa.",
    )
    parser.add_argument('--version', action='version',
                        version=f"%(prog)s {versao['NumeroVersao']} ({versao['Estagio']})")
    subparsers = parser.add_subparsers(dest='comando', required=True, help='Comandos disponíveis')

    parser_comum = ParserComum()
    for modulo in MODULOS_COMANDOS:
        modulo.Registrar(subparsers, parser_comum)
    return parser


def Principal(argv=None) -> int:
    """
    Ponto de entrada da CLI. Só aqui exceções viram código de saída:
      0 sucesso | 1 falha em execução | 2 configuração inválida ou artefato ausente
    """
    parser = CriarParser()
    args = parser.parse_args(argv)

    LogService.Inicializar()
    LogService.Info("App", f"Comando '{args.comando}' (escala {ConfiguracaoAtual.ESCALA})")

    try:
        return args.executar(args)
    except SimulacaoErro as Erro:
        LogService.Error("App", f"'{args.comando}' falhou: {Erro}")
        print(f"erro: {Erro}", file=sys.stderr)
        return Erro.codigo_saida
    except Exception as Erro:
        # AQUI O LOG É CRÍTICO: erro não previsto, stack trace completo
        LogService.Error("App", f"Falha inesperada em '{args.comando}'", Erro)
        print(f"erro inesperado: {Erro}", file=sys.stderr)
        return 1


if __name__ == '__main__':
    sys.exit(Principal())
