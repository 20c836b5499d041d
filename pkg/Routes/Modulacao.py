import pandas as pd

from Routes.Comum import CarregarCenario, EscreverCsv
from Services.Excecoes import ConfiguracaoInvalidaErro
from Services.LogService import LogService
from Services.Logic.ModulationEngine import ModulationEngine


def Registrar(subparsers, parser_comum):
    parser = subparsers.add_parser(
        'enumerate-combos', parents=[parser_comum],
        help='Lista as combinações de ordens admissíveis (CSV: index, M_1..M_K).',
    )
    parser.add_argument('--K', type=int, default=None, help='Número de usuários (padrão: cenário).')
    parser.add_argument('--B', type=int, default=None, help='Ordem máxima em bits (padrão: cenário).')
    parser.add_argument('--R', type=int, default=None, help='Taxa mínima total em bits (padrão: cenário).')
    parser.set_defaults(executar=EnumerarCombinacoes)


def EnumerarCombinacoes(args) -> int:
    if None in (args.K, args.B, args.R):
        # Só lê o cenário quando falta algum parâmetro
        cfg, _, _ = CarregarCenario(args)
        K = cfg.num_usuarios if args.K is None else args.K
        B = cfg.ordem_maxima if args.B is None else args.B
        R = cfg.taxa_minima if args.R is None else args.R
    else:
        K, B, R = args.K, args.B, args.R

    combos = ModulationEngine.EnumerarCombinacoes(K, B, R)
    if not combos:
        raise ConfiguracaoInvalidaErro(f"Nenhuma combinação admissível: K·B = {K * B} < R = {R}.")

    tabela = pd.DataFrame(
        [c.ParaLinhaCsv() for c in combos],
        columns=['index', *(f"M_{k + 1}" for k in range(K))],
    )
    EscreverCsv(tabela, args.out)
    LogService.Info("Route.Modulacao", f"K={K}, B={B}, R={R}: {len(combos)} combinações")
    return 0
