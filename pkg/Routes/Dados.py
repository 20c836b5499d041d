from Routes.Comum import CaminhoDatasetPadrao, CarregarCenario, ResolverSemente
from Services.DatasetService import DatasetService
from Services.LogService import LogService


def Registrar(subparsers, parser_comum):
    parser = subparsers.add_parser(
        'gen-data', parents=[parser_comum],
        help='Gera o dataset de canais com as partições treino | teste | validação.',
    )
    parser.add_argument('--count', type=int, default=None,
                        help='Quantidade de canais (padrão: soma das partições do cenário).')
    parser.set_defaults(executar=GerarDados)


def GerarDados(args) -> int:
    cfg, tc, _ = CarregarCenario(args)
    semente = ResolverSemente(args, tc)
    destino = args.out or CaminhoDatasetPadrao()

    dataset = DatasetService.GerarDataset(cfg, tc, args.count, semente)
    arquivo = DatasetService.SalvarDataset(dataset, destino, cfg)
    LogService.Info("Route.Dados", f"gen-data concluído: {len(dataset)} canais em {arquivo}")
    print(arquivo)
    return 0
