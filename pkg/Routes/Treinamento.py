import pandas as pd

from Routes.Comum import CaminhoDatasetPadrao, CarregarCenario, CarregarDatasetOuPadrao, EscreverCsv, ResolverSemente, ResolverTrabalhadores
from Services.CheckpointService import CheckpointService
from Services.Excecoes import ArtefatoAusenteErro
from Services.ExecucaoService import ExecucaoService, RegistradorMetricas
from Services.LogService import LogService
from Services.Logic.SlpdNetwork import SlpdNetwork
from Services.Logic.TrainingEngine import TrainingEngine


def Registrar(subparsers, parser_comum):
    parser = subparsers.add_parser(
        'train', parents=[parser_comum],
        help='Executa um estágio do treino (1: SLPD-NN QPSK, 2: SLPD-NN adaptativa + rótulos, 3: MOP-NN).',
    )
    parser.add_argument('--stage', type=int, choices=(1, 2, 3), required=True)
    parser.add_argument('--data', default=None, help='Dataset de canais (padrão: Data/Canais/canais_<escala>.npz).')
    parser.add_argument('--init', default=None,
                        help='Checkpoint inicial (obrigatório no estágio 2: SLPD-NN do estágio 1).')
    parser.add_argument('--labels', default=None, help='Rótulos do estágio 2 (obrigatório no estágio 3).')
    parser.add_argument('--epochs', type=int, default=None, help='Sobrescreve o número de épocas do estágio.')
    parser.add_argument('--batch-size', type=int, default=None, help='Sobrescreve o tamanho do minilote.')
    parser.set_defaults(executar=Treinar)


def _verificar_prerequisitos(args):
    # Antes de qualquer cômputo: o erro nomeia o artefato que falta
    if args.stage == 2 and not args.init:
        raise ArtefatoAusenteErro(
            "Estágio 2 exige --init com o checkpoint da SLPD-NN do estágio 1 "
            "(ex.: <run>/checkpoints/estagio1_final)."
        )
    if args.stage == 3 and not args.labels:
        raise ArtefatoAusenteErro(
            "Estágio 3 exige --labels com os rótulos gerados pelo estágio 2 (ex.: <run>/rotulos.npz)."
        )


def Treinar(args) -> int:
    _verificar_prerequisitos(args)
    sobrescritas = {'treino': {
        f"epocas_estagio{args.stage}": args.epochs,
        'tamanho_lote': args.batch_size,
    }}
    cfg, tc, _ = CarregarCenario(args, sobrescritas)
    semente = ResolverSemente(args, tc)
    ResolverTrabalhadores(args)

    dataset = CarregarDatasetOuPadrao(args.data, cfg)
    diretorio = ExecucaoService.CriarDiretorio(args.out, f"estagio{args.stage}")
    ExecucaoService.SalvarSnapshot(diretorio, cfg, tc, extras={
        'estagio': args.stage,
        'semente': semente,
        'dataset': str(args.data or CaminhoDatasetPadrao()),
        'init': args.init,
        'labels': args.labels,
    })
    salvar = ExecucaoService.SalvadorCheckpoints(diretorio)
    registrar = RegistradorMetricas(diretorio)

    LogService.Info("Route.Treinamento", f"Estágio {args.stage} → {diretorio}")

    if args.stage == 1:
        params = (
            CheckpointService.CarregarCheckpoint(args.init, cfg) if args.init
            else SlpdNetwork.ConstruirSlpd(cfg, semente)
        )
        params.Modulo.to(args.device)
        TrainingEngine.TreinarEstagio1(cfg, tc, dataset, semente, salvar, registrar, params=params)

    elif args.stage == 2:
        inicial = CheckpointService.CarregarCheckpoint(args.init, cfg)
        inicial.Modulo.to(args.device)
        _, rotulos = TrainingEngine.TreinarEstagio2(cfg, tc, dataset, inicial, semente, salvar, registrar)
        CheckpointService.SalvarRotulos(rotulos, diretorio / 'rotulos', metadados={
            'semente': semente,
            'dataset': str(args.data or CaminhoDatasetPadrao()),
        })

    else:
        rotulos = CheckpointService.CarregarRotulos(args.labels, len(dataset))
        params = TrainingEngine.TreinarEstagio3(cfg, tc, dataset, rotulos, semente, salvar, registrar)
        relatorio = TrainingEngine.RelatorioAcuracia(params, dataset, rotulos)
        tabela = pd.DataFrame(
            [{'k': k, **valores} for k, valores in sorted(relatorio.items())],
            columns=['k', 'acuracia_treino', 'acuracia_teste'],
        )
        EscreverCsv(tabela, diretorio / 'accuracy.csv')

    LogService.Info("Route.Treinamento", f"Estágio {args.stage} concluído ({len(registrar)} épocas registradas).")
    print(diretorio)
    return 0
