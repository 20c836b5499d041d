from dataclasses import replace
from pathlib import Path

from Models.Avaliacao import EvalReport
from Routes.Comum import CanaisDeAvaliacao, CarregarCenario, EscreverCsv, ResolverSemente, ResolverTrabalhadores
from Services.CheckpointService import CheckpointService
from Services.EvaluationService import SISTEMAS, EvaluationService
from Services.Excecoes import ArtefatoAusenteErro, ConfiguracaoInvalidaErro
from Services.ExecucaoService import ExecucaoService
from Services.GraficosService import GraficosService
from Services.LogService import LogService
from Services.Logic.LinkConfig import validar_avaliacao
from Utils.Arquivos import SalvarJson
from Utils.Formatadores import ParsearCombo, ParsearListaSnr


def Registrar(subparsers, parser_comum):
    parser_eval = subparsers.add_parser(
        'eval', parents=[parser_comum],
        help='Curvas de SER × SNR (ser_curve.csv por sistema; accuracy.csv para ampd).',
    )
    _flags_sistema(parser_eval)
    parser_eval.add_argument('--snr', default=None, help="Grade de SNR em dB: '0,5,10' ou '0:20:5'.")
    parser_eval.add_argument('--topk', type=int, default=None, help='k do top-k genie do sistema ampd.')
    parser_eval.add_argument('--trials', type=int, default=None, help='Mínimo de slots por ponto de SNR.')
    parser_eval.add_argument('--labels', default=None, help='Rótulos do estágio 2 (habilita a acurácia top-k).')
    parser_eval.add_argument('--plot', action='store_true', help='Renderiza ser_curve.png.')
    parser_eval.set_defaults(executar=Avaliar)

    parser_const = subparsers.add_parser(
        'export-constellation', parents=[parser_comum],
        help='Sinais recebidos sem ruído de um canal (constellation.csv).',
    )
    _flags_sistema(parser_const)
    parser_const.add_argument('--combo', default=None, help="Ordens por usuário, ex.: '3,1,2,2' (padrão: o sistema escolhe).")
    parser_const.add_argument('--num-symbols', type=int, default=500)
    parser_const.add_argument('--channel', type=int, default=0, help='Índice do canal entre os canais de teste.')
    parser_const.add_argument('--plot', action='store_true', help='Renderiza constellation.png.')
    parser_const.set_defaults(executar=ExportarConstelacao)


def _flags_sistema(parser):
    parser.add_argument('--system', action='append', required=True,
                        help=f"Sistema(s): {', '.join(SISTEMAS)} (repetível ou separado por vírgula).")
    parser.add_argument('--checkpoint', '--slpd', dest='slpd', default=None,
                        help='Checkpoint da SLPD-NN (estágio 1 para slpd-qpsk).')
    parser.add_argument('--slpd-ampd', default=None,
                        help='SLPD-NN do estágio 2 para o sistema ampd (padrão: --checkpoint).')
    parser.add_argument('--mop', default=None, help='Checkpoint da MOP-NN (estágio 3).')
    parser.add_argument('--data', default=None, help='Dataset de canais; usa a partição de teste.')


def _sistemas(args) -> list[str]:
    nomes = []
    for valor in args.system:
        nomes.extend(n.strip() for n in valor.split(',') if n.strip())
    desconhecidos = [n for n in nomes if n not in SISTEMAS]
    if desconhecidos:
        raise ConfiguracaoInvalidaErro(
            f"Sistema(s) desconhecido(s): {', '.join(desconhecidos)} (opções: {', '.join(SISTEMAS)})."
        )
    return list(dict.fromkeys(nomes))


def _redes(args, cfg, nomes):
    """Carrega só os checkpoints que os sistemas pedidos usam."""
    slpd = CheckpointService.CarregarCheckpoint(args.slpd, cfg) if args.slpd else None
    slpd_ampd = mop = None
    if 'ampd' in nomes:
        if not args.mop:
            raise ArtefatoAusenteErro("Sistema 'ampd' exige --mop com o checkpoint da MOP-NN (estágio 3).")
        mop = CheckpointService.CarregarCheckpoint(args.mop, cfg)
        slpd_ampd = CheckpointService.CarregarCheckpoint(args.slpd_ampd, cfg) if args.slpd_ampd else slpd
        if slpd_ampd is None:
            raise ArtefatoAusenteErro("Sistema 'ampd' exige a SLPD-NN do estágio 2 (--slpd-ampd ou --checkpoint).")
    if 'slpd-qpsk' in nomes and slpd is None:
        raise ArtefatoAusenteErro("Sistema 'slpd-qpsk' exige --checkpoint com a SLPD-NN do estágio 1.")
    return slpd, slpd_ampd, mop


def Avaliar(args) -> int:
    nomes = _sistemas(args)
    cfg, tc, ev = CarregarCenario(args, {'avaliacao': {'topk': args.topk}})
    if args.trials is not None:
        # --trials acima do teto do cenário também sobe o teto
        ev = validar_avaliacao(replace(
            ev, min_tentativas=args.trials, max_tentativas=max(ev.max_tentativas, args.trials)
        ))
    try:
        grade = ParsearListaSnr(args.snr) or list(ev.grade_snr_db)
    except ValueError as e:
        raise ConfiguracaoInvalidaErro(f"--snr inválido: {e}") from e
    semente = ResolverSemente(args, tc)
    trabalhadores = ResolverTrabalhadores(args)
    slpd, slpd_ampd, mop = _redes(args, cfg, nomes)

    diretorio = ExecucaoService.CriarDiretorio(args.out, 'avaliacao')
    hash_config = ExecucaoService.SalvarSnapshot(diretorio, cfg, tc, ev, extras={'semente': semente})
    canais, rotulos = CanaisDeAvaliacao(args, cfg, tc, semente)

    relatorios = []
    for nome in nomes:
        if nome == 'ampd':
            relatorio = EvaluationService.AvaliarAmpd(
                mop, slpd_ampd, canais, grade, ev.topk, cfg, ev, semente, rotulos
            )
        else:
            sistema = EvaluationService.CriarSistema(nome, cfg, ev, slpd=slpd)
            relatorio = EvaluationService.AvaliarSistema(sistema, canais, grade, ev, semente, trabalhadores)
        relatorio.Metadados.update({'hash_config': hash_config, 'checkpoints': _checkpoints(args, nome)})

        pasta = diretorio / nome
        EscreverCsv(relatorio.CurvaSerDataFrame(), pasta / 'ser_curve.csv')
        if relatorio.Acuracia:
            EscreverCsv(relatorio.AcuraciaDataFrame(), pasta / 'accuracy.csv')
        SalvarJson(pasta / 'relatorio.json', relatorio.Metadados)
        relatorios.append(relatorio)

    # Mesma semente para todos os sistemas: comparação pareada
    SalvarJson(diretorio / 'avaliacao.json', {
        'sistemas': nomes,
        'semente': semente,
        'grade_snr_db': grade,
        'hash_config': hash_config,
        'num_canais': len(canais),
    })
    if args.plot:
        GraficosService.RenderizarCurvaSer(relatorios, diretorio / 'ser_curve.png')

    LogService.Info("Route.Avaliacao", f"eval concluído: {', '.join(nomes)} → {diretorio}")
    print(diretorio)
    return 0


def _checkpoints(args, nome) -> dict:
    if nome == 'slpd-qpsk':
        return {'slpd': args.slpd}
    if nome == 'ampd':
        return {'slpd': args.slpd_ampd or args.slpd, 'mop': args.mop}
    return {}


def ExportarConstelacao(args) -> int:
    nomes = _sistemas(args)
    if len(nomes) != 1:
        raise ConfiguracaoInvalidaErro("export-constellation aceita um único --system.")
    nome = nomes[0]
    cfg, tc, ev = CarregarCenario(args)
    semente = ResolverSemente(args, tc)
    slpd, slpd_ampd, mop = _redes(args, cfg, nomes)

    try:
        combo = ParsearCombo(args.combo)
    except ValueError as e:
        raise ConfiguracaoInvalidaErro(f"--combo inválido: {e}") from e

    canais, _ = CanaisDeAvaliacao(args, cfg, tc, semente)
    if not 0 <= args.channel < len(canais):
        raise ConfiguracaoInvalidaErro(f"--channel {args.channel} fora de [0, {len(canais) - 1}].")
    sistema = EvaluationService.CriarSistema(nome, cfg, ev, slpd=slpd_ampd or slpd, mop=mop)

    amostras = EvaluationService.ExportarConstelacao(
        sistema, canais[args.channel], combo, args.num_symbols, semente
    )
    relatorio = EvalReport(Sistema=nome, Constelacao=amostras, Metadados={
        'semente': semente, 'canal': args.channel, 'combo': args.combo,
    })

    diretorio = Path(args.out) if args.out else ExecucaoService.CriarDiretorio(None, 'constelacao')
    EscreverCsv(relatorio.ConstelacaoDataFrame(), diretorio / 'constellation.csv')
    if args.plot:
        GraficosService.RenderizarConstelacao(relatorio, diretorio / 'constellation.png')
    LogService.Info("Route.Avaliacao", f"Constelação '{nome}' ({len(amostras)} amostras) → {diretorio}")
    print(diretorio / 'constellation.csv')
    return 0
