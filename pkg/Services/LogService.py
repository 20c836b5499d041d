import logging
import os
import traceback
from pathlib import Path

from Configuracoes import ConfiguracaoAtual


class LogService:
    """
    Serviço centralizado de Logs do simulador.

    Três destinos fixos (session.log, application.log e stderr, deixando o
    stdout livre para os CSV da CLI) e um quarto por execução: cada diretório
    criado pelo ExecucaoService recebe o seu execucao.log, que acompanha os
    checkpoints e as métricas daquela rodada.
    """
    _logger = None
    _inicializado = False
    _handler_execucao = None
    NOME_RAIZ = "AMPD-Sim"
    ARQUIVO_EXECUCAO = "execucao.log"

    # DATA HORA | NIVEL | ORIGEM | MENSAGEM
    FORMATO = '%(asctime)s | %(levelname)-8s | %(name)-25s | %(message)s'
    FORMATO_DATA = '%Y-%m-%d %H:%M:%S'

    @staticmethod
    def _formatter() -> logging.Formatter:
        return logging.Formatter(LogService.FORMATO, datefmt=LogService.FORMATO_DATA)

    @staticmethod
    def _nivel_console() -> int:
        return logging.DEBUG if ConfiguracaoAtual.DEBUG else logging.INFO

    @staticmethod
    def _handler_arquivo(caminho, modo: str, nivel: int) -> logging.FileHandler:
        handler = logging.FileHandler(caminho, mode=modo, encoding='utf-8')
        handler.setLevel(nivel)
        handler.setFormatter(LogService._formatter())
        return handler

    @staticmethod
    def Inicializar():
        if LogService._inicializado:
            return

        os.makedirs(ConfiguracaoAtual.DIR_LOGS, exist_ok=True)

        logger = logging.getLogger(LogService.NOME_RAIZ)
        logger.setLevel(logging.DEBUG)  # quem filtra são os handlers
        logger.handlers = []
        logger.propagate = False

        # Sessão reinicia a cada processo; o geral acumula o histórico
        logger.addHandler(LogService._handler_arquivo(
            os.path.join(ConfiguracaoAtual.DIR_LOGS, "session.log"), 'w', logging.DEBUG))
        logger.addHandler(LogService._handler_arquivo(
            os.path.join(ConfiguracaoAtual.DIR_LOGS, "application.log"), 'a', logging.INFO))

        console = logging.StreamHandler()
        console.setLevel(LogService._nivel_console())
        console.setFormatter(LogService._formatter())
        logger.addHandler(console)

        LogService._logger = logger
        LogService._inicializado = True

        LogService.Debug("LogService", "Sistema de logs inicializado.")

    @staticmethod
    def AnexarExecucao(diretorio) -> Path:
        """
        Passa a espelhar os logs em <diretorio>/execucao.log. Só um diretório
        de execução fica ativo: o handler anterior é fechado e removido.
        """
        LogService.Inicializar()
        LogService.DesanexarExecucao()

        caminho = Path(diretorio) / LogService.ARQUIVO_EXECUCAO
        caminho.parent.mkdir(parents=True, exist_ok=True)
        handler = LogService._handler_arquivo(caminho, 'a', logging.DEBUG)
        LogService._logger.addHandler(handler)
        LogService._handler_execucao = handler
        return caminho

    @staticmethod
    def DesanexarExecucao():
        handler = LogService._handler_execucao
        if handler is None:
            return
        LogService._logger.removeHandler(handler)
        handler.close()
        LogService._handler_execucao = None

    @staticmethod
    def _obter_logger(origem):
        if not LogService._logger:
            LogService.Inicializar()
        return logging.getLogger(f"{LogService.NOME_RAIZ}.{origem}")

    @staticmethod
    def Info(origem, mensagem):
        LogService._obter_logger(origem).info(mensagem)

    @staticmethod
    def Warning(origem, mensagem):
        LogService._obter_logger(origem).warning(mensagem)

    @staticmethod
    def Error(origem, mensagem, excecao=None):
        """Com exceção, anexa a mensagem dela e o traceback completo."""
        detalhes = mensagem
        if excecao:
            tb_str = "".join(traceback.format_exception(None, excecao, excecao.__traceback__))
            detalhes = f"{mensagem} | Exception: {str(excecao)}\nTraceback:\n{tb_str}"

        LogService._obter_logger(origem).error(detalhes)

    @staticmethod
    def Debug(origem, mensagem):
        # Console só com AMPD_DEBUG=True; session.log e execucao.log sempre recebem
        LogService._obter_logger(origem).debug(mensagem)
