import os # Biblioteca para manipulação de caminhos e variáveis de ambiente
from dotenv import load_dotenv

load_dotenv() # Carrega as variáveis de ambiente do arquivo .env para o ambiente de execução


def _LerBooleano(nome, padrao="False"):
    return os.getenv(nome, padrao).strip().lower() in {"1", "true", "sim", "yes"}


class ConfiguracaoBase:
    """
    Configurações Base compartilhadas entre todas as escalas de simulação.
    Toda variável pode ser sobrescrita via ambiente com o prefixo AMPD_.
    """
    DIR_BASE = os.path.dirname(os.path.abspath(__file__))
    APP_NAME = os.getenv("AMPD_APP_NAME", "AMPD-Sim")

    DEBUG = _LerBooleano("AMPD_DEBUG")

    # --- Diretórios de trabalho ---
    DIR_DADOS  = os.getenv("AMPD_DIR_DADOS", os.path.join(DIR_BASE, "Data", "Canais"))
    DIR_RUNS   = os.getenv("AMPD_DIR_RUNS", os.path.join(DIR_BASE, "Data", "Runs"))
    DIR_LOGS   = os.getenv("AMPD_DIR_LOGS", os.path.join(DIR_BASE, "Logs"))
    DIR_CONFIG = os.path.join(DIR_BASE, "Config")

    # --- Execução ---
    # Sem AMPD_SEMENTE vale a semente do arquivo de cenário ([treino] semente)
    SEMENTE = int(os.getenv("AMPD_SEMENTE")) if os.getenv("AMPD_SEMENTE") else None
    TRABALHADORES = int(os.getenv("AMPD_TRABALHADORES", "1"))
    # Modo determinístico força uma única thread (bit a bit reprodutível)
    DETERMINISTICO = _LerBooleano("AMPD_DETERMINISTICO")
    DISPOSITIVO = os.getenv("AMPD_DISPOSITIVO", "cpu")

    def ObterArquivoCenario(self):
        """
        Retorna o caminho do arquivo TOML do cenário ativo.
        AMPD_CONFIG tem prioridade; senão usa o preset da escala.
        """
        caminho_env = os.getenv("AMPD_CONFIG")
        if caminho_env:
            return caminho_env
        return os.path.join(self.DIR_CONFIG, f"{self.ESCALA}.toml")

# --- Escalas Específicas ---

class ConfiguracaoDesk(ConfiguracaoBase):
    ESCALA = "desk"

class ConfiguracaoCompleta(ConfiguracaoBase):
    ESCALA = "completa"

# Mapa de seleção da escala
MapaConfiguracao = {
    "desk": ConfiguracaoDesk,
    "completa": ConfiguracaoCompleta,
}

# Inicializa a configuração
NomeEscala = os.getenv("AMPD_ESCALA", "desk").lower()
ConfiguracaoAtual = MapaConfiguracao.get(NomeEscala, ConfiguracaoDesk)()
