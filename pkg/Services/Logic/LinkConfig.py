try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Optional

from Services.Excecoes import ConfiguracaoInvalidaErro


# ─────────────────────────────────────────────────────────────────────────────
#  CENÁRIO DO ENLACE (MU-MISO DOWNLINK)
#  Altere aqui para mudar o cenário padrão sem tocar na lógica das engines.
# ─────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class SystemConfig:
    """
    Constantes do cenário. Os padrões são a escala "desk" (N_t = 16);
    a escala completa fica em Config/completa.toml (N_t = 128).
    """

    # ─── 1. DIMENSÕES ─────────────────────────────────────────────────────────
    num_antenas:  int = 16    # N_t, arranjo linear uniforme de meio comprimento de onda
    num_usuarios: int = 4     # K, usuários de antena única

    # ─── 2. RESTRIÇÕES DE MODULAÇÃO ───────────────────────────────────────────
    # M_k ∈ {1..B} bits por símbolo e Σ M_k ≥ R.
    ordem_maxima: int = 3     # B (BPSK, QPSK, 8-PSK)
    taxa_minima:  int = 8     # R, bits por uso de canal

    # ─── 3. POTÊNCIA E RUÍDO ──────────────────────────────────────────────────
    potencia:        float = 1.0             # P, watts lineares
    variancia_ruido: Optional[float] = None  # σ² fixo; None = derivado do SNR sorteado
    faixa_snr_db:    tuple[float, float] = (0.0, 20.0)  # Γ = 10 log10(P/σ²)

    # ─── 4. GEOMETRIA DOS USUÁRIOS ────────────────────────────────────────────
    # θ_k ~ U[φ_k − espalhamento, φ_k + espalhamento], em graus.
    angulos_centrais:     tuple[float, ...] = (-30.0, -15.0, 15.0, 30.0)
    espalhamento_angular: float = 10.0

    # ─── 5. CHAVES DE MODELAGEM ───────────────────────────────────────────────
    normalizar_ganho:  bool = False  # True: cada coluna escalada para ‖h_k‖² = N_t
    incluir_amplitude: bool = True   # SLPD-NN recebe |H| como segundo canal da CNN

    @property
    def num_mensagens_max(self) -> int:
        return 2 ** self.ordem_maxima


@dataclass(frozen=True)
class TrainConfig:
    """Hiperparâmetros das três etapas de treino."""

    tamanho_lote:       int = 1000
    lr_inicial:         float = 1e-3
    fator_decaimento:   float = 0.1
    periodo_decaimento: int = 50       # épocas entre decaimentos

    epocas_estagio1: int = 100
    epocas_estagio2: int = 100
    epocas_estagio3: int = 50

    sorteios_por_canal: int = 5       # cada canal é visitado 5× por época
    ordem_estagio1:     int = 2       # QPSK fixo no pré-treino

    # Partições do dataset: treino | teste | validação, nessa ordem no arquivo
    n_treino:    int = 100_000
    n_teste:     int = 10_000
    n_validacao: int = 10_000

    # Geração de rótulos do estágio II
    sorteios_rotulo: int = 64
    snr_rotulo_db:   Optional[float] = None   # None = uniforme na faixa de treino

    # Adam
    beta1:    float = 0.9
    beta2:    float = 0.999
    eps_adam: float = 1e-8

    sorteios_validacao: int = 1
    semente:            int = 2024

    @property
    def total_canais(self) -> int:
        return self.n_treino + self.n_teste + self.n_validacao


@dataclass(frozen=True)
class EvalConfig:
    """Parâmetros da avaliação Monte Carlo e dos baselines."""

    grade_snr_db: tuple[float, ...] = (0.0, 5.0, 10.0, 15.0, 20.0)

    # Tentativas adaptativas: mínimo, até min_erros ou o teto
    min_tentativas: int = 100_000
    min_erros:      int = 100
    max_tentativas: int = 10_000_000
    tamanho_bloco:  int = 10_000   # slots por shard Monte Carlo

    topk:        int = 3
    snr_topk_db: float = 15.0

    tol_solver:      float = 1e-6
    max_iter_solver: int = 200


SISTEMA_PADRAO = SystemConfig()

TREINO_DESK = TrainConfig(
    epocas_estagio1=30, epocas_estagio2=30, epocas_estagio3=20,
    n_treino=10_000, n_teste=1_000, n_validacao=1_000,
)
TREINO_COMPLETO = TrainConfig()

AVALIACAO_PADRAO = EvalConfig()


# ─────────────────────────────────────────────────────────────────────────────
#  VALIDAÇÃO
#  Roda antes de qualquer cômputo; qualquer violação vira código de saída 2.
# ─────────────────────────────────────────────────────────────────────────────

def validar_sistema(cfg: SystemConfig) -> SystemConfig:
    K, B, R = cfg.num_usuarios, cfg.ordem_maxima, cfg.taxa_minima
    if cfg.num_antenas < 1 or K < 1:
        raise ConfiguracaoInvalidaErro(f"N_t e K devem ser positivos (N_t={cfg.num_antenas}, K={K}).")
    if B < 1:
        raise ConfiguracaoInvalidaErro(f"Ordem máxima B deve ser ≥ 1 (B={B}).")
    if not (K * B >= R >= K):
        raise ConfiguracaoInvalidaErro(
            f"Nenhuma combinação admissível: é preciso K·B ≥ R ≥ K (K={K}, B={B}, R={R})."
        )
    if cfg.potencia <= 0:
        raise ConfiguracaoInvalidaErro(f"Orçamento de potência deve ser > 0 (P={cfg.potencia}).")
    if cfg.variancia_ruido is not None and cfg.variancia_ruido <= 0:
        raise ConfiguracaoInvalidaErro("variancia_ruido, quando fixada, deve ser > 0.")
    if len(cfg.faixa_snr_db) != 2:
        raise ConfiguracaoInvalidaErro(
            f"faixa_snr_db deve ter dois valores [mínimo, máximo] (recebidos {len(cfg.faixa_snr_db)})."
        )
    baixo, alto = cfg.faixa_snr_db
    if baixo > alto:
        raise ConfiguracaoInvalidaErro(f"Faixa de SNR vazia: [{baixo}, {alto}] dB.")
    if len(cfg.angulos_centrais) != K:
        raise ConfiguracaoInvalidaErro(
            f"São necessários K={K} ângulos centrais, recebidos {len(cfg.angulos_centrais)}."
        )
    if cfg.espalhamento_angular < 0:
        raise ConfiguracaoInvalidaErro("espalhamento_angular deve ser ≥ 0.")
    return cfg


def validar_treino(tc: TrainConfig, cfg: SystemConfig, total_canais: Optional[int] = None) -> TrainConfig:
    positivos = {
        'tamanho_lote': tc.tamanho_lote, 'lr_inicial': tc.lr_inicial,
        'fator_decaimento': tc.fator_decaimento, 'periodo_decaimento': tc.periodo_decaimento,
        'epocas_estagio1': tc.epocas_estagio1, 'epocas_estagio2': tc.epocas_estagio2,
        'epocas_estagio3': tc.epocas_estagio3, 'sorteios_por_canal': tc.sorteios_por_canal,
        'n_treino': tc.n_treino, 'sorteios_rotulo': tc.sorteios_rotulo,
        'sorteios_validacao': tc.sorteios_validacao,
    }
    invalidos = [nome for nome, valor in positivos.items() if not valor > 0]
    if invalidos:
        raise ConfiguracaoInvalidaErro(f"Parâmetros de treino devem ser positivos: {', '.join(invalidos)}.")
    if tc.n_teste < 0 or tc.n_validacao < 0:
        raise ConfiguracaoInvalidaErro("Partições de teste/validação não podem ser negativas.")
    if not 1 <= tc.ordem_estagio1 <= cfg.ordem_maxima:
        raise ConfiguracaoInvalidaErro(
            f"Estágio I usa M={tc.ordem_estagio1}, fora de [1, B={cfg.ordem_maxima}]."
        )
    if total_canais is not None and tc.total_canais > total_canais:
        raise ConfiguracaoInvalidaErro(
            f"Partições somam {tc.total_canais} canais, mas o dataset tem {total_canais}."
        )
    return tc


def validar_avaliacao(ev: EvalConfig) -> EvalConfig:
    if not ev.grade_snr_db:
        raise ConfiguracaoInvalidaErro("Grade de SNR vazia.")
    if ev.min_tentativas < 1 or ev.tamanho_bloco < 1:
        raise ConfiguracaoInvalidaErro("min_tentativas e tamanho_bloco devem ser ≥ 1.")
    if ev.max_tentativas < ev.min_tentativas:
        raise ConfiguracaoInvalidaErro(
            f"max_tentativas ({ev.max_tentativas}) menor que min_tentativas ({ev.min_tentativas})."
        )
    if ev.min_erros < 0:
        raise ConfiguracaoInvalidaErro("min_erros não pode ser negativo.")
    if ev.topk < 1:
        raise ConfiguracaoInvalidaErro(f"topk deve ser ≥ 1 (recebido {ev.topk}).")
    if ev.tol_solver <= 0 or ev.max_iter_solver < 1:
        raise ConfiguracaoInvalidaErro("Tolerância do solver deve ser > 0 e max_iter_solver ≥ 1.")
    return ev


# ─────────────────────────────────────────────────────────────────────────────
#  ARQUIVO DE CENÁRIO (TOML)
#  Tabelas [sistema], [treino], [avaliacao]; chaves = nomes dos campos.
# ─────────────────────────────────────────────────────────────────────────────

_TABELAS = {
    'sistema': SystemConfig,
    'treino': TrainConfig,
    'avaliacao': EvalConfig,
}


def _aplicar(base, valores: dict, tabela: str):
    conhecidos = {f.name: f for f in fields(base)}
    desconhecidos = sorted(set(valores) - set(conhecidos))
    if desconhecidos:
        raise ConfiguracaoInvalidaErro(f"Chaves desconhecidas em [{tabela}]: {', '.join(desconhecidos)}.")
    convertidos = {
        chave: tuple(valor) if isinstance(valor, list) else valor
        for chave, valor in valores.items()
    }
    return replace(base, **convertidos)


def carregar_configuracao(
    caminho: Optional[str | Path] = None,
    sobrescritas: Optional[dict[str, dict]] = None,
) -> tuple[SystemConfig, TrainConfig, EvalConfig]:
    """
    Lê o TOML (se houver), aplica as sobrescritas da CLI por cima
    e devolve as três configurações já validadas.
    """
    conteudo: dict = {}
    if caminho:
        caminho = Path(caminho)
        if not caminho.exists():
            raise ConfiguracaoInvalidaErro(f"Arquivo de cenário não encontrado: {caminho}")
        try:
            conteudo = tomllib.loads(caminho.read_text(encoding='utf-8'))
        except tomllib.TOMLDecodeError as e:
            raise ConfiguracaoInvalidaErro(f"TOML inválido em {caminho}: {e}") from e

    tabelas_extras = sorted(set(conteudo) - set(_TABELAS))
    if tabelas_extras:
        raise ConfiguracaoInvalidaErro(f"Tabelas desconhecidas no cenário: {', '.join(tabelas_extras)}.")

    sobrescritas = sobrescritas or {}
    resultado = []
    for tabela, classe in _TABELAS.items():
        atual = _aplicar(classe(), conteudo.get(tabela, {}), tabela)
        atual = _aplicar(atual, {k: v for k, v in sobrescritas.get(tabela, {}).items() if v is not None}, tabela)
        resultado.append(atual)

    sistema, treino, avaliacao = resultado
    validar_sistema(sistema)
    validar_treino(treino, sistema)
    validar_avaliacao(avaliacao)
    return sistema, treino, avaliacao


def configuracao_para_dict(*configs) -> dict:
    """Snapshot serializável em JSON (gravado em cada diretório de execução)."""
    nomes = {SystemConfig: 'sistema', TrainConfig: 'treino', EvalConfig: 'avaliacao'}
    return {nomes[type(c)]: asdict(c) for c in configs}


def sistema_de_dict(dados: dict) -> SystemConfig:
    return _aplicar(SystemConfig(), dados, 'sistema')
