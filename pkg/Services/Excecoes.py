"""
Hierarquia de exceções da simulação.

Os Services levantam; somente o App.py traduz para mensagem e código de saída:
  - ConfiguracaoInvalidaErro / ArtefatoAusenteErro → código 2
  - qualquer outro SimulacaoErro                   → código 1
"""


class SimulacaoErro(Exception):
    """Raiz de todos os erros previstos da simulação."""

    codigo_saida = 1


class ConfiguracaoInvalidaErro(SimulacaoErro, ValueError):
    """Cenário viola invariantes do SystemConfig/TrainConfig ou é inviável (K·B < R)."""

    codigo_saida = 2


class ArtefatoAusenteErro(SimulacaoErro):
    """Pré-requisito de um estágio (checkpoint, rótulos, dataset) não encontrado."""

    codigo_saida = 2


class DimensaoIncompativelErro(SimulacaoErro, ValueError):
    pass


class ForaDoAlfabetoErro(SimulacaoErro, ValueError):
    pass


class SaidaDegeneradaErro(SimulacaoErro):
    """A rede produziu x = 0; a normalização de potência não é definida."""


class MatrizSingularErro(SimulacaoErro):
    pass


class SolverNaoConvergiuErro(SimulacaoErro):

    def __init__(self, mensagem, diagnostico=None):
        super().__init__(mensagem)
        self.diagnostico = diagnostico or {}

    def __str__(self):
        base = super().__str__()
        if not self.diagnostico:
            return base
        itens = ", ".join(f"{chave}={valor}" for chave, valor in self.diagnostico.items())
        return f"{base} ({itens})"


class TreinamentoDivergiuErro(SimulacaoErro):

    def __init__(self, estagio, epoca, lote, perda):
        super().__init__(
            f"Perda não finita no estágio {estagio}, época {epoca}, lote {lote}: {perda}"
        )
        self.estagio = estagio
        self.epoca = epoca
        self.lote = lote
        self.perda = perda


class CheckpointIncompativelErro(SimulacaoErro):
    """Manifesto do checkpoint não bate com o cenário (N_t, K, B, N_m, regra de enumeração)."""
