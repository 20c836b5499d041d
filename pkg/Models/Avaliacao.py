from dataclasses import dataclass, field

import pandas as pd


@dataclass(frozen=True)
class PontoSer:
    """SER de um usuário (ou a média, usuario = -1) em um ponto de SNR."""

    snr_db: float
    usuario: int
    erros: int
    tentativas: int
    ser: float
    ic_inferior: float
    ic_superior: float


@dataclass(frozen=True)
class AmostraConstelacao:
    usuario: int
    real: float
    imag: float
    mensagem: int
    ordem: int


@dataclass
class EvalReport:
    """
    Resultado de uma avaliação: curvas de SER, acurácias top-k da MOP-NN,
    amostras de constelação e metadados (hash de config, checkpoints, sementes).
    """

    Sistema: str
    Pontos: list[PontoSer] = field(default_factory=list)
    Acuracia: dict[int, dict[str, float]] = field(default_factory=dict)
    Constelacao: list[AmostraConstelacao] = field(default_factory=list)
    Metadados: dict = field(default_factory=dict)

    USUARIO_MEDIA = -1

    @property
    def GradeSnr(self) -> list[float]:
        return sorted({p.snr_db for p in self.Pontos})

    def SerMedia(self, snr_db: float) -> float:
        for ponto in self.Pontos:
            if ponto.snr_db == snr_db and ponto.usuario == self.USUARIO_MEDIA:
                return ponto.ser
        raise KeyError(f"SNR {snr_db} dB não avaliado para '{self.Sistema}'.")

    def PontoMedia(self, snr_db: float) -> PontoSer:
        for ponto in self.Pontos:
            if ponto.snr_db == snr_db and ponto.usuario == self.USUARIO_MEDIA:
                return ponto
        raise KeyError(f"SNR {snr_db} dB não avaliado para '{self.Sistema}'.")

    def Estender(self, outro: "EvalReport") -> "EvalReport":
        self.Pontos.extend(outro.Pontos)
        self.Acuracia.update(outro.Acuracia)
        self.Constelacao.extend(outro.Constelacao)
        self.Metadados.update(outro.Metadados)
        return self

    def CurvaSerDataFrame(self) -> pd.DataFrame:
        linhas = [
            {
                'snr_db': p.snr_db,
                'user': 'avg' if p.usuario == self.USUARIO_MEDIA else p.usuario + 1,
                'ser': p.ser,
                'ci_low': p.ic_inferior,
                'ci_high': p.ic_superior,
                'trials': p.tentativas,
            }
            for p in self.Pontos
        ]
        return pd.DataFrame(linhas, columns=['snr_db', 'user', 'ser', 'ci_low', 'ci_high', 'trials'])

    def AcuraciaDataFrame(self) -> pd.DataFrame:
        linhas = [{'k': k, **valores} for k, valores in sorted(self.Acuracia.items())]
        return pd.DataFrame(linhas)

    def ConstelacaoDataFrame(self) -> pd.DataFrame:
        linhas = [
            {'user': a.usuario + 1, 're': a.real, 'im': a.imag, 'message': a.mensagem, 'M_k': a.ordem}
            for a in self.Constelacao
        ]
        return pd.DataFrame(linhas, columns=['user', 're', 'im', 'message', 'M_k'])
