from pathlib import Path

import matplotlib

matplotlib.use('Agg')  # sem display: só arquivos
import matplotlib.pyplot as plt

from Models.Avaliacao import EvalReport
from Services.LogService import LogService

MARCADORES = ('o', 's', '^', 'D', 'v', '*')


class GraficosService:
    """Figuras opcionais (--plot): curva SER × SNR e constelações sem ruído."""

    @staticmethod
    def RenderizarCurvaSer(relatorios: list[EvalReport], caminho) -> Path:
        fig, ax = plt.subplots(figsize=(8, 6))
        for indice, relatorio in enumerate(relatorios):
            medias = sorted(
                (p for p in relatorio.Pontos if p.usuario == EvalReport.USUARIO_MEDIA),
                key=lambda p: p.snr_db,
            )
            if not medias:
                continue
            # SER zero não aparece em escala log
            pares = [(p.snr_db, p.ser) for p in medias if p.ser > 0]
            if not pares:
                LogService.Warning("GraficosService", f"'{relatorio.Sistema}' sem erros na grade: curva omitida.")
                continue
            snrs, sers = zip(*pares)
            ax.semilogy(snrs, sers, marker=MARCADORES[indice % len(MARCADORES)], linewidth=2,
                        label=relatorio.Sistema)

        ax.set_xlabel('SNR (dB)')
        ax.set_ylabel('SER média')
        ax.grid(True, which='both', alpha=0.3)
        ax.legend()
        fig.tight_layout()
        caminho = Path(caminho)
        fig.savefig(caminho, dpi=150)
        plt.close(fig)
        LogService.Info("GraficosService", f"Curva de SER salva em {caminho}")
        return caminho

    @staticmethod
    def RenderizarConstelacao(relatorio: EvalReport, caminho) -> Path:
        """Um painel por usuário, pontos coloridos pela mensagem transmitida."""
        usuarios = sorted({a.usuario for a in relatorio.Constelacao})
        fig, eixos = plt.subplots(1, max(1, len(usuarios)), figsize=(4 * max(1, len(usuarios)), 4), squeeze=False)
        for ax, usuario in zip(eixos[0], usuarios):
            amostras = [a for a in relatorio.Constelacao if a.usuario == usuario]
            ax.scatter(
                [a.real for a in amostras], [a.imag for a in amostras],
                c=[a.mensagem for a in amostras], cmap='tab10', s=8,
            )
            ax.axhline(0, color='gray', linewidth=0.5)
            ax.axvline(0, color='gray', linewidth=0.5)
            ax.set_title(f"usuário {usuario + 1} (M={amostras[0].ordem})")
            ax.set_aspect('equal', adjustable='datalim')
        fig.suptitle(relatorio.Sistema)
        fig.tight_layout()
        caminho = Path(caminho)
        fig.savefig(caminho, dpi=150)
        plt.close(fig)
        LogService.Info("GraficosService", f"Constelação salva em {caminho}")
        return caminho
