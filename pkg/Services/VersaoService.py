from pathlib import Path


class VersaoService:
    """
    Lê o arquivo VERSION da raiz. A versão vai carimbada em todo checkpoint
    e em todo manifesto de dataset.
    """

    ARQUIVO_VERSION = Path(__file__).resolve().parent.parent / 'VERSION'
    PADRAO_NUMERO = '0.0.0'
    PADRAO_ESTAGIO = 'Alpha'

    @staticmethod
    def LerVersaoArquivo(caminho=None):
        caminho = Path(caminho) if caminho else VersaoService.ARQUIVO_VERSION
        if not caminho.exists():
            return {
                'NumeroVersao': VersaoService.PADRAO_NUMERO,
                'Estagio': VersaoService.PADRAO_ESTAGIO,
            }

        numero = None
        estagio = None
        for linha in caminho.read_text(encoding='utf-8').splitlines():
            linha_limpa = linha.strip()
            if not linha_limpa or linha_limpa.startswith('#'):
                continue

            # Aceita também o formato antigo: só o número na primeira linha
            if '=' not in linha_limpa:
                if numero is None:
                    numero = linha_limpa
                continue

            chave, valor = linha_limpa.split('=', 1)
            chave = chave.strip().upper()
            if chave in {'NUMERO', 'VERSAO', 'NUMERO_VERSAO'}:
                numero = valor.strip()
            elif chave in {'ESTAGIO', 'STAGE'}:
                estagio = valor.strip()

        return {
            'NumeroVersao': numero or VersaoService.PADRAO_NUMERO,
            'Estagio': estagio or VersaoService.PADRAO_ESTAGIO,
        }

    @staticmethod
    def VersaoAtual() -> str:
        """Ex.: '0.1.0' (o estágio não entra na comparação de checkpoints)."""
        return VersaoService.LerVersaoArquivo()['NumeroVersao']
