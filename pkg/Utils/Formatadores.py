import re


def ParsearListaSnr(Valor):
    """
    Recebe a lista de SNRs da CLI e devolve floats ordenados.
    Ex: '0,5,10' -> [0.0, 5.0, 10.0]   |   '0:20:5' -> [0.0, 5.0, 10.0, 15.0, 20.0]
    """
    if Valor is None:
        return None
    if isinstance(Valor, (list, tuple)):
        return sorted(float(v) for v in Valor)

    ValorStr = str(Valor).strip()
    if not ValorStr:
        return None

    # Faixa inicio:fim:passo
    if re.fullmatch(r'-?[\d.]+:-?[\d.]+:[\d.]+', ValorStr):
        Inicio, Fim, Passo = (float(p) for p in ValorStr.split(':'))
        if Passo <= 0:
            raise ValueError(f"Passo de SNR deve ser positivo: '{Valor}'")
        Pontos = []
        Atual = Inicio
        while Atual <= Fim + 1e-9:
            Pontos.append(round(Atual, 6))
            Atual += Passo
        return Pontos

    return sorted(float(p) for p in re.split(r'[,;\s]+', ValorStr) if p)


def ParsearCombo(Valor):
    """'3,1,2,2' -> (3, 1, 2, 2)"""
    if Valor is None:
        return None
    return tuple(int(p) for p in re.split(r'[,;\s]+', str(Valor).strip()) if p)
