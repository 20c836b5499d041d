import numpy as np


def GrausParaRadianos(angulos):
    """Conversão única graus → radianos (todos os ângulos de entrada são em graus)."""
    return np.deg2rad(np.asarray(angulos, dtype=np.float64))


def DistanciaAngular(a, b):
    """
    Distância angular absoluta entre a e b (radianos), no intervalo [0, π].

        d = |((a − b + π) mod 2π) − π|
    """
    diferenca = np.mod(np.asarray(a) - np.asarray(b) + np.pi, 2 * np.pi) - np.pi
    return np.abs(diferenca)
