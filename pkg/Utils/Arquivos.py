import hashlib
import io
import json
import zipfile
from pathlib import Path

import numpy as np

# Data fixa nas entradas do zip: o mesmo conteúdo gera o mesmo arquivo, byte a byte
_DATA_FIXA_ZIP = (1980, 1, 1, 0, 0, 0)


def SalvarArraysNomeados(caminho, arrays: dict[str, np.ndarray]):
    """
    Grava um contêiner .npz legível por np.load, porém determinístico
    (np.savez carimba o horário atual em cada entrada).
    """
    caminho = Path(caminho)
    caminho.parent.mkdir(parents=True, exist_ok=True)
    with zipfile.ZipFile(caminho, mode='w', compression=zipfile.ZIP_STORED) as arquivo_zip:
        for nome in sorted(arrays):
            buffer = io.BytesIO()
            np.lib.format.write_array(buffer, np.ascontiguousarray(arrays[nome]), allow_pickle=False)
            info = zipfile.ZipInfo(f"{nome}.npy", date_time=_DATA_FIXA_ZIP)
            arquivo_zip.writestr(info, buffer.getvalue())
    return caminho


def CarregarArraysNomeados(caminho) -> dict[str, np.ndarray]:
    with np.load(caminho, allow_pickle=False) as dados:
        return {nome: dados[nome] for nome in dados.files}


def SalvarJson(caminho, conteudo: dict):
    caminho = Path(caminho)
    caminho.parent.mkdir(parents=True, exist_ok=True)
    caminho.write_text(json.dumps(conteudo, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding='utf-8')
    return caminho


def CarregarJson(caminho) -> dict:
    return json.loads(Path(caminho).read_text(encoding='utf-8'))


def HashConteudo(conteudo: dict) -> str:
    """SHA-256 curto de um dicionário serializável (metadados de relatório)."""
    texto = json.dumps(conteudo, sort_keys=True, default=str)
    return hashlib.sha256(texto.encode('utf-8')).hexdigest()[:16]


def HashArquivo(caminho) -> str:
    return hashlib.sha256(Path(caminho).read_bytes()).hexdigest()
