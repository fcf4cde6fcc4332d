"""MatrixMarket input/output for matrices and right-hand-side vectors.

Accepted files follow the NIST MatrixMarket exchange format:

* header ``%%MatrixMarket matrix <coordinate|array> <real|complex|integer> <general|symmetric|skew-symmetric|hermitian>``
* any number of ``%`` comment lines
* a size line (``rows cols nnz`` for coordinate, ``rows cols`` for array)
* entries: ``i j value`` (1-based) for coordinate, column-major values for array

Parsing is delegated to :func:`scipy.io.mmread`.  A right-hand side may be
stored as an ``n x 1`` (or ``1 x n``) matrix; :func:`read_vector` flattens it.
"""
from __future__ import annotations

import os

import numpy as np
import scipy.io


class MatrixFileError(ValueError):
    pass


def _read(path):
    if not os.path.exists(path):
        raise MatrixFileError(f"no such file: {path}")
    try:
        data = scipy.io.mmread(path)
    except Exception as exc:  # scipy raises a mix of ValueError/IndexError/OSError
        raise MatrixFileError(f"cannot parse MatrixMarket file {path}: {exc}") from exc
    if hasattr(data, "toarray"):
        data = data.toarray()
    return np.asarray(data)


def read_matrix(path) -> np.ndarray:
    a = _read(path)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise MatrixFileError(f"{path}: expected a square matrix, got shape {a.shape}")
    return a


def read_vector(path) -> np.ndarray:
    v = _read(path)
    if v.ndim == 2 and 1 in v.shape:
        return v.reshape(-1)
    raise MatrixFileError(f"{path}: expected an n x 1 vector, got shape {v.shape}")


def write_matrix(path, matrix, comment: str = "") -> None:
    scipy.io.mmwrite(path, np.asarray(matrix), comment=comment)


def write_vector(path, vector, comment: str = "") -> None:
    scipy.io.mmwrite(path, np.asarray(vector).reshape(-1, 1), comment=comment)
