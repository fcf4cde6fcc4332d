"""Seeded test systems: random Hermitian matrices with a bounded condition number."""
from __future__ import annotations

import numpy as np


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def hermitian_from_spectrum(eigenvalues, rng: np.random.Generator, real: bool = False) -> np.ndarray:
    w = np.asarray(eigenvalues, dtype=float)
    if real:
        v, _ = np.linalg.qr(rng.normal(size=(len(w), len(w))))
    else:
        v = random_unitary(len(w), rng)
    a = (v * w) @ v.conj().T
    return (a + a.conj().T) / 2


def random_hermitian_system(dim: int, kappa_max: float = 8.0, seed: int | None = None,
                            real: bool = False, signed: bool = True):
    """``(A, b)`` with Hermitian ``A`` of condition number at most ``kappa_max``.

    Eigenvalue magnitudes are drawn from ``[1, kappa_max]`` (one pinned at each
    end when ``dim > 1``); with ``signed`` each sign is random.
    """
    rng = np.random.default_rng(seed)
    mags = rng.uniform(1.0, kappa_max, size=dim)
    if dim > 1:
        mags[0], mags[1] = 1.0, kappa_max
    signs = rng.choice([-1.0, 1.0], size=dim) if signed else np.ones(dim)
    a = hermitian_from_spectrum(signs * mags, rng, real=real)
    b = rng.normal(size=dim) + (0 if real else 1j * rng.normal(size=dim))
    return a, b


def representable_system(dim: int, n_qpe: int, seed: int | None = None, signed: bool = True):
    """``(A, b)`` whose eigenvalues sit exactly on the phase grid.

    Eigenvalues are integers with smallest magnitude 1 and largest at most
    ``2^n_qpe - 1``, so every one is an integer multiple of ``|lambda_min|``
    and lands on a grid point under the default scaling.
    """
    rng = np.random.default_rng(seed)
    top = min((1 << n_qpe) - 1, 8)
    mags = rng.integers(1, top + 1, size=dim).astype(float)
    mags[0] = 1.0
    signs = rng.choice([-1.0, 1.0], size=dim) if signed else np.ones(dim)
    a = hermitian_from_spectrum(signs * mags, rng)
    b = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return a, b
