"""Classical conditioning of ``A x = b`` before HHL, and recovery of ``x`` after.

Pipeline used by :func:`prepare`:

1. condition number of the input
2. Gauss-Seidel left preconditioning ``(D+L)^-1 A x = (D+L)^-1 b`` (optional)
3. padding to the next power of two with an identity block
4. Hermitian block embedding ``[[0, A], [A^H, 0]] [y; x] = [b; 0]`` if needed
5. normalisation of the right-hand side

:func:`recover_solution` undoes 5, 4 and 3; 2 leaves the solution unchanged.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

log = logging.getLogger(__name__)

HERMITIAN_ATOL = 1e-10
SINGULAR_RTOL = 1e-12
# any value in (119.2, 492.5] keeps the IEEE 14-bus B' unpreconditioned and
# the 30-bus B' preconditioned, as in the reference experiments
DEFAULT_KAPPA_THRESHOLD = 250.0


class PrepError(ValueError):
    pass


@dataclass
class PreparedSystem:
    """Conditioned Hermitian system plus what is needed to undo the conditioning."""

    matrix: np.ndarray
    b_normalized: np.ndarray
    b_norm: float
    original_dimension: int
    padding: int
    hermitized: bool
    preconditioned: bool
    precondition_factor: np.ndarray | None
    condition_number: float
    original_condition_number: float
    is_real: bool = True

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_data(self) -> int:
        return self.dimension.bit_length() - 1

    def strip(self, x_full: np.ndarray) -> np.ndarray:
        """Original-space solution from a solution of the prepared system."""
        x = np.asarray(x_full)
        if self.hermitized:
            x = x[self.dimension // 2:]
        x = x[:self.original_dimension]
        return x.real.copy() if self.is_real else x.copy()


def normalize_rhs(b) -> tuple[np.ndarray, float]:
    b = np.asarray(b)
    norm = float(np.linalg.norm(b))
    if norm == 0:
        raise PrepError("right-hand side is the zero vector")
    return b / norm, norm


def condition_number(matrix) -> float:
    """Ratio of extreme singular values (dense SVD)."""
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise PrepError(f"expected a square matrix, got shape {a.shape}")
    s = np.linalg.svd(a, compute_uv=False)
    if s[-1] <= SINGULAR_RTOL * s[0]:
        raise PrepError(f"matrix is singular (sigma_min/sigma_max = {s[-1] / s[0]:.3g})")
    return float(s[0] / s[-1])


def is_hermitian(matrix, atol: float = HERMITIAN_ATOL) -> bool:
    a = np.asarray(matrix)
    return bool(np.allclose(a, a.conj().T, rtol=0, atol=atol))


def expand_to_power_of_2(matrix, b) -> tuple[np.ndarray, np.ndarray, int]:
    """Pad with identity rows/columns (and zeros in ``b``) up to the next power of two."""
    a = np.asarray(matrix)
    b = np.asarray(b)
    n = a.shape[0]
    target = 1 << max(0, (n - 1).bit_length())
    pad = target - n
    if pad == 0:
        return a.copy(), b.copy(), 0
    out = np.eye(target, dtype=np.result_type(a, float))
    out[:n, :n] = a
    bb = np.zeros(target, dtype=np.result_type(b, float))
    bb[:n] = b
    return out, bb, pad


def hermitize(matrix, b) -> tuple[np.ndarray, np.ndarray, bool]:
    a = np.asarray(matrix)
    b = np.asarray(b)
    if is_hermitian(a):
        return a.copy(), b.copy(), False
    n = a.shape[0]
    h = np.zeros((2 * n, 2 * n), dtype=a.dtype)
    h[:n, n:] = a
    h[n:, :n] = a.conj().T
    return h, np.concatenate([b, np.zeros(n, dtype=b.dtype)]), True


def gauss_seidel_precondition(matrix, b) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Left-precondition with ``M = D + L`` (diagonal plus strict lower triangle)."""
    a = np.asarray(matrix)
    if np.any(np.diag(a) == 0):
        raise PrepError("Gauss-Seidel preconditioner needs a nonzero diagonal")
    m = np.tril(a)
    return (solve_triangular(m, a, lower=True), solve_triangular(m, np.asarray(b), lower=True), m)


def prepare(matrix, b, use_preconditioner: bool | None = None,
            kappa_threshold: float = DEFAULT_KAPPA_THRESHOLD) -> PreparedSystem:
    """Condition ``A x = b`` for HHL.

    ``use_preconditioner`` forces preconditioning on (``True``) or off
    (``False``); ``None`` preconditions when the condition number exceeds
    ``kappa_threshold``.
    """
    a = np.asarray(matrix)
    b = np.asarray(b)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise PrepError(f"expected a square matrix, got shape {a.shape}")
    if b.shape != (a.shape[0],):
        raise PrepError(f"right-hand side has shape {b.shape}, expected ({a.shape[0]},)")
    is_real = not (np.iscomplexobj(a) or np.iscomplexobj(b))
    kappa0 = condition_number(a)
    precondition = kappa0 > kappa_threshold if use_preconditioner is None else use_preconditioner
    factor = None
    if precondition:
        a, b, factor = gauss_seidel_precondition(a, b)
        log.debug("Gauss-Seidel: kappa %.4g -> %.4g", kappa0, condition_number(a))
    a, b, pad = expand_to_power_of_2(a, b)
    a, b, herm = hermitize(a, b)
    if not herm:
        a = (a + a.conj().T) / 2  # drop sub-tolerance asymmetry
    b_unit, b_norm = normalize_rhs(b)
    return PreparedSystem(
        matrix=a, b_normalized=b_unit, b_norm=b_norm,
        original_dimension=np.asarray(matrix).shape[0], padding=pad,
        hermitized=herm, preconditioned=bool(precondition), precondition_factor=factor,
        condition_number=condition_number(a), original_condition_number=kappa0,
        is_real=is_real,
    )


def solution_norm(success_probability: float, rotation_constant: float) -> float:
    """Norm of the prepared-system solution for a normalised right-hand side.

    The success branch carries amplitude ``c / lambda`` per eigencomponent,
    where ``c`` is the inversion constant expressed in the matrix's eigenvalue
    units, so ``||A^-1 |b>|| = sqrt(P) / c``.  With the default eigenvalue
    scaling, ``c = |lambda_min| / k`` where ``k`` is the phase-grid index that
    ``|lambda_min|`` lands on.
    """
    if success_probability <= 0:
        raise PrepError("success probability must be positive")
    return float(np.sqrt(success_probability) / rotation_constant)


def recover_solution(prepared: PreparedSystem, data_register_state, success_probability: float,
                     rotation_constant: float) -> np.ndarray:
    """Solution of the original system from the post-selected data register.

    The global phase of ``data_register_state`` is fixed so that
    ``b^H A x`` is real and positive, as it is for the exact solution.
    """
    state = np.asarray(data_register_state, dtype=complex)
    x_norm = solution_norm(success_probability, rotation_constant)
    overlap = np.vdot(prepared.b_normalized, prepared.matrix @ state)
    if abs(overlap) > 0:
        state = state * (abs(overlap) / overlap)
    x_full = x_norm * prepared.b_norm * state
    return prepared.strip(x_full)
