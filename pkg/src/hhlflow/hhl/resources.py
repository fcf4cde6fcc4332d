"""Qubit budget and eigenvalue scaling for HHL circuits.

Register sizes::

    n_data    = log2(matrix dimension)
    n_qpe     = max(n_data + 1, ceil(log2(kappa + 1)))
    n_neg_val = 1 if the matrix has a negative eigenvalue else 0
    n_total   = n_data + n_qpe + n_neg_val

The circuit also carries one inversion ancilla that ``n_total`` leaves out;
:attr:`ResourcePlan.n_qubits` is the real circuit width.  The *reported*
convention of the published benchmark table counts the sign qubit as part of
the phase register and adds the ancilla to the total; see
:meth:`ResourcePlan.table1`.

Eigenvalue scaling: the phase register (``n_qpe`` magnitude bits plus the
sign bit, ``N = 2^(n_qpe + n_neg_val)`` grid points per turn) reads
``lambda * eigen_scale`` as a fraction of a turn.  ``eigen_scale`` is chosen
so that ``|lambda_min|`` lands exactly on the grid point
``k = floor(|lambda_min| (2^n_qpe - 1) / |lambda_max|)``; the component of
``b`` along the smallest eigenvalue dominates ``A^-1 b``, so it is the one
that must not suffer rounding.  ``|lambda_max|`` then maps to at most
``(2^n_qpe - 1) / N``, which stays below one half turn when the sign bit is
present.  The inversion constant is ``C = 1/N``, the smallest nonzero
magnitude the register can hold, so ``|C / lambda~| <= 1`` always.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

TWO_PI = 2 * math.pi
NEG_EIG_TOL = 1e-12


class ResourceError(ValueError):
    pass


@dataclass(frozen=True)
class ResourcePlan:
    n_data: int
    n_qpe: int
    n_neg_val: int
    n_total: int
    evolution_time: float
    eigen_scale: float
    c_const: float
    kappa: float
    lambda_min_abs: float
    lambda_max_abs: float
    lambda_min_grid: int
    n_ancilla: int = 1

    @property
    def n_phase(self) -> int:
        """Width of the phase register, sign bit included."""
        return self.n_qpe + self.n_neg_val

    @property
    def n_qubits(self) -> int:
        return self.n_data + self.n_phase + self.n_ancilla

    @property
    def phase_per_unit(self) -> float:
        """Fraction of a turn per unit eigenvalue: ``eigen_scale * t / 2pi``."""
        return self.eigen_scale * self.evolution_time / TWO_PI

    @property
    def rotation_constant(self) -> float:
        """``C`` expressed in eigenvalue units of the input matrix."""
        return self.c_const / self.phase_per_unit

    def table1(self) -> dict:
        """Counts in the reporting convention of the benchmark table."""
        n_qpe = self.n_qpe + self.n_neg_val
        return {"n_data": self.n_data, "n_qpe": n_qpe,
                "n_total": self.n_data + n_qpe + self.n_ancilla}

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(n_phase=self.n_phase, n_qubits=self.n_qubits,
                 rotation_constant=self.rotation_constant, table1=self.table1())
        return d


def qpe_bits(n_data: int, kappa: float) -> int:
    return max(n_data + 1, math.ceil(math.log2(kappa + 1)))


def _grid_index(lmin: float, lmax: float, n_qpe: int) -> int:
    ratio = lmin * ((1 << n_qpe) - 1) / lmax
    if abs(ratio - round(ratio)) < 1e-7:
        ratio = round(ratio)
    return int(math.floor(ratio))


def estimate_resources(dimension: int, condition_number: float,
                       has_negative_eigenvalues: bool, n_qpe: int | None = None,
                       lambda_max_abs: float = 1.0) -> ResourcePlan:
    """Resource plan from matrix size and condition number alone.

    Without eigenvalues the spectrum is taken as ``[lambda_max/kappa,
    lambda_max]``.  ``n_qpe`` overrides the formula value.
    """
    if dimension < 1 or dimension & (dimension - 1):
        raise ResourceError(f"dimension must be a power of two, got {dimension}")
    if not condition_number >= 1:
        raise ResourceError(f"condition number must be >= 1, got {condition_number}")
    n_data = dimension.bit_length() - 1
    n_q = qpe_bits(n_data, condition_number) if n_qpe is None else int(n_qpe)
    if n_q < 1:
        raise ResourceError("n_qpe must be >= 1")
    n_neg = 1 if has_negative_eigenvalues else 0
    lmax = float(lambda_max_abs)
    lmin = lmax / condition_number
    k = _grid_index(lmin, lmax, n_q)
    if k < 1:
        raise ResourceError(
            f"{n_q} phase bits cannot resolve condition number {condition_number:.4g}; "
            f"need n_qpe >= {qpe_bits(0, condition_number)}")
    grid = 1 << (n_q + n_neg)
    return ResourcePlan(
        n_data=n_data, n_qpe=n_q, n_neg_val=n_neg, n_total=n_data + n_q + n_neg,
        evolution_time=TWO_PI, eigen_scale=k / (grid * lmin), c_const=1.0 / grid,
        kappa=float(condition_number), lambda_min_abs=lmin, lambda_max_abs=lmax,
        lambda_min_grid=k,
    )


def plan_for_matrix(matrix, n_qpe: int | None = None) -> ResourcePlan:
    """Resource plan from the spectrum of a Hermitian matrix."""
    a = np.asarray(matrix)
    w = np.linalg.eigvalsh(a)
    mags = np.abs(w)
    lmax, lmin = float(mags.max()), float(mags.min())
    if lmax == 0 or lmin <= 1e-12 * lmax:
        raise ResourceError("matrix is singular to working precision")
    neg = bool(w.min() < -NEG_EIG_TOL * lmax)
    return estimate_resources(a.shape[0], lmax / lmin, neg, n_qpe=n_qpe, lambda_max_abs=lmax)
