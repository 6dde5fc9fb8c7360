"""Acceleration FRF matrices (accelerance, (m/s^2)/N) and column normalization."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateColumnError,
    DimensionMismatchError,
    InvalidParameterError,
    SingularSystemError,
)
from .modal_model import MechanicalSystem, ModalData

DEGENERATE_RATIO = 1e-300


def _index_list(idx, n, what):
    if idx is None:
        return tuple(range(n))
    out = tuple(int(i) for i in idx)
    if len(out) == 0:
        raise InvalidParameterError(f"{what} index list is empty")
    if len(set(out)) != len(out):
        raise InvalidParameterError(f"{what} indices must be unique, got {list(out)}")
    bad = [i for i in out if not 0 <= i < n]
    if bad:
        raise InvalidParameterError(f"{what} indices out of range 0..{n - 1}: {bad}")
    return out


@dataclass(frozen=True, eq=False)
class FrfMatrix:
    """Complex FRF block H[m, n] = response at node rows[m] / force at node cols[n]."""

    omega: float
    rows: tuple
    cols: tuple
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=complex)
        rows = tuple(int(i) for i in self.rows)
        cols = tuple(int(i) for i in self.cols)
        if values.shape != (len(rows), len(cols)):
            raise DimensionMismatchError(
                f"values shape {values.shape} does not match {len(rows)} rows x {len(cols)} cols"
            )
        if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
            raise InvalidParameterError("row and column node indices must be unique")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "omega", float(self.omega))

    @property
    def shape(self):
        return self.values.shape

    def take_rows(self, rows) -> FrfMatrix:
        """Sub-block restricted to the given sensor node labels (order kept as given)."""
        pos = {r: i for i, r in enumerate(self.rows)}
        try:
            sel = [pos[int(r)] for r in rows]
        except KeyError as exc:
            raise InvalidParameterError(f"sensor node {exc.args[0]} not among FRF rows") from None
        return FrfMatrix(self.omega, [self.rows[i] for i in sel], self.cols, self.values[sel])


@dataclass(frozen=True, eq=False)
class NormalizedFrf:
    """Column-normalized FRF: h_bar = H F with F = diag(1 / col_norms)."""

    h_bar: np.ndarray
    col_norms: np.ndarray
    omega: float
    rows: tuple = field(default=())
    cols: tuple = field(default=())

    @property
    def weights(self) -> np.ndarray:
        """Diagonal of F, i.e. 1/||h_n||."""
        return 1.0 / self.col_norms

    @property
    def n_rows(self) -> int:
        return self.h_bar.shape[0]

    def row_block(self, positions) -> np.ndarray:
        """Rows of h_bar at the given positions, NOT re-normalized."""
        return self.h_bar[np.asarray(positions, dtype=int)]


def frf_modal(modal: ModalData, rows=None, cols=None, omega: float = 1.0,
              mode_subset=None) -> FrfMatrix:
    """Modal superposition h_mn = sum_r -w^2 phi_mr phi_nr / (w_r^2 - w^2 + 2j zeta_r w_r w).

    Valid for real (proportionally damped) modes. ``mode_subset`` holds 1-based
    mode numbers; default is every mode.
    """
    if not omega > 0:
        raise InvalidParameterError(f"omega must be positive, got {omega}")
    n = modal.mode_shapes.shape[0]
    rows = _index_list(rows, n, "row")
    cols = _index_list(cols, n, "column")
    if mode_subset is None:
        modes = np.arange(modal.n_modes)
    else:
        modes = np.array(sorted({int(m) for m in mode_subset}), dtype=int)
        if modes.size == 0:
            raise InvalidParameterError("mode_subset is empty")
        if modes.min() < 1 or modes.max() > modal.n_modes:
            raise InvalidParameterError(f"mode_subset must lie in 1..{modal.n_modes}")
        modes = modes - 1
    wr = modal.natural_freqs[modes]
    zr = modal.damping_ratios[modes]
    denom = wr**2 - omega**2 + 2j * zr * wr * omega
    phi = modal.mode_shapes[:, modes]
    values = (phi[list(rows)] * (-(omega**2) / denom)) @ phi[list(cols)].T
    return FrfMatrix(omega, rows, cols, values)


def dynamic_stiffness(system: MechanicalSystem, omega: float) -> np.ndarray:
    return system.stiffness - omega**2 * system.mass + 1j * omega * system.damping


def frf_direct(system: MechanicalSystem, rows=None, cols=None, omega: float = 1.0) -> FrfMatrix:
    """Exact accelerance -w^2 (K - w^2 M + j w C)^{-1}; valid for any viscous damping."""
    if not omega > 0:
        raise InvalidParameterError(f"omega must be positive, got {omega}")
    n = system.n_dof
    rows = _index_list(rows, n, "row")
    cols = _index_list(cols, n, "column")
    z = dynamic_stiffness(system, omega)
    if np.linalg.cond(z) > 1.0 / np.finfo(float).eps:
        raise SingularSystemError(f"dynamic stiffness is singular at omega={omega!r} rad/s")
    rhs = np.zeros((n, len(cols)), dtype=complex)
    rhs[list(cols), np.arange(len(cols))] = 1.0
    receptance = np.linalg.solve(z, rhs)
    return FrfMatrix(omega, rows, cols, -(omega**2) * receptance[list(rows)])


def normalize_columns(h) -> NormalizedFrf:
    """Scale every column to unit l2 norm; the norms are kept for de-normalization."""
    if isinstance(h, FrfMatrix):
        values, omega, rows, cols = h.values, h.omega, h.rows, h.cols
    else:
        values = np.asarray(h, dtype=complex)
        if values.ndim != 2:
            raise DimensionMismatchError("expected a 2-D matrix")
        omega, rows, cols = float("nan"), tuple(range(values.shape[0])), tuple(range(values.shape[1]))
    norms = np.linalg.norm(values, axis=0)
    biggest = norms.max() if norms.size else 0.0
    for j, nj in enumerate(norms):
        if nj == 0 or nj < DEGENERATE_RATIO * biggest:
            raise DegenerateColumnError(cols[j], nj)
    h_bar = values / norms
    h_bar.setflags(write=False)
    norms.setflags(write=False)
    return NormalizedFrf(h_bar, norms, omega, tuple(rows), tuple(cols))
