"""Coherence (Gram) matrix of a normalized FRF and its modal approximation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, PartialMeasurementError
from .frf import NormalizedFrf
from .modal_model import ModalData, _mode_index


@dataclass(frozen=True, eq=False)
class GramMatrix:
    values: np.ndarray
    omega: float
    sensor_rows: tuple

    @property
    def size(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class GramNorms:
    frobenius: float
    offdiag_frobenius: float
    max_offdiag: float

    def to_dict(self) -> dict:
        return {
            "frobenius": self.frobenius,
            "offdiag_frobenius": self.offdiag_frobenius,
            "max_offdiag": self.max_offdiag,
        }


def hermitian_product(a: np.ndarray) -> np.ndarray:
    g = a.conj().T @ a
    # exact Hermitian symmetry regardless of BLAS summation order
    return 0.5 * (g + g.conj().T)


def gram(h_bar, rows=None) -> GramMatrix:
    """G = H_bar^H H_bar, optionally over a subset of row positions (no re-normalization)."""
    if isinstance(h_bar, NormalizedFrf):
        mat, omega, labels = h_bar.h_bar, h_bar.omega, h_bar.rows
    else:
        mat = np.asarray(h_bar, dtype=complex)
        omega, labels = float("nan"), tuple(range(mat.shape[0])) if mat.ndim == 2 else ()
    if mat.ndim != 2 or mat.size == 0:
        raise InvalidParameterError("gram needs a non-empty 2-D matrix")
    if rows is not None:
        rows = np.asarray(rows, dtype=int)
        mat = mat[rows]
        labels = tuple(labels[i] for i in rows)
    return GramMatrix(hermitian_product(mat), omega, tuple(labels))


def _full_col_norms(modal: ModalData, col_norms):
    n = modal.mode_shapes.shape[0]
    if isinstance(col_norms, NormalizedFrf):
        if sorted(col_norms.rows) != list(range(n)) or sorted(col_norms.cols) != list(range(n)):
            raise PartialMeasurementError(
                "modal Gram approximation is only defined for full measurement (all N rows and columns)"
            )
        col_norms = col_norms.col_norms
    norms = np.asarray(col_norms, dtype=float)
    if norms.shape != (n,):
        raise PartialMeasurementError(f"expected {n} column norms from the full FRF, got {norms.shape}")
    if np.any(norms <= 0):
        raise InvalidParameterError("column norms must be positive")
    return norms


def _self_term_denominator(modal, p, omega, hermitian):
    wp = modal.natural_freqs[p]
    d = wp**2 - omega**2 + 2j * modal.damping_ratios[p] * wp * omega
    return abs(d) ** 2 if hermitian else d**2


def gram_mode_contribution(modal: ModalData, p: int, omega: float, col_norms,
                           hermitian: bool = True) -> np.ndarray:
    """Single-mode term w^4 F [phi_p phi_p^T / (M_pp D_p^2)] F of the full-measurement Gram.

    With ``hermitian=True`` (default) the squared denominator is |D_p|^2,
    which is what H_bar^H H_bar actually produces for real modes; with
    ``hermitian=False`` it is the complex square D_p^2 written without
    conjugation. For a uniform-mass structure the hermitian form summed over
    all modes equals the exact Gram matrix.
    """
    idx = _mode_index(modal, p)
    norms = _full_col_norms(modal, col_norms)
    phi = modal.mode_shapes[:, idx]
    m_pp = modal.mass[idx, idx]
    scale = omega**4 / (m_pp * _self_term_denominator(modal, idx, omega, hermitian))
    f_phi = phi / norms
    return scale * np.outer(f_phi, f_phi)


def gram_modal_approx(modal: ModalData, mode_subset, omega: float, col_norms,
                      hermitian: bool = True) -> np.ndarray:
    """Sum of single-mode Gram contributions over ``mode_subset`` (1-based mode numbers)."""
    modes = [int(p) for p in mode_subset]
    if not modes:
        raise InvalidParameterError("mode_subset is empty")
    norms = _full_col_norms(modal, col_norms)
    n = norms.shape[0]
    out = np.zeros((n, n), dtype=complex)
    for p in sorted(modes):
        out += gram_mode_contribution(modal, p, omega, norms, hermitian)
    return out


def nearby_modes(modal: ModalData, omega: float, window: float = 0.5, minimum: int = 4) -> list:
    """Modes with natural frequency within +-window*omega of omega, at least ``minimum`` of them."""
    dist = np.abs(modal.natural_freqs - omega)
    inside = np.nonzero(dist <= window * omega)[0]
    if inside.size < minimum:
        inside = np.argsort(dist, kind="stable")[:minimum]
    return sorted(int(i) + 1 for i in inside)


def cross_term_residual(g_exact, g_approx) -> np.ndarray:
    """Part of the exact Gram matrix not explained by the single-mode (self) terms."""
    g = g_exact.values if isinstance(g_exact, GramMatrix) else np.asarray(g_exact)
    return g - np.asarray(g_approx)


def relative_error(g_exact, g_approx) -> float:
    g = g_exact.values if isinstance(g_exact, GramMatrix) else np.asarray(g_exact)
    return float(np.linalg.norm(g - g_approx) / np.linalg.norm(g))


def gram_norms(g) -> GramNorms:
    values = g.values if isinstance(g, GramMatrix) else np.asarray(g)
    mag = np.abs(values)
    off = mag.copy()
    np.fill_diagonal(off, 0.0)
    return GramNorms(
        frobenius=float(np.linalg.norm(mag)),
        offdiag_frobenius=float(np.linalg.norm(off)),
        max_offdiag=float(off.max()) if off.size > 1 else 0.0,
    )
