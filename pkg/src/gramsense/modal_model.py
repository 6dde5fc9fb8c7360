"""Discrete mechanical systems and their modal parameters.

Mode numbers are 1-based throughout the package (``mode=5`` is the fifth
mode); node indices are 0-based array positions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    ConstructionError,
    DecompositionError,
    InvalidParameterError,
    RigidBodyModeError,
)

_SYM_RTOL = 1e-10


def _check_square_symmetric(name, a, n):
    if a.shape != (n, n):
        raise InvalidParameterError(f"{name} must be {n}x{n}, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidParameterError(f"{name} contains non-finite entries")
    scale = max(np.abs(a).max(), 1e-300)
    if np.abs(a - a.T).max() > _SYM_RTOL * scale:
        raise InvalidParameterError(f"{name} is not symmetric")


@dataclass(frozen=True, eq=False)
class MechanicalSystem:
    """Mass (kg), stiffness (N/m) and viscous damping (N s/m) matrices of an N-dof structure."""

    mass: np.ndarray
    stiffness: np.ndarray
    damping: np.ndarray

    def __post_init__(self):
        mass = np.array(self.mass, dtype=float)
        if mass.ndim != 2 or mass.shape[0] < 1:
            raise InvalidParameterError("mass must be a non-empty square matrix")
        n = mass.shape[0]
        stiffness = np.array(self.stiffness, dtype=float)
        damping = np.array(self.damping, dtype=float)
        for name, a in (("mass", mass), ("stiffness", stiffness), ("damping", damping)):
            _check_square_symmetric(name, a, n)
            a.setflags(write=False)
        object.__setattr__(self, "mass", mass)
        object.__setattr__(self, "stiffness", stiffness)
        object.__setattr__(self, "damping", damping)

    @property
    def n_dof(self) -> int:
        return self.mass.shape[0]

    def with_damping(self, damping) -> MechanicalSystem:
        return MechanicalSystem(self.mass, self.stiffness, damping)

    def to_dict(self) -> dict:
        return {
            "n_dof": self.n_dof,
            "mass": self.mass.tolist(),
            "stiffness": self.stiffness.tolist(),
            "damping": self.damping.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> MechanicalSystem:
        system = cls(np.array(d["mass"]), np.array(d["stiffness"]), np.array(d["damping"]))
        if "n_dof" in d and int(d["n_dof"]) != system.n_dof:
            raise InvalidParameterError(f"n_dof={d['n_dof']} does not match matrix size {system.n_dof}")
        return system


@dataclass(frozen=True, eq=False)
class ModalData:
    """Natural frequencies (rad/s), modal damping ratios and mass-normalized mode shapes.

    Column ``r - 1`` of ``mode_shapes`` is the shape of mode ``r``.
    """

    natural_freqs: np.ndarray
    damping_ratios: np.ndarray
    mode_shapes: np.ndarray
    mass: np.ndarray

    @property
    def n_modes(self) -> int:
        return self.natural_freqs.shape[0]

    def shape(self, mode: int) -> np.ndarray:
        return self.mode_shapes[:, _mode_index(self, mode)]

    def to_dict(self) -> dict:
        return {
            "natural_freqs": self.natural_freqs.tolist(),
            "natural_freqs_hz": (self.natural_freqs / (2 * np.pi)).tolist(),
            "damping_ratios": self.damping_ratios.tolist(),
            "mode_shapes": self.mode_shapes.tolist(),
            "mass": self.mass.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> ModalData:
        return cls(
            np.array(d["natural_freqs"], dtype=float),
            np.array(d["damping_ratios"], dtype=float),
            np.array(d["mode_shapes"], dtype=float),
            np.array(d["mass"], dtype=float),
        )


def _mode_index(modal: ModalData, mode: int) -> int:
    mode = int(mode)
    if not 1 <= mode <= modal.n_modes:
        raise InvalidParameterError(f"mode {mode} out of range 1..{modal.n_modes}")
    return mode - 1


def chain_stiffness(n: int, k: float) -> np.ndarray:
    """Fixed-fixed chain: n masses, n + 1 identical springs, both ends grounded."""
    return k * (2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1))


def build_chain(n: int, mass_each: float, stiffness_each: float,
                alpha: float = 0.0, beta: float = 0.0) -> MechanicalSystem:
    """Regular fixed-fixed mass-spring-dashpot chain with damping ``alpha*M + beta*K``."""
    if int(n) != n or n < 2:
        raise InvalidParameterError(f"chain needs n >= 2 masses, got {n}")
    if not mass_each > 0 or not stiffness_each > 0:
        raise InvalidParameterError("mass and stiffness per element must be positive")
    if alpha < 0 or beta < 0:
        raise InvalidParameterError("alpha and beta must be non-negative")
    n = int(n)
    mass = mass_each * np.eye(n)
    stiffness = chain_stiffness(n, stiffness_each)
    return MechanicalSystem(mass, stiffness, alpha * mass + beta * stiffness)


def chain_natural_freqs(n: int, mass_each: float, stiffness_each: float) -> np.ndarray:
    """Closed-form spectrum of the uniform fixed-fixed chain, rad/s."""
    r = np.arange(1, n + 1)
    return 2.0 * math.sqrt(stiffness_each / mass_each) * np.sin(r * np.pi / (2 * (n + 1)))


def modal_damping_ratios(mode_shapes, natural_freqs, damping) -> np.ndarray:
    """Diagonal of Phi^T C Phi over 2*omega_r (exact for proportional damping)."""
    modal_c = np.einsum("ir,ij,jr->r", mode_shapes, damping, mode_shapes)
    return modal_c / (2.0 * natural_freqs)


def _undamped_modes(mass, stiffness, rigid_tol):
    try:
        lam, phi = scipy.linalg.eigh(stiffness, mass)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"generalized eigenproblem failed: {exc}") from exc
    scale = max(abs(lam[-1]), 1e-300)
    rigid = np.nonzero(lam <= rigid_tol * scale)[0]
    if rigid.size:
        raise RigidBodyModeError(rigid + 1)
    # largest-magnitude entry of every mode shape is made positive
    pivots = np.argmax(np.abs(phi), axis=0)
    signs = np.sign(phi[pivots, np.arange(phi.shape[1])])
    phi = phi * signs
    return np.sqrt(lam), phi


def solve_modes(system: MechanicalSystem, rigid_tol: float = 1e-10) -> ModalData:
    """Solve K phi = w^2 M phi with mass-normalized, sign-fixed shapes."""
    omega, phi = _undamped_modes(system.mass, system.stiffness, rigid_tol)
    zeta = modal_damping_ratios(phi, omega, system.damping)
    for a in (omega, zeta, phi):
        a.setflags(write=False)
    return ModalData(omega, zeta, phi, system.mass)


def build_irregular(n: int, seed, lambda_min: float = 1e5, lambda_max: float = 1e6,
                    zeta_min: float = 0.01, zeta_max: float = 0.1, max_retries: int = 20,
                    coupling: float = 0.5) -> MechanicalSystem:
    """Randomized irregular system with non-proportional viscous damping.

    M = R^T R with R standard Gaussian; K = Q diag(linspace(lambda_min,
    lambda_max)) Q^T with Q orthonormal from the QR of a Gaussian matrix.

    The damping matrix is built in modal coordinates, C = M Phi B Phi^T M,
    where B has diagonal ``2 zeta_r omega_r`` and a symmetric Gaussian
    off-diagonal coupling of relative strength ``coupling`` (spectral norm,
    kept below 1 so C stays positive-definite). The target ratios are drawn
    uniformly and scaled by one scalar so that the largest equals
    ``zeta_max``; draws that leave ``[zeta_min, zeta_max]`` after
    recomputation are resampled up to ``max_retries`` times.
    """
    if int(n) != n or n < 2:
        raise InvalidParameterError(f"need n >= 2, got {n}")
    if not 0 < lambda_min < lambda_max:
        raise InvalidParameterError("require 0 < lambda_min < lambda_max")
    if not 0 < zeta_min < zeta_max < 1:
        raise InvalidParameterError("require 0 < zeta_min < zeta_max < 1")
    if not 0 <= coupling < 1:
        raise InvalidParameterError("coupling must lie in [0, 1)")
    if max_retries < 1:
        raise InvalidParameterError("max_retries must be >= 1")
    n = int(n)
    rng = np.random.default_rng(seed)
    r_mat = rng.standard_normal((n, n))
    mass = r_mat.T @ r_mat
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    stiffness = (q * np.linspace(lambda_min, lambda_max, n)) @ q.T
    mass = 0.5 * (mass + mass.T)
    stiffness = 0.5 * (stiffness + stiffness.T)

    omega, phi = _undamped_modes(mass, stiffness, 1e-10)
    to_modal = phi.T @ mass  # inverse of phi
    lo = hi = float("nan")
    for _ in range(max_retries):
        raw = rng.uniform(zeta_min, zeta_max, n)
        target = raw * (zeta_max / raw.max())
        s = rng.standard_normal((n, n))
        s = np.triu(s, 1)
        s = s + s.T
        norm = np.linalg.norm(s, 2)
        if norm > 0:
            s *= coupling / norm
        d = np.sqrt(2.0 * target * omega)
        b = d[:, None] * (np.eye(n) + s) * d[None, :]
        damping = to_modal.T @ b @ to_modal
        damping = 0.5 * (damping + damping.T)
        zeta = modal_damping_ratios(phi, omega, damping)
        lo, hi = float(zeta.min()), float(zeta.max())
        slack = 1e-9 * zeta_max
        if lo >= zeta_min - slack and hi <= zeta_max + slack and lo > 0:
            return MechanicalSystem(mass, stiffness, damping)
    raise ConstructionError(
        f"could not place damping ratios in [{zeta_min}, {zeta_max}] after {max_retries} "
        f"draws; last achieved range [{lo:.4g}, {hi:.4g}]"
    )


def mof(modal: ModalData, r: int, omega: float) -> float:
    """Modal overlap factor 2*zeta_r*omega / (omega_{r+1} - omega_r) for 1-based mode r."""
    r = int(r)
    if not 1 <= r <= modal.n_modes - 1:
        raise InvalidParameterError(
            f"MOF undefined for mode {r}: needs a successor mode (1 <= r <= {modal.n_modes - 1})"
        )
    gap = modal.natural_freqs[r] - modal.natural_freqs[r - 1]
    num = 2.0 * modal.damping_ratios[r - 1] * omega
    if gap <= 0:
        return math.inf if num != 0 else 0.0
    return float(num / gap)


def nearest_mode(modal: ModalData, omega: float) -> int:
    """1-based number of the mode whose natural frequency is closest to omega."""
    return int(np.argmin(np.abs(modal.natural_freqs - omega))) + 1
