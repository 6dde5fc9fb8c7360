"""JSON experiment configuration shared by the CLI subcommands.

Example::

    {
      "system": {"type": "chain", "n": 50, "mass": 2.0, "stiffness": 2e6,
                 "alpha": 1e-4, "beta": 1e-3},
      "target": {"mode": 5, "factor": 0.95},
      "grid": {"modes": [1, 10], "points": 40},
      "budget": 10, "snr_db": 20, "mu_fraction": 0.1, "seeds": [0, 1, 2]
    }

``system.type`` is ``chain``, ``irregular`` or ``file`` (``path`` to a system
JSON). ``target`` is one of ``{"omega": rad/s}``, ``{"frequency_hz": Hz}`` or
``{"mode": r, "factor": s}`` meaning s times the r-th natural frequency.
``grid`` is ``{"frequencies_hz": [...]}``, ``{"f_min_hz", "f_max_hz",
"points"}`` or ``{"modes": [a, b], "points", "lower_factor",
"upper_factor"}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidParameterError, ParseError
from .lasso import DEFAULT_MAX_ITER, DEFAULT_TOL
from .modal_model import MechanicalSystem, ModalData, build_chain, build_irregular


@dataclass
class ExperimentConfig:
    system: dict = field(default_factory=lambda: {"type": "chain"})
    target: dict = field(default_factory=lambda: {"mode": 5, "factor": 0.95})
    grid: dict = field(default_factory=lambda: {"modes": [1, 10], "points": 40})
    budget: int = 10
    snr_db: float = 20.0
    mu_fraction: float = 0.1
    seeds: list = field(default_factory=lambda: [0])
    tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    spatial: bool = True
    configurations: list = field(default_factory=lambda: ["full", "optimal", "antinodal"])
    force_node: int | None = None

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentConfig:
        known = set(cls.__dataclass_fields__)
        d = dict(d)
        if "seed" in d and "seeds" not in d:
            d["seeds"] = [d.pop("seed")]
        d.pop("seed", None)
        unknown = set(d) - known
        if unknown:
            raise InvalidParameterError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**d)
        if cfg.system.get("type", "chain") == "irregular":
            # node numbering of a random system carries no geometry
            cfg.spatial = bool(d.get("spatial", False))
        return cfg

    @classmethod
    def load(cls, path) -> ExperimentConfig:
        try:
            d = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(path, exc.lineno, exc.colno, exc.msg) from exc
        return cls.from_dict(d)

    def build_system(self, base_dir=None) -> MechanicalSystem:
        s = dict(self.system)
        kind = s.pop("type", "chain")
        if kind == "chain":
            return build_chain(int(s.get("n", 50)), float(s.get("mass", 2.0)),
                               float(s.get("stiffness", 2e6)), float(s.get("alpha", 1e-4)),
                               float(s.get("beta", 1e-3)))
        if kind == "irregular":
            return build_irregular(int(s.get("n", 50)), int(s.get("seed", 0)),
                                   float(s.get("lambda_min", 1e5)), float(s.get("lambda_max", 1e6)),
                                   float(s.get("zeta_min", 0.01)), float(s.get("zeta_max", 0.1)),
                                   int(s.get("max_retries", 20)))
        if kind == "file":
            path = Path(s["path"])
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            return MechanicalSystem.from_dict(json.loads(path.read_text(encoding="utf-8")))
        raise InvalidParameterError(f"unknown system type {kind!r}")


def target_omega(target: dict, modal: ModalData) -> float:
    if "omega" in target:
        return float(target["omega"])
    if "frequency_hz" in target:
        return 2.0 * np.pi * float(target["frequency_hz"])
    if "mode" in target:
        mode = int(target["mode"])
        if not 1 <= mode <= modal.n_modes:
            raise InvalidParameterError(f"target mode {mode} out of range")
        return float(target.get("factor", 1.0)) * float(modal.natural_freqs[mode - 1])
    raise InvalidParameterError("target needs 'omega', 'frequency_hz' or 'mode'")


def frequency_grid_hz(grid: dict, modal: ModalData) -> np.ndarray:
    if "frequencies_hz" in grid:
        return np.asarray(grid["frequencies_hz"], dtype=float)
    points = int(grid.get("points", 40))
    if "f_min_hz" in grid:
        return np.linspace(float(grid["f_min_hz"]), float(grid["f_max_hz"]), points)
    lo_mode, hi_mode = (int(m) for m in grid.get("modes", [1, 10]))
    w = modal.natural_freqs
    lo = float(grid.get("lower_factor", 0.9)) * w[lo_mode - 1]
    hi = float(grid.get("upper_factor", 1.05)) * w[hi_mode - 1]
    return np.linspace(lo, hi, points) / (2.0 * np.pi)
