"""Simulation protocol: noisy unit-force experiments, OD-MAE, frequency sweeps, file input."""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass, field

import numpy as np

from . import io as gio
from .errors import DegenerateColumnError, DimensionMismatchError, InvalidParameterError, ReconstructionError
from .frf import frf_direct, frf_modal, normalize_columns
from .gram import gram, gram_norms
from .lasso import DEFAULT_MAX_ITER, DEFAULT_TOL, LassoProblem, default_mu, solve, solve_batch
from .modal_model import MechanicalSystem, ModalData, nearest_mode, solve_modes
from .placement import antinodal_select, greedy_select, offdiag_objective

CONFIGURATIONS = ("full", "optimal", "antinodal")


def task_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for one task, derived from the root seed and a task key."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)))


def add_noise(y, snr_db: float, seed=0) -> np.ndarray:
    """Add circular complex Gaussian noise scaled to hit ``snr_db`` exactly.

    SNR = 20 log10(||y|| / ||n||). ``snr_db = inf`` returns y unchanged.
    ``seed`` may be an int or a numpy Generator.
    """
    y = np.asarray(y, dtype=complex)
    ny = np.linalg.norm(y)
    if ny == 0:
        raise InvalidParameterError("cannot set an SNR on a zero measurement vector")
    if np.isposinf(snr_db):
        return y.copy()
    if not np.isfinite(snr_db):
        raise InvalidParameterError(f"snr_db must be finite or +inf, got {snr_db}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n = rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape)
    n *= ny * 10.0 ** (-snr_db / 20.0) / np.linalg.norm(n)
    return y + n


@dataclass(frozen=True, eq=False)
class ReconstructionMap:
    """Row i holds the de-normalized force estimate for a unit force at node i."""

    values: np.ndarray
    omega: float
    sensor_set: tuple
    snr_db: float
    seed: int
    converged: bool = True
    max_kkt: float = 0.0
    max_iterations: int = 0

    @property
    def od_mae(self) -> float:
        return od_mae(self.values)

    def to_dict(self) -> dict:
        return {
            "omega": self.omega,
            "sensor_set": list(self.sensor_set),
            "snr_db": self.snr_db,
            "seed": self.seed,
            "od_mae": self.od_mae,
            "converged": self.converged,
            "max_kkt": self.max_kkt,
            "max_iterations": self.max_iterations,
        }


def od_mae(recon) -> float:
    """Mean |x_ij| over the off-diagonal entries of a stacked reconstruction map."""
    x = recon.values if isinstance(recon, ReconstructionMap) else np.asarray(recon)
    n = x.shape[0]
    if x.shape != (n, n) or n < 2:
        raise InvalidParameterError("OD-MAE needs a square map with N >= 2")
    mag = np.abs(x)
    return float((mag.sum() - np.trace(mag)) / (n * (n - 1)))


def reconstruction_maps(system: MechanicalSystem, sensors, omega: float, seeds=(0,),
                        snr_db: float = 20.0, mu_fraction: float = 0.1,
                        reconstruction_modes=None, modal: ModalData | None = None,
                        tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> list:
    """One reconstruction map per seed, all solved in a single batch.

    Measurements come from the exact FRF. Inversion uses the same matrix
    unless ``reconstruction_modes`` (1-based) is given, in which case a
    modal-truncated FRF emulates model mismatch. Noise is drawn afresh for
    every force index from ``task_rng(seed, i)``.
    """
    sensors = tuple(int(s) for s in sensors)
    if not sensors:
        raise InvalidParameterError("sensor set is empty")
    if not omega > 0:
        raise InvalidParameterError(f"omega must be positive, got {omega}")
    n = system.n_dof
    h_sim = frf_direct(system, sensors, None, omega)
    if reconstruction_modes is None:
        h_inv = h_sim
    else:
        modal = modal if modal is not None else solve_modes(system)
        h_inv = frf_modal(modal, sensors, None, omega, reconstruction_modes)
    try:
        nh = normalize_columns(h_inv)
    except DegenerateColumnError as exc:
        raise ReconstructionError(exc.column, exc) from exc
    seeds = [int(s) for s in seeds]
    ys, mus, norms = [], [], []
    for s in seeds:
        for i in range(n):
            y = h_sim.values[:, i]
            try:
                y = add_noise(y, snr_db, task_rng(s, i))
            except InvalidParameterError as exc:
                raise ReconstructionError(i, exc) from exc
            y_norm = np.linalg.norm(y)
            y_bar = y / y_norm
            ys.append(y_bar)
            norms.append(y_norm)
            mus.append(default_mu(nh.h_bar, y_bar, mu_fraction))
    sols = solve_batch(nh.h_bar, np.array(ys).T, np.array(mus), nh.weights, np.array(norms),
                       tol=tol, max_iter=max_iter)
    out = []
    for k, s in enumerate(seeds):
        chunk = sols[k * n:(k + 1) * n]
        out.append(ReconstructionMap(
            values=np.array([sol.x_hat for sol in chunk]),
            omega=float(omega),
            sensor_set=sensors,
            snr_db=float(snr_db),
            seed=s,
            converged=all(sol.converged for sol in chunk),
            max_kkt=max(sol.kkt_residual for sol in chunk),
            max_iterations=max(sol.iterations for sol in chunk),
        ))
    return out


def reconstruction_map(system: MechanicalSystem, sensors, omega: float, snr_db: float = 20.0,
                       mu_fraction: float = 0.1, seed: int = 0, **kwargs) -> ReconstructionMap:
    return reconstruction_maps(system, sensors, omega, (seed,), snr_db, mu_fraction, **kwargs)[0]


def full_normalized_frf(system: MechanicalSystem, omega: float):
    return normalize_columns(frf_direct(system, None, None, omega))


def sensor_configurations(system: MechanicalSystem, omega: float, budget: int,
                          modal: ModalData | None = None, spatial: bool = True,
                          h_bar_full=None) -> dict:
    """Sensor sets for the three compared layouts at one frequency.

    ``antinodal`` uses the mode nearest to omega, topped up with the next
    largest amplitudes when that mode has fewer separated anti-nodes than
    the budget.
    """
    modal = modal if modal is not None else solve_modes(system)
    nh = h_bar_full if h_bar_full is not None else full_normalized_frf(system, omega)
    opt = greedy_select(nh, budget)
    anti = antinodal_select(modal, nearest_mode(modal, omega), budget, nh, fill=True, spatial=spatial)
    return {
        "full": tuple(range(system.n_dof)),
        "optimal": opt.selected,
        "antinodal": anti.selected,
    }


@dataclass
class SweepReport:
    frequencies_hz: np.ndarray
    budget: int
    snr_db: float
    mu_fraction: float
    seeds: tuple
    series: dict = field(default_factory=dict)  # config -> {metric: list}
    selected: dict = field(default_factory=dict)  # config -> [tuple per frequency]

    def to_dict(self) -> dict:
        return {
            "frequencies_hz": [float(f) for f in self.frequencies_hz],
            "budget": self.budget,
            "snr_db": self.snr_db,
            "mu_fraction": self.mu_fraction,
            "seeds": list(self.seeds),
            "series": {c: {k: [float(v) for v in vals] for k, vals in m.items()}
                       for c, m in self.series.items()},
            "selected": {c: [list(s) for s in sets] for c, sets in self.selected.items()},
        }

    def to_csv(self) -> str:
        """Long format: frequency_hz, configuration, metric columns, sensors (space separated)."""
        metrics = ["gram_frobenius", "offdiag_frobenius", "max_offdiag", "selection_objective", "od_mae"]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["frequency_hz", "configuration"] + metrics + ["sensors"])
        for k, f in enumerate(self.frequencies_hz):
            for c in self.series:
                row = [repr(float(f)), c]
                row += [repr(float(self.series[c][m][k])) for m in metrics]
                row.append(" ".join(str(s) for s in self.selected[c][k]))
                w.writerow(row)
        return buf.getvalue()

    def activation_map(self, n_nodes: int) -> np.ndarray:
        """Frequency x node 0/1 matrix of the optimal layout."""
        out = np.zeros((len(self.frequencies_hz), n_nodes), dtype=int)
        for k, sel in enumerate(self.selected["optimal"]):
            out[k, list(sel)] = 1
        return out


def frequency_sweep(system: MechanicalSystem, freq_grid_hz, budget: int, snr_db: float = 20.0,
                    mu_fraction: float = 0.1, seeds=(0,), spatial: bool = True,
                    reconstruct: bool = True, tol: float = DEFAULT_TOL,
                    max_iter: int = DEFAULT_MAX_ITER) -> SweepReport:
    """Placement, Gram diagnostics and median OD-MAE over seeds at every grid frequency."""
    grid = np.asarray(freq_grid_hz, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(grid <= 0):
        raise InvalidParameterError("frequency grid must be a non-empty list of positive values")
    modal = solve_modes(system)
    seeds = tuple(int(s) for s in seeds)
    metrics = ("gram_frobenius", "offdiag_frobenius", "max_offdiag", "selection_objective",
               "od_mae", "converged")
    report = SweepReport(grid, int(budget), float(snr_db), float(mu_fraction), seeds,
                         {c: {m: [] for m in metrics} for c in CONFIGURATIONS},
                         {c: [] for c in CONFIGURATIONS})
    for f in grid:
        omega = 2.0 * np.pi * f
        nh = full_normalized_frf(system, omega)
        configs = sensor_configurations(system, omega, budget, modal, spatial, nh)
        for c, sensors in configs.items():
            series = report.series[c]
            reduced = normalize_columns(frf_direct(system, sensors, None, omega))
            norms = gram_norms(gram(reduced))
            series["gram_frobenius"].append(norms.frobenius)
            series["offdiag_frobenius"].append(norms.offdiag_frobenius)
            series["max_offdiag"].append(norms.max_offdiag)
            series["selection_objective"].append(offdiag_objective(nh, sensors))
            if reconstruct:
                maps = reconstruction_maps(system, sensors, omega, seeds, snr_db, mu_fraction,
                                           modal=modal, tol=tol, max_iter=max_iter)
                series["od_mae"].append(float(np.median([m.od_mae for m in maps])))
                series["converged"].append(float(all(m.converged for m in maps)))
            else:
                series["od_mae"].append(float("nan"))
                series["converged"].append(1.0)
            report.selected[c].append(tuple(sensors))
    return report


def reconstruct_from_file(h_file, y_file, sensor_subset=None, mu_fraction: float = 0.1,
                          tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER):
    """Normalize, solve and de-normalize externally supplied H and y.

    ``sensor_subset`` lists sensor node labels (as written in the files) to
    keep; by default every row is used.
    """
    h = gio.load_frf(h_file)
    labels, y = gio.load_vector(y_file)
    if len(labels) != len(h.rows):
        raise DimensionMismatchError(f"H has {len(h.rows)} sensor rows but y has {len(labels)} entries")
    if list(labels) != list(h.rows):
        pos = {r: k for k, r in enumerate(labels)}
        if set(pos) != set(h.rows):
            raise DimensionMismatchError("sensor labels in y do not match the rows of H")
        y = y[[pos[r] for r in h.rows]]
    if sensor_subset is not None:
        keep = [int(s) for s in sensor_subset]
        idx = {r: k for k, r in enumerate(h.rows)}
        missing = [s for s in keep if s not in idx]
        if missing:
            raise InvalidParameterError(f"sensors {missing} not present in {h_file}")
        y = y[[idx[s] for s in keep]]
        h = h.take_rows(keep)
    problem = LassoProblem.from_measurements(h, y, mu_fraction)
    return solve(problem, tol=tol, max_iter=max_iter)
