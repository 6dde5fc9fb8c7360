"""Sensor selection by off-diagonal Gram energy, plus exhaustive and anti-nodal baselines.

Row subsets are always taken from the FULL column-normalized FRF without
re-normalizing, so the diagonal of a reduced Gram matrix is generally below 1
during selection.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import CombinatorialGuardError, InsufficientExtremaError, InvalidParameterError
from .frf import NormalizedFrf
from .modal_model import ModalData, _mode_index

EXHAUSTIVE_LIMIT = 10**6


@dataclass(frozen=True)
class SensorSet:
    """Selected sensor nodes (in selection order) and the objective after each addition."""

    selected: tuple
    history: tuple  # ((node, objective), ...)
    omega: float
    budget: int

    @property
    def objective(self) -> float:
        return self.history[-1][1] if self.history else float("nan")

    def to_dict(self) -> dict:
        return {
            "selected": list(self.selected),
            "history": [{"node": int(i), "objective": float(v)} for i, v in self.history],
            "objective": self.objective,
            "omega": self.omega,
            "budget": self.budget,
        }


def _matrix(h_bar_full):
    if isinstance(h_bar_full, NormalizedFrf):
        return h_bar_full.h_bar, h_bar_full.omega
    return np.asarray(h_bar_full, dtype=complex), float("nan")


def offdiag_objective(h_bar_full, rows) -> float:
    """||G_S - diag(G_S)||_F with G_S built from rows S of the full normalized FRF."""
    a, _ = _matrix(h_bar_full)
    sub = a[np.asarray(list(rows), dtype=int)]
    g = sub.conj().T @ sub
    off2 = np.sum(np.abs(g) ** 2) - np.sum(np.abs(np.diag(g)) ** 2)
    return float(math.sqrt(max(off2, 0.0)))


def _prefix_history(a, order):
    return tuple((int(i), offdiag_objective(a, order[: k + 1])) for k, i in enumerate(order))


def _check_budget(budget, n):
    if int(budget) != budget or not 1 <= budget <= n:
        raise InvalidParameterError(f"budget must be an integer in 1..{n}, got {budget}")
    return int(budget)


def greedy_select(h_bar_full, budget: int) -> SensorSet:
    """Add, one at a time, the row that leaves the smallest off-diagonal Gram norm.

    Ties go to the smallest node index. Each candidate is scored with a rank-1
    update of the running Gram matrix instead of a full rebuild.
    """
    a, omega = _matrix(h_bar_full)
    n_rows = a.shape[0]
    budget = _check_budget(budget, n_rows)
    power = np.abs(a) ** 2
    row_norm2 = power.sum(axis=1)
    g = np.zeros((a.shape[1], a.shape[1]), dtype=complex)
    g_norm2 = 0.0
    g_diag = np.zeros(a.shape[1])
    remaining = np.ones(n_rows, dtype=bool)
    selected, history = [], []
    for _ in range(budget):
        cand = np.nonzero(remaining)[0]
        ac = a[cand]
        cross = np.real(np.einsum("ij,jk,ik->i", ac.conj(), g.conj(), ac, optimize=True))
        diag2 = np.sum((g_diag[None, :] + power[cand]) ** 2, axis=1)
        off2 = g_norm2 + 2.0 * cross + row_norm2[cand] ** 2 - diag2
        k = int(np.argmin(off2))
        best = int(cand[k])
        row = a[best]
        g += np.outer(row.conj(), row)
        g_norm2 = float(np.sum(np.abs(g) ** 2))
        g_diag = np.real(np.diag(g)).copy()
        remaining[best] = False
        selected.append(best)
        history.append((best, float(math.sqrt(max(off2[k], 0.0)))))
    return SensorSet(tuple(selected), tuple(history), omega, budget)


def exhaustive_select(h_bar_full, budget: int, limit: int = EXHAUSTIVE_LIMIT) -> SensorSet:
    """Global minimizer over all C(N, M) row subsets; lexicographically smallest on ties."""
    a, omega = _matrix(h_bar_full)
    n_rows = a.shape[0]
    budget = _check_budget(budget, n_rows)
    count = math.comb(n_rows, budget)
    if count > limit:
        raise CombinatorialGuardError(f"C({n_rows}, {budget}) = {count} subsets exceeds limit {limit}")
    outer = np.einsum("ij,ik->ijk", a.conj(), a)
    best, best_val = None, math.inf
    for combo in itertools.combinations(range(n_rows), budget):
        g = outer[list(combo)].sum(axis=0)
        off2 = np.sum(np.abs(g) ** 2) - np.sum(np.abs(np.diag(g)) ** 2)
        if off2 < best_val:
            best, best_val = combo, off2
    history = _prefix_history(a, list(best))
    return SensorSet(tuple(best), history, omega, budget)


def nodal_indices(modal: ModalData, p: int, boundary_fraction: float = 0.1) -> list:
    """Nodes nearest the zero crossings of mode p along the node ordering.

    Each sign change between neighbours i, i+1 reports whichever of the two
    has the smaller |phi|. End nodes are added when their amplitude is below
    ``boundary_fraction`` of the peak.
    """
    phi = modal.mode_shapes[:, _mode_index(modal, p)]
    amp = np.abs(phi)
    peak = amp.max()
    out = set(np.nonzero(amp <= 1e-12 * peak)[0].tolist())
    for i in np.nonzero(phi[:-1] * phi[1:] < 0)[0]:
        out.add(int(i) if amp[i] <= amp[i + 1] else int(i) + 1)
    for end in (0, phi.size - 1):
        if amp[end] < boundary_fraction * peak:
            out.add(end)
    return sorted(int(i) for i in out)


def local_maxima(values) -> np.ndarray:
    v = np.asarray(values)
    left = np.r_[-np.inf, v[:-1]]
    right = np.r_[v[1:], -np.inf]
    return np.nonzero((v >= left) & (v >= right))[0]


def antinodal_select(modal: ModalData, p: int, budget: int, h_bar_full=None,
                     min_spacing: int | None = None, fill: bool = False,
                     spatial: bool = True) -> SensorSet:
    """Baseline layout at the anti-nodes (largest |phi_p|) of mode p.

    With ``spatial=True`` only local maxima of |phi_p| along the node
    ordering are used, picked by descending amplitude with at least
    ``min_spacing`` (default N // (2p)) indices between picks. ``fill=True``
    tops up a short list with the largest remaining amplitudes instead of
    raising. ``spatial=False`` ignores node ordering and takes the ``budget``
    largest amplitudes, which is the meaningful reading for structures whose
    node numbering carries no geometry.
    """
    idx = _mode_index(modal, p)
    amp = np.abs(modal.mode_shapes[:, idx])
    n = amp.size
    budget = _check_budget(budget, n)
    by_amp = np.argsort(-amp, kind="stable")
    if spatial:
        spacing = n // (2 * int(p)) if min_spacing is None else int(min_spacing)
        peaks = set(local_maxima(amp).tolist())
        picks = []
        for i in by_amp:
            if i in peaks and all(abs(int(i) - j) >= spacing for j in picks):
                picks.append(int(i))
            if len(picks) == budget:
                break
        if len(picks) < budget:
            if not fill:
                raise InsufficientExtremaError(
                    f"mode {p} has only {len(picks)} separated anti-nodes, budget is {budget}"
                )
            for i in by_amp:
                if len(picks) == budget:
                    break
                if int(i) not in picks:
                    picks.append(int(i))
    else:
        picks = [int(i) for i in by_amp[:budget]]
    omega = float("nan")
    history = ()
    if h_bar_full is not None:
        a, omega = _matrix(h_bar_full)
        history = _prefix_history(a, picks)
    return SensorSet(tuple(picks), history, omega, budget)


def evaluate_set(h_bar_full, nodes) -> SensorSet:
    """Wrap an arbitrary node list as a SensorSet with its objective history."""
    a, omega = _matrix(h_bar_full)
    nodes = [int(i) for i in nodes]
    return SensorSet(tuple(nodes), _prefix_history(a, nodes), omega, len(nodes))
