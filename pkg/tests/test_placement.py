import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from gramsense import (
    CombinatorialGuardError,
    InvalidParameterError,
    antinodal_select,
    build_chain,
    exhaustive_select,
    frf_direct,
    greedy_select,
    nodal_indices,
    normalize_columns,
    offdiag_objective,
    solve_modes,
)
from gramsense.errors import InsufficientExtremaError
from gramsense.placement import evaluate_set, local_maxima


def brute_objective(h_bar, rows):
    sub = h_bar[list(rows)]
    g = sub.conj().T @ sub
    return np.linalg.norm(g - np.diag(np.diag(g)))


@pytest.fixture(scope="module")
def small():
    s = build_chain(8, 1.0, 1.0, 1e-3, 1e-2)
    return s, solve_modes(s)


def test_objective_matches_explicit_gram(rng):
    h = normalize_columns(rng.standard_normal((6, 4)) + 1j * rng.standard_normal((6, 4))).h_bar
    assert offdiag_objective(h, [0, 3, 5]) == pytest.approx(brute_objective(h, [0, 3, 5]), rel=1e-12)


def test_greedy_history_matches_recomputation(small):
    s, md = small
    nh = normalize_columns(frf_direct(s, omega=1.1))
    sel = greedy_select(nh, 5)
    for k, (node, val) in enumerate(sel.history):
        assert node == sel.selected[k]
        assert val == pytest.approx(brute_objective(nh.h_bar, sel.selected[: k + 1]), rel=1e-9, abs=1e-12)
    assert len(set(sel.selected)) == 5
    assert sel.objective == sel.history[-1][1]


def test_greedy_first_step_is_zero():
    # a single row has no off-diagonal energy only if it has one nonzero entry
    h = np.array([[1.0, 0.0], [0.6, 0.6], [0.8, 0.8]])
    sel = greedy_select(h, 1)
    assert sel.selected == (0,) and sel.objective == 0.0


def test_greedy_tie_breaks_to_smallest_index():
    h = np.ones((4, 3)) / 2.0
    assert greedy_select(h, 2).selected == (0, 1)


def test_orthogonal_rows_are_perfect():
    # rows that each excite a single column give a diagonal Gram matrix
    sel = greedy_select(np.eye(5), 3)
    assert sel.objective == 0.0


def test_exhaustive_small_oracle(small):
    s, _ = small
    nh = normalize_columns(frf_direct(s, omega=0.7))
    best = exhaustive_select(nh, 3)
    values = [brute_objective(nh.h_bar, c) for c in itertools.combinations(range(8), 3)]
    assert best.objective == pytest.approx(min(values), rel=1e-9)
    assert greedy_select(nh, 3).objective >= best.objective - 1e-12


def test_exhaustive_guard():
    with pytest.raises(CombinatorialGuardError):
        exhaustive_select(np.eye(30), 10, limit=1000)


@pytest.mark.parametrize("budget", [0, 9, 2.5])
def test_budget_validation(budget):
    with pytest.raises(InvalidParameterError):
        greedy_select(np.eye(8), budget)


def test_nodal_indices_of_chain_mode5(chain_modal):
    nodes = nodal_indices(chain_modal, 5, boundary_fraction=0.0)
    # interior zero crossings of sin(5 pi x / 51) sit at x = 51 k / 5
    analytic = [51 * k / 5 - 1 for k in range(1, 5)]
    assert len(nodes) == 4
    assert all(abs(a - b) <= 0.5 for a, b in zip(nodes, analytic))


def test_nodal_indices_boundary_nodes(chain_modal):
    # end amplitude of mode 5 is sin(5 pi / 51) ~ 0.30 of the peak
    assert 0 not in nodal_indices(chain_modal, 5, boundary_fraction=0.25)
    nodes = nodal_indices(chain_modal, 5, boundary_fraction=0.35)
    assert 0 in nodes and 49 in nodes


def test_local_maxima():
    np.testing.assert_array_equal(local_maxima([0, 2, 1, 3, 3, 0]), [1, 3, 4])


def test_antinodal_chain_mode5(chain_modal):
    sel = antinodal_select(chain_modal, 5, 5)
    peaks = [51 * (2 * k + 1) / 10 - 1 for k in range(5)]
    assert all(min(abs(s - p) for p in peaks) <= 1 for s in sel.selected)
    with pytest.raises(InsufficientExtremaError):
        antinodal_select(chain_modal, 5, 8)
    filled = antinodal_select(chain_modal, 5, 8, fill=True)
    assert len(set(filled.selected)) == 8 and set(sel.selected) <= set(filled.selected)


def test_antinodal_non_spatial_takes_largest(chain_modal):
    sel = antinodal_select(chain_modal, 3, 6, spatial=False)
    amp = np.abs(chain_modal.mode_shapes[:, 2])
    assert min(amp[list(sel.selected)]) >= np.sort(amp)[-6] - 1e-15


def test_antinodal_objective_history(chain, chain_modal):
    nh = normalize_columns(frf_direct(chain, omega=0.95 * chain_modal.natural_freqs[4]))
    sel = antinodal_select(chain_modal, 5, 5, h_bar_full=nh)
    assert sel.objective == pytest.approx(offdiag_objective(nh, sel.selected))
    assert evaluate_set(nh, sel.selected).objective == sel.objective


@settings(max_examples=30, deadline=None)
@given(arrays(np.complex128, (6, 4), elements=st.complex_numbers(
    min_magnitude=0.05, max_magnitude=5, allow_nan=False, allow_infinity=False)),
    st.integers(1, 4))
def test_greedy_never_beats_exhaustive(h, m):
    nh = normalize_columns(h)
    assert greedy_select(nh, m).objective >= exhaustive_select(nh, m).objective - 1e-10


@settings(max_examples=30, deadline=None)
@given(arrays(np.complex128, (5, 3), elements=st.complex_numbers(
    min_magnitude=0.05, max_magnitude=5, allow_nan=False, allow_infinity=False)),
    st.floats(0.1, 100))
def test_selection_invariant_to_global_scale(h, s):
    a = greedy_select(normalize_columns(h), 3)
    b = greedy_select(normalize_columns(s * h), 3)
    np.testing.assert_allclose([v for _, v in a.history], [v for _, v in b.history], rtol=1e-8, atol=1e-12)
