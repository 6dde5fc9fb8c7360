import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from gramsense import (
    DegenerateColumnError,
    DimensionMismatchError,
    FrfMatrix,
    InvalidParameterError,
    MechanicalSystem,
    SingularSystemError,
    build_chain,
    frf_direct,
    frf_modal,
    normalize_columns,
    solve_modes,
)


def test_single_dof_accelerance():
    m, k, c, w = 2.0, 2e6, 40.0, 700.0
    s = MechanicalSystem(np.array([[m]]), np.array([[k]]), np.array([[c]]))
    expected = -(w**2) / (k - w**2 * m + 1j * w * c)
    assert frf_direct(s, omega=w).values[0, 0] == pytest.approx(expected, rel=1e-14)
    assert frf_modal(solve_modes(s), omega=w).values[0, 0] == pytest.approx(expected, rel=1e-12)


def test_modal_matches_direct_for_proportional_damping(chain, chain_modal, rng):
    w10 = chain_modal.natural_freqs[9]
    for om in rng.uniform(0.01 * w10, 1.2 * w10, 10):
        a = frf_modal(chain_modal, omega=om).values
        b = frf_direct(chain, omega=om).values
        np.testing.assert_allclose(a, b, rtol=1e-6, atol=1e-12 * np.abs(b).max())


def test_reciprocity(chain):
    h = frf_direct(chain, omega=321.0).values
    np.testing.assert_allclose(h, h.T, rtol=1e-10, atol=1e-16)


def test_row_and_column_selection(chain, chain_modal):
    full = frf_direct(chain, omega=250.0)
    sub = frf_direct(chain, rows=[4, 1, 30], cols=[0, 49], omega=250.0)
    np.testing.assert_allclose(sub.values, full.values[np.ix_([4, 1, 30], [0, 49])], rtol=1e-12)
    assert sub.rows == (4, 1, 30) and sub.cols == (0, 49)
    np.testing.assert_array_equal(full.take_rows([4, 1, 30]).values[:, [0, 49]], sub.values)


def test_take_rows_unknown_label(chain):
    h = frf_direct(chain, rows=[0, 1], omega=100.0)
    with pytest.raises(InvalidParameterError):
        h.take_rows([5])


def test_mode_subset_truncation(chain_modal):
    om = 0.95 * chain_modal.natural_freqs[4]
    all_modes = frf_modal(chain_modal, omega=om).values
    parts = sum(frf_modal(chain_modal, omega=om, mode_subset=[p]).values for p in range(1, 51))
    np.testing.assert_allclose(parts, all_modes, rtol=1e-10, atol=1e-14)
    with pytest.raises(InvalidParameterError):
        frf_modal(chain_modal, omega=om, mode_subset=[0])
    with pytest.raises(InvalidParameterError):
        frf_modal(chain_modal, omega=om, mode_subset=[])


@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_non_positive_frequency(chain, chain_modal, bad):
    with pytest.raises(InvalidParameterError):
        frf_direct(chain, omega=bad)
    with pytest.raises(InvalidParameterError):
        frf_modal(chain_modal, omega=bad)


def test_out_of_range_indices(chain):
    with pytest.raises(InvalidParameterError):
        frf_direct(chain, rows=[50], omega=10.0)


def test_undamped_resonance_is_singular():
    s = build_chain(3, 1.0, 1.0)
    w1 = solve_modes(s).natural_freqs[0]
    with pytest.raises(SingularSystemError):
        frf_direct(s, omega=w1)


def test_frf_matrix_validation():
    with pytest.raises(DimensionMismatchError):
        FrfMatrix(1.0, [0, 1], [0], np.zeros((1, 1)))
    with pytest.raises(InvalidParameterError):
        FrfMatrix(1.0, [0, 0], [0], np.zeros((2, 1)))


def test_normalize_unit_columns(chain):
    nh = normalize_columns(frf_direct(chain, omega=400.0))
    np.testing.assert_allclose(np.linalg.norm(nh.h_bar, axis=0), 1.0, rtol=1e-14)
    np.testing.assert_allclose(nh.weights * nh.col_norms, 1.0)


def test_normalize_idempotent_and_scale_invariant(chain):
    h = frf_direct(chain, omega=400.0).values
    nh = normalize_columns(h)
    again = normalize_columns(nh.h_bar)
    np.testing.assert_allclose(again.h_bar, nh.h_bar, rtol=1e-14)
    np.testing.assert_allclose(again.col_norms, 1.0, rtol=1e-14)
    scaled = normalize_columns(5.0 * h)
    np.testing.assert_allclose(scaled.h_bar, nh.h_bar, rtol=1e-13)
    np.testing.assert_allclose(scaled.col_norms, 5.0 * nh.col_norms, rtol=1e-13)


def test_zero_column_is_degenerate():
    h = np.array([[1.0, 0.0], [2.0, 0.0]])
    with pytest.raises(DegenerateColumnError) as info:
        normalize_columns(h)
    assert info.value.column == 1


complex_mats = arrays(
    np.complex128, (4, 3),
    elements=st.complex_numbers(min_magnitude=0.1, max_magnitude=1e3, allow_nan=False,
                                allow_infinity=False),
)


@settings(max_examples=50)
@given(complex_mats)
def test_normalized_reconstructs_original(h):
    nh = normalize_columns(h)
    np.testing.assert_allclose(nh.h_bar * nh.col_norms, h, rtol=1e-12)
