import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from fractrace.constants import FracIndex
from fractrace.field import (
    BoxGrid,
    SpectralField,
    dalpha_norm_sq,
    forward_ft,
    inverse_ft,
    load_field_csv,
    load_field_npz,
    lp_norm,
    save_field_csv,
    save_field_npz,
    sobolev_exponent,
)
from fractrace.specfun import DomainError

GRIDS = [BoxGrid.cube(1, 64, 7.0), BoxGrid((32, 16), (3.0, 5.0)), BoxGrid((8, 12, 10), (1.0, 2.0, 3.0))]


def random_field(grid, seed=0):
    rng = np.random.default_rng(seed)
    return SpectralField(grid, rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape))


def test_grid_layout():
    g = BoxGrid.cube(1, 8, 4.0)
    np.testing.assert_allclose(g.axes()[0], [-2, -1.5, -1, -0.5, 0, 0.5, 1, 1.5])
    assert g.origin_index == (4,)
    assert g.axes()[0][g.origin_index[0]] == 0.0
    np.testing.assert_allclose(np.sort(g.freq_axes()[0]), np.arange(-4, 4) / 4.0)
    assert g.dx == pytest.approx(0.5)
    assert g.dk == pytest.approx(0.25)


@pytest.mark.parametrize("bad", [dict(sizes=(7,), lengths=(1.0,)), dict(sizes=(8,), lengths=(0.0,)),
                                 dict(sizes=(4, 4, 4, 4), lengths=(1.0,) * 4), dict(sizes=(8, 8), lengths=(1.0, 2.0, 3.0))])
def test_grid_validation(bad):
    with pytest.raises((DomainError, ValueError)):
        BoxGrid(**bad)


def test_single_length_broadcasts():
    assert BoxGrid((8, 8), (2.0,)).lengths == (2.0, 2.0)


def test_freq_position_round_trip():
    g = BoxGrid((8, 6), (2.0, 3.0))
    for q1 in range(-4, 4):
        for q2 in range(-3, 3):
            k = (q1 / 2.0, q2 / 3.0)
            pos = g.freq_position(k)
            assert g.freq_mesh()[0][pos] == pytest.approx(k[0])
            assert g.freq_mesh()[1][pos] == pytest.approx(k[1])


@pytest.mark.parametrize("grid", GRIDS)
def test_plancherel_and_round_trip(grid):
    f = random_field(grid)
    lhs = grid.dx * np.sum(np.abs(f.values) ** 2)
    rhs = grid.dk * np.sum(np.abs(f.coeffs) ** 2)
    assert rhs == pytest.approx(lhs, rel=1e-10)
    back = inverse_ft(forward_ft(f))
    assert np.max(np.abs(back.values - f.values)) <= 1e-10 * np.max(np.abs(f.values))


def test_lattice_character_transform():
    g = BoxGrid((16, 8), (2.0, 4.0))
    k0 = (3 / 2.0, -1 / 4.0)
    X, Y = g.mesh()
    f = SpectralField(g, np.exp(2j * np.pi * (k0[0] * X + k0[1] * Y)))
    expected = np.zeros(g.shape, complex)
    expected[g.freq_position(k0)] = 2.0 * 4.0
    np.testing.assert_allclose(f.coeffs, expected, atol=1e-12)


def test_gaussian_is_self_dual():
    g = BoxGrid.cube(1, 256, 12.0)
    f = SpectralField(g, np.exp(-np.pi * g.radius_sq()))
    k = g.freq_axes()[0]
    assert np.max(np.abs(f.coeffs - np.exp(-np.pi * k**2))) < 1e-8
    g2 = BoxGrid.cube(2, 64, 10.0)
    f2 = SpectralField(g2, np.exp(-np.pi * g2.radius_sq()))
    assert np.max(np.abs(f2.coeffs - np.exp(-np.pi * g2.kmag() ** 2))) < 1e-8


def test_dalpha_single_mode():
    g = BoxGrid((16, 8), (2.0, 4.0))
    k0 = (1.0, 0.5)
    A = 0.7 - 0.2j
    X, Y = g.mesh()
    # physical field whose only coefficient is A at k0
    f = SpectralField(g, A / (2.0 * 4.0) * np.exp(2j * np.pi * (k0[0] * X + k0[1] * Y)))
    for alpha in (0.3, 1.0):
        expected = abs(A) ** 2 / 8.0 * (2 * np.pi * np.hypot(*k0)) ** (2 * alpha)
        assert dalpha_norm_sq(f, alpha) == pytest.approx(expected, rel=1e-12)


def test_dalpha_zero_is_plancherel():
    for g in GRIDS:
        f = random_field(g, 3)
        assert dalpha_norm_sq(f, 0.0) == pytest.approx(g.dx * np.sum(np.abs(f.values) ** 2), rel=1e-12)


def test_dalpha_gaussian_half_order():
    # int e^{-2 pi k^2} |2 pi k| dk = 1; the |k| kink at 0 costs ~dk^2, so use a long box
    g = BoxGrid.cube(1, 16384, 2048.0)
    f = SpectralField(g, np.exp(-np.pi * g.radius_sq()))
    oracle, _ = integrate.quad(lambda k: 2 * np.exp(-2 * np.pi * k * k) * 2 * np.pi * k, 0, np.inf, epsabs=0, epsrel=1e-13)
    assert oracle == pytest.approx(1.0, rel=1e-12)
    assert dalpha_norm_sq(f, 0.5) == pytest.approx(oracle, rel=1e-6)


def test_dalpha_resolution_convergence():
    # fixed L: refining N only adds high frequencies, where the Gaussian is tiny
    vals = []
    for N in (8, 16, 32, 64):
        g = BoxGrid.cube(1, N, 8.0)
        vals.append(dalpha_norm_sq(SpectralField(g, np.exp(-np.pi * g.radius_sq())), 0.75))
    diffs = np.abs(np.diff(vals))
    assert diffs[1] <= diffs[0] / 4
    assert diffs[2] <= max(diffs[1] / 4, 1e-15)


def test_dalpha_domain():
    with pytest.raises(DomainError):
        dalpha_norm_sq(random_field(GRIDS[0]), -0.1)


@settings(max_examples=30, deadline=None)
@given(st.floats(-5, 5).filter(lambda c: abs(c) > 1e-3), st.floats(0, 1.4))
def test_dalpha_is_quadratic(c, alpha):
    f = random_field(GRIDS[1], 1)
    assert dalpha_norm_sq(f.scale(c), alpha) == pytest.approx(c * c * dalpha_norm_sq(f, alpha), rel=1e-12)


def test_lp_norm_single_cell():
    g = BoxGrid.cube(2, 16, 4.0)
    v = np.zeros(g.shape)
    v[3, 5] = 2.5
    for p in (1.0, 2.0, 4.5):
        assert lp_norm(SpectralField(g, v), p) == pytest.approx(2.5 * g.dx ** (1 / p), rel=1e-14)


def test_lp_norm_power_law_tail():
    g = BoxGrid.cube(1, 4096, 200.0)
    f = SpectralField(g, (1 + g.radius_sq()) ** (-0.25))
    assert lp_norm(f, 4.0) ** 4 == pytest.approx(math.pi, rel=2e-2)


def test_lp_norm_scaling_and_domain():
    f = random_field(GRIDS[2])
    assert lp_norm(f.scale(-3.0), 3.0) == pytest.approx(3.0 * lp_norm(f, 3.0), rel=1e-13)
    with pytest.raises(DomainError):
        lp_norm(f, 0.5)
    assert lp_norm(f.scale(0.0), 2.0) == 0.0


def test_lp_norm_large_exponent_does_not_overflow():
    g = BoxGrid.cube(1, 32, 1.0)
    f = SpectralField(g, np.full(g.shape, 1e30))
    assert lp_norm(f, 40.0) == pytest.approx(1e30, rel=1e-12)


@pytest.mark.parametrize("idx,expected", [(FracIndex(3, 1, 1.0), 4.0), (FracIndex(1, 0, 0.25), 4.0),
                                          (FracIndex(4, 2, 1.5), 4.0), (FracIndex(3, 0, 0.0), 2.0)])
def test_sobolev_exponent(idx, expected):
    assert sobolev_exponent(idx) == pytest.approx(expected)


def test_field_is_immutable():
    f = random_field(GRIDS[0])
    with pytest.raises(ValueError):
        f.values[0] = 1.0
    with pytest.raises(ValueError):
        f.coeffs[0] = 1.0


def test_arithmetic():
    g = GRIDS[1]
    f, h = random_field(g, 1), random_field(g, 2)
    np.testing.assert_allclose((f + h).values, f.values + h.values)
    np.testing.assert_allclose((f - h).values, f.values - h.values)
    np.testing.assert_allclose((2 * f).coeffs, 2 * f.coeffs)
    with pytest.raises(ValueError):
        f + random_field(GRIDS[0])


@pytest.mark.parametrize("view", ["physical", "fourier"])
def test_csv_round_trip(tmp_path, view):
    f = random_field(GRIDS[1], 5)
    p = tmp_path / "f.csv"
    save_field_csv(f, p, view=view)
    head = p.read_text().splitlines()[:2]
    assert head[0].startswith("# fractrace-field n=2")
    assert head[1] == "index,re,im"
    back = load_field_csv(p)
    assert back.grid == f.grid
    np.testing.assert_allclose(back.values, f.values, rtol=0, atol=1e-12)


def test_npz_round_trip(tmp_path):
    f = random_field(GRIDS[2], 6)
    p = tmp_path / "f.npz"
    save_field_npz(f, p)
    back = load_field_npz(p)
    assert back.grid == f.grid
    np.testing.assert_array_equal(back.values, f.values)
