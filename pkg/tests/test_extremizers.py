import math

import numpy as np
import pytest

from fractrace.constants import FracIndex, riesz_constant
from fractrace.extremizers import (
    ExtremizerSpec,
    QuadratureError,
    escobar_extremizer,
    fourier_trace_extremizer,
    fourier_trace_extremizer_field,
    hls_euler_lagrange_constant,
    hls_euler_lagrange_ratio,
    hls_extremizer,
    hls_transform,
    sample_extremizer,
    sample_trace_extremizer,
    sobolev_extremizer,
    trace_extremizer,
)
from fractrace.field import BoxGrid
from fractrace.specfun import DomainError

I1 = FracIndex(1, 0, 0.25)


def test_spec_validation():
    with pytest.raises(DomainError):
        ExtremizerSpec("sobolev", I1, gamma=0.0)
    with pytest.raises(DomainError):
        ExtremizerSpec("bogus", I1)
    with pytest.raises(DomainError):
        ExtremizerSpec("trace", I1)
    with pytest.raises(DomainError):
        ExtremizerSpec("sobolev", FracIndex(3, 1, 1.0))
    with pytest.raises(DomainError):
        ExtremizerSpec("sobolev", FracIndex(2, 0, 0.5), a=(1.0,))
    spec = ExtremizerSpec("trace", FracIndex(3, 1, 1.0))
    assert spec.a == (0.0, 0.0)


def test_sobolev_examples():
    spec = ExtremizerSpec("sobolev", FracIndex(3, 0, 0.7), gamma=1.3, A=2.0, a=(0.1, -0.2, 0.3))
    assert sobolev_extremizer(spec, spec.a) == pytest.approx(2.0 * 1.3 ** (-(3 - 1.4)))
    rng = np.random.default_rng(0)
    d = rng.standard_normal(3)
    d /= np.linalg.norm(d)
    vals = [sobolev_extremizer(spec, np.array(spec.a) + 1.7 * np.roll(d, k)) for k in range(3)]
    np.testing.assert_allclose(vals, vals[0], rtol=1e-14)
    assert sobolev_extremizer(ExtremizerSpec("sobolev", I1), 1.0) == pytest.approx(2 ** -0.25, rel=1e-15)


def test_hls_examples():
    spec = ExtremizerSpec("hls", I1, gamma=0.8, A=1.5, a=(0.4,))
    assert hls_extremizer(spec, 0.4) == pytest.approx(1.5 * 0.8 ** (-1.5))
    assert hls_extremizer(spec, 0.4 + 0.8) == pytest.approx(1.5 * (2 * 0.64) ** (-0.75))


def test_family_mismatch_raises():
    with pytest.raises(DomainError):
        hls_extremizer(ExtremizerSpec("sobolev", I1), 0.0)
    with pytest.raises(DomainError):
        sobolev_extremizer(ExtremizerSpec("hls", I1), 0.0)


def test_dilation_covariance_and_positivity():
    idx = FracIndex(2, 0, 0.6)
    gam = 2.7
    x = np.random.default_rng(1).standard_normal((50, 2)) * 3
    scaled = sobolev_extremizer(ExtremizerSpec("sobolev", idx, gamma=gam), x)
    unit = sobolev_extremizer(ExtremizerSpec("sobolev", idx), x / gam)
    np.testing.assert_allclose(scaled, gam ** (-(2 - 1.2)) * unit, rtol=1e-14)
    g = BoxGrid.cube(2, 32, 10.0)
    for fam in ("sobolev", "hls"):
        v = sample_extremizer(ExtremizerSpec(fam, idx, gamma=0.5), g).values
        assert np.all(v.real > 0)


def test_escobar_extremizer_value():
    spec = ExtremizerSpec("escobar", FracIndex(4, 0, 0.0), gamma=2.0, A=1.0, a=(0.0, 0.0, 0.0))
    assert escobar_extremizer(spec, (3.0, 0.0, 0.0), 2.0) == pytest.approx((16 + 9) ** -1.0)


@pytest.mark.parametrize("gamma", [0.5, 1.3])
def test_hls_euler_lagrange(gamma):
    spec = ExtremizerSpec("hls", I1, gamma=gamma)
    xs = np.linspace(0, 4 * gamma, 6)
    ratios = hls_euler_lagrange_ratio(spec, xs)
    assert np.ptp(ratios) / np.mean(ratios) < 1e-2
    assert np.mean(ratios) == pytest.approx(hls_euler_lagrange_constant(spec), rel=5e-2)


def test_hls_euler_lagrange_two_dimensions():
    spec = ExtremizerSpec("hls", FracIndex(2, 0, 0.5), gamma=1.0, A=3.0)
    ratios = hls_euler_lagrange_ratio(spec, [[0, 0], [0.5, 0.5], [2.0, -1.0]])
    np.testing.assert_allclose(ratios / hls_euler_lagrange_constant(spec), 1.0, rtol=1e-2)


def test_escobar_cross_check():
    spec = ExtremizerSpec("trace", FracIndex(3, 1, 1.0), gamma=1.0)
    props = []
    for r1 in np.linspace(0, 3, 5):
        for t in np.linspace(0, 2, 5):
            x1 = np.array([r1, 0.3 * r1])
            val = trace_extremizer(spec, x1, t)
            props.append(val * ((1 + t) ** 2 + x1 @ x1) ** 0.5)
    props = np.array(props)
    assert np.ptp(props) / np.mean(props) < 1e-2


@pytest.mark.parametrize("idx", [FracIndex(2, 1, 0.75), FracIndex(3, 1, 1.2), FracIndex(3, 2, 1.25)])
def test_trace_slice_is_sobolev_shape(idx):
    spec = ExtremizerSpec("trace", idx, gamma=0.8)
    d = idx.n - idx.m
    sob = ExtremizerSpec("sobolev", FracIndex(d, 0, idx.trace_alpha), gamma=0.8)
    ratios = []
    for r in (0.0, 0.5, 1.5, 4.0):
        x1 = np.zeros(d)
        x1[0] = r
        ratios.append(trace_extremizer(spec, x1, np.zeros(idx.m)) / sobolev_extremizer(sob, x1))
    assert np.ptp(ratios) / np.mean(ratios) < 1e-2


def test_trace_rotational_symmetry_in_x2():
    spec = ExtremizerSpec("trace", FracIndex(3, 2, 1.25), gamma=1.0)
    a = trace_extremizer(spec, 0.7, (1.0, 0.0))
    b = trace_extremizer(spec, 0.7, (0.6, 0.8))
    c = trace_extremizer(spec, 0.7, (0.0, -1.0))
    assert b == pytest.approx(a, rel=1e-9)
    assert c == pytest.approx(a, rel=1e-9)


def test_sampled_trace_matches_pointwise():
    idx = FracIndex(2, 1, 0.75)
    spec = ExtremizerSpec("trace", idx, gamma=1.0)
    g = BoxGrid.cube(2, 16, 8.0)
    f = sample_trace_extremizer(spec, g).values.real
    x = g.axes()[0]
    for i, j in [(8, 8), (3, 8), (8, 12), (1, 14)]:
        assert f[i, j] == pytest.approx(trace_extremizer(spec, x[i], x[j]), rel=1e-5)


def test_quadrature_error_carries_diagnostics():
    err = QuadratureError("did not converge", {"x1": [0.0]})
    assert err.diagnostics == {"x1": [0.0]}
    assert "did not converge" in str(err)


def test_fourier_trace_separable_structure():
    idx = FracIndex(2, 1, 0.75)
    ghat = hls_transform(idx, 1.0, (0.0,), BoxGrid.cube(1, 256, 32.0))
    for k1 in (1 / 32, 5 / 32, -7 / 32):
        vals = [fourier_trace_extremizer(idx, 1.0, (0.0,), k1, k2, ghat=ghat) * (k1**2 + k2**2) ** 0.75
                for k2 in (0.0, 0.3, -2.0, 7.5)]
        np.testing.assert_allclose(vals, vals[0], rtol=1e-10)
    assert fourier_trace_extremizer(idx, 1.0, (0.0,), 0.0, 0.0, ghat=ghat) == 0


def test_fourier_trace_integrability_is_stable():
    idx = FracIndex(2, 1, 0.75)
    vals = []
    for N in (512, 1024, 2048):
        g1 = BoxGrid.cube(1, N, 64.0)
        gh = hls_transform(idx, 1.0, (0.0,), g1)
        k = np.abs(g1.freq_axes()[0])
        nz = k > 0
        vals.append(g1.dk * np.sum(np.abs(gh.coeffs[nz]) ** 2 / k[nz] ** (2 * 0.75 - 1)))
    assert np.all(np.isfinite(vals))
    np.testing.assert_allclose(vals, vals[0], rtol=1e-6)


def test_fourier_field_matches_quadrature():
    # the lattice field lacks the k1 = 0 line, a function of x2 only; compare differences in x1
    idx = FracIndex(2, 1, 0.75)
    L, N = 100.0, 2048
    g = BoxGrid.cube(2, N, L)
    f = fourier_trace_extremizer_field(idx, 1.0, g).values.real
    c = riesz_constant(2, 0.75)
    spec = ExtremizerSpec("trace", idx, gamma=1.0)
    x = g.axes()[0]
    o, h = g.origin_index[0], L / N
    jr = o + int(round(5 / h))
    for x2 in (0.5, 1.0, 2.0):
        j2 = o + int(round(x2 / h))
        ref = trace_extremizer(spec, x[jr], x[j2])
        for x1 in (0.0, 1.0):
            j1 = o + int(round(x1 / h))
            quad = c * (trace_extremizer(spec, x[j1], x[j2]) - ref)
            assert f[j1, j2] - f[jr, j2] == pytest.approx(quad, rel=2e-2)
