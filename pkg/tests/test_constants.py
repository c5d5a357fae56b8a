import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from fractrace.constants import (
    FracIndex,
    composed_constant,
    constants_record,
    escobar_constant,
    hls_constant,
    riesz_constant,
    sobolev_constant,
    trace_constant,
    xiao_constant,
    xiao_reduction_factor,
)
from fractrace.specfun import DomainError

FUNCS = {
    "escobar": lambda r: escobar_constant(r["n"]),
    "sobolev": lambda r: sobolev_constant(r["n"], r["alpha"]),
    "hls": lambda r: hls_constant(r["n"], r["alpha"]),
    "trace": lambda r: trace_constant(r["m"], r["alpha"]),
    "composed": lambda r: composed_constant(FracIndex(r["n"], r["m"], r["alpha"])),
    "xiao": lambda r: xiao_constant(r["n"], r["alpha"]),
}


def test_oracle_fixture_agreement(oracle_rows):
    checked = 0
    for r in oracle_rows:
        if r["name"] in FUNCS:
            assert FUNCS[r["name"]](r) == pytest.approx(r["value"], rel=1e-12), r
            checked += 1
    assert checked >= 30


def test_escobar_hand_values():
    assert escobar_constant(3) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-14)
    expected4 = (4 / math.sqrt(math.pi)) ** (1 / 3) / (2 * math.sqrt(math.pi))
    assert escobar_constant(4) == pytest.approx(expected4, rel=1e-14)


@pytest.mark.parametrize("n", [1, 2, 2.5])
def test_escobar_domain(n):
    with pytest.raises(DomainError):
        escobar_constant(n)


@pytest.mark.parametrize("n", [1, 2, 3, 7])
def test_sobolev_alpha_zero_is_one(n):
    assert sobolev_constant(n, 0.0) == 1.0


def test_sobolev_hand_value_n3_alpha1():
    g = math.gamma
    expected = 0.25 / math.pi * (g(0.5) / g(2.5)) * (g(3) / g(1.5)) ** (2 / 3)
    assert sobolev_constant(3, 1.0) == pytest.approx(expected, rel=1e-13)


def test_hls_hand_value():
    g = math.gamma
    expected = math.pi**0.25 * g(0.25) / g(0.75) * (1 / g(0.5)) ** 0.5
    assert hls_constant(1, 0.25) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("n,alpha", [(1, 0.25), (2, 0.5), (3, 1.2), (7, 3.1)])
def test_sobolev_hls_riesz_relation(n, alpha):
    rebuilt = (2 * math.pi) ** (-2 * alpha) * riesz_constant(n, alpha) * hls_constant(n, alpha)
    assert rebuilt == pytest.approx(sobolev_constant(n, alpha), rel=1e-12)


@pytest.mark.parametrize("bad", [(1, 0.5), (1, -0.1), (3, 1.5)])
def test_sobolev_domain(bad):
    with pytest.raises(DomainError):
        sobolev_constant(*bad)


def test_hls_domain():
    with pytest.raises(DomainError):
        hls_constant(2, 0.0)


def test_trace_constant_examples():
    assert trace_constant(1, 1.0) == pytest.approx(0.5, rel=1e-14)
    assert trace_constant(2, 1.5) == pytest.approx(trace_constant(1, 1.5) * trace_constant(1, 1.0), rel=1e-13)


@pytest.mark.parametrize("alpha", [0.6, 0.75, 1.0, 1.7, 3.2])
def test_trace_constant_against_quadrature(alpha):
    val, _ = integrate.quad(lambda u: (1 + u * u) ** (-alpha), -np.inf, np.inf, epsabs=0, epsrel=1e-12, limit=500)
    assert trace_constant(1, alpha) == pytest.approx(val / (2 * math.pi), rel=1e-9)


def test_trace_constant_blows_up_at_threshold():
    assert trace_constant(1, 0.5 + 1e-6) > 1e4
    assert trace_constant(2, 1.0 + 1e-6) > 1e4


def test_trace_constant_domain():
    with pytest.raises(DomainError):
        trace_constant(1, 0.5)


def test_composition_and_escobar_sweep():
    for n in range(3, 9):
        for m in (1, 2):
            for alpha in np.linspace(m / 2, n / 2, 12)[1:-1]:
                idx = FracIndex(n, m, float(alpha))
                prod = trace_constant(m, alpha) * sobolev_constant(n - m, alpha - m / 2)
                assert composed_constant(idx) == pytest.approx(prod, rel=1e-12)
        assert 2 * composed_constant(FracIndex(n, 1, 1.0)) == pytest.approx(escobar_constant(n), rel=1e-12)
    assert composed_constant(FracIndex(3, 1, 1.0)) == pytest.approx(1 / (2 * math.sqrt(math.pi)), rel=1e-14)


def test_xiao_reduction_sweep():
    for n in range(2, 10):
        for alpha in np.linspace(0, min(1, (n - 1) / 2), 9)[1:-1]:
            lhs = xiao_constant(n, alpha) * xiao_reduction_factor(alpha)
            assert lhs == pytest.approx(sobolev_constant(n - 1, alpha), rel=1e-12)


@pytest.mark.parametrize("bad", [(3, 1.0), (3, 0.0), (2, 0.5)])
def test_xiao_domain(bad):
    with pytest.raises(DomainError):
        xiao_constant(*bad)


@pytest.mark.parametrize(
    "args", [(0, 0, 0.0), (3, 3, 1.0), (3, 1, 0.5), (3, 1, 1.5), (2, 0, -0.1), (2.5, 0, 0.1), (3, 1, math.nan)]
)
def test_fracindex_validation(args):
    with pytest.raises(DomainError):
        FracIndex(*args)


def test_fracindex_properties():
    idx = FracIndex(5, 2, 1.5)
    assert idx.trace_dim == 3
    assert idx.trace_alpha == pytest.approx(0.5)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 12), st.integers(1, 2), st.floats(0.01, 0.99))
def test_constants_positive_and_identities_hold(n, m, t):
    if m >= n:
        return
    alpha = m / 2 + t * (n / 2 - m / 2)
    rec = constants_record(FracIndex(n, m, alpha))
    for v in (rec.sobolev, rec.hls, rec.trace, rec.composed):
        assert math.isfinite(v) and v > 0
    assert rec.max_residual < 1e-12


def test_record_contents():
    rec = constants_record(FracIndex(3, 1, 1.0))
    assert set(rec.identity_residuals) == {"hls", "composition", "escobar"}
    d = rec.as_dict()
    assert d["escobar"] == pytest.approx(2 * d["composed"], rel=1e-12)
    rec0 = constants_record(FracIndex(4, 0, 0.5))
    assert rec0.trace is None and rec0.composed is None
    assert "xiao" in rec0.identity_residuals
