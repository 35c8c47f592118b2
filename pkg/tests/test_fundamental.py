import math

import numpy as np
import pytest

from qcayley.fundamental import (fundamental_at_length, fundamental_pair,
                                 fundamental_samples, sturm_zero_near)
from qcayley.graph import EdgeSpec, PotentialSpec

ZERO_EDGE = EdgeSpec(1.0)
CONST_EDGE = EdgeSpec(1.0, PotentialSpec.constant(2.0))
PW_EDGE = EdgeSpec(1.0, PotentialSpec.piecewise_constant([1.0, 4.0, 1.0]))
SAMP_EDGE = EdgeSpec(1.0, PotentialSpec.sampled(
    tuple(np.sin(np.pi * np.linspace(0, 1, 41)) ** 2)))

ALL_EDGES = [ZERO_EDGE, CONST_EDGE, PW_EDGE, SAMP_EDGE]


def random_lambdas(n, seed=0):
    rng = np.random.default_rng(seed)
    re = rng.uniform(-30.0, 30.0, n)
    im = rng.uniform(-10.0, 10.0, n)
    im[::3] = 0.0  # include real-axis points
    return re + 1j * im


def test_free_closed_form():
    fp = fundamental_pair(ZERO_EDGE, math.pi ** 2, 1.0)
    assert fp.c == pytest.approx(-1.0, abs=1e-14)
    assert abs(fp.s) < 1e-14
    assert fp.s_prime == pytest.approx(-1.0, abs=1e-14)


def test_free_lambda_zero_limit():
    for ell in (0.5, 1.0, 2.7):
        fp = fundamental_pair(EdgeSpec(ell), 0.0, ell)
        assert fp.c == pytest.approx(1.0, abs=1e-14)
        assert fp.s == pytest.approx(ell, abs=1e-13)


def test_constant_shift_matches_free():
    # C for potential c at lambda equals C for q=0 at lambda - c
    for lam in (0.3 + 1.2j, -5.0, 9.0):
        fp = fundamental_pair(CONST_EDGE, lam, 1.0)
        ref = fundamental_pair(ZERO_EDGE, lam - 2.0, 1.0)
        assert fp.c == pytest.approx(ref.c, abs=1e-12)
        assert fp.s == pytest.approx(ref.s, abs=1e-12)


def test_constant_against_sampled_integration():
    # integration oracle: the same constant potential, but integrated
    edge_int = EdgeSpec(1.0, PotentialSpec.sampled((2.0,) * 11))
    for lam in (0.7, -3.0, 1.5 + 0.8j):
        a = fundamental_pair(CONST_EDGE, lam, 1.0)
        b = fundamental_pair(edge_int, lam, 1.0)
        for f in ("c", "c_prime", "s", "s_prime"):
            assert getattr(a, f) == pytest.approx(getattr(b, f), abs=1e-8)


def test_piecewise_against_sampled_integration():
    # step potential represented once exactly and once on a fine grid
    idx = np.arange(3001)
    vals = np.where((idx > 1000) & (idx < 2000), 4.0, 1.0)
    edge_int = EdgeSpec(1.0, PotentialSpec.sampled(tuple(vals)))
    for lam in (0.5, -2.0):
        a = fundamental_pair(PW_EDGE, lam, 1.0)
        b = fundamental_pair(edge_int, lam, 1.0)
        assert a.c == pytest.approx(b.c, rel=2e-3)
        assert a.s == pytest.approx(b.s, rel=2e-3)


@pytest.mark.parametrize("edge", ALL_EDGES, ids=["zero", "const", "pw", "samp"])
def test_wronskian_identity(edge):
    tol = 1e-8 if edge.potential.kind == "sampled" else 1e-10
    rng = np.random.default_rng(3)
    for lam in random_lambdas(6, seed=5):
        xs = rng.uniform(0.0, edge.length, 20)
        c, cp, s, sp = fundamental_samples(edge, lam, xs)
        w = c * sp - cp * s
        assert np.max(np.abs(w - 1.0)) < tol


@pytest.mark.parametrize("edge", ALL_EDGES, ids=["zero", "const", "pw", "samp"])
def test_even_potential_identity(edge):
    # C(l) = S'(l) for even potentials
    for lam in random_lambdas(8, seed=11):
        fp = fundamental_at_length(edge, lam)
        assert abs(fp.c - fp.s_prime) < 1e-8 * max(1.0, abs(fp.c))


@pytest.mark.parametrize("edge", ALL_EDGES, ids=["zero", "const", "pw", "samp"])
def test_conjugate_symmetry(edge):
    for lam in random_lambdas(6, seed=13):
        if lam.imag == 0:
            continue
        a = fundamental_pair(edge, lam, 0.7 * edge.length)
        b = fundamental_pair(edge, lam.conjugate(), 0.7 * edge.length)
        for f in ("c", "c_prime", "s", "s_prime"):
            va, vb = getattr(a, f), getattr(b, f)
            tol = 1e-12 * max(1.0, abs(va))
            assert abs(va - vb.conjugate()) <= tol


def test_small_omega_series_branch():
    # near omega = 0 the series kicks in; compare against the even series
    for lam in (1e-9, -1e-9, 9e-9, 1e-7):
        fp = fundamental_pair(ZERO_EDGE, lam, 1.0)
        assert fp.c == pytest.approx(1.0 - lam / 2.0, abs=1e-15)
        assert fp.s == pytest.approx(1.0 - lam / 6.0, abs=1e-15)
        assert fp.s_prime == pytest.approx(fp.c, abs=1e-16)


def test_large_lambda_estimate_trend():
    # |C(l,lam) - cos(sqrt(lam) l)| * sqrt|lam| / e^{|Im sqrt(lam)| l} stays
    # bounded as |lambda| grows (perturbation estimate for nonzero q)
    ks = []
    for R in (1e2, 1e3, 1e4):
        lam = -R
        c_val = fundamental_at_length(SAMP_EDGE, lam).c
        w = np.sqrt(complex(lam))
        ks.append(abs(c_val - np.cos(w)) * abs(w) / math.exp(abs(w.imag)))
    assert ks[1] < 2.0 * ks[0] + 0.05
    assert ks[2] < 2.0 * ks[0] + 0.05


def test_x_out_of_range():
    with pytest.raises(ValueError):
        fundamental_pair(ZERO_EDGE, 1.0, 1.5)
    with pytest.raises(ValueError):
        fundamental_pair(ZERO_EDGE, 1.0, -0.5)


def test_sturm_zero_near():
    assert sturm_zero_near(ZERO_EDGE, math.pi ** 2, 1e-8)
    assert not sturm_zero_near(ZERO_EDGE, 1.0, 1e-8)
    # closed-form zero set sigma = (k pi / l)^2
    assert sturm_zero_near(EdgeSpec(2.0), math.pi ** 2 / 4.0, 1e-8)
