import math

import numpy as np
import pytest

from qcayley.graph import CayleyConfig, EdgeSpec, PotentialSpec
from qcayley.multipliers import solve_multipliers
from qcayley.spectrum import (Band, Classification, multipliers_on_axis,
                              periodicity_check, scan_bands,
                              spectral_lower_bound)

E1 = EdgeSpec(1.0)
G11 = CayleyConfig((E1, E1))
G12 = CayleyConfig((E1, EdgeSpec(2.0)))
G12R = CayleyConfig((EdgeSpec(1.0, rational=(1, 1)),
                     EdgeSpec(2.0, rational=(2, 1))))

BAND1_LO = (math.pi / 6) ** 2
BAND1_HI = (5 * math.pi / 6) ** 2


# --- single-point classification ---------------------------------------------

def test_axis_resolvent_point():
    s = multipliers_on_axis(0.1, G11)
    assert s.classification is Classification.RESOLVENT
    assert math.cos(math.sqrt(0.1)) ** 2 > 0.75
    assert max(abs(v.imag) for v in s.mu_plus) < 1e-7


def test_axis_spectrum_point():
    s = multipliers_on_axis(0.5, G11)
    assert s.classification is Classification.SPECTRUM
    assert math.cos(math.sqrt(0.5)) ** 2 < 0.75
    assert max(abs(v.imag) for v in s.mu_plus) > 1e-3


def test_axis_exceptional_point():
    s = multipliers_on_axis(math.pi ** 2, G11)
    assert s.classification is Classification.EXCEPTIONAL


def test_axis_delta_is_twice_imaginary_part():
    s = multipliers_on_axis(0.7, G11)
    for d, v in zip(s.delta, s.mu_plus):
        assert d == 2j * v.imag


def test_axis_negative_sigma_rejected():
    with pytest.raises(ValueError):
        multipliers_on_axis(-0.5, G11)


def test_axis_conjugate_pair_consistency():
    # mu at sigma - i eps is the conjugate of mu at sigma + i eps, so delta
    # from either side agrees to rounding
    sigma, eps = 0.6, 1e-4
    up = solve_multipliers(complex(sigma, eps), G11)
    dn = solve_multipliers(complex(sigma, -eps), G11)
    for a, b in zip(up.mu, dn.mu):
        assert abs(a - b.conjugate()) < 1e-12


def test_axis_richardson_self_consistency():
    # the two-offset extrapolation is stable against halving both offsets
    rng = np.random.default_rng(23)
    sigmas = rng.uniform(0.35, 6.0, 30)
    bad = 0
    for sigma in sigmas:
        a = multipliers_on_axis(float(sigma), G11, epsilons=(1e-4, 5e-5))
        b = multipliers_on_axis(float(sigma), G11, epsilons=(5e-5, 2.5e-5))
        if max(abs(x - y) for x, y in zip(a.mu_plus, b.mu_plus)) > 1e-6:
            bad += 1
    assert bad <= 1


def test_nonreal_multipliers_conjugate_pairs_in_quartic():
    # at real sigma the quartic has real coefficients, so nonreal roots come
    # in conjugate pairs
    from qcayley.multipliers import polynomial_roots, quartic_coefficients_M2
    for sigma in (0.5, 2.0, 5.0):
        roots = polynomial_roots(quartic_coefficients_M2(complex(sigma), G12))
        nonreal = [r for r in roots if abs(r.imag) > 1e-9]
        assert len(nonreal) % 2 == 0
        for r in nonreal:
            assert any(abs(r.conjugate() - s) < 1e-8 for s in nonreal)


# --- band scanning -----------------------------------------------------------

def test_scan_first_band_edge():
    bands, _ = scan_bands(0.0, 0.5, 500, G11)
    assert len(bands) == 1
    assert bands[0].lower == pytest.approx(BAND1_LO, abs=1e-6)


def test_scan_no_band_below_edge():
    bands, samples = scan_bands(0.0, 0.2, 300, G11)
    assert bands == []
    assert all(s.classification in (Classification.RESOLVENT,
                                    Classification.EXCEPTIONAL)
               for s in samples)


def test_scan_full_first_band():
    bands, _ = scan_bands(0.0, 12.0, 1200, G11)
    assert len(bands) == 1
    assert bands[0].lower == pytest.approx(BAND1_LO, abs=1e-5)
    assert bands[0].upper == pytest.approx(BAND1_HI, abs=1e-5)


def test_scan_band_edges_match_discriminant_zeros():
    # for equal lengths, band edges are zeros of 4 M^2 C^2 - 4 (2M - 1)
    bands, _ = scan_bands(0.0, 12.0, 1200, G11)
    for edge in (bands[0].lower, bands[0].upper):
        disc = 16.0 * math.cos(math.sqrt(edge)) ** 2 - 12.0
        assert abs(disc) < 1e-4


def test_scan_samples_schema():
    bands, samples = scan_bands(0.2, 0.4, 50, G11)
    assert len(samples) == 50
    for s in samples:
        assert len(s.mu_plus) == 2
        assert s.epsilon_used > 0
    sigmas = [s.sigma for s in samples]
    assert sigmas == sorted(sigmas)


def test_scan_sqrt_grid():
    _, samples = scan_bands(1.0, 4.0, 4, G11, sqrt_grid=True, refine=False)
    assert [round(s.sigma, 9) for s in samples] == \
        [round(v, 9) for v in np.linspace(1.0, 2.0, 4) ** 2]


def test_scan_exceptional_interior_does_not_split_band():
    # sqrt(sigma) = pi/2 is a zero of S for the length-2 edge and sits
    # inside a band of the (1, 2) graph; the band must not split there
    center = (math.pi / 2) ** 2
    lo, hi = center - 0.1, center + 0.1
    bands, samples = scan_bands(lo, hi, 101, G12, refine=False)
    assert any(s.classification is Classification.EXCEPTIONAL
               for s in samples)
    assert len(bands) == 1
    assert bands[0].lower == samples[0].sigma
    assert bands[0].upper == samples[-1].sigma


def test_scan_exceptional_in_gap_stays_out_of_bands():
    # sigma = pi^2 is exceptional and lies in a spectral gap for l=(1,1)
    lo = math.pi ** 2 - 0.05
    hi = math.pi ** 2 + 0.05
    bands, samples = scan_bands(lo, hi, 101, G11, refine=False)
    assert any(s.classification is Classification.EXCEPTIONAL
               for s in samples)
    assert bands == []


# --- lower bound --------------------------------------------------------------

def test_lower_bound_m2():
    lb = spectral_lower_bound(G11)
    assert lb == pytest.approx(BAND1_LO, abs=1e-9)


def test_lower_bound_m3():
    g3 = CayleyConfig((E1, E1, E1))
    lb = spectral_lower_bound(g3)
    assert lb == pytest.approx(math.acos(math.sqrt(5) / 3) ** 2, abs=1e-9)


def test_lower_bound_constant_potential_shifts_up():
    gq = CayleyConfig((EdgeSpec(1.0, PotentialSpec.constant(1.0)),) * 2)
    lb = spectral_lower_bound(gq, search_resolution=3000)
    assert lb >= 0.274


def test_lower_bound_requires_m2():
    with pytest.raises(ValueError):
        spectral_lower_bound(CayleyConfig((E1,)))


# --- periodicity ---------------------------------------------------------------

def test_periodicity_equal_lengths():
    g = CayleyConfig((EdgeSpec(1.0, rational=(1, 1)),
                      EdgeSpec(1.0, rational=(1, 1))))
    dev = periodicity_check(g, [0.5], n=1)
    assert dev <= 1e-7


def test_periodicity_mixed_lengths():
    dev = periodicity_check(G12R, [0.5, 1.3, 2.9, 6.2], n=1)
    assert dev <= 1e-7


def test_periodicity_requires_rational_and_zero_q():
    with pytest.raises(ValueError):
        periodicity_check(CayleyConfig((E1, EdgeSpec(0.89))), [0.5])
    gq = CayleyConfig((EdgeSpec(1.0, PotentialSpec.constant(1.0),
                                rational=(1, 1)),) * 2)
    with pytest.raises(ValueError):
        periodicity_check(gq, [0.5])


# --- Band type -----------------------------------------------------------------

def test_band_validation():
    with pytest.raises(ValueError):
        Band(lower=1.0, upper=1.0, resolution=0.1)
    b = Band(lower=1.0, upper=2.0, resolution=0.1)
    assert b.upper - b.lower == 1.0
