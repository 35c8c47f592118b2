"""Real-axis boundary values of the multipliers and spectrum location.

The multipliers extend to the positive real axis as boundary values from
above, mu_+(sigma).  Points where every mu_+ is real belong to the
resolvent set; points where some mu_+ is genuinely nonreal carry spectrum.
mu_+ is computed by solving slightly above the axis at two offsets and
Richardson-extrapolating to the axis, which sidesteps branch selection
among conjugate root pairs.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ExceptionalPointError, NoCandidateError, PathStallError
from .fundamental import fundamental_at_length
from .graph import CayleyConfig
from .multipliers import DEFAULT_TOL, ToleranceConfig, solve_multipliers

__all__ = [
    "Classification",
    "SpectralSample",
    "Band",
    "multipliers_on_axis",
    "scan_bands",
    "spectral_lower_bound",
    "periodicity_check",
]

DEFAULT_EPSILONS = (1e-4, 5e-5)
_EPS_FLOOR = 1e-8


class Classification(enum.Enum):
    RESOLVENT = "resolvent"
    SPECTRUM = "spectrum"
    EXCEPTIONAL = "exceptional"
    UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class SpectralSample:
    """Boundary-value data at one real sigma."""

    sigma: float
    mu_plus: tuple[complex, ...]
    delta: tuple[complex, ...]
    classification: Classification
    epsilon_used: float
    ambiguous: bool = False


@dataclass(frozen=True)
class Band:
    """A maximal detected spectral interval, with the grid resolution at
    which it was found."""

    lower: float
    upper: float
    resolution: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError("band needs lower < upper")


def _nan_sample(sigma, eps, classification):
    nan = complex(float("nan"), float("nan"))
    return SpectralSample(sigma=sigma, mu_plus=(nan,), delta=(nan,),
                          classification=classification, epsilon_used=eps)


def multipliers_on_axis(sigma: float, graph: CayleyConfig,
                        tol: ToleranceConfig = DEFAULT_TOL,
                        epsilons=DEFAULT_EPSILONS) -> SpectralSample:
    """mu_+(sigma) by two offset solves and Richardson extrapolation.

    Classification: EXCEPTIONAL when sigma is numerically on the
    exceptional set (some S_m(l_m, sigma) ~ 0) or some mu_+ is within
    tolerance of +/-1; else SPECTRUM when max |Im mu_+| exceeds the reality
    threshold; else RESOLVENT.  Solver failures yield UNRESOLVED.
    """
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    e1, e2 = epsilons
    if not (e1 > e2 > 0):
        raise ValueError("epsilons must be positive and decreasing")

    exceptional = any(
        abs(fundamental_at_length(edge, complex(sigma)).s) < tol.exceptional
        for edge in graph.edges)

    try:
        set1 = solve_multipliers(complex(sigma, e1), graph, tol)
        set2 = solve_multipliers(complex(sigma, e2), graph, tol)
    except (NoCandidateError, ExceptionalPointError, PathStallError):
        cls = (Classification.EXCEPTIONAL if exceptional
               else Classification.UNRESOLVED)
        return _nan_sample(sigma, e2, cls)

    mu1 = np.asarray(set1.mu)
    mu2 = np.asarray(set2.mu)
    mu_plus = (e1 * mu2 - e2 * mu1) / (e1 - e2)
    delta = 2j * mu_plus.imag

    if not exceptional:
        dist = np.minimum(np.abs(mu_plus - 1.0), np.abs(mu_plus + 1.0))
        exceptional = bool(np.any(dist < tol.exceptional))
    if exceptional:
        cls = Classification.EXCEPTIONAL
    elif float(np.max(np.abs(mu_plus.imag))) > tol.reality:
        cls = Classification.SPECTRUM
    else:
        cls = Classification.RESOLVENT
    return SpectralSample(
        sigma=float(sigma),
        mu_plus=tuple(complex(v) for v in mu_plus),
        delta=tuple(complex(v) for v in delta),
        classification=cls, epsilon_used=e2,
        ambiguous=set1.ambiguous or set2.ambiguous)


def _effective_classes(samples):
    """Band-detection view: isolated exceptional points inherit the
    consensus of their non-exceptional neighbors."""
    raw = [s.classification for s in samples]
    out = list(raw)
    n = len(raw)
    for i, cls in enumerate(raw):
        if cls is not Classification.EXCEPTIONAL:
            continue
        left = next((raw[j] for j in range(i - 1, -1, -1)
                     if raw[j] is not Classification.EXCEPTIONAL), None)
        right = next((raw[j] for j in range(i + 1, n)
                      if raw[j] is not Classification.EXCEPTIONAL), None)
        if left == right and left is not None:
            out[i] = left
        elif left is None and right is not None:
            out[i] = right
        elif right is None and left is not None:
            out[i] = left
    return out


def _classify_for_bisect(sigma, graph, tol, eps1):
    """Spectrum membership test at a small fixed offset pair."""
    if sigma < 0:
        return False
    sample = multipliers_on_axis(sigma, graph, tol, epsilons=(eps1, 0.5 * eps1))
    if sample.classification is Classification.UNRESOLVED:
        return None
    im = max(abs(v.imag) for v in sample.mu_plus)
    return im > tol.reality


def _refine_edge(out_pt, in_pt, out_limit, in_limit, graph, tol,
                 resolution, spacing):
    """Locate the band edge between ``out_pt`` (gap side) and ``in_pt``.

    All classifications use one small offset pair, chosen so that the
    extrapolation blur around the edge is below the target resolution; the
    coarse-scan offsets blur a much wider zone, so both bracket endpoints
    are re-verified (and pushed outward/inward as needed, within the given
    limits) before bisecting.
    """
    eps1 = min(DEFAULT_EPSILONS[0], max(0.02 * resolution, _EPS_FLOOR))

    def classify(sigma):
        verdict = None
        for nudge in (0.0, 0.11, -0.11, 0.31):
            verdict = _classify_for_bisect(sigma + nudge * resolution,
                                           graph, tol, eps1)
            if verdict is not None:
                return verdict
        return verdict

    direction = 1.0 if in_pt > out_pt else -1.0
    for _ in range(64):
        verdict = classify(out_pt)
        if verdict is None or not verdict:
            break
        nxt = out_pt - direction * spacing
        if direction * (nxt - out_limit) < 0:
            break
        out_pt = nxt
    for _ in range(64):
        verdict = classify(in_pt)
        if verdict:
            break
        nxt = in_pt + direction * spacing
        if direction * (in_limit - nxt) < 0 or abs(nxt - out_pt) < resolution:
            return 0.5 * (out_pt + in_pt)
        in_pt = nxt

    lo, hi = (out_pt, in_pt) if direction > 0 else (in_pt, out_pt)
    inside_is_hi = direction > 0
    for _ in range(200):
        if hi - lo <= resolution:
            break
        mid = 0.5 * (lo + hi)
        verdict = classify(mid)
        if verdict is None:
            break
        if verdict == inside_is_hi:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def scan_bands(sigma_min: float, sigma_max: float, grid_points: int,
               graph: CayleyConfig, tol: ToleranceConfig = DEFAULT_TOL,
               epsilons=DEFAULT_EPSILONS, refine: bool = True,
               sqrt_grid: bool = False):
    """Classify a sigma grid and extract maximal spectral bands.

    Returns (bands, samples).  Band edges interior to the range are refined
    by bisection to 1e-6 of the range; with ``sqrt_grid`` the grid is
    uniform in sqrt(sigma) instead of sigma.  Unresolved samples are
    retried at doubled offsets and never contribute to bands.
    """
    if not (0 <= sigma_min < sigma_max):
        raise ValueError("need 0 <= sigma_min < sigma_max")
    if grid_points < 2:
        raise ValueError("need at least two grid points")
    if sqrt_grid:
        grid = np.linspace(math.sqrt(sigma_min), math.sqrt(sigma_max),
                           grid_points) ** 2
    else:
        grid = np.linspace(sigma_min, sigma_max, grid_points)

    samples = []
    for sigma in grid:
        sample = multipliers_on_axis(float(sigma), graph, tol, epsilons)
        if sample.classification is Classification.UNRESOLVED:
            for scale in (2.0, 4.0):
                retry = multipliers_on_axis(
                    float(sigma), graph, tol,
                    (epsilons[0] * scale, epsilons[1] * scale))
                if retry.classification is not Classification.UNRESOLVED:
                    sample = retry
                    break
        samples.append(sample)

    classes = _effective_classes(samples)
    in_band = [cls is Classification.SPECTRUM for cls in classes]
    resolution = 1e-6 * (sigma_max - sigma_min)
    spacing = (sigma_max - sigma_min) / (grid_points - 1)
    # widen brackets past the offset-blurred zone around each edge
    widen = max(2, int(math.ceil(4.0 * epsilons[0] / spacing)))

    bands = []
    i, n = 0, grid_points
    while i < n:
        if not in_band[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and in_band[j + 1]:
            j += 1
        lower = grid[i]
        upper = grid[j]
        if refine and i > 0:
            lo_idx = i - 1
            while lo_idx > 0 and i - lo_idx < widen and not in_band[lo_idx - 1]:
                lo_idx -= 1
            in_idx = min(j, i + widen - 1)
            out_limit = grid[0] if not bands else bands[-1].upper + resolution
            lower = _refine_edge(float(grid[lo_idx]), float(grid[in_idx]),
                                 float(out_limit), float(grid[j]),
                                 graph, tol, resolution, spacing)
        if refine and j < n - 1:
            hi_idx = j + 1
            while hi_idx < n - 1 and hi_idx - j < widen \
                    and not in_band[hi_idx + 1]:
                hi_idx += 1
            in_idx = max(i, j - widen + 1)
            upper = _refine_edge(float(grid[hi_idx]), float(grid[in_idx]),
                                 float(grid[n - 1]), float(lower),
                                 graph, tol, resolution, spacing)
        if lower < upper:
            bands.append(Band(lower=float(lower), upper=float(upper),
                              resolution=float(spacing)))
        i = j + 1
    return bands, samples


def spectral_lower_bound(graph: CayleyConfig,
                         search_resolution: int = 2000) -> float:
    """Infimum of the lowest detected spectral band (q >= 0, M >= 2).

    Doubles the scan window until a band appears.  For identical edges
    with q = 0 the closed-form first crossing of
    cos^2(l sqrt(sigma)) = (2M - 1) / M^2 is returned after cross-checking
    the scan against it.
    """
    if graph.M < 2:
        raise ValueError("the positive lower bound needs M >= 2")
    closed = None
    if graph.equal_edges and graph.edges[0].potential.is_zero:
        M = graph.M
        ell = graph.edges[0].length
        closed = (math.acos(math.sqrt(2.0 * M - 1.0) / M) / ell) ** 2

    hi = 1.0 if closed is None else 2.0 * closed
    for _ in range(12):
        bands, _ = scan_bands(0.0, hi, search_resolution, graph)
        if bands:
            found = bands[0].lower
            if closed is not None:
                spacing = hi / (search_resolution - 1)
                if abs(found - closed) > 4.0 * spacing:
                    raise NoCandidateError(
                        "scan disagrees with the closed-form band edge")
                return closed
            return found
        hi *= 2.0
    raise NoCandidateError("no spectral band found below the search cap")


def periodicity_check(graph: CayleyConfig, sigma_samples, n: int = 1,
                      epsilons=DEFAULT_EPSILONS) -> float:
    """Max deviation |mu((sqrt(s) + 2np)^2) - mu(s)| over the samples.

    Requires q = 0 and rational lengths l_m = tau_m / eta_m (supplied via
    EdgeSpec.rational); the common period in sqrt(lambda) is
    p = 2 pi * prod(eta_m).  Both members of each comparison pair are
    evaluated at matched complex offsets so the extrapolation bias cancels.
    """
    for edge in graph.edges:
        if not edge.potential.is_zero:
            raise ValueError("periodicity check requires q = 0")
        if edge.rational is None:
            raise ValueError(
                "periodicity check requires rational edge lengths")
    p = 2.0 * math.pi
    for edge in graph.edges:
        p *= edge.rational[1]

    e1, e2 = epsilons
    worst = 0.0
    for sigma in sigma_samples:
        mus = []
        for eps in (e1, e2):
            lam = complex(sigma, eps)
            lam_shift = (np.sqrt(complex(lam)) + 2.0 * n * p) ** 2
            a = np.asarray(solve_multipliers(lam, graph).mu)
            b = np.asarray(solve_multipliers(complex(lam_shift), graph).mu)
            mus.append((a, b))
        extrap_a = (e1 * mus[1][0] - e2 * mus[0][0]) / (e1 - e2)
        extrap_b = (e1 * mus[1][1] - e2 * mus[0][1]) / (e1 - e2)
        worst = max(worst, float(np.max(np.abs(extrap_a - extrap_b))))
    return worst
