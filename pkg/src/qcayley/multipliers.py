"""The coupled multiplier system and its solvers.

For each edge type m the multiplier mu_m(lambda) is the ratio across a
type-m edge of the square-integrable solution on the half tree.  The vector
(mu_1, ..., mu_M) satisfies the coupled system

    (mu_m^2 - 1) / (S_m mu_m) - 2 sum_k (mu_k - C_k) / S_k = 0,

with C_k, S_k the fundamental solutions at x = l_k.  Solution routes:

* all edge types identical -> a single quadratic,
* M = 2 -> explicit quartic elimination for one multiplier plus quadratic
  partner recovery (the elimination squares an equation, so candidates must
  be re-checked against the full system),
* general M -> Newton continuation from a large negative seed.

Candidates are filtered by system residual, |mu_m| <= 1, and the
square-summability criterion, implemented as the spectral radius of the
M x M counting matrix B with B[m][m] = |mu_m|^2, B[m][k] = 2 |mu_m|^2.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ExceptionalPointError, NoCandidateError, PathStallError
from .fundamental import fundamental_at_length
from .graph import CayleyConfig, EdgeSpec

__all__ = [
    "ToleranceConfig",
    "MultiplierSet",
    "QuarticCoefficients",
    "edge_values",
    "system_residual",
    "system_jacobian",
    "solve_equal_length",
    "quartic_coefficients_M2",
    "polynomial_roots",
    "partner_multipliers",
    "summability_check",
    "solve_multipliers",
    "continuation_solve",
    "gradient_singularity_check",
]

_TINY = 1e-14


@dataclass(frozen=True)
class ToleranceConfig:
    """Filter tolerances for the solve pipeline.

    ``boundary_slack`` loosens the strict |mu| <= 1 and rho < 1 filters by a
    hair so that real-axis band points, where both sit exactly on the
    boundary, are not rejected for rounding reasons.
    """

    residual: float = 1e-8
    exceptional: float = 1e-8
    reality: float = 1e-7
    boundary_slack: float = 1e-9


DEFAULT_TOL = ToleranceConfig()

SOURCE_EQUAL_LENGTH = "EqualLengthQuadratic"
SOURCE_QUARTIC = "QuarticElimination"
SOURCE_CONTINUATION = "Continuation"


@dataclass(frozen=True)
class MultiplierSet:
    """An accepted multiplier vector at one lambda."""

    lam: complex
    mu: tuple[complex, ...]
    residual: float
    summability_radius: float
    source: str
    ambiguous: bool = False


@dataclass(frozen=True)
class QuarticCoefficients:
    """Degree-4..0 coefficients of the single-multiplier quartic (M = 2)."""

    c: tuple[complex, complex, complex, complex, complex]

    def __post_init__(self):
        if len(self.c) != 5:
            raise ValueError("need exactly five coefficients")
        if not all(cmath.isfinite(v) for v in self.c):
            raise ValueError("coefficients must be finite")


def edge_values(graph: CayleyConfig, lam: complex):
    """C_m(l_m, lambda) and S_m(l_m, lambda) for all edge types."""
    C = np.empty(graph.M, complex)
    S = np.empty(graph.M, complex)
    for i, edge in enumerate(graph.edges):
        fp = fundamental_at_length(edge, lam)
        C[i], S[i] = fp.c, fp.s
    return C, S


def _residual_from_cs(mu, C, S):
    # mu itself may be legitimately tiny (it decays like exp(-sqrt(R) l) for
    # lambda = -R), so the division guard is on the products S_m * mu_m.
    mu = np.asarray(mu, dtype=complex)
    if np.any(np.abs(S) < _TINY):
        raise ExceptionalPointError("S_m(l_m, lambda) vanishes")
    if np.any(np.abs(S * mu) < 1e-280) or not np.all(np.isfinite(mu)):
        raise ExceptionalPointError("vanishing multiplier candidate")
    g = 2.0 * np.sum((mu - C) / S)
    out = (mu * mu - 1.0) / (S * mu) - g
    if not np.all(np.isfinite(out)):
        raise ExceptionalPointError("non-finite residual")
    return out


def system_residual(mu, lam: complex, graph: CayleyConfig):
    """Componentwise residuals of the coupled multiplier system.

    Zero vector exactly when ``mu`` solves the system.  Raises
    ExceptionalPointError when any |S_m| or |mu_m| is below 1e-14.
    """
    C, S = edge_values(graph, lam)
    return _residual_from_cs(mu, C, S)


def _jacobian_from_cs(mu, S):
    mu = np.asarray(mu, dtype=complex)
    M = len(mu)
    J = np.empty((M, M), complex)
    J[:] = -2.0 / S[np.newaxis, :]
    diag = (mu * mu + 1.0) / (S * mu * mu) - 2.0 / S
    np.fill_diagonal(J, diag)
    return J


def system_jacobian(mu, lam: complex, graph: CayleyConfig):
    """d(residual_m)/d(mu_j) with lambda held fixed."""
    _, S = edge_values(graph, lam)
    return _jacobian_from_cs(mu, S)


def _quadratic_roots(a: complex, b: complex, c: complex):
    """Stable roots of a z^2 + b z + c = 0 (a != 0)."""
    disc = cmath.sqrt(b * b - 4.0 * a * c)
    if (b.conjugate() * disc).real < 0.0:
        disc = -disc
    q = -0.5 * (b + disc)
    r1 = q / a
    r2 = (c / q) if q != 0 else -b / a - r1
    return r1, r2


def solve_equal_length(lam: complex, M: int, edge: EdgeSpec):
    """Both roots of the symmetric reduction (all edge types identical).

    The system collapses to (2M-1) mu^2 - 2M C(l, lambda) mu + 1 = 0; the
    product of the two roots is 1/(2M-1).
    """
    C = fundamental_at_length(edge, lam).c
    r1, r2 = _quadratic_roots(2.0 * M - 1.0, -2.0 * M * C, 1.0)
    return _sorted_pair(r1, r2)


def _sorted_pair(r1: complex, r2: complex):
    if (r1.real, r1.imag) <= (r2.real, r2.imag):
        return r1, r2
    return r2, r1


def quartic_coefficients_M2(lam: complex, graph: CayleyConfig,
                            index: int = 1) -> QuarticCoefficients:
    """Coefficients of the decoupled quartic for mu_index (M = 2 only).

    For index 1 the quartic is

        3 S2^2 mu^4 - 8 (S1 C2 S2 + S2^2 C1) mu^3
        + (2 S2^2 - 4 S1^2 + 4 S2^2 C1^2 + 4 C2^2 S1^2 + 8 S1 C2 S2 C1) mu^2
        - S2^2 = 0,

    and index 2 swaps the edge subscripts.  The degree-1 coefficient is
    identically zero.
    """
    if graph.M != 2:
        raise ValueError("quartic elimination requires M = 2")
    if index not in (1, 2):
        raise ValueError("index must be 1 or 2")
    C, S = edge_values(graph, lam)
    if index == 2:
        C, S = C[::-1], S[::-1]
    c1, c2 = C
    s1, s2 = S
    c4 = 3.0 * s2 * s2
    c3 = -8.0 * (s1 * c2 * s2 + s2 * s2 * c1)
    c2_ = (2.0 * s2 * s2 - 4.0 * s1 * s1 + 4.0 * s2 * s2 * c1 * c1
           + 4.0 * c2 * c2 * s1 * s1 + 8.0 * s1 * c2 * s2 * c1)
    c0 = -s2 * s2
    return QuarticCoefficients((complex(c4), complex(c3), complex(c2_),
                                0.0 + 0.0j, complex(c0)))


def polynomial_roots(coeffs) -> np.ndarray:
    """All roots of the quartic, Newton polished, sorted by (Re, Im).

    Raises ExceptionalPointError when the leading coefficient degenerates
    (lambda on the leading-coefficient zero set).
    """
    if isinstance(coeffs, QuarticCoefficients):
        c = np.asarray(coeffs.c, dtype=complex)
    else:
        c = np.asarray(tuple(coeffs), dtype=complex)
    if abs(c[0]) <= _TINY:
        raise ExceptionalPointError("degenerate leading coefficient")
    roots = np.roots(c)
    dp = np.polyder(c)
    for _ in range(4):
        pv = np.polyval(c, roots)
        dv = np.polyval(dp, roots)
        ok = np.abs(dv) > _TINY
        roots = np.where(ok, roots - pv / np.where(ok, dv, 1.0), roots)
    # residual measured against the term magnitudes at each root, since
    # evaluating p there cannot be more accurate than rounding of its terms
    scale = np.maximum(np.polyval(np.abs(c), np.abs(roots)), np.max(np.abs(c)))
    resid = float(np.max(np.abs(np.polyval(c, roots)) / scale))
    if resid > 1e-10:
        raise NoCandidateError(f"root residual {resid:.3e} too large")
    order = np.lexsort((roots.imag, roots.real))
    return roots[order]


def partner_multipliers(mu_1: complex, lam: complex, graph: CayleyConfig):
    """Recover the remaining multipliers from mu_1.

    Every mu_k shares the common value G = (mu_1^2 - 1)/(S_1 mu_1) of the
    decoupled part of the system, so each solves xi^2 - G S_k xi - 1 = 0.
    The two roots have product -1; the one in the closed unit disc is taken.
    When both sit on the unit circle the choice is ambiguous and all
    combinations are returned (caller filters with the full system).

    Returns a list of candidate vectors; the first entry uses the in-disc
    choice everywhere, and length > 1 signals unit-circle ties.
    """
    C, S = edge_values(graph, lam)
    if np.any(np.abs(S) < _TINY):
        raise ExceptionalPointError("S_m(l_m, lambda) vanishes")
    if mu_1 == 0 or abs(S[0] * mu_1) < 1e-280:
        raise ExceptionalPointError("mu_1 vanishes")
    G = (mu_1 * mu_1 - 1.0) / (S[0] * mu_1)
    choices: list[tuple[complex, ...]] = [(complex(mu_1),)]
    for k in range(1, graph.M):
        r1, r2 = _quadratic_roots(1.0, -G * S[k], -1.0)
        a1, a2 = abs(r1), abs(r2)
        if abs(a1 - 1.0) < 1e-9 and abs(a2 - 1.0) < 1e-9 \
                and abs(r1 - r2) > 1e-12:
            picks = (r1, r2)
        else:
            picks = (r1 if a1 <= a2 else r2,)
        choices = [vec + (p,) for vec in choices for p in picks]
    return choices


def summability_check(mu_magnitudes) -> float:
    """Spectral radius of the tree-counting matrix B.

    With t_m = |mu_m|^2, B[m][m] = t_m and B[m][k] = 2 t_m for k != m; the
    squared vertex values of the extended solution sum to a finite value on
    the half tree exactly when rho(B) < 1.  For equal magnitudes t this is
    t^2 (2M - 1) < 1, i.e. |mu| < 1/sqrt(2M - 1).
    """
    mags = np.asarray(mu_magnitudes, dtype=float)
    if np.any(mags <= 0.0):
        raise ValueError("magnitudes must be positive")
    t = mags * mags
    M = len(t)
    B = 2.0 * np.tile(t[:, None], (1, M))
    np.fill_diagonal(B, t)
    if M == 1:
        return float(t[0])
    return float(np.max(np.abs(np.linalg.eigvals(B))))


def _filter_candidates(cands, C, S, tol: ToleranceConfig):
    """Apply residual, magnitude, and summability filters; dedupe."""
    survivors = []
    for mu in cands:
        mu = np.asarray(mu, dtype=complex)
        if np.any(mu == 0) or not np.all(np.isfinite(mu)):
            continue
        try:
            res = float(np.max(np.abs(_residual_from_cs(mu, C, S))))
        except ExceptionalPointError:
            continue
        if res > tol.residual:
            continue
        if np.any(np.abs(mu) > 1.0 + tol.boundary_slack):
            continue
        rho = summability_check(np.abs(mu))
        if rho >= 1.0 + tol.boundary_slack:
            continue
        survivors.append((tuple(complex(v) for v in mu), res, rho))
    deduped: list[tuple] = []
    for cand in survivors:
        if not any(
            max(abs(a - b) for a, b in zip(cand[0], other[0])) < 1e-9
            for other in deduped
        ):
            deduped.append(cand)
    return deduped


def _build_set(lam, survivors, source):
    many = len(survivors) > 1
    mu, res, rho = min(survivors, key=lambda c: c[2])
    return MultiplierSet(lam=complex(lam), mu=mu, residual=res,
                         summability_radius=rho, source=source,
                         ambiguous=many)


def solve_multipliers(lam: complex, graph: CayleyConfig,
                      tol: ToleranceConfig = DEFAULT_TOL) -> MultiplierSet:
    """Solve the multiplier system at one lambda and filter candidates.

    Dispatch: identical edges use the symmetric quadratic; M = 2 uses the
    quartic elimination with partner recovery; otherwise Newton
    continuation.  Off the real axis exactly one candidate survives the
    filters; if several do (real-axis band points, borderline numerics) the
    smallest summability radius wins and the result is flagged ambiguous.
    """
    C, S = edge_values(graph, lam)
    if np.any(np.abs(S) < tol.exceptional):
        raise ExceptionalPointError(
            f"lambda={lam} is within {tol.exceptional} of the exceptional set")

    if graph.equal_edges:
        r1, r2 = solve_equal_length(lam, graph.M, graph.edges[0])
        cands = [(r1,) * graph.M, (r2,) * graph.M]
        source = SOURCE_EQUAL_LENGTH
    elif graph.M == 2:
        cands = []
        for root in polynomial_roots(quartic_coefficients_M2(lam, graph)):
            if root == 0:
                continue
            try:
                cands.extend(partner_multipliers(root, lam, graph))
            except ExceptionalPointError:
                continue
        source = SOURCE_QUARTIC
    else:
        return continuation_solve(graph, lam, tol=tol)

    survivors = _filter_candidates(cands, C, S, tol)
    if not survivors:
        raise NoCandidateError(f"no multiplier candidate at lambda={lam}")
    return _build_set(lam, survivors, source)


def _newton(mu, C, S, max_iter=40):
    """Damped Newton on the residual; returns (mu, ok)."""
    mu = np.asarray(mu, dtype=complex).copy()
    fnorm = np.max(np.abs(_residual_from_cs(mu, C, S)))
    scale = float(np.max(np.abs(C / S))) + 1.0
    target = 1e-13 * scale
    for _ in range(max_iter):
        if fnorm <= target:
            return mu, True
        J = _jacobian_from_cs(mu, S)
        try:
            step = np.linalg.solve(J, -_residual_from_cs(mu, C, S))
        except np.linalg.LinAlgError:
            return mu, False
        damp = 1.0
        for _ in range(40):
            trial = mu + damp * step
            if np.all(trial != 0) and np.all(np.isfinite(trial)):
                tnorm = np.max(np.abs(_residual_from_cs(trial, C, S)))
                if tnorm < fnorm:
                    mu, fnorm = trial, tnorm
                    break
            damp *= 0.5
        else:
            return mu, fnorm <= target
    return mu, fnorm <= target


def _default_path(graph: CayleyConfig, target: complex):
    R = 100.0 * max(1.0, graph.sup_potential())
    start = complex(-R)
    if target.imag == 0.0 and target.real >= 0.0:
        lift = max(1.0, 0.1 * abs(target))
        return [start, complex(-R, lift), complex(target.real, lift), target]
    if target.imag == 0.0:
        return [start, target]
    lift = max(abs(target.imag), 1.0) * (1.0 if target.imag > 0 else -1.0)
    return [start, complex(start.real, lift),
            complex(target.real, lift), target]


def continuation_solve(graph: CayleyConfig, lambda_target: complex,
                       path=None, tol: ToleranceConfig = DEFAULT_TOL,
                       nodes_per_segment: int = 24) -> MultiplierSet:
    """Track the multiplier vector from a large negative seed to the target.

    At lambda_0 = -R the decaying branch is seeded by
    mu_m ~ exp(-sqrt(R) l_m) / (2M) and refined by Newton; along the path
    each node warm-starts from the previous one, with recursive segment
    bisection when Newton fails.  Raises PathStallError when the step
    falls below 1e-12 of the total path length.
    """
    if path is None:
        path = _default_path(graph, complex(lambda_target))
    path = [complex(p) for p in path]
    if path[-1] != complex(lambda_target):
        path = path + [complex(lambda_target)]

    total = sum(abs(b - a) for a, b in zip(path, path[1:])) or 1.0
    R = -path[0].real
    if not (path[0].imag == 0.0 and R > 0):
        raise ValueError("path must start on the negative real axis")

    sqrtR = math.sqrt(R)
    seed = np.array(
        [cmath.exp(-sqrtR * e.length) / (2.0 * graph.M)
         for e in graph.edges], complex)

    C, S = edge_values(graph, path[0])
    mu = None
    for factor in (1.0, 2.0, 0.5, 4.0):
        cand, ok = _newton(seed * factor, C, S)
        if ok:
            mu = cand
            break
    if mu is None:
        raise NoCandidateError("continuation seed failed to converge")

    # pre-subdivide each leg uniformly, then walk with bisection on failure
    nodes: list[complex] = []
    for a, b in zip(path, path[1:]):
        npieces = max(1, round(nodes_per_segment * abs(b - a) / total),
                      round(abs(b - a) / 2.0))
        nodes.extend(a + (b - a) * (k + 1) / npieces for k in range(npieces))

    def on_decaying_branch(vec):
        # off the axis the physical branch keeps |mu_m| < 1 and rho(B) < 1;
        # landing outside means Newton jumped basins and the step must shrink
        if np.any(np.abs(vec) > 1.0 + 1e-6):
            return False
        return summability_check(np.abs(vec)) < 1.0 + 1e-6

    current = path[0]
    for node in nodes:
        stack = [node]
        while stack:
            nxt = stack[-1]
            Cn, Sn = edge_values(graph, nxt)
            cand, ok = _newton(mu, Cn, Sn)
            if ok and on_decaying_branch(cand):
                mu = cand
                current = nxt
                stack.pop()
            else:
                if abs(nxt - current) < 1e-12 * total:
                    raise PathStallError(
                        f"continuation stalled near lambda={current}")
                stack.append(current + 0.5 * (nxt - current))

    C, S = edge_values(graph, complex(lambda_target))
    survivors = _filter_candidates([mu], C, S, tol)
    if not survivors:
        raise NoCandidateError(
            f"continuation result rejected at lambda={lambda_target}")
    return _build_set(complex(lambda_target), survivors, SOURCE_CONTINUATION)


def gradient_singularity_check(mu, lam: complex, graph: CayleyConfig) -> float:
    """Distance |sum_m xi_m^2/(xi_m^2+1) - 1/2| from the singular set.

    Near-zero values flag points where the gradients of the system
    degenerate and local tracking may fail.  When some xi_m^2 is within
    1e-10 of -1 the point is reported as singular (distance 0).
    """
    _, S = edge_values(graph, lam)
    if np.any(np.abs(S) < _TINY):
        raise ExceptionalPointError("S_m(l_m, lambda) vanishes")
    mu = np.asarray(mu, dtype=complex)
    sq = mu * mu
    if np.any(np.abs(sq + 1.0) < 1e-10):
        return 0.0
    return float(abs(np.sum(sq / (sq + 1.0)) - 0.5))
