"""Fundamental solutions C(x, lambda), S(x, lambda) on a single edge.

C and S solve -y'' + q y = lambda y with C(0) = S'(0) = 1 and
C'(0) = S(0) = 0.  For zero, constant, and piecewise-constant potentials the
values come from exact trigonometric transfer matrices; sampled potentials
are integrated with fixed-step RK4 so results are bit-reproducible.

All formulas are even in sqrt(lambda), so the branch of the square root
never matters.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .graph import EdgeSpec

__all__ = ["FundamentalPair", "fundamental_pair", "fundamental_samples",
           "fundamental_at_length", "sturm_zero_near"]

# Below this |omega * x| the trigonometric forms lose digits to cancellation
# and a short even series is exact to machine precision.
_SERIES_CUT = 1e-4

# Fixed RK4 resolution for sampled potentials: step <= length / _RK4_MIN_STEPS.
_RK4_MIN_STEPS = 2000


@dataclass(frozen=True)
class FundamentalPair:
    """Values (C, C', S, S') at one point for one edge type and lambda."""

    c: complex
    c_prime: complex
    s: complex
    s_prime: complex

    def wronskian(self) -> complex:
        return self.c * self.s_prime - self.c_prime * self.s


def _cos_sinc(w2, x):
    """cos(omega x) and sin(omega x)/omega for omega^2 = w2, branch free.

    Returns (cos_u, x * sinc(u)) with u = omega * x; both are even functions
    of omega.  Near u = 0 a series avoids cancellation.
    """
    w2 = np.asarray(w2, dtype=complex)
    x = np.asarray(x, dtype=float)
    u2 = w2 * x * x
    small = np.abs(u2) < _SERIES_CUT ** 2
    u = np.sqrt(w2) * x
    with np.errstate(invalid="ignore", over="ignore"):
        cos_u = np.where(small, 1.0 - u2 / 2.0 + u2 * u2 / 24.0, np.cos(u))
        sinc_u = np.where(
            small,
            1.0 - u2 / 6.0 + u2 * u2 / 120.0,
            np.divide(np.sin(u), np.where(small, 1.0, u)),
        )
    return cos_u, x * sinc_u


def _segment_matrix(w2, h):
    """Transfer matrix over a width-h subinterval of constant q: omega^2 = w2.

    Columns propagate (y, y') from the left end; entries are
    [[cos, sinc*h], [-w2*h*sinc, cos]].
    """
    c, s = _cos_sinc(w2, h)
    return np.array([[c, s], [-w2 * s, c]], dtype=complex)


def _closed_form_samples(edge: EdgeSpec, lam: complex, xs: np.ndarray):
    pot = edge.potential
    if pot.kind == "zero":
        shift = 0.0
    else:
        shift = pot.values[0]
    w2 = lam - shift
    c, s = _cos_sinc(w2, xs)
    return c, -w2 * s, s, c.copy()


def _piecewise_samples(edge: EdgeSpec, lam: complex, xs: np.ndarray):
    vals = edge.potential.values
    nseg = len(vals)
    hseg = edge.length / nseg
    # prefix[j] propagates (y, y') from 0 to the start of segment j
    prefix = [np.eye(2, dtype=complex)]
    for v in vals[:-1]:
        prefix.append(_segment_matrix(lam - v, hseg) @ prefix[-1])
    C = np.empty(len(xs), complex)
    Cp = np.empty(len(xs), complex)
    S = np.empty(len(xs), complex)
    Sp = np.empty(len(xs), complex)
    for i, x in enumerate(xs):
        j = min(int(x / hseg), nseg - 1)
        m = _segment_matrix(lam - vals[j], x - j * hseg) @ prefix[j]
        C[i], S[i] = m[0]
        Cp[i], Sp[i] = m[1]
    return C, Cp, S, Sp


@lru_cache(maxsize=64)
def _rk4_nodes(edge: EdgeSpec, nsteps: int):
    """Potential samples at the 2*nsteps+1 half-step RK4 nodes."""
    grid = np.linspace(0.0, edge.length, 2 * nsteps + 1)
    return tuple(float(v) for v in edge.potential.evaluate(grid, edge.length))


def _sampled_samples(edge: EdgeSpec, lam: complex, xs: np.ndarray):
    length = edge.length
    nsteps = max(_RK4_MIN_STEPS, 2 * (len(edge.potential.values) - 1))
    h = length / nsteps
    qn = _rk4_nodes(edge, nsteps)

    def deriv(qval, state):
        c, cp, s, sp = state
        w = qval - lam
        return (cp, w * c, sp, w * s)

    def rk4_step(state, q0, qm, q1, step):
        k1 = deriv(q0, state)
        st2 = tuple(y + 0.5 * step * k for y, k in zip(state, k1))
        k2 = deriv(qm, st2)
        st3 = tuple(y + 0.5 * step * k for y, k in zip(state, k2))
        k3 = deriv(qm, st3)
        st4 = tuple(y + step * k for y, k in zip(state, k3))
        k4 = deriv(q1, st4)
        return tuple(
            y + step / 6.0 * (a + 2 * b + 2 * c + d)
            for y, a, b, c, d in zip(state, k1, k2, k3, k4)
        )

    order = np.argsort(xs, kind="stable")
    out = [None] * len(xs)
    state = (1 + 0j, 0j, 0j, 1 + 0j)
    pos = 0.0
    done = 0  # full steps taken
    for idx in order:
        x = float(xs[idx])
        # advance by full steps, then one partial step to land exactly on x
        while done < nsteps and (done + 1) * h <= x + 1e-15 * length:
            state = rk4_step(state, qn[2 * done], qn[2 * done + 1],
                             qn[2 * done + 2], h)
            done += 1
            pos = done * h
        rem = x - pos
        if rem > 1e-15 * max(1.0, length):
            qa = edge.potential.evaluate(pos, length)
            qm = edge.potential.evaluate(pos + rem / 2, length)
            qb = edge.potential.evaluate(x, length)
            out[idx] = rk4_step(state, qa, qm, qb, rem)
        else:
            out[idx] = state
    C = np.array([o[0] for o in out])
    Cp = np.array([o[1] for o in out])
    S = np.array([o[2] for o in out])
    Sp = np.array([o[3] for o in out])
    return C, Cp, S, Sp


def fundamental_samples(edge: EdgeSpec, lam: complex, xs):
    """(C, C', S, S') arrays at the points xs in [0, length]."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if np.any(xs < -1e-12 * edge.length) or \
            np.any(xs > edge.length * (1 + 1e-12)):
        raise ValueError("x out of range [0, length]")
    xs = np.clip(xs, 0.0, edge.length)
    kind = edge.potential.kind
    if kind in ("zero", "constant"):
        return _closed_form_samples(edge, lam, xs)
    if kind == "piecewise":
        return _piecewise_samples(edge, lam, xs)
    return _sampled_samples(edge, lam, xs)


def fundamental_pair(edge: EdgeSpec, lam: complex, x: float) -> FundamentalPair:
    """Fundamental pair at a single point."""
    c, cp, s, sp = fundamental_samples(edge, lam, [x])
    return FundamentalPair(complex(c[0]), complex(cp[0]),
                           complex(s[0]), complex(sp[0]))


def fundamental_at_length(edge: EdgeSpec, lam: complex) -> FundamentalPair:
    """Fundamental pair at x = length, where the multiplier system lives."""
    return fundamental_pair(edge, lam, edge.length)


def sturm_zero_near(edge: EdgeSpec, sigma: float, tol: float) -> bool:
    """True when |S(length, sigma)| < tol, i.e. sigma sits on the
    exceptional set of this edge type."""
    return abs(fundamental_at_length(edge, sigma).s) < tol
