"""Resolvent kernel built from the multipliers.

On a single edge the kernel is R(x, t) = y_-(min) y_+(max) / W with
y_+ the solution decaying into the far half tree (normalized to 1 at the
near vertex), y_- its mirror (normalized to 1 at the far vertex), and
W = (1 - mu^2) / S(l) their Wronskian.  Because the potentials are even,
y_-(x) = y_+(l - x) on the edge.  Off the edge both factors extend over the
tree through products of multipliers at the vertices and two-point
interpolation along each edge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ExceptionalPointError
from .fundamental import fundamental_at_length, fundamental_samples
from .graph import CayleyConfig, Letter, Word, tree_edges
from .multipliers import MultiplierSet

__all__ = [
    "vertex_value",
    "edge_interpolate",
    "wronskian",
    "kernel_eval",
    "apply_resolvent",
    "TreeFunction",
    "EdgeField",
    "root_edge_key",
    "bump_profile",
]

_S_TOL = 1e-14


def _mu_vector(mu) -> tuple[complex, ...]:
    if isinstance(mu, MultiplierSet):
        return mu.mu
    return tuple(complex(v) for v in mu)


def vertex_value(word: Word, mu) -> complex:
    """Product of multipliers along a reduced word.

    Both s_k and s_k^-1 steps contribute mu_k: the value of the decaying
    solution at the vertex addressed by ``word``, relative to the subtree
    root where it equals 1.
    """
    mus = _mu_vector(mu)
    out = 1.0 + 0.0j
    for (m, _sign) in word.letters:
        out *= mus[m - 1]
    return out


def edge_interpolate(alpha: complex, beta: complex, edge, lam: complex, x,
                     exceptional_tol: float = 1e-8):
    """The unique solution on [0, l] with y(0) = alpha, y(l) = beta.

    y(x) = alpha C(x) + [(beta - alpha C(l)) / S(l)] S(x); fails when
    lambda is exceptional for this edge type (S(l) ~ 0).
    """
    fp = fundamental_at_length(edge, lam)
    if abs(fp.s) < exceptional_tol:
        raise ExceptionalPointError("S(l, lambda) ~ 0: cannot interpolate")
    coef = (beta - alpha * fp.c) / fp.s
    c, _, s, _ = fundamental_samples(edge, lam, x)
    out = alpha * c + coef * s
    return out if np.ndim(x) else complex(out[0])


def wronskian(mu_k: complex, edge, lam: complex) -> complex:
    """W = (1 - mu_k^2) / S(l, lambda) of the two decaying solutions."""
    s = fundamental_at_length(edge, lam).s
    if abs(s) < _S_TOL:
        raise ExceptionalPointError("S(l, lambda) vanishes")
    return (1.0 - mu_k * mu_k) / s


def kernel_eval(edge_index: int, x: float, t: float, lam: complex, mu,
                graph: CayleyConfig) -> complex:
    """Resolvent kernel R(x, t, lambda) on a type-``edge_index`` edge.

    Symmetric in (x, t); the corner values are
    R(0, 0) = mu S(l) / (1 - mu^2) and R(l, 0) = mu^2 S(l) / (1 - mu^2).
    """
    mus = _mu_vector(mu)
    edge = graph.edges[edge_index - 1]
    muk = mus[edge_index - 1]
    w = wronskian(muk, edge, lam)
    if abs(w) < _S_TOL:
        raise ExceptionalPointError("vanishing Wronskian (mu^2 = 1)")
    fp = fundamental_at_length(edge, lam)
    a = (muk - fp.c) / fp.s
    lo, hi = (x, t) if x <= t else (t, x)
    # y_+(x) = C(x) + a S(x); y_-(x) = y_+(l - x) by evenness of q
    cl, _, sl, _ = fundamental_samples(edge, lam, [edge.length - lo, hi])
    y_minus = cl[0] + a * sl[0]
    y_plus = cl[1] + a * sl[1]
    return complex(y_minus * y_plus / w)


@dataclass(frozen=True)
class EdgeField:
    """Sampled values of a tree function on one edge.

    ``x`` runs from the near vertex (closer to the tree root) to the far
    vertex; ``alpha``/``beta`` are the endpoint values and ``dvalues`` holds
    analytic derivatives in the same coordinate.
    """

    near: Word
    letter: Letter
    edge_type: int
    alpha: complex
    beta: complex
    x: np.ndarray
    values: np.ndarray
    dvalues: np.ndarray


@dataclass(frozen=True)
class TreeFunction:
    """A function on the depth-truncated tree, sampled edge by edge."""

    depth: int
    vertex_values: dict
    edges: tuple[EdgeField, ...]

    def kirchhoff_residuals(self) -> dict:
        """Sum of outward derivatives at each interior vertex.

        Uses the stored analytic derivatives; leaves (at word length =
        depth) are omitted since the function is truncated there.
        """
        sums: dict[Word, complex] = {}
        for ef in self.edges:
            far = ef.near.append(ef.letter)
            sums[ef.near] = sums.get(ef.near, 0.0) + complex(ef.dvalues[0])
            sums[far] = sums.get(far, 0.0) - complex(ef.dvalues[-1])
        return {w: v for w, v in sums.items() if len(w) < self.depth}


def root_edge_key(m: int = 1, sign: int = 1) -> tuple[Word, Letter]:
    """Key of the edge from the identity vertex along generator m."""
    return (Word(()), (m, sign))


def bump_profile(length: float, panels: int, amplitude: float = 1.0):
    """A smooth single-edge source: amplitude * sin^2(pi x / l) samples."""
    x = np.linspace(0.0, length, panels + 1)
    return amplitude * np.sin(np.pi * x / length) ** 2


def _cumulative_quadratic(y: np.ndarray, dx: float) -> np.ndarray:
    """Cumulative integral via local quadratic fits (Simpson-consistent)."""
    n = len(y)
    out = np.zeros(n, dtype=complex)
    if n < 2:
        return out
    if n == 2:
        out[1] = 0.5 * dx * (y[0] + y[1])
        return out
    seg = np.empty(n - 1, dtype=complex)
    # quadratic through (i-1, i, i+1) integrated over [i-1, i]
    seg[:-1] = dx / 12.0 * (5.0 * y[:-2] + 8.0 * y[1:-1] - y[2:])
    # last subinterval uses the trailing triple
    seg[-1] = dx / 12.0 * (-y[-3] + 8.0 * y[-2] + 5.0 * y[-1])
    out[1:] = np.cumsum(seg)
    return out


def _adjacency(edges):
    adj: dict[Word, list] = {}
    for idx, (near, letter) in enumerate(edges):
        far = near.append(letter)
        adj.setdefault(near, []).append((far, letter[0], idx))
        adj.setdefault(far, []).append((near, letter[0], idx))
    return adj


def _spread_products(adj, start: Word, base: complex, mus, blocked_edge: int):
    """Multiplier products over the component of ``start`` with one edge cut."""
    values = {start: base}
    frontier = [start]
    while frontier:
        nxt = []
        for w in frontier:
            for (z, m, idx) in adj.get(w, ()):
                if idx == blocked_edge or z in values:
                    continue
                values[z] = values[w] * mus[m - 1]
                nxt.append(z)
        frontier = nxt
    return values


def apply_resolvent(f: dict, lam: complex, mu, graph: CayleyConfig,
                    depth: int, panels: int = 256) -> TreeFunction:
    """Apply the resolvent to a finitely supported edge-sampled function.

    ``f`` maps edge keys (near word, letter) to arrays of panels+1 samples
    on the uniform per-edge grid.  The result is sampled on every edge of
    the depth-truncated tree; quadrature is cumulative-quadratic composite
    (Simpson order) with ``panels`` panels per edge.
    """
    if panels < 2 or panels % 2:
        raise ValueError("panels must be even and >= 2")
    mus = _mu_vector(mu)
    edges = tree_edges(graph.M, depth)
    index = {key: i for i, key in enumerate(edges)}
    for key in f:
        if key not in index:
            raise ValueError(f"source edge {key} outside depth-{depth} tree")
    adj = _adjacency(edges)

    # per-type fundamental data on the sampling grid
    grids, csarr, length = {}, {}, {}
    for m, edge in enumerate(graph.edges, start=1):
        xs = np.linspace(0.0, edge.length, panels + 1)
        c, cp, s, sp = fundamental_samples(edge, lam, xs)
        fp = fundamental_at_length(edge, lam)
        if abs(fp.s) < _S_TOL:
            raise ExceptionalPointError("exceptional lambda")
        grids[m] = xs
        csarr[m] = (c, cp, s, sp, fp.c, fp.s)
        length[m] = edge.length

    vals = [np.zeros(panels + 1, complex) for _ in edges]
    dvals = [np.zeros(panels + 1, complex) for _ in edges]

    def interp_arrays(m, alpha, beta):
        c, cp, s, sp, cl, sl = csarr[m]
        coef = (beta - alpha * cl) / sl
        return alpha * c + coef * s, alpha * cp + coef * sp

    for key, fsamp in f.items():
        fsamp = np.asarray(fsamp, dtype=complex)
        if len(fsamp) != panels + 1:
            raise ValueError("source samples must match the panel grid")
        src = index[key]
        near, letter = key
        far = near.append(letter)
        mtype = letter[0]
        muk = mus[mtype - 1]
        c, cp, s, sp, cl, sl = csarr[mtype]
        w = (1.0 - muk * muk) / sl
        if abs(w) < _S_TOL:
            raise ExceptionalPointError("vanishing Wronskian (mu^2 = 1)")
        a = (muk - cl) / sl
        yp = c + a * s
        ypp = cp + a * sp
        ym = yp[::-1]
        ymp = -ypp[::-1]
        dx = length[mtype] / panels

        cum_m = _cumulative_quadratic(ym * fsamp, dx)   # int_0^x y_- f
        cum_p = _cumulative_quadratic(yp * fsamp, dx)   # int_0^x y_+ f
        tot_m = cum_m[-1]
        tot_p = cum_p[-1]

        # the source edge itself: two-sided formula
        vals[src] += (yp * cum_m + ym * (tot_p - cum_p)) / w
        dvals[src] += (ypp * cum_m + ymp * (tot_p - cum_p)) / w

        # decaying extensions over both components of the cut tree
        vplus = _spread_products(adj, far, muk, mus, src)
        vminus = _spread_products(adj, near, muk, mus, src)
        for idx, (wnear, lett) in enumerate(edges):
            if idx == src:
                continue
            wfar = wnear.append(lett)
            if wnear in vplus:
                alpha, beta = vplus[wnear], vplus[wfar]
                weight = tot_m / w
            else:
                alpha, beta = vminus[wnear], vminus[wfar]
                weight = tot_p / w
            y, dy = interp_arrays(lett[0], alpha, beta)
            vals[idx] += weight * y
            dvals[idx] += weight * dy

    vertex_values: dict[Word, complex] = {}
    fields = []
    for idx, (wnear, lett) in enumerate(edges):
        wfar = wnear.append(lett)
        fields.append(EdgeField(
            near=wnear, letter=lett, edge_type=lett[0],
            alpha=complex(vals[idx][0]), beta=complex(vals[idx][-1]),
            x=grids[lett[0]].copy(), values=vals[idx], dvalues=dvals[idx]))
        vertex_values.setdefault(wnear, complex(vals[idx][0]))
        vertex_values[wfar] = complex(vals[idx][-1])
    return TreeFunction(depth=depth, vertex_values=vertex_values,
                        edges=tuple(fields))
