import math

import numpy as np
import pytest

from qcayley.graph import CayleyConfig, EdgeSpec, PotentialSpec
from qcayley.multipliers import solve_multipliers
from qcayley.oracle import (assemble, build_truncated,
                            discrete_resolvent_compare, low_eigenvalues)

E1 = EdgeSpec(1.0)
G11 = CayleyConfig((E1, E1))
G1 = CayleyConfig((EdgeSpec(0.5),))  # M=1, two half edges = unit interval


# --- tree construction ---------------------------------------------------------

def test_build_counts_depth1():
    tr = build_truncated(G11, 1, 16)
    assert len(tr.vertices) == 5  # root + 4 neighbors
    assert len(tr.edges) == 4
    assert tr.num_leaves == 4


def test_build_counts_depth2():
    tr = build_truncated(G11, 2, 16)
    assert len(tr.edges) == 4 + 4 * 3
    g3 = CayleyConfig((E1, E1, E1))
    tr3 = build_truncated(g3, 2, 16)
    assert len(tr3.edges) == 6 + 6 * 5


def test_build_interior_degree():
    tr = build_truncated(G11, 3, 16)
    degree = {}
    for near, far, _ in tr.edges:
        degree[near] = degree.get(near, 0) + 1
        degree[far] = degree.get(far, 0) + 1
    for i, w in enumerate(tr.vertices):
        if len(w) < tr.depth:
            assert degree[i] == 4  # 2M
        else:
            assert degree[i] == 1


def test_build_validation():
    with pytest.raises(ValueError):
        build_truncated(G11, 0, 16)
    with pytest.raises(ValueError):
        build_truncated(G11, 2, 8)
    with pytest.raises(ValueError):
        build_truncated(G11, 12, 64)  # over the size cap


# --- assembly -------------------------------------------------------------------

def test_interval_eigenvalues():
    # M=1 depth-1 tree with half-unit edges is the unit Dirichlet interval
    tr = build_truncated(G1, 1, 100)
    op = assemble(tr, G1)
    vals = low_eigenvalues(op, 3)
    for k, v in enumerate(vals, start=1):
        expect = (k * math.pi) ** 2
        assert abs(v - expect) / expect < 1e-3


def test_stiffness_symmetric():
    tr = build_truncated(G11, 2, 16)
    op = assemble(tr, G11)
    assert abs(op.stiffness - op.stiffness.T).max() == 0.0


def test_apply_ones_gives_potential():
    gq = CayleyConfig((EdgeSpec(1.0, PotentialSpec.constant(2.0)),) * 2)
    tr = build_truncated(gq, 2, 16)
    op = assemble(tr, gq)
    out = op.apply(np.ones(op.dim))
    # away from the Dirichlet leaves the image is q = 2; identify interior
    # dofs as those where the stencil sees no leaf
    interior = np.abs(out - 2.0) < 1e-9
    assert np.sum(interior) > 0.5 * op.dim


def test_nonnegative_spectrum():
    tr = build_truncated(G11, 3, 16)
    op = assemble(tr, G11)
    vals = low_eigenvalues(op, 5)
    assert vals[0] >= -1e-8


def test_gershgorin_lower_bound():
    # row discs of the mass-scaled operator stay in [0, inf): each row is a
    # nonnegative-potential second-difference stencil
    gq = CayleyConfig((EdgeSpec(1.0, PotentialSpec.constant(1.5)),) * 2)
    tr = build_truncated(gq, 2, 16)
    op = assemble(tr, gq)
    A = (op.stiffness.multiply(1.0 / op.mass[:, None])).tocsr()
    diag = A.diagonal()
    off = np.asarray(np.abs(A).sum(axis=1)).ravel() - np.abs(diag)
    assert np.min(diag - off) >= -1e-8


def test_eigenvalue_count_guard():
    tr = build_truncated(G11, 1, 16)
    op = assemble(tr, G11)
    with pytest.raises(ValueError):
        low_eigenvalues(op, op.dim)


def test_smallest_eigenvalue_bounded_below_by_band_bottom():
    # Dirichlet truncation keeps Rayleigh quotients above the infinite-tree
    # bottom; eigenvalues approach it from above as depth grows
    prev = None
    for depth in (3, 4, 5):
        tr = build_truncated(G11, depth, 16)
        op = assemble(tr, G11)
        v0 = low_eigenvalues(op, 1)[0]
        assert v0 >= (math.pi / 6) ** 2 - 1e-6
        if prev is not None:
            assert v0 < prev
        prev = v0


def test_deeper_tree_eigenvalues_in_band():
    tr = build_truncated(G11, 6, 16)
    op = assemble(tr, G11)
    vals = low_eigenvalues(op, 40)
    assert np.all(vals > 0.25)
    lo, hi = (math.pi / 6) ** 2, (5 * math.pi / 6) ** 2
    inside = np.sum((vals >= lo - 1e-3) & (vals <= hi + 1e-3))
    assert inside >= 0.9 * len(vals)


def test_eigenvalue_density_grows_with_depth():
    counts = []
    for depth in (4, 5, 6):
        tr = build_truncated(G11, depth, 16)
        op = assemble(tr, G11)
        vals = low_eigenvalues(op, 30)
        counts.append(int(np.sum(vals <= 0.8)))
    assert counts[0] < counts[1] < counts[2]


# --- resolvent comparison -------------------------------------------------------

def test_discrete_resolvent_compare_small():
    ms = solve_multipliers(-1.0, G11)
    tr = build_truncated(G11, 6, 32)
    dev = discrete_resolvent_compare(tr, G11, -1.0, ms)
    assert dev <= 0.02


def test_discrete_resolvent_zero_requires_negative_lambda():
    ms = solve_multipliers(-1.0, G11)
    tr = build_truncated(G11, 3, 16)
    with pytest.raises(ValueError):
        discrete_resolvent_compare(tr, G11, 0.5, ms)


def test_discrete_resolvent_second_order_in_mesh():
    ms = solve_multipliers(-1.0, G11)
    devs = []
    for mesh in (16, 32):
        tr = build_truncated(G11, 5, mesh)
        devs.append(discrete_resolvent_compare(tr, G11, -1.0, ms))
    ratio = devs[0] / devs[1]
    assert 3.0 <= ratio <= 5.0
