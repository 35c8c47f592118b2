import numpy as np
import pytest

from qcayley.graph import (CayleyConfig, EdgeSpec, PotentialSpec, Word,
                           enumerate_subtree_vertices, enumerate_words,
                           reduce_word, tree_edges)


def test_reduce_cancellation():
    assert reduce_word([(1, 1), (1, -1)]) == Word(())


def test_reduce_already_reduced():
    letters = ((2, 1), (3, -1), (1, 1))
    assert reduce_word(letters).letters == letters


def test_reduce_nested_cancellation():
    raw = [(1, 1), (2, 1), (2, -1), (1, -1), (1, 1)]
    assert reduce_word(raw).letters == ((1, 1),)


def test_reduce_idempotent_and_inverse():
    rng = np.random.default_rng(7)
    for _ in range(200):
        n = rng.integers(0, 12)
        raw = [(int(rng.integers(1, 4)), int(rng.choice([-1, 1])))
               for _ in range(n)]
        w = reduce_word(raw)
        assert reduce_word(w.letters) == w
        assert w.concat(w.inverse()) == Word(())
        assert w.inverse().concat(w) == Word(())


def test_word_constructor_rejects_unreduced():
    with pytest.raises(ValueError):
        Word(((1, 1), (1, -1)))


def test_enumerate_counts():
    assert len(enumerate_subtree_vertices(1, 1, 2)) == 1
    words = enumerate_subtree_vertices(1, 2, 2)
    assert len(words) == 4
    assert {w.letters for w in words} == {
        ((1, 1),), ((1, 1), (1, 1)), ((1, 1), (2, 1)), ((1, 1), (2, -1))}
    assert len(enumerate_subtree_vertices(1, 3, 3)) == 1 + 5 + 25


def test_enumerate_depth_layer_counts():
    for M in (1, 2, 3):
        words = enumerate_subtree_vertices(1, 4, M)
        for n in range(1, 5):
            layer = sum(1 for w in words if len(w) == n)
            assert layer == (2 * M - 1) ** (n - 1)


def test_enumerate_invalid_type():
    with pytest.raises(ValueError):
        enumerate_subtree_vertices(3, 2, 2)


def test_tree_edges_counts():
    # 2M * sum_{n<d} (2M-1)^n edges in the depth-d tree
    for M, depth in ((2, 1), (2, 2), (3, 2), (2, 4)):
        edges = tree_edges(M, depth)
        expect = 2 * M * sum((2 * M - 1) ** n for n in range(depth))
        assert len(edges) == expect
        assert len(enumerate_words(M, depth)) == expect + 1


def test_potential_validation():
    with pytest.raises(ValueError):
        PotentialSpec.constant(-1.0)
    with pytest.raises(ValueError):
        PotentialSpec.piecewise_constant([1.0, 2.0])  # not palindromic
    with pytest.raises(ValueError):
        PotentialSpec.sampled([0.0, 1.0, 0.5])
    PotentialSpec.piecewise_constant([1.0, 2.0, 1.0])
    PotentialSpec.sampled([0.5, 1.0, 0.5])


def test_potential_evaluate():
    pw = PotentialSpec.piecewise_constant([1.0, 3.0, 1.0])
    xs = np.array([0.1, 0.5, 0.9])
    assert np.allclose(pw.evaluate(xs, 1.0), [1.0, 3.0, 1.0])
    sam = PotentialSpec.sampled([0.0, 2.0, 0.0])
    assert sam.evaluate(0.25, 1.0) == pytest.approx(1.0)
    assert PotentialSpec.zero().evaluate(0.3, 1.0) == 0.0
    assert PotentialSpec.constant(2.5).sup() == 2.5


def test_edge_spec_validation():
    with pytest.raises(ValueError):
        EdgeSpec(0.0)
    with pytest.raises(ValueError):
        EdgeSpec(-1.0)
    with pytest.raises(ValueError):
        EdgeSpec(1.0, rational=(1, 2))  # 1/2 != 1.0
    e = EdgeSpec(0.5, rational=(1, 2))
    assert e.rational == (1, 2)


def test_cayley_config():
    e = EdgeSpec(1.0)
    g = CayleyConfig((e, e))
    assert g.M == 2 and g.equal_edges
    g2 = CayleyConfig((e, EdgeSpec(2.0)))
    assert not g2.equal_edges
    with pytest.raises(ValueError):
        CayleyConfig(())
    gq = CayleyConfig((EdgeSpec(1.0, PotentialSpec.constant(2.0)), e))
    assert gq.sup_potential() == 2.0
