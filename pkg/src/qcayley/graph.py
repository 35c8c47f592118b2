"""Graph-side data model: edge types, potentials, and free-group words.

The metric Cayley graph of the free group on M generators is a regular tree
of vertex degree 2M.  Edges come in M types; all edges of type m share the
same length l_m and the same even potential q_m.  Vertices are addressed by
reduced words in the generators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "Letter",
    "Word",
    "reduce_word",
    "word_inverse",
    "letter_order",
    "enumerate_subtree_vertices",
    "enumerate_words",
    "tree_edges",
    "PotentialSpec",
    "EdgeSpec",
    "CayleyConfig",
]

# A letter is (generator index m >= 1, sign in {+1, -1}).
Letter = tuple[int, int]

_EVEN_TOL = 1e-10


def _check_letter(letter: Letter) -> None:
    m, sign = letter
    if not (isinstance(m, int) and m >= 1 and sign in (-1, 1)):
        raise ValueError(f"invalid letter {letter!r}")


@dataclass(frozen=True)
class Word:
    """A reduced word in the free-group generators.

    Words are stored fully reduced; construct raw sequences through
    :func:`reduce_word` instead of calling the constructor with unreduced
    input.
    """

    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        for letter in self.letters:
            _check_letter(letter)
        for (m1, s1), (m2, s2) in zip(self.letters, self.letters[1:]):
            if m1 == m2 and s1 == -s2:
                raise ValueError("word is not reduced")

    def __len__(self) -> int:
        return len(self.letters)

    def inverse(self) -> "Word":
        return Word(tuple((m, -s) for (m, s) in reversed(self.letters)))

    def append(self, letter: Letter) -> "Word":
        """Right-multiply by a single generator letter, reducing if needed."""
        _check_letter(letter)
        if self.letters and self.letters[-1][0] == letter[0] \
                and self.letters[-1][1] == -letter[1]:
            return Word(self.letters[:-1])
        return Word(self.letters + (letter,))

    def concat(self, other: "Word") -> "Word":
        return reduce_word(self.letters + other.letters)

    def sort_key(self):
        return tuple((m, 0 if s > 0 else 1) for (m, s) in self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "<identity>"
        return " ".join(f"s{m}" if s > 0 else f"s{m}^-1"
                        for (m, s) in self.letters)


def reduce_word(letters: Iterable[Letter]) -> Word:
    """Freely reduce a raw letter sequence.

    Reduction removes adjacent inverse pairs until none remain; the result
    is independent of removal order, which a stack traversal realizes in a
    single pass.
    """
    stack: list[Letter] = []
    for letter in letters:
        _check_letter(letter)
        if stack and stack[-1][0] == letter[0] and stack[-1][1] == -letter[1]:
            stack.pop()
        else:
            stack.append(letter)
    return Word(tuple(stack))


def word_inverse(word: Word) -> Word:
    return word.inverse()


def letter_order(M: int) -> list[Letter]:
    """Deterministic letter ordering: s1, s1^-1, s2, s2^-1, ..."""
    return [(m, s) for m in range(1, M + 1) for s in (1, -1)]


def _continuations(word: Word, M: int) -> list[Letter]:
    out = []
    last = word.letters[-1] if word.letters else None
    for letter in letter_order(M):
        if last is not None and last[0] == letter[0] and last[1] == -letter[1]:
            continue
        out.append(letter)
    return out


def enumerate_subtree_vertices(root_type: int, depth: int, M: int) -> list[Word]:
    """All reduced words s_m w' of length <= depth, breadth first.

    These address the vertices (other than the root) of the subtree hanging
    off a type-``root_type`` edge.  The count is sum_{n=1}^{depth} (2M-1)^(n-1).
    """
    if not (1 <= root_type <= M):
        raise ValueError(f"root_type must be in 1..{M}, got {root_type}")
    if depth < 1:
        raise ValueError("depth must be >= 1")
    frontier = [Word(((root_type, 1),))]
    out = list(frontier)
    for _ in range(depth - 1):
        nxt = []
        for w in frontier:
            for letter in _continuations(w, M):
                nxt.append(w.append(letter))
        nxt.sort(key=Word.sort_key)
        out.extend(nxt)
        frontier = nxt
    return out


def enumerate_words(M: int, depth: int) -> list[Word]:
    """All reduced words of length <= depth, breadth first (identity first)."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    frontier = [Word(())]
    out = list(frontier)
    for _ in range(depth):
        nxt = []
        for w in frontier:
            for letter in _continuations(w, M):
                nxt.append(w.append(letter))
        nxt.sort(key=Word.sort_key)
        out.extend(nxt)
        frontier = nxt
    return out


def tree_edges(M: int, depth: int) -> list[tuple[Word, Letter]]:
    """Edges of the depth-truncated tree rooted at the identity.

    Each edge is (near word w, letter), joining w to w*letter with
    |w*letter| = |w| + 1.  Parents precede children in the returned order.
    """
    edges = []
    for w in enumerate_words(M, depth - 1):
        for letter in _continuations(w, M):
            edges.append((w, letter))
    return edges


@dataclass(frozen=True)
class PotentialSpec:
    """An even, nonnegative potential on one edge type.

    kind is one of "zero", "constant", "piecewise", "sampled".  For
    "piecewise" the values are constants on equal subintervals and must be
    palindromic; for "sampled" the values live on N+1 uniform grid points and
    must satisfy v[i] == v[N-i].
    """

    kind: str
    values: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind == "zero":
            if self.values:
                raise ValueError("zero potential takes no values")
        elif self.kind == "constant":
            if len(self.values) != 1:
                raise ValueError("constant potential takes one value")
        elif self.kind == "piecewise":
            if len(self.values) < 1:
                raise ValueError("piecewise potential needs >= 1 value")
        elif self.kind == "sampled":
            if len(self.values) < 2:
                raise ValueError("sampled potential needs >= 2 grid values")
        else:
            raise ValueError(f"unknown potential kind {self.kind!r}")
        vals = self.values
        if any(v < 0 for v in vals):
            raise ValueError("potential must be nonnegative")
        if self.kind in ("piecewise", "sampled"):
            n = len(vals)
            for i in range(n // 2 + 1):
                if abs(vals[i] - vals[n - 1 - i]) > _EVEN_TOL:
                    raise ValueError(
                        "potential values must be palindromic (even function)")

    @staticmethod
    def zero() -> "PotentialSpec":
        return PotentialSpec("zero")

    @staticmethod
    def constant(c: float) -> "PotentialSpec":
        return PotentialSpec("constant", (float(c),))

    @staticmethod
    def piecewise_constant(values: Sequence[float]) -> "PotentialSpec":
        return PotentialSpec("piecewise", tuple(float(v) for v in values))

    @staticmethod
    def sampled(values: Sequence[float]) -> "PotentialSpec":
        return PotentialSpec("sampled", tuple(float(v) for v in values))

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero" or all(v == 0.0 for v in self.values)

    def sup(self) -> float:
        return max(self.values) if self.values else 0.0

    def evaluate(self, x, length: float):
        """q(x) for x in [0, length]; accepts scalars or arrays."""
        xs = np.asarray(x, dtype=float)
        if self.kind == "zero":
            out = np.zeros_like(xs)
        elif self.kind == "constant":
            out = np.full_like(xs, self.values[0])
        elif self.kind == "piecewise":
            nseg = len(self.values)
            idx = np.clip((xs / length * nseg).astype(int), 0, nseg - 1)
            out = np.asarray(self.values, dtype=float)[idx]
        else:  # sampled, linear interpolation between grid points
            grid = np.linspace(0.0, length, len(self.values))
            out = np.interp(xs, grid, np.asarray(self.values, dtype=float))
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class EdgeSpec:
    """One edge type: a length and an even potential.

    ``rational`` optionally records the length as (numerator, denominator),
    which enables the rational-length periodicity check.
    """

    length: float
    potential: PotentialSpec = field(default_factory=PotentialSpec.zero)
    rational: Optional[tuple[int, int]] = None

    def __post_init__(self):
        if not (self.length > 0 and math.isfinite(self.length)):
            raise ValueError("edge length must be positive and finite")
        if self.rational is not None:
            num, den = self.rational
            if num <= 0 or den <= 0:
                raise ValueError("rational length must be positive")
            if abs(num / den - self.length) > 1e-12 * max(1.0, self.length):
                raise ValueError("rational form does not match length")


@dataclass(frozen=True)
class CayleyConfig:
    """A quantum Cayley graph of the free group of rank M = len(edges)."""

    edges: tuple[EdgeSpec, ...]

    def __post_init__(self):
        if isinstance(self.edges, list):
            object.__setattr__(self, "edges", tuple(self.edges))
        if len(self.edges) < 1:
            raise ValueError("need at least one edge type (M >= 1)")
        for e in self.edges:
            if not isinstance(e, EdgeSpec):
                raise TypeError("edges must be EdgeSpec instances")

    @property
    def M(self) -> int:
        return len(self.edges)

    @property
    def equal_edges(self) -> bool:
        """True when all edge types are identical (length and potential)."""
        first = self.edges[0]
        return all(e.length == first.length and e.potential == first.potential
                   for e in self.edges[1:])

    def sup_potential(self) -> float:
        return max(e.potential.sup() for e in self.edges)
