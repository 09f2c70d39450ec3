"""Difference sets, oscillation, and the greedy oscillating split.

Two sets oscillate when no difference of two distinct elements of one equals
such a difference of the other. Splitting any infinite set greedily into two
oscillating halves, and splitting the halves again, gives a binary tree whose
branches yield pairwise almost oscillating pseudointersections.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable

from .streams import NatStream, Prefix, Pseudointersection, omega


@dataclass(frozen=True)
class DiffSet:
    values: frozenset[int]
    source_horizon: int


def _as_elements(p: Prefix | Iterable[int]) -> tuple[tuple[int, ...], int]:
    if isinstance(p, Prefix):
        return p.elements, p.horizon
    els = tuple(sorted(set(p)))
    return els, (els[-1] + 1 if els else 0)


def _diffs(els: tuple[int, ...]) -> set[int]:
    return {y - x for x, y in itertools.combinations(els, 2)}


def difference_set(p: Prefix | Iterable[int]) -> DiffSet:
    """All differences y - x of distinct elements x < y."""
    els, horizon = _as_elements(p)
    return DiffSet(frozenset(_diffs(els)), horizon)


def is_oscillating(p: Prefix | Iterable[int], q: Prefix | Iterable[int]) -> bool:
    a, _ = _as_elements(p)
    b, _ = _as_elements(q)
    return _diffs(a).isdisjoint(_diffs(b))


def almost_oscillation_bound(p: Prefix | Iterable[int], q: Prefix | Iterable[int],
                             min_survivors: int = 0) -> int | None:
    """Least n such that the elements >= n of ``p`` and ``q`` oscillate.

    A side left with fewer than two elements has no differences and so
    oscillates trivially. ``min_survivors`` rejects such degenerate cuts: the
    scan stops (returning None) once either side keeps fewer elements.
    """
    a, ha = _as_elements(p)
    b, hb = _as_elements(q)
    top = max(ha, hb)
    # the truncations only change just above an element
    for n in sorted({0, top} | {x + 1 for x in a + b}):
        ta = tuple(x for x in a if x >= n)
        tb = tuple(x for x in b if x >= n)
        if len(ta) < min_survivors or len(tb) < min_survivors:
            return None
        if _diffs(ta).isdisjoint(_diffs(tb)):
            return n
    return None


class _GreedySplit:
    """Shared state for the two halves of one split; picks alternate a, b, a, ..."""

    def __init__(self, source: NatStream, name: str):
        self.source = source
        self.halves = (_SplitHalf(self, 0, name + "0"), _SplitHalf(self, 1, name + "1"))

    def step(self) -> None:
        a, b = self.halves[0]._cache, self.halves[1]._cache
        x = self.source
        if len(a) == len(b):
            # a_{n+1} - a_n > b_n - b_0, and above b_n so it is unused
            nxt = x[0] if not a else x.ceil(max(a[-1] + b[-1] - b[0], b[-1]) + 1)
            self.halves[0]._append(nxt)
        else:
            # b_{n+1} - b_n > a_{n+1} - a_0
            nxt = x[1] if not b else x.ceil(max(b[-1] + a[-1] - a[0], a[-1]) + 1)
            self.halves[1]._append(nxt)


class _SplitHalf(NatStream):
    def __init__(self, split: _GreedySplit, side: int, name: str):
        super().__init__(name)
        self.split = split
        self.side = side

    def _extend(self) -> None:
        k = len(self._cache)
        while len(self._cache) == k:
            self.split.step()


def split_oscillating(x: NatStream, name: str = "") -> tuple[NatStream, NatStream]:
    """Greedy split of ``x`` into two oscillating subsets.

    Starts from the first two elements of ``x`` and takes, alternately, the
    least unused element whose gap to the previous pick on its side exceeds
    the current spread of the other side.
    """
    split = _GreedySplit(x, name or (x.name or "X") + "/")
    return split.halves


class SplitTree:
    """Cantor tree of greedy splits: node s has children s+'0', s+'1'."""

    def __init__(self, root: NatStream | None = None, depth: int = 0):
        if depth < 0:
            raise ValueError("depth must be >= 0")
        self.root = root if root is not None else omega()
        self._nodes: dict[str, NatStream] = {"": self.root}
        self.depth = depth
        for w in words_up_to(depth):
            self.node(w)

    def node(self, s: str) -> NatStream:
        if s not in self._nodes:
            if s.strip("01"):
                raise ValueError(f"not a binary word: {s!r}")
            parent = self.node(s[:-1])
            a, b = split_oscillating(parent, name="A_" + s[:-1])
            a.name, b.name = "A_" + s[:-1] + "0", "A_" + s[:-1] + "1"
            self._nodes[s[:-1] + "0"] = a
            self._nodes[s[:-1] + "1"] = b
        return self._nodes[s]

    __getitem__ = node

    def level(self, d: int) -> list[str]:
        return ["".join(w) for w in itertools.product("01", repeat=d)]

    @property
    def nodes(self) -> dict[str, NatStream]:
        return dict(self._nodes)


def words_up_to(depth: int) -> list[str]:
    return ["".join(w) for d in range(depth + 1) for w in itertools.product("01", repeat=d)]


def build_split_tree(x: NatStream, depth: int) -> SplitTree:
    return SplitTree(x, depth)


def meet(s: str, t: str) -> str:
    """Longest common prefix of two words."""
    n = 0
    while n < min(len(s), len(t)) and s[n] == t[n]:
        n += 1
    return s[:n]


def branch_words(m: int) -> list[str]:
    """The m lexicographically least words of length ceil(log2 m)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    d = math.ceil(math.log2(m)) if m > 1 else 0
    return ["".join(w) for w in itertools.product("01", repeat=d)][:m]


def branch_chain(tree: SplitTree, word: str):
    """Chain n -> A_{f|n} for the branch f = word followed by all ones."""
    def chain(n: int) -> NatStream:
        return tree.node((word + "1" * n)[:n])
    return chain


def almost_oscillating_family(m: int, k: int, tree: SplitTree | None = None) -> list[NatStream]:
    """m pairwise almost oscillating sets, with k elements of each materialized.

    Each set is the diagonal pseudointersection along one branch of the split
    tree over omega; materializing runs the touched-prefix chain checks.
    """
    tree = tree if tree is not None else SplitTree()
    out = []
    for w in branch_words(m):
        p = Pseudointersection(branch_chain(tree, w), name="P_" + w)
        p.word = w
        p.take(k)
        out.append(p)
    return out
