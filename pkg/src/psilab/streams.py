"""Lazy infinite subsets of omega.

A :class:`NatStream` is a strictly increasing enumeration of naturals given by
a rule, with a memoized prefix. Nothing here ever claims a fact about the
whole infinite set: predicates report the horizon up to which they were
checked.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence


class StreamExhausted(IndexError):
    """Raised when a finite (literal) stream is asked for more than it has."""


class ChainViolation(ValueError):
    """A touched prefix of S_{n+1} is not contained in S_n."""


@dataclass(frozen=True)
class Prefix:
    """Elements of a set below ``horizon``; membership below it is decided."""

    elements: tuple[int, ...]
    horizon: int

    def __post_init__(self):
        els = tuple(self.elements)
        object.__setattr__(self, "elements", els)
        if any(b <= a for a, b in zip(els, els[1:])):
            raise ValueError("prefix elements must be strictly increasing")
        if els and (els[0] < 0 or els[-1] >= self.horizon):
            raise ValueError("prefix elements must lie in [0, horizon)")

    def __iter__(self) -> Iterator[int]:
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x: object) -> bool:
        i = bisect.bisect_left(self.elements, x)
        return i < len(self.elements) and self.elements[i] == x

    def to_set(self) -> frozenset[int]:
        return frozenset(self.elements)


class NatStream:
    """Strictly increasing enumeration of a set of naturals.

    Subclasses implement :meth:`_extend`, which must append at least one
    element to ``_cache`` or raise the horizon ``_decided`` (the bound below
    which membership is fully known). Closed-form subclasses may override the
    query methods directly.
    """

    def __init__(self, name: str | None = None):
        self.name = name
        self._cache: list[int] = []
        self._decided: float = 0

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name or ''}>"

    def _extend(self) -> None:
        raise NotImplementedError

    def _append(self, x: int) -> None:
        if self._cache and x <= self._cache[-1]:
            raise AssertionError(f"{self!r}: non-increasing element {x} after {self._cache[-1]}")
        self._cache.append(x)
        self._decided = max(self._decided, x + 1)

    def _ensure_len(self, k: int) -> None:
        while len(self._cache) < k:
            self._extend()

    def _ensure_decided(self, n: int) -> None:
        while self._decided < n:
            self._extend()

    def __getitem__(self, i: int) -> int:
        if i < 0:
            raise IndexError("streams are only indexed from the front")
        self._ensure_len(i + 1)
        return self._cache[i]

    def __iter__(self) -> Iterator[int]:
        i = 0
        while True:
            try:
                yield self[i]
            except StreamExhausted:
                return
            i += 1

    def __contains__(self, x: object) -> bool:
        if not isinstance(x, int) or x < 0:
            return False
        self._ensure_decided(x + 1)
        i = bisect.bisect_left(self._cache, x)
        return i < len(self._cache) and self._cache[i] == x

    def take(self, k: int) -> list[int]:
        if k < 0:
            raise ValueError("k must be >= 0")
        self._ensure_len(k)
        return self._cache[:k]

    def below(self, n: int) -> Prefix:
        if n < 0:
            raise ValueError("horizon must be >= 0")
        self._ensure_decided(n)
        i = bisect.bisect_left(self._cache, n)
        return Prefix(tuple(self._cache[:i]), n)

    def ceil(self, v: int) -> int:
        """Least element >= v."""
        while not self._cache or self._cache[-1] < v:
            self._extend()
        return self._cache[bisect.bisect_left(self._cache, v)]


class Arithmetic(NatStream):
    """{start + step*k : k in omega}, all queries in closed form."""

    def __init__(self, start: int, step: int, name: str | None = None):
        if start < 0 or step < 1:
            raise ValueError("need start >= 0 and step >= 1")
        super().__init__(name)
        self.start, self.step = start, step

    def __getitem__(self, i: int) -> int:
        if i < 0:
            raise IndexError(i)
        return self.start + self.step * i

    def take(self, k: int) -> list[int]:
        if k < 0:
            raise ValueError("k must be >= 0")
        return [self.start + self.step * i for i in range(k)]

    def below(self, n: int) -> Prefix:
        if n < 0:
            raise ValueError("horizon must be >= 0")
        return Prefix(tuple(range(self.start, max(n, self.start), self.step)), n)

    def ceil(self, v: int) -> int:
        if v <= self.start:
            return self.start
        if self.step == 1:
            return v
        return self.start + -(-(v - self.start) // self.step) * self.step

    def __contains__(self, x: object) -> bool:
        return isinstance(x, int) and x >= self.start and (x - self.start) % self.step == 0


def omega() -> Arithmetic:
    return Arithmetic(0, 1, name="omega")


def evens() -> Arithmetic:
    return Arithmetic(0, 2, name="evens")


def multiples(d: int) -> Arithmetic:
    return Arithmetic(0, d, name=f"mult({d})")


def dyadic_block(n: int) -> Arithmetic:
    """{2^n (2k+1) - 1 : k in omega}; the blocks partition omega."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return Arithmetic(2**n - 1, 2 ** (n + 1), name=f"dyadic({n})")


class Literal(NatStream):
    """A finite set. Asking past its end raises :class:`StreamExhausted`."""

    def __init__(self, values: Iterable[int], name: str | None = None):
        super().__init__(name)
        vals = sorted(set(values))
        if vals and vals[0] < 0:
            raise ValueError("naturals only")
        self._cache = vals
        self._decided = math.inf

    def _extend(self) -> None:
        raise StreamExhausted(f"literal set {self.name or self._cache} has only {len(self._cache)} elements")

    def ceil(self, v: int) -> int:
        i = bisect.bisect_left(self._cache, v)
        if i == len(self._cache):
            self._extend()
        return self._cache[i]


class Generated(NatStream):
    """Stream driven by a function ``step(previous_elements) -> next``."""

    def __init__(self, step: Callable[[Sequence[int]], int], name: str | None = None):
        super().__init__(name)
        self._step = step

    def _extend(self) -> None:
        self._append(self._step(self._cache))


class HorizonStream(NatStream):
    """Stream defined by a rule that lists every element below a horizon.

    Subclasses implement ``_elements_below(n)``. Enumeration doubles the
    horizon until enough elements are known, so the set must be infinite for
    ``take``/``ceil`` to terminate.
    """

    def _elements_below(self, n: int) -> list[int]:
        raise NotImplementedError

    def _extend(self) -> None:
        self._advance(max(16, int(self._decided) * 2))

    def _ensure_decided(self, n: int) -> None:
        if self._decided < n:
            self._advance(n)

    def _advance(self, n: int) -> None:
        els = self._elements_below(n)
        if els[: len(self._cache)] != self._cache:
            raise AssertionError(f"{self!r}: rule is not prefix-stable")
        self._cache = els
        self._decided = n


class Union(HorizonStream):
    def __init__(self, parts: Sequence[NatStream], name: str | None = None):
        super().__init__(name)
        self.parts = list(parts)

    def _elements_below(self, n: int) -> list[int]:
        out: set[int] = set()
        for p in self.parts:
            out.update(p.below(n).elements)
        return sorted(out)


class Patched(HorizonStream):
    """``(base minus remove) union add`` for finite ``add``/``remove``."""

    def __init__(self, base: NatStream, add: Iterable[int] = (), remove: Iterable[int] = (),
                 name: str | None = None):
        super().__init__(name)
        self.base = base
        self.add = frozenset(add)
        self.remove = frozenset(remove)

    def _elements_below(self, n: int) -> list[int]:
        s = (set(self.base.below(n).elements) - self.remove) | {a for a in self.add if a < n}
        return sorted(s)


class Transported(HorizonStream):
    """Image of ``base`` under a permutation of [0, N) extended by the identity."""

    def __init__(self, base: NatStream, perm: Sequence[int], name: str | None = None):
        super().__init__(name)
        if sorted(perm) != list(range(len(perm))):
            raise ValueError("perm must be a permutation of range(len(perm))")
        self.base = base
        self.perm = tuple(perm)

    def _elements_below(self, n: int) -> list[int]:
        size = len(self.perm)
        head = {self.perm[x] for x in self.base.below(size).elements}
        tail = [x for x in self.base.below(max(n, size)).elements if x >= size]
        return sorted(x for x in head if x < n) + [x for x in tail if x < n]


class Thinned(Generated):
    """Greedy subset q_0 < q_1 < ... of ``base`` with q_n > sum of earlier q_i."""

    def __init__(self, base: NatStream, name: str | None = None):
        self.base = base
        super().__init__(lambda prev: base.ceil(sum(prev) + 1), name)


def take(s: NatStream, k: int) -> list[int]:
    """First ``k`` elements of ``s`` in increasing order."""
    return s.take(k)


def below(s: NatStream, n: int) -> Prefix:
    """Elements of ``s`` below ``n``, stamped with horizon ``n``."""
    return s.below(n)


@dataclass(frozen=True)
class AlmostContainment:
    """``(S minus T)`` restricted to [0, certified_to)."""

    exceptions: frozenset[int]
    certified_to: int


def almost_contained(s: NatStream, t: NatStream, n: int) -> AlmostContainment:
    """Exceptions to ``s`` being contained in ``t``, below horizon ``n``."""
    ps, pt = s.below(n), t.below(n)
    return AlmostContainment(frozenset(ps.to_set() - pt.to_set()), n)


class Pseudointersection(NatStream):
    """Diagonal pseudointersection of a decreasing chain S_0 ⊇ S_1 ⊇ ...

    p_0 = min S_0 and p_k is the least element of S_k above p_{k-1}, so
    P minus S_n is contained in {p_0, ..., p_{n-1}}. Each pick checks that the
    part of S_k it touched lies inside S_{k-1}.
    """

    def __init__(self, chain: Callable[[int], NatStream], name: str | None = None):
        super().__init__(name)
        self.chain = chain

    def _extend(self) -> None:
        k = len(self._cache)
        s_k = self.chain(k)
        p = s_k[0] if k == 0 else s_k.ceil(self._cache[-1] + 1)
        if k > 0:
            parent = self.chain(k - 1)
            for x in s_k.below(p + 1):
                if x not in parent:
                    raise ChainViolation(f"element {x} of chain member {k} is missing from member {k - 1}")
        self._append(p)


def pseudointersection(chain: Callable[[int], NatStream], name: str | None = None) -> NatStream:
    return Pseudointersection(chain, name)
