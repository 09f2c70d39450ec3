"""Almost disjoint families: Luzin-type constructions and branch families.

Families carry per-pair certificates whenever the construction pins down the
intersection exactly; otherwise intersections are read off horizon traces and
marked inexact.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .streams import Generated, HorizonStream, NatStream, Prefix, Transported, dyadic_block

MATERIALIZE_LIMIT = 1_000_000


class SpecViolation(ValueError):
    """The Luzin size sequence fails k_n > sum of earlier k_i."""


class InfeasibleError(RuntimeError):
    """An exact computation would need to materialize too many elements."""


@dataclass
class Certificate:
    """Exact finite intersection of two members.

    ``size`` is known from the construction; the element set is produced on
    demand since for fast-growing size sequences it cannot be listed.
    """

    size: int
    _source: Callable[[], Iterable[int]] | frozenset[int] | None = field(default=None, repr=False)

    @classmethod
    def of(cls, elements: Iterable[int]) -> "Certificate":
        els = frozenset(elements)
        return cls(len(els), els)

    @property
    def elements(self) -> frozenset[int]:
        if self._source is None:
            raise InfeasibleError("certificate carries its size only")
        if not isinstance(self._source, frozenset):
            self._source = frozenset(self._source())
            if len(self._source) != self.size:
                raise AssertionError(f"certificate size {self.size} but {len(self._source)} elements")
        return self._source


@dataclass
class ADFamily:
    members: list[NatStream]
    certificates: dict[tuple[int, int], Certificate] = field(default_factory=dict)
    horizon: int = 64
    name: str = "F"
    # members [0, origin) came from the left operand of a union
    origin: int | None = None

    def __len__(self) -> int:
        return len(self.members)

    def certificate(self, i: int, j: int) -> Certificate | None:
        return self.certificates.get((min(i, j), max(i, j)))

    def trace(self, i: int, n: int | None = None) -> Prefix:
        return self.members[i].below(self.horizon if n is None else n)

    def trace_intersection(self, i: int, j: int, n: int | None = None) -> frozenset[int]:
        return self.trace(i, n).to_set() & self.trace(j, n).to_set()

    def intersection(self, i: int, j: int) -> frozenset[int]:
        """Certificate elements when available, else the horizon trace."""
        cert = self.certificate(i, j)
        if cert is not None:
            return cert.elements
        return self.trace_intersection(i, j)

    def intersection_size(self, i: int, j: int) -> tuple[int, bool]:
        cert = self.certificate(i, j)
        if cert is not None:
            return cert.size, True
        return len(self.trace_intersection(i, j)), False

    def pairs(self):
        return itertools.combinations(range(len(self.members)), 2)

    def subfamily(self, indices: Sequence[int], name: str | None = None) -> "ADFamily":
        idx = list(indices)
        certs = {}
        for a, b in itertools.combinations(range(len(idx)), 2):
            c = self.certificate(idx[a], idx[b])
            if c is not None:
                certs[(a, b)] = c
        return ADFamily([self.members[i] for i in idx], certs, self.horizon, name or self.name)

    def transported(self, perm: Sequence[int], name: str | None = None) -> "ADFamily":
        """Image of the family under a permutation of [0, len(perm)) fixing the rest."""
        perm = tuple(perm)
        members = [Transported(m, perm, name=f"pi({m.name})") for m in self.members]
        certs = {p: _moved(c, perm) for p, c in self.certificates.items()}
        return ADFamily(members, certs, self.horizon, name or f"pi({self.name})", self.origin)

    def union(self, other: "ADFamily", name: str | None = None) -> "ADFamily":
        """Set union of the two families; a member of ``other`` equal to one
        of ``self`` (same object, or the same single-zero branch) is dropped."""
        n = len(self.members)
        keep = [j for j, y in enumerate(other.members) if not any(_same(x, y) for x in self.members)]
        renum = {j: n + t for t, j in enumerate(keep)}
        members = self.members + [other.members[j] for j in keep]
        certs = dict(self.certificates)
        certs.update({(renum[i], renum[j]): c for (i, j), c in other.certificates.items()
                      if i in renum and j in renum})
        for i, j in itertools.product(range(n), keep):
            c = pair_certificate(self.members[i], other.members[j])
            if c is not None:
                certs[(i, renum[j])] = c
        return ADFamily(members, certs, max(self.horizon, other.horizon),
                        name or f"{self.name}+{other.name}", origin=n)


def _same(x: NatStream, y: NatStream) -> bool:
    if x is y:
        return True
    return isinstance(x, BranchCodes) and isinstance(y, BranchCodes) and x.zero_level == y.zero_level


def _moved(cert: Certificate, perm: tuple[int, ...]) -> Certificate:
    if cert._source is None:
        return Certificate(cert.size)
    return Certificate(cert.size, lambda: (perm[x] if x < len(perm) else x for x in cert.elements))


@dataclass(frozen=True)
class Spectrum:
    values: frozenset[int]
    horizon: int
    exact: bool


def spectrum(family: ADFamily) -> Spectrum:
    """Set of pairwise intersection sizes of distinct members."""
    values, exact = set(), True
    for i, j in family.pairs():
        size, ex = family.intersection_size(i, j)
        values.add(size)
        exact &= ex
    return Spectrum(frozenset(values), family.horizon, exact)


# -- Luzin construction -----------------------------------------------------

def dyadic_partition(n: int) -> NatStream:
    return dyadic_block(n)


def partition_index(x: int) -> int:
    """The n with x in dyadic_partition(n): the 2-adic valuation of x + 1."""
    return ((x + 1) & -(x + 1)).bit_length() - 1


def doubling(k0: int) -> NatStream:
    """k_n = k0 * 2^n, the tightest doubling sequence with k_n > sum of k_i, i < n."""
    if k0 < 1:
        raise ValueError("k0 must be >= 1")
    return Generated(lambda prev: k0 * 2 ** len(prev), name=f"doubling({k0})")


class LuzinSpec:
    """Size sequence k_0 < k_1 < ... over the dyadic partition of omega."""

    def __init__(self, sizes: NatStream | Sequence[int]):
        self.sizes = sizes
        self._sums = [0]  # _sums[n] = k_0 + ... + k_{n-1}, validated up to n

    def k(self, n: int) -> int:
        while len(self._sums) <= n + 1:
            i = len(self._sums) - 1
            try:
                kn = self.sizes[i]
            except IndexError:
                raise SpecViolation(f"size sequence has no k_{i}") from None
            if kn <= self._sums[i]:
                raise SpecViolation(f"k_{i} = {kn} is not above the sum {self._sums[i]} of earlier sizes")
            self._sums.append(self._sums[i] + kn)
        return self._sums[n + 1] - self._sums[n]

    def sum_below(self, n: int) -> int:
        if n > 0:
            self.k(n - 1)
        return self._sums[n]

    partition = staticmethod(dyadic_partition)


class _Piece:
    """a_p: the least c_p elements of R_p = B_p minus the earlier B_i.

    Scanned incrementally; the exact quota c_p is only computed once the
    cheap lower bound k_p - sum(k_i, i < p) has been reached.
    """

    def __init__(self, owner: "LuzinMember", p: int):
        self.owner, self.p = owner, p
        self.source = owner.position(p)
        spec = owner.spec
        self.lower = spec.k(p) - spec.sum_below(p)
        self.quota: int | None = None
        self.items: list[int] = []
        self.members: set[int] = set()
        self._next = 0
        self.scanned = -1
        self.done = False

    def upto(self, v: float) -> list[int]:
        while not self.done and self.scanned < v:
            if self.quota is None and len(self.items) >= self.lower:
                self.quota = self.owner.quota(self.p)
            if self.quota is not None and len(self.items) >= self.quota:
                self.done = True
                break
            y = self.source[self._next]
            self._next += 1
            self.scanned = y
            if self.owner.first_position(y) == self.p:
                self.items.append(y)
                self.members.add(y)
        return self.items

    def full(self) -> list[int]:
        if self.quota is None and self.owner.spec.k(self.p) > MATERIALIZE_LIMIT:
            raise InfeasibleError(f"piece a_{self.p} may hold more than {MATERIALIZE_LIMIT} elements")
        return self.upto(math.inf)

    def __contains__(self, x: int) -> bool:
        self.upto(x)
        return x in self.members


class LuzinMember(HorizonStream):
    """The member built at stage j on top of ``prior`` (the j earlier members).

    Enumeration B_0, B_1, ... puts prior member i at position 2i+1 for i < j
    and fills the other positions with the dyadic blocks in index order. The
    member is the union of the pieces a_p; it meets B_n in exactly k_n points.
    """

    def __init__(self, spec: LuzinSpec, prior: Sequence["LuzinMember"], name: str | None = None):
        super().__init__(name)
        self.spec = spec
        self.prior = list(prior)
        self.j = len(self.prior)
        self._pieces: dict[int, _Piece] = {}
        self._memo: dict[int, bool] = {}

    def position(self, n: int) -> NatStream:
        if n < 2 * self.j:
            return self.prior[n // 2] if n % 2 else dyadic_partition(n // 2)
        return dyadic_partition(n - self.j)

    def is_member_position(self, n: int) -> bool:
        return n < 2 * self.j and n % 2 == 1

    def block_position(self, m: int) -> int:
        return 2 * m if m < self.j else m + self.j

    def first_position(self, x: int) -> int:
        pb = self.block_position(partition_index(x))
        for p in range(1, min(pb, 2 * self.j), 2):
            if x in self.prior[p // 2]:
                return p
        return pb

    def piece(self, p: int) -> _Piece:
        if p not in self._pieces:
            self._pieces[p] = _Piece(self, p)
        return self._pieces[p]

    def quota(self, p: int) -> int:
        """c_p = k_p - |(a_0 ∪ ... ∪ a_{p-1}) ∩ B_p|."""
        # distinct dyadic blocks are disjoint, so only pairs with a member count
        earlier = [i for i in range(p) if self.is_member_position(i) or self.is_member_position(p)]
        if sum(self.spec.k(i) for i in earlier) > MATERIALIZE_LIMIT:
            raise InfeasibleError(f"quota of a_{p} needs more than {MATERIALIZE_LIMIT} earlier elements")
        target = self.position(p)
        used = 0
        for i in earlier:
            used += sum(1 for y in self.piece(i).full() if y in target)
        c = self.spec.k(p) - used
        if c < 0:
            raise SpecViolation(f"piece a_{p} would need {c} elements")
        return c

    def __contains__(self, x: object) -> bool:
        if not isinstance(x, int) or x < 0:
            return False
        if x not in self._memo:
            self._memo[x] = x in self.piece(self.first_position(x))
        return self._memo[x]

    def _elements_below(self, n: int) -> list[int]:
        out = []
        p = 0
        while p < 2 * self.j or 2 ** (p - self.j) - 1 < n:
            out.extend(y for y in self.piece(p).upto(n - 1) if y < n)
            p += 1
        return sorted(out)

    def intersection_with_position(self, n: int) -> frozenset[int]:
        """Exact member ∩ B_n, which is (a_0 ∪ ... ∪ a_n) ∩ B_n."""
        target = self.position(n)
        return frozenset(y for i in range(n + 1) for y in self.piece(i).full() if y in target)


def luzin_member(spec: LuzinSpec, j: int, prior: Sequence[LuzinMember]) -> LuzinMember:
    if len(prior) != j:
        raise ValueError(f"stage {j} needs exactly {j} prior members")
    return LuzinMember(spec, prior, name=f"A_w+{j}")


def luzin_family(spec: LuzinSpec, m: int, horizon: int = 64, name: str = "F") -> ADFamily:
    """The m members built after the partition, with exact certificates.

    For j' < j the earlier member sits at position 2j'+1 of stage j, so the
    intersection has exactly k_{2j'+1} points.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    members: list[LuzinMember] = []
    for j in range(m):
        members.append(luzin_member(spec, j, members[:j]))
    certs = {}
    for jp, j in itertools.combinations(range(m), 2):
        certs[(jp, j)] = Certificate(
            spec.k(2 * jp + 1),
            lambda mj=members[j], n=2 * jp + 1: mj.intersection_with_position(n))
    return ADFamily(list(members), certs, horizon, name)


# -- Trees S_A and branch families -------------------------------------------

@dataclass
class TreeSpec:
    branching: NatStream  # levels where nodes get a 0-child
    depth: int = 0


def tree_nodes(spec: TreeSpec) -> set[str]:
    """All nodes of S_A of length <= depth, as binary words."""
    if spec.depth < 0:
        raise ValueError("depth must be >= 0")
    level, out = [""], {""}
    for n in range(spec.depth):
        branches = n in spec.branching
        level = [s + c for s in level for c in ("01" if branches else "1")]
        out.update(level)
    return out


def code(s: str) -> int:
    """Level-order index of a binary word: 2^|s| - 1 + value(s)."""
    return 2 ** len(s) - 1 + (int(s, 2) if s else 0)


class BranchCodes(NatStream):
    """Codes of the prefixes of the branch that is all ones but a 0 at ``zero_level``."""

    def __init__(self, zero_level: int, name: str | None = None):
        super().__init__(name)
        self.zero_level = zero_level

    def prefix(self, k: int) -> str:
        z = self.zero_level
        return "1" * k if z >= k else "1" * z + "0" + "1" * (k - z - 1)

    def __getitem__(self, k: int) -> int:
        if k < 0:
            raise IndexError(k)
        value = 2**k - 1
        if self.zero_level < k:
            value -= 2 ** (k - 1 - self.zero_level)
        return 2**k - 1 + value

    def _extend(self) -> None:
        self._append(self[len(self._cache)])


def indexed_branch(spec: TreeSpec, i: int) -> BranchCodes:
    """Branch of S_A equal to 1 except for a single 0 at level a_i."""
    if i < 0:
        raise ValueError("i must be >= 0")
    return BranchCodes(spec.branching[i], name=f"x_{i}")


def pair_certificate(s: NatStream, t: NatStream) -> Certificate | None:
    """Closed-form intersection for two single-zero branches, else None."""
    if not (isinstance(s, BranchCodes) and isinstance(t, BranchCodes)):
        return None
    if s.zero_level == t.zero_level:
        raise ValueError("identical branches are not almost disjoint")
    z = min(s.zero_level, t.zero_level)
    return Certificate(z + 1, lambda: (s[k] for k in range(z + 1)))


def branch_family(spec: TreeSpec, m: int, horizon: int = 64, name: str = "F") -> ADFamily:
    """Prefix sets of the indexed branches 0..m-1 coded into omega.

    Branches i < j share exactly the a_i + 1 prefixes of length <= a_i.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    members = [indexed_branch(spec, i) for i in range(m)]
    certs = {(i, j): pair_certificate(members[i], members[j])
             for i, j in itertools.combinations(range(m), 2)}
    return ADFamily(list(members), certs, horizon, name)
