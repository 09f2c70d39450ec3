"""Finite Psi-space truncations and the homeomorphism obstruction.

A candidate homeomorphism between truncated Psi-spaces is a permutation of
[0, N) together with a bijection of the families. It passes the criterion when
each member's image trace differs from its partner's trace only inside the
declared exception sets. The obstruction side works with intersection
spectra; the brute-force search never looks at spectra at all.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .families import ADFamily, Spectrum, spectrum
from .oscillation import almost_oscillation_bound


class PreconditionError(ValueError):
    """Input violates a stated precondition; the message names it."""


@dataclass
class PsiTruncation:
    """Points [0, N) plus one point per member of ``family``."""

    family: ADFamily
    N: int
    _traces: list[frozenset[int]] | None = field(default=None, repr=False)

    @property
    def traces(self) -> list[frozenset[int]]:
        if self._traces is None:
            self._traces = [m.below(self.N).to_set() for m in self.family.members]
        return self._traces

    def __len__(self) -> int:
        return len(self.family)


@dataclass(frozen=True)
class BijectionData:
    """H on points: ``omega_map[n] = H(n)``, ``member_map[i] = index of H(x_i)``.

    ``exceptions_F[i]`` lists points of x_i whose image leaves H(x_i);
    ``exceptions_G[i]`` lists points of H(x_i) not hit from x_i.
    """

    omega_map: tuple[int, ...]
    member_map: tuple[int, ...]
    exceptions_F: tuple[frozenset[int], ...]
    exceptions_G: tuple[frozenset[int], ...]

    def __post_init__(self):
        if sorted(self.omega_map) != list(range(len(self.omega_map))):
            raise PreconditionError("omega_map is not a permutation of [0, N)")
        if sorted(self.member_map) != list(range(len(self.member_map))):
            raise PreconditionError("member_map is not a bijection")
        if not len(self.exceptions_F) == len(self.exceptions_G) == len(self.member_map):
            raise PreconditionError("one F and one G set per member")

    @property
    def N(self) -> int:
        return len(self.omega_map)

    def with_exceptions(self, F, G) -> "BijectionData":
        return BijectionData(self.omega_map, self.member_map,
                             tuple(frozenset(f) for f in F), tuple(frozenset(g) for g in G))


def exact_exceptions(omega_map: Sequence[int], member_map: Sequence[int],
                     source: PsiTruncation, target: PsiTruncation) -> BijectionData:
    """Data with the smallest exception sets that make the criterion hold."""
    F, G = [], []
    for i, x in enumerate(source.traces):
        y = target.traces[member_map[i]]
        image = {omega_map[n] for n in x}
        F.append(frozenset(n for n in x if omega_map[n] not in y))
        G.append(frozenset(y - image))
    return BijectionData(tuple(omega_map), tuple(member_map), tuple(F), tuple(G))


def identity_data(trunc: PsiTruncation) -> BijectionData:
    return exact_exceptions(range(trunc.N), range(len(trunc)), trunc, trunc)


def transport(trunc: PsiTruncation, perm: Sequence[int], name: str | None = None
              ) -> tuple[PsiTruncation, BijectionData]:
    """Move ``trunc`` along a permutation of [0, N); returns (target, data)."""
    if len(perm) != trunc.N:
        raise PreconditionError("perm must permute exactly [0, N)")
    target = PsiTruncation(trunc.family.transported(perm, name), trunc.N)
    return target, exact_exceptions(perm, range(len(trunc)), trunc, target)


@dataclass(frozen=True)
class CriterionResult:
    passed: bool
    horizon: int
    member: int | None = None
    element: int | None = None
    side: str | None = None

    def __bool__(self) -> bool:
        return self.passed


def check_homeo_criterion(h: BijectionData, source: PsiTruncation, target: PsiTruncation) -> CriterionResult:
    """Each H[x] and H(x) may differ only by H[F_x] and G_x (below N).

    A failure names the first member and the least offending point of the
    target, with ``side`` telling which half of the symmetric difference it
    came from.
    """
    if h.N != source.N or source.N != target.N:
        raise PreconditionError("omega_map, source and target must share N")
    if len(source) != len(target) or len(h.member_map) != len(source):
        raise PreconditionError("families must be the same size as member_map")
    for i, x in enumerate(source.traces):
        if not h.exceptions_F[i] <= x:
            raise PreconditionError(f"F_{i} is not contained in member {i}")
        y = target.traces[h.member_map[i]]
        if not h.exceptions_G[i] <= y:
            raise PreconditionError(f"G_{i} is not contained in the image member")
        image = {h.omega_map[n] for n in x}
        allowed_out = {h.omega_map[n] for n in h.exceptions_F[i]}
        bad_out = sorted((image - y) - allowed_out)
        bad_in = sorted((y - image) - h.exceptions_G[i])
        if bad_out or bad_in:
            if bad_out and (not bad_in or bad_out[0] < bad_in[0]):
                return CriterionResult(False, source.N, i, bad_out[0], "image-outside-partner")
            return CriterionResult(False, source.N, i, bad_in[0], "partner-outside-image")
    return CriterionResult(True, source.N)


def splitting_level(family: ADFamily, n: int, t: int, members: Sequence[int] | None = None) -> int | None:
    """Least m in (n, horizon) contained in >= t members and omitted by >= t members."""
    if t < 1:
        raise ValueError("threshold must be >= 1")
    idx = list(range(len(family))) if members is None else list(members)
    if t > len(idx):
        return None
    traces = [family.trace(i).to_set() for i in idx]
    for m in range(n + 1, family.horizon):
        inside = sum(1 for tr in traces if m in tr)
        if inside >= t and len(traces) - inside >= t:
            return m
    return None


def _triples(indices: Sequence[int]) -> Iterator[tuple[int, int, int]]:
    return itertools.permutations(indices, 3)


def nested_intersection_witness(source: ADFamily, target: ADFamily, member_map: Sequence[int], n: int,
                   subfamily: Sequence[int] | None = None) -> tuple[int, int, int] | None:
    """Ordered triple (x, y, z) with x∩y properly inside x∩z and max(x∩y) > n,
    and the same for the images under ``member_map``."""
    idx = list(range(len(source))) if subfamily is None else list(subfamily)
    for x, y, z in _triples(idx):
        xy, xz = source.intersection(x, y), source.intersection(x, z)
        if not xy or max(xy) <= n or not xy < xz:
            continue
        hx, hy, hz = member_map[x], member_map[y], member_map[z]
        ixy, ixz = target.intersection(hx, hy), target.intersection(hx, hz)
        if ixy and max(ixy) > n and ixy < ixz:
            return x, y, z
    return None


def dense_oscillation_witness(source: ADFamily, target: ADFamily, member_map: Sequence[int],
                              subfamily: Sequence[int] | None = None) -> tuple[int, int, int] | None:
    """Triple with |x∩z minus x∩y| different from the same count for the images."""
    idx = list(range(len(source))) if subfamily is None else list(subfamily)
    for x, y, z in _triples(idx):
        left = len(source.intersection(x, z) - source.intersection(x, y))
        hx, hy, hz = member_map[x], member_map[y], member_map[z]
        right = len(target.intersection(hx, hz) - target.intersection(hx, hy))
        if left != right:
            return x, y, z
    return None


@dataclass(frozen=True)
class CoreRefinement:
    members: tuple[int, ...]
    core: frozenset[int]
    image_core: frozenset[int]


def _next_core_point(family: ADFamily, n: int, idx: Sequence[int]) -> int | None:
    """Least m > n that is either a splitting level of ``idx`` or common to all of it."""
    m = splitting_level(family, n, 1, idx)
    common = set.intersection(*(set(family.trace(i).elements) for i in idx)) if idx else set()
    common = [c for c in common if c > n]
    if common and (m is None or min(common) < m):
        return min(common)
    return m


def refine_to_common_core(source: ADFamily, target: ADFamily, member_map: Sequence[int],
                          size: int, keep: int = 3) -> CoreRefinement | None:
    """Shrink to members sharing a core of > ``size`` points, images likewise.

    Repeatedly takes the next splitting level (or point common to every
    remaining member) above the previous one and keeps the members, then the
    image members, that contain it, as long as at least ``keep`` survive.
    None if the traces run out first.
    """
    idx = list(range(len(source)))
    core: set[int] = set()
    image_core: set[int] = set()
    n = -1
    while len(core) <= size:
        m = _next_core_point(source, n, idx)
        if m is None:
            return None
        nxt = [i for i in idx if m in source.trace(i)]
        if len(nxt) >= keep:
            idx = nxt
            core.add(m)
        n = m
    n = -1
    while len(image_core) <= size:
        m = _next_core_point(target, n, [member_map[i] for i in idx])
        if m is None:
            return None
        nxt = [i for i in idx if m in target.trace(member_map[i])]
        if len(nxt) >= keep:
            idx = nxt
            image_core.add(m)
        n = m
    # later image steps may have shrunk idx; the source core still holds on it
    return CoreRefinement(tuple(idx), frozenset(core), frozenset(image_core))


@dataclass(frozen=True)
class CountIdentityResult:
    passed: bool
    triple: tuple[int, int, int] | None = None

    def __bool__(self) -> bool:
        return self.passed


def count_identity_check(h: BijectionData, source: PsiTruncation, target: PsiTruncation,
                         subfamily: Sequence[int]) -> CountIdentityResult:
    """|x∩z minus x∩y| = |H(x)∩H(z) minus H(x)∩H(y)| on a subfamily with constant F, G.

    Works on traces below N. A failure falsifies the data, so the
    preconditions are checked first and rejected by name.
    """
    idx = list(subfamily)
    if not check_homeo_criterion(h, source, target):
        raise PreconditionError("data does not pass the homeomorphism criterion")
    if idx:
        F, G = h.exceptions_F[idx[0]], h.exceptions_G[idx[0]]
        if any(h.exceptions_F[i] != F for i in idx):
            raise PreconditionError("F is not constant on the subfamily")
        if any(h.exceptions_G[i] != G for i in idx):
            raise PreconditionError("G is not constant on the subfamily")
    S, T = source.traces, target.traces
    for x, y, z in _triples(idx):
        left = (S[x] & S[z]) - (S[x] & S[y])
        hx, hy, hz = (h.member_map[i] for i in (x, y, z))
        right = (T[hx] & T[hz]) - (T[hx] & T[hy])
        if left & F:
            raise PreconditionError("(x∩z minus x∩y) meets F")
        if right & G:
            raise PreconditionError("(H(x)∩H(z) minus H(x)∩H(y)) meets G")
        if len(left) != len(right):
            return CountIdentityResult(False, (x, y, z))
    return CountIdentityResult(True)


@dataclass(frozen=True)
class ObstructionReport:
    spectra: tuple[Spectrum, Spectrum]
    bound: int | None
    verdict: str  # "obstructed" or "inconclusive"
    horizon: int

    @property
    def obstructed(self) -> bool:
        return self.verdict == "obstructed"


def spectra_bound(a: Spectrum, b: Spectrum) -> int | None:
    """Almost-oscillation bound that leaves at least two values on each side."""
    return almost_oscillation_bound(sorted(a.values), sorted(b.values), min_survivors=2)


def obstruction_report(f: ADFamily, g: ADFamily) -> ObstructionReport:
    """Obstructed iff both spectra are exact and almost oscillate non-trivially."""
    sf, sg = spectrum(f), spectrum(g)
    bound = spectra_bound(sf, sg)
    ok = bound is not None and sf.exact and sg.exact
    return ObstructionReport((sf, sg), bound, "obstructed" if ok else "inconclusive",
                             max(f.horizon, g.horizon))


def bipartitions(n: int, scheme: str = "exhaustive", min_part: int = 3) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Splits of range(n) into two parts of >= min_part members.

    ``exhaustive``: every split, most balanced first, then lexicographic on
    the part holding member 0. ``contiguous``: prefix/suffix cuts only.
    """
    if scheme == "contiguous":
        cuts = sorted(range(min_part, n - min_part + 1), key=lambda c: (abs(2 * c - n), c))
        for c in cuts:
            yield tuple(range(c)), tuple(range(c, n))
        return
    if scheme != "exhaustive":
        raise ValueError(f"unknown partition scheme {scheme!r}")
    sizes = sorted(range(min_part, n - min_part + 1), key=lambda s: (abs(2 * s - n), s))
    for s in sizes:
        for rest in itertools.combinations(range(1, n), s - 1):
            part0 = (0,) + rest
            part1 = tuple(i for i in range(n) if i not in part0)
            yield part0, part1


@dataclass(frozen=True)
class SelfObstruction:
    part0: tuple[int, ...]
    part1: tuple[int, ...]
    bound: int


def self_obstruction(family: ADFamily, scheme: str = "exhaustive") -> SelfObstruction | None:
    """First split whose halves have exact, non-trivially almost oscillating spectra.

    Unions are tried along the seam between their operands before the scheme's
    own order.
    """
    if len(family) < 4:
        return None
    sizes = {p: family.intersection_size(*p) for p in family.pairs()}

    def spec_of(part):
        vals = {sizes[(a, b)][0] for a, b in itertools.combinations(part, 2)}
        exact = all(sizes[(a, b)][1] for a, b in itertools.combinations(part, 2))
        return Spectrum(frozenset(vals), family.horizon, exact)

    splits = bipartitions(len(family), scheme)
    n = family.origin
    if n is not None and 2 <= n <= len(family) - 2:
        # a union is tried along its seam first
        splits = itertools.chain([(tuple(range(n)), tuple(range(n, len(family))))], splits)
    for part0, part1 in splits:
        s0, s1 = spec_of(part0), spec_of(part1)
        if not (s0.exact and s1.exact):
            continue
        bound = spectra_bound(s0, s1)
        if bound is not None:
            return SelfObstruction(part0, part1, bound)
    return None


def brute_force_homeo_search(source: PsiTruncation, target: PsiTruncation, budget: int) -> BijectionData | None:
    """Lexicographically first (member bijection, permutation of [0, N)) whose
    exact exception sets all have at most ``budget`` points.

    Pruning uses only trace cardinalities: per-member size gaps, pairwise
    intersection gaps, and counts of exceptions that the unassigned points
    can no longer avoid.
    """
    N = source.N
    if target.N != N:
        raise PreconditionError("source and target must share N")
    k = len(source)
    if len(target) != k:
        return None
    S, T = source.traces, target.traces
    for sigma in itertools.permutations(range(k)):
        if any(abs(len(S[i]) - len(T[sigma[i]])) > budget for i in range(k)):
            continue
        if any(abs(len(S[i] & S[j]) - len(T[sigma[i]] & T[sigma[j]])) > 2 * budget
               for i, j in itertools.combinations(range(k), 2)):
            continue
        perm = _search_points(S, [T[sigma[i]] for i in range(k)], N, budget)
        if perm is not None:
            data = exact_exceptions(perm, sigma, source, target)
            if not check_homeo_criterion(data, source, target):
                raise AssertionError("search produced data failing the criterion")
            return data
    return None


def _search_points(S: list[frozenset[int]], T: list[frozenset[int]], N: int, budget: int) -> tuple[int, ...] | None:
    """Backtracking over images of 0, 1, ..., N-1 with T already matched to S."""
    k = len(S)
    stype = [sum(1 << i for i in range(k) if n in S[i]) for n in range(N)]
    ttype = [sum(1 << i for i in range(k) if t in T[i]) for t in range(N)]
    # Lexicographically first solutions send equal-type points to increasing
    # images and always use the least free target of the chosen type.
    pool: dict[int, list[int]] = {}
    for t in range(N):
        pool.setdefault(ttype[t], []).append(t)
    taken = {tau: 0 for tau in pool}
    last_image: dict[int, int] = {}
    rs = [len(S[i]) for i in range(k)]
    rt = [len(T[i]) for i in range(k)]
    cf, cg = [0] * k, [0] * k
    perm = [0] * N

    def feasible() -> bool:
        for i in range(k):
            if cf[i] + max(0, rs[i] - rt[i]) > budget or cg[i] + max(0, rt[i] - rs[i]) > budget:
                return False
        return True

    def rec(n: int) -> bool:
        if n == N:
            return True
        sig = stype[n]
        floor = last_image.get(sig, -1)
        options = []
        for tau, ts in pool.items():
            if taken[tau] < len(ts) and ts[taken[tau]] > floor:
                options.append((ts[taken[tau]], tau))
        for t, tau in sorted(options):
            delta = []
            for i in range(k):
                ins, int_ = sig >> i & 1, tau >> i & 1
                if ins and not int_:
                    cf[i] += 1
                    delta.append((i, "f"))
                elif int_ and not ins:
                    cg[i] += 1
                    delta.append((i, "g"))
                if ins:
                    rs[i] -= 1
                if int_:
                    rt[i] -= 1
            if feasible():
                taken[tau] += 1
                prev = last_image.get(sig)
                last_image[sig] = t
                perm[n] = t
                if rec(n + 1):
                    return True
                taken[tau] -= 1
                if prev is None:
                    del last_image[sig]
                else:
                    last_image[sig] = prev
            for i, kind in delta:
                if kind == "f":
                    cf[i] -= 1
                else:
                    cg[i] -= 1
            for i in range(k):
                if sig >> i & 1:
                    rs[i] += 1
                if tau >> i & 1:
                    rt[i] += 1
        return False

    return tuple(perm) if rec(0) else None


# names used by the published interface
lemma6_witness = nested_intersection_witness
prop8_identity_check = count_identity_check
