"""Simplex-category combinatorics and simplicial replacements.

Monotone maps, the Reedy and interval factorisations, truncated simplicial
sets as explicit presheaves on the truncated simplex category, nerves and
their categories of elements, the simplicial replacement of a finite category
with its map taxonomy, and edgewise subdivision.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .config import DEFAULT_CAP, DEFAULT_TRUNCATION
from .errors import SizeCapError, TruncationBudgetError, ValidationError
from .fincat import FinCat, FinFunctor, guard_cap, opposite


# -- monotone maps -------------------------------------------------------------


@dataclass(frozen=True)
class SimplexMap:
    """A monotone map [m] -> [n], stored by its value tuple."""

    m: int
    n: int
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != self.m + 1:
            raise ValidationError("simplex map needs m+1 values")
        if any(v < 0 or v > self.n for v in self.values):
            raise ValidationError("simplex map value out of range")
        if any(a > b for a, b in zip(self.values, self.values[1:])):
            raise ValidationError("simplex map must be weakly increasing")

    def __call__(self, i: int) -> int:
        return self.values[i]

    def then(self, g: "SimplexMap") -> "SimplexMap":
        """Composite g . self (apply self first)."""
        if g.m != self.n:
            raise ValidationError("simplex maps not composable")
        return SimplexMap(self.m, g.n, tuple(g.values[v] for v in self.values))

    @staticmethod
    def identity(n: int) -> "SimplexMap":
        return SimplexMap(n, n, tuple(range(n + 1)))

    def is_identity(self) -> bool:
        return self.m == self.n and self.values == tuple(range(self.n + 1))

    def is_injective(self) -> bool:
        return all(a < b for a, b in zip(self.values, self.values[1:]))

    def is_surjective(self) -> bool:
        return set(self.values) == set(range(self.n + 1))

    def is_left_interval(self) -> bool:
        """Includes [m] as the first m+1 elements of [n]."""
        return self.values == tuple(range(self.m + 1))

    def is_right_interval(self) -> bool:
        """Includes [m] as the last m+1 elements of [n]."""
        return self.values == tuple(range(self.n - self.m, self.n + 1))

    def preserves_initial(self) -> bool:
        return self.values[0] == 0

    def preserves_final(self) -> bool:
        return self.values[-1] == self.n

    def text(self) -> str:
        return f"{self.m}->{self.n}:" + ",".join(str(v) for v in self.values)

    @staticmethod
    def parse(s: str) -> "SimplexMap":
        head, _, vals = s.partition(":")
        m_s, _, n_s = head.partition("->")
        values = tuple(int(v) for v in vals.split(",")) if vals else ()
        return SimplexMap(int(m_s), int(n_s), values)

    def __repr__(self) -> str:
        return f"SimplexMap({self.text()})"


def monotone_maps(m: int, n: int) -> Iterator[SimplexMap]:
    """All monotone maps [m] -> [n] in lexicographic order."""
    for values in itertools.combinations_with_replacement(range(n + 1), m + 1):
        yield SimplexMap(m, n, values)


def all_maps_up_to(N: int) -> Iterator[SimplexMap]:
    for m in range(N + 1):
        for n in range(N + 1):
            yield from monotone_maps(m, n)


def factor_reedy(f: SimplexMap) -> tuple[SimplexMap, SimplexMap]:
    """The unique surjection-injection factorisation of a monotone map."""
    image = sorted(set(f.values))
    k = len(image) - 1
    rank = {v: i for i, v in enumerate(image)}
    surj = SimplexMap(f.m, k, tuple(rank[v] for v in f.values))
    inj = SimplexMap(k, f.n, tuple(image))
    return surj, inj


@dataclass(frozen=True)
class InitialFactorisation:
    """Factorisation through the smallest left interval containing the image.

    ``interval . initial_part == original``; ``initial`` records whether the
    first factor genuinely preserves the initial element (i.e. f(0) == 0).
    Maps with f(0) != 0 are returned unfactored with ``initial`` False.
    """

    initial_part: SimplexMap
    interval_part: SimplexMap
    initial: bool
    diagnostic: str = ""


def factor_initial(f: SimplexMap) -> InitialFactorisation:
    if f.values and f.values[0] != 0:
        return InitialFactorisation(
            f, SimplexMap.identity(f.n), False,
            diagnostic="0 is not in the image; map is not initial-element preserving")
    k = f.values[-1] if f.values else 0
    initial_part = SimplexMap(f.m, k, f.values)
    interval_part = SimplexMap(k, f.n, tuple(range(k + 1)))
    return InitialFactorisation(initial_part, interval_part, True)


def classify_map(delta: SimplexMap) -> frozenset[str]:
    """Labels of the replacement map lying over ``delta``.

    A map of the replacement with underlying simplex map [m] -> [n] is Segal
    when the map is the left interval inclusion, anti-Segal for the right
    interval, anchor when it preserves the final element, convex when it
    preserves both, a degeneracy over surjections and a face over injections.
    Labels may co-occur; the identity carries all of them.
    """
    labels = set()
    if delta.is_left_interval():
        labels.add("segal")
    if delta.is_right_interval():
        labels.add("anti_segal")
    if delta.preserves_final():
        labels.add("anchor")
    if delta.preserves_initial() and delta.preserves_final():
        labels.add("convex")
    if delta.is_surjective():
        labels.add("degeneracy")
    if delta.is_injective():
        labels.add("face")
    return frozenset(labels)


# -- truncated simplicial sets --------------------------------------------------


class TruncatedSSet:
    """A presheaf of finite sets on the simplex category truncated at N.

    ``simplices[n]`` are the names of the n-simplices; the action of a
    monotone map [m] -> [n] sends n-simplex indices to m-simplex indices and
    is computed by ``act`` (memoised per map).
    """

    __slots__ = ("N", "simplices", "_act", "_tables", "name")

    def __init__(self, N: int, simplices: Sequence[Sequence[str]],
                 act: Callable[[SimplexMap, int], int], name: str = "X"):
        if len(simplices) != N + 1:
            raise ValidationError("need one simplex list per dimension 0..N")
        self.N = N
        self.simplices = tuple(tuple(level) for level in simplices)
        self._act = act
        self._tables: dict[tuple[int, int, tuple[int, ...]], tuple[int, ...]] = {}
        self.name = name

    def size(self, n: int) -> int:
        return len(self.simplices[n])

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(level) for level in self.simplices)

    def action(self, delta: SimplexMap) -> tuple[int, ...]:
        if delta.n > self.N or delta.m > self.N:
            raise TruncationBudgetError(
                f"{self.name}: map {delta.text()} exceeds truncation {self.N}")
        key = (delta.m, delta.n, delta.values)
        if key not in self._tables:
            self._tables[key] = tuple(self._act(delta, i) for i in range(self.size(delta.n)))
        return self._tables[key]

    def apply(self, delta: SimplexMap, i: int) -> int:
        return self.action(delta)[i]

    @staticmethod
    def from_tables(N: int, simplices: Sequence[Sequence[str]],
                    tables: dict[str, Sequence[int]], name: str = "X") -> "TruncatedSSet":
        fixed = {SimplexMap.parse(k): tuple(v) for k, v in tables.items()}

        def act(delta: SimplexMap, i: int) -> int:
            if delta.is_identity():
                return i
            if delta not in fixed:
                raise ValidationError(f"{name}: no action table for {delta.text()}")
            return fixed[delta][i]

        return TruncatedSSet(N, simplices, act, name=name)


def validate_sset(x: TruncatedSSet, cap: int = DEFAULT_CAP) -> tuple[bool, tuple[str, ...]]:
    """Functoriality of the action over the truncated simplex category.

    Checks identities and every composable pair of monotone maps within the
    truncation; the pair count is capped.
    """
    problems = []
    for n in range(x.N + 1):
        ident = x.action(SimplexMap.identity(n))
        if ident != tuple(range(x.size(n))):
            problems.append(f"identity action at level {n} is not the identity")
    maps = list(all_maps_up_to(x.N))
    n_pairs = sum(1 for f in maps for g in maps if g.m == f.n)
    guard_cap(f"functoriality pairs of {x.name}", n_pairs, cap)
    for f in maps:           # f: [m] -> [n]
        table_f = x.action(f)
        for g in maps:       # g: [k] -> [m], composite f.g : [k] -> [n]
            if g.n != f.m:
                continue
            comp = x.action(g.then(f))
            table_g = x.action(g)
            for i in range(x.size(f.n)):
                if table_g[table_f[i]] != comp[i]:
                    problems.append(
                        f"action breaks on {g.text()} after {f.text()} at simplex "
                        f"{x.simplices[f.n][i]}")
                    return (False, tuple(problems))
    return (not problems, tuple(problems))


# -- strings and nerves ----------------------------------------------------------


@dataclass(frozen=True)
class SimplexString:
    """A composable string of arrows in a finite category.

    ``objects`` lists the n+1 objects visited, ``arrows`` the n arrows; a
    0-string is a single object.  Strings may contain identities.
    """

    objects: tuple[int, ...]
    arrows: tuple[int, ...]

    def __post_init__(self):
        if len(self.objects) != len(self.arrows) + 1:
            raise ValidationError("string needs one more object than arrows")

    @property
    def length(self) -> int:
        return len(self.arrows)

    def name(self, base: FinCat) -> str:
        if not self.arrows:
            return f"({base.objects[self.objects[0]]})"
        return "(" + "|".join(base.arrow_names[a] for a in self.arrows) + ")"


def string_is_valid(base: FinCat, s: SimplexString) -> bool:
    for i, a in enumerate(s.arrows):
        if base.asrc[a] != s.objects[i] or base.adst[a] != s.objects[i + 1]:
            return False
    return True


def interval_composite(base: FinCat, s: SimplexString, i: int, j: int) -> int:
    """The composite arrow from position i to position j of the string."""
    if i == j:
        return base.ident[s.objects[i]]
    return base.compose_path(s.arrows[i:j])


def precompose_string(base: FinCat, s: SimplexString, delta: SimplexMap) -> SimplexString:
    """Restrict the string along a monotone map into its indexing simplex."""
    if delta.n != s.length:
        raise ValidationError("string precomposition needs a map into its simplex")
    objects = tuple(s.objects[v] for v in delta.values)
    arrows = tuple(interval_composite(base, s, delta(i), delta(i + 1))
                   for i in range(delta.m))
    return SimplexString(objects, arrows)


def enumerate_strings(base: FinCat, n: int, cap: int = DEFAULT_CAP) -> list[SimplexString]:
    """All composable strings of length n, in lexicographic arrow order."""
    if n == 0:
        return [SimplexString((x,), ()) for x in range(base.n_objects())]
    out: list[SimplexString] = []

    def extend(arrows: tuple[int, ...]):
        if len(arrows) == n:
            objects = (base.asrc[arrows[0]],) + tuple(base.adst[a] for a in arrows)
            out.append(SimplexString(objects, arrows))
            guard_cap("strings", len(out), cap)
            return
        frontier = base.adst[arrows[-1]] if arrows else None
        for a in range(base.n_arrows()):
            if frontier is None or base.asrc[a] == frontier:
                extend(arrows + (a,))

    extend(())
    return out


def nerve(base: FinCat, N: int = DEFAULT_TRUNCATION, cap: int = DEFAULT_CAP) -> TruncatedSSet:
    """The nerve truncated at N: n-simplices are functors [n] -> base."""
    levels = [enumerate_strings(base, n, cap) for n in range(N + 1)]
    total = sum(len(level) for level in levels)
    guard_cap(f"nerve of {base.name}", total, cap)
    index = [{s: i for i, s in enumerate(level)} for level in levels]

    def act(delta: SimplexMap, i: int) -> int:
        s = levels[delta.n][i]
        return index[delta.m][precompose_string(base, s, delta)]

    names = [[s.name(base) for s in level] for level in levels]
    return TruncatedSSet(N, names, act, name=f"N({base.name})<= {N}")


# -- standard generators ----------------------------------------------------------


def collapse(n: int, i: int) -> SimplexMap:
    """The surjection [n] -> [n-1] repeating the value i."""
    if not (0 <= i < n):
        raise ValidationError("collapse index out of range")
    return SimplexMap(n, n - 1, tuple(v if v <= i else v - 1 for v in range(n + 1)))


def skip(n: int, i: int) -> SimplexMap:
    """The injection [n-1] -> [n] missing the value i."""
    if not (0 <= i <= n):
        raise ValidationError("skip index out of range")
    return SimplexMap(n - 1, n, tuple(v if v < i else v + 1 for v in range(n)))


def left_interval(m: int, n: int) -> SimplexMap:
    return SimplexMap(m, n, tuple(range(m + 1)))


def right_interval(m: int, n: int) -> SimplexMap:
    return SimplexMap(m, n, tuple(range(n - m, n + 1)))


# -- categories of elements -------------------------------------------------------


class ElementsCat:
    """The category of elements of a truncated simplicial set.

    Objects are the simplices in all dimensions; an n-simplex has exactly one
    outgoing morphism for every monotone map [m] -> [n] with m within the
    truncation, landing on the restricted simplex.  This materialises a
    discrete opfibration over the opposite truncated simplex category.
    """

    __slots__ = ("sset", "cat", "dims", "offsets", "delta_of", "lookup")

    def __init__(self, x: TruncatedSSet, cap: int = DEFAULT_CAP):
        self.sset = x
        offsets: list[int] = []
        total = 0
        for n in range(x.N + 1):
            offsets.append(total)
            total += x.size(n)
        guard_cap(f"elements of {x.name}", total, cap)
        self.offsets = tuple(offsets)
        dims: list[int] = []
        obj_names: list[str] = []
        for n in range(x.N + 1):
            for s in x.simplices[n]:
                dims.append(n)
                obj_names.append(f"{s}:{n}")
        self.dims = tuple(dims)

        n_arrows_bound = sum(_count_monotone(m, self.dims[o])
                             for o in range(total) for m in range(x.N + 1))
        guard_cap(f"element category arrows of {x.name}", n_arrows_bound, cap)
        arrows: list[tuple[str, int, int]] = []
        delta_of: list[SimplexMap] = []
        lookup: dict[tuple[int, SimplexMap], int] = {}
        for o in range(total):
            n = self.dims[o]
            i = o - offsets[n]
            for m in range(x.N + 1):
                for delta in monotone_maps(m, n):
                    tgt = offsets[m] + x.apply(delta, i)
                    lookup[(o, delta)] = len(arrows)
                    arrows.append((f"{delta.text()}@{obj_names[o]}", o, tgt))
                    delta_of.append(delta)
        self.delta_of = tuple(delta_of)
        self.lookup = lookup
        ident = [lookup[(o, SimplexMap.identity(self.dims[o]))] for o in range(total)]
        table: dict[tuple[int, int], int] = {}
        for a1 in range(len(arrows)):
            s1 = arrows[a1][1]
            d1 = delta_of[a1]
            t1 = arrows[a1][2]
            for m in range(x.N + 1):
                for d2 in monotone_maps(m, self.dims[t1]):
                    a2 = lookup[(t1, d2)]
                    table[(a2, a1)] = lookup[(s1, d2.then(d1))]
        self.cat = FinCat(obj_names, arrows, ident, table, name=f"El({x.name})")

    def object_of(self, n: int, i: int) -> int:
        return self.offsets[n] + i

    def simplex_of(self, o: int) -> tuple[int, int]:
        n = self.dims[o]
        return n, o - self.offsets[n]

    def arrow(self, o: int, delta: SimplexMap) -> int:
        return self.lookup[(o, delta)]


def _count_monotone(m: int, n: int) -> int:
    import math
    return math.comb(n + m + 1, m + 1)


def delta_op_category(N: int) -> FinCat:
    """The opposite truncated simplex category as a FinCat.

    Objects are [0]..[N]; an arrow [n] -> [m] is a monotone map [m] -> [n].
    """
    objects = [f"[{n}]" for n in range(N + 1)]
    arrows: list[tuple[str, int, int]] = []
    deltas: list[SimplexMap] = []
    lookup: dict[SimplexMap, int] = {}
    for n in range(N + 1):
        for m in range(N + 1):
            for delta in monotone_maps(m, n):
                lookup[delta] = len(arrows)
                arrows.append((delta.text(), n, m))
                deltas.append(delta)
    ident = [lookup[SimplexMap.identity(n)] for n in range(N + 1)]
    table = {}
    for a1, d1 in enumerate(deltas):
        for a2, d2 in enumerate(deltas):
            if d2.n == d1.m:
                table[(a2, a1)] = lookup[d2.then(d1)]
    return FinCat(objects, arrows, ident, table, name=f"Delta_op{N}")


# -- the simplicial replacement ---------------------------------------------------


class Replacement:
    """The simplicial replacement of a finite category, truncated at N.

    The carrier category has one object per composable string of length at
    most N and one morphism per string and monotone map; it comes with the
    projection to the opposite truncated simplex category, the head functor
    to the base and the tail functor to the opposite base.
    """

    __slots__ = ("base", "N", "nerve", "elements", "cat", "strings",
                 "string_index", "head", "tail", "proj", "delta_cat", "base_op")

    def __init__(self, base: FinCat, N: int = DEFAULT_TRUNCATION, cap: int = DEFAULT_CAP):
        self.base = base
        self.N = N
        levels = [enumerate_strings(base, n, cap) for n in range(N + 1)]
        self.nerve = nerve(base, N, cap)
        self.elements = ElementsCat(self.nerve, cap)
        self.cat = self.elements.cat
        flat: list[SimplexString] = []
        for level in levels:
            flat.extend(level)
        self.strings = tuple(flat)
        self.string_index = {s: i for i, s in enumerate(flat)}
        self.base_op = opposite(base)
        h_obj = [s.objects[0] for s in flat]
        t_obj = [s.objects[-1] for s in flat]
        h_arr: list[int] = []
        t_arr: list[int] = []
        for a in range(self.cat.n_arrows()):
            src = self.cat.asrc[a]
            delta = self.elements.delta_of[a]
            s = flat[src]
            h_arr.append(interval_composite(base, s, 0, delta(0)))
            t_arr.append(interval_composite(base, s, delta(delta.m), s.length))
        self.head = FinFunctor(self.cat, base, h_obj, h_arr, name="head")
        self.tail = FinFunctor(self.cat, self.base_op, t_obj, t_arr, name="tail")
        self.delta_cat = delta_op_category(N)
        p_obj = [self.dim(o) for o in range(self.cat.n_objects())]
        dc_lookup = {}
        for a in range(self.delta_cat.n_arrows()):
            dc_lookup[SimplexMap.parse(self.delta_cat.arrow_names[a])] = a
        p_arr = [dc_lookup[self.elements.delta_of[a]] for a in range(self.cat.n_arrows())]
        self.proj = FinFunctor(self.cat, self.delta_cat, p_obj, p_arr, name="proj")
        self._assert_head_tail()

    def dim(self, o: int) -> int:
        return self.elements.dims[o]

    def delta(self, a: int) -> SimplexMap:
        return self.elements.delta_of[a]

    def arrow(self, src: int, delta: SimplexMap) -> int:
        return self.elements.lookup[(src, delta)]

    def string(self, o: int) -> SimplexString:
        return self.strings[o]

    def classify(self, a: int) -> frozenset[str]:
        return classify_map(self.delta(a))

    def segal_arrows(self) -> list[int]:
        return [a for a in range(self.cat.n_arrows())
                if self.delta(a).is_left_interval()]

    def anti_segal_arrows(self) -> list[int]:
        return [a for a in range(self.cat.n_arrows())
                if self.delta(a).is_right_interval()]

    def _assert_head_tail(self) -> None:
        # head collapses degeneracies and Segal maps; tail collapses
        # degeneracies and anchor maps
        for a in range(self.cat.n_arrows()):
            labels = self.classify(a)
            if "degeneracy" in labels or "segal" in labels:
                if not self.base.is_identity(self.head.ar(a)):
                    raise ValidationError("head functor fails to collapse a marked map")
            if "degeneracy" in labels or "anchor" in labels:
                if not self.base_op.is_identity(self.tail.ar(a)):
                    raise ValidationError("tail functor fails to collapse a marked map")


def simplicial_replacement(base: FinCat, N: int = DEFAULT_TRUNCATION,
                           cap: int = DEFAULT_CAP) -> Replacement:
    return Replacement(base, N, cap)


# -- localisation witnesses --------------------------------------------------------


@dataclass(frozen=True)
class Zigzag:
    """The verified maps reducing one head-identity map to the one-object case.

    ``equations`` lists the composite identities that were checked; the
    construction raises if any of them fails, so a returned zigzag is a
    certificate.
    """

    arrow: int
    kind: str  # "identity" | "initial" | "general"
    maps: tuple[tuple[str, int], ...]
    equations: tuple[str, ...]


@dataclass(frozen=True)
class WitnessReport:
    ok: bool
    zigzags: tuple[Zigzag, ...]
    truncation: int


def localisation_witnesses(rep: Replacement) -> WitnessReport:
    """For every head-identity map, the explicit Segal/degeneracy zigzag.

    Produces, for each map that the head functor sends to an identity, the
    connector to the reduced map, the Segal maps squaring it down to the
    doubled string, and the one-sided inverses between the doubled string and
    the point string; every stated composite is verified in the carrier
    category.
    """
    cat = rep.cat
    base = rep.base
    zigzags = []
    for a in range(cat.n_arrows()):
        if not base.is_identity(rep.head.ar(a)):
            continue
        if cat.is_identity(a):
            zigzags.append(Zigzag(a, "identity", (), ()))
            continue
        src = cat.asrc[a]
        s = rep.string(src)
        delta = rep.delta(a)
        n = s.length
        equations = []
        maps: list[tuple[str, int]] = []
        c0 = s.objects[0]
        point = rep.string_index[SimplexString((c0,), ())]
        doubled = rep.string_index[SimplexString((c0, c0), (base.ident[c0],))]
        seg = rep.arrow(doubled, SimplexMap(0, 1, (0,)))        # Segal (c=c) -> (c)
        beta = rep.arrow(doubled, SimplexMap(0, 1, (1,)))       # anchor (c=c) -> (c)
        degen = rep.arrow(point, SimplexMap(1, 0, (0, 0)))      # (c) -> (c=c)
        if cat.compose(beta, degen) != cat.ident[point]:
            raise ValidationError("zigzag: beta does not retract the degeneracy")
        equations.append("beta . degeneracy = id")
        if cat.compose(seg, degen) != cat.ident[point]:
            raise ValidationError("zigzag: segal map does not retract the degeneracy")
        equations.append("segal . degeneracy = id")
        if delta(0) == 0:
            # initial-element preserving: squared down to the heads by Segal maps
            sigma_src = rep.arrow(src, SimplexMap(0, n, (0,)))
            sigma_dst = rep.arrow(cat.adst[a], SimplexMap(0, rep.dim(cat.adst[a]), (0,)))
            if cat.compose(sigma_dst, a) != sigma_src:
                raise ValidationError("zigzag: Segal square fails on initial-preserving map")
            equations.append("segal_dst . alpha = segal_src")
            maps += [("segal_src", sigma_src), ("segal_dst", sigma_dst),
                     ("beta", beta), ("degeneracy", degen), ("segal_unit", seg)]
            zigzags.append(Zigzag(a, "initial", tuple(maps), tuple(equations)))
            continue
        a0 = delta(0)
        n_star = n - a0 + 1
        u = SimplexMap(n_star, n, (0,) + tuple(a0 + i - 1 for i in range(1, n_star + 1)))
        gamma = rep.arrow(src, u)
        star = cat.adst[gamma]
        reduced_delta = SimplexMap(delta.m, n_star, tuple(v - a0 + 1 for v in delta.values))
        reduced = rep.arrow(star, reduced_delta)
        if cat.compose(reduced, gamma) != a:
            raise ValidationError("zigzag: reduced map does not recover the original")
        equations.append("alpha' . connector = alpha")
        sigma1 = rep.arrow(star, SimplexMap(1, n_star, (0, 1)))
        sigma2 = rep.arrow(cat.adst[a], SimplexMap(0, delta.m, (0,)))
        if cat.compose(beta, sigma1) != cat.compose(sigma2, reduced):
            raise ValidationError("zigzag: Segal square around beta fails")
        equations.append("beta . segal_1 = segal_2 . alpha'")
        maps += [("connector", gamma), ("reduced", reduced), ("segal_1", sigma1),
                 ("segal_2", sigma2), ("beta", beta), ("degeneracy", degen),
                 ("segal_unit", seg)]
        zigzags.append(Zigzag(a, "general", tuple(maps), tuple(equations)))
    return WitnessReport(True, tuple(zigzags), rep.N)


# -- edgewise subdivision -----------------------------------------------------------


def edgewise_reindex(k: int, delta: SimplexMap) -> SimplexMap:
    """The k-fold concatenation reindexing of a monotone map."""
    values = tuple(q * (delta.n + 1) + delta(r)
                   for q in range(k) for r in range(delta.m + 1))
    return SimplexMap(k * (delta.m + 1) - 1, k * (delta.n + 1) - 1, values)


def edgewise_subdivide(k: int, x: TruncatedSSet,
                       N_out: Optional[int] = None) -> TruncatedSSet:
    """The k-fold edgewise subdivision: level n is level k(n+1)-1 of the input.

    The input must be truncated at k(N_out+1)-1 or deeper.
    """
    if k < 1:
        raise ValidationError("edgewise subdivision needs k >= 1")
    if N_out is None:
        N_out = (x.N + 1) // k - 1
    if N_out < 0 or k * (N_out + 1) - 1 > x.N:
        raise TruncationBudgetError(
            f"edgewise subdivision k={k} at output truncation {N_out} needs input "
            f"truncated at >= {k * (N_out + 1) - 1}, have {x.N}")
    if k == 1:
        return TruncatedSSet(N_out, x.simplices[:N_out + 1],
                             lambda d, i: x.apply(d, i), name=x.name)
    simplices = [x.simplices[k * (n + 1) - 1] for n in range(N_out + 1)]

    def act(delta: SimplexMap, i: int) -> int:
        return x.apply(edgewise_reindex(k, delta), i)

    return TruncatedSSet(N_out, simplices, act, name=f"sd_{k}({x.name})")
