"""Finite categories as explicit composition tables.

A category here is a finite indexed set of objects and arrows together with a
total table of composites, so every law (associativity, units, universal
properties) is decided by exhaustive enumeration.  Object and arrow identity
is by index; comparisons up to isomorphism are explicit operations.

All structures are immutable after construction and every operation is a pure
function, so shared values may be used concurrently.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .config import DEFAULT_CAP
from .errors import QuotientNotFiniteError, SizeCapError, ValidationError


def guard_cap(what: str, count: int, cap: int) -> None:
    if count > cap:
        raise SizeCapError(what, count, cap)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    problems: tuple[str, ...]
    checked: int

    def first(self) -> Optional[str]:
        return self.problems[0] if self.problems else None


class FinCat:
    """A finite category given by a total composition table.

    ``arrows[k]`` is a triple ``(name, src, dst)`` of an arrow name and object
    indices.  ``table[(g, f)]`` is the index of ``g after f`` and must be
    defined exactly when ``dst(f) == src(g)`` (checked by :func:`validate`,
    not at construction, so that deliberately broken tables can be examined).
    """

    __slots__ = (
        "name", "objects", "arrow_names", "asrc", "adst", "ident", "table",
        "_by_src", "_by_dst", "_hom", "_isos",
    )

    def __init__(
        self,
        objects: Sequence[str],
        arrows: Sequence[tuple[str, int, int]],
        identities: Sequence[int],
        table: Mapping[tuple[int, int], int],
        name: str = "C",
    ):
        self.name = name
        self.objects = tuple(objects)
        self.arrow_names = tuple(a[0] for a in arrows)
        self.asrc = tuple(a[1] for a in arrows)
        self.adst = tuple(a[2] for a in arrows)
        self.ident = tuple(identities)
        self.table = dict(table)
        nob, nar = len(self.objects), len(self.arrow_names)
        if len(self.ident) != nob:
            raise ValidationError(f"{name}: need one identity per object")
        for k in range(nar):
            if not (0 <= self.asrc[k] < nob and 0 <= self.adst[k] < nob):
                raise ValidationError(f"{name}: arrow {k} has endpoints out of range")
        for i in self.ident:
            if not (0 <= i < nar):
                raise ValidationError(f"{name}: identity index out of range")
        for (g, f), h in self.table.items():
            if not (0 <= g < nar and 0 <= f < nar and 0 <= h < nar):
                raise ValidationError(f"{name}: composition entry out of range")
        by_src: list[list[int]] = [[] for _ in range(nob)]
        by_dst: list[list[int]] = [[] for _ in range(nob)]
        for k in range(nar):
            by_src[self.asrc[k]].append(k)
            by_dst[self.adst[k]].append(k)
        self._by_src = tuple(tuple(v) for v in by_src)
        self._by_dst = tuple(tuple(v) for v in by_dst)
        hom: dict[tuple[int, int], list[int]] = {}
        for k in range(nar):
            hom.setdefault((self.asrc[k], self.adst[k]), []).append(k)
        self._hom = {k: tuple(v) for k, v in hom.items()}
        self._isos: Optional[frozenset[int]] = None

    # -- basic accessors ----------------------------------------------------

    def n_objects(self) -> int:
        return len(self.objects)

    def n_arrows(self) -> int:
        return len(self.arrow_names)

    def src(self, a: int) -> int:
        return self.asrc[a]

    def dst(self, a: int) -> int:
        return self.adst[a]

    def id_of(self, x: int) -> int:
        return self.ident[x]

    def is_identity(self, a: int) -> bool:
        return self.ident[self.asrc[a]] == a and self.asrc[a] == self.adst[a]

    def hom(self, x: int, y: int) -> tuple[int, ...]:
        return self._hom.get((x, y), ())

    def arrows_from(self, x: int) -> tuple[int, ...]:
        return self._by_src[x]

    def arrows_to(self, y: int) -> tuple[int, ...]:
        return self._by_dst[y]

    def compose(self, g: int, f: int) -> int:
        """Composite ``g after f``; raises if the pair is not composable."""
        if self.adst[f] != self.asrc[g]:
            raise ValidationError(
                f"{self.name}: {self.arrow_names[g]} after {self.arrow_names[f]} not composable")
        if self.asrc[g] == self.adst[g] and self.ident[self.asrc[g]] == g:
            return f
        if self.asrc[f] == self.adst[f] and self.ident[self.asrc[f]] == f:
            return g
        return self.table[(g, f)]

    def compose_path(self, path: Sequence[int]) -> int:
        """Composite of a composable path listed source-first."""
        if not path:
            raise ValidationError("empty path has no composite without an object")
        acc = path[0]
        for a in path[1:]:
            acc = self.compose(a, acc)
        return acc

    def is_iso(self, a: int) -> bool:
        return a in self.isos()

    def isos(self) -> frozenset[int]:
        if self._isos is None:
            inv = set()
            for a in range(self.n_arrows()):
                x, y = self.asrc[a], self.adst[a]
                for b in self.hom(y, x):
                    if (self.compose(b, a) == self.ident[x]
                            and self.compose(a, b) == self.ident[y]):
                        inv.add(a)
                        break
            self._isos = frozenset(inv)
        return self._isos

    def inverse(self, a: int) -> int:
        x, y = self.asrc[a], self.adst[a]
        for b in self.hom(y, x):
            if self.compose(b, a) == self.ident[x] and self.compose(a, b) == self.ident[y]:
                return b
        raise ValidationError(f"{self.name}: {self.arrow_names[a]} is not invertible")

    def signature(self):
        return (self.objects, self.arrow_names, self.asrc, self.adst, self.ident,
                tuple(sorted(self.table.items())))

    def __eq__(self, other) -> bool:
        return isinstance(other, FinCat) and self.signature() == other.signature()

    def __hash__(self) -> int:
        return hash(self.signature())

    def __repr__(self) -> str:
        return f"FinCat({self.name!r}, {self.n_objects()} objects, {self.n_arrows()} arrows)"


# -- validation --------------------------------------------------------------


def validate(c: FinCat, cap: int = DEFAULT_CAP) -> ValidationReport:
    """Check all FinCat invariants exhaustively.

    Reports identity failures, missing or spurious table entries, endpoint
    mismatches of composites, and the first broken associativity triple by
    name.  Diagnostic: never raises except when the triple count exceeds the
    cap.
    """
    problems: list[str] = []
    checked = 0
    for x in range(c.n_objects()):
        i = c.ident[x]
        if c.asrc[i] != x or c.adst[i] != x:
            problems.append(f"identity of {c.objects[x]} has wrong endpoints")
    for (g, f) in c.table:
        if c.adst[f] != c.asrc[g]:
            problems.append(
                f"table entry ({c.arrow_names[g]}, {c.arrow_names[f]}) is not composable")
    for g in range(c.n_arrows()):
        for f in c.arrows_to(c.asrc[g]):
            checked += 1
            if c.is_identity(g) or c.is_identity(f):
                continue
            if (g, f) not in c.table:
                problems.append(
                    f"missing composite {c.arrow_names[g]} after {c.arrow_names[f]}")
                continue
            h = c.table[(g, f)]
            if c.asrc[h] != c.asrc[f] or c.adst[h] != c.adst[g]:
                problems.append(
                    f"composite {c.arrow_names[g]} after {c.arrow_names[f]} has wrong endpoints")
    for x in range(c.n_objects()):
        i = c.ident[x]
        for f in c.arrows_to(x):
            if c.compose(i, f) != f:
                problems.append(f"left unit fails at {c.arrow_names[f]}")
        for f in c.arrows_from(x):
            if c.compose(f, i) != f:
                problems.append(f"right unit fails at {c.arrow_names[f]}")
    if problems:
        return ValidationReport(False, tuple(problems), checked)
    # associativity over all composable triples
    n_triples = 0
    for g in range(c.n_arrows()):
        n_triples += len(c.arrows_to(c.asrc[g])) * len(c.arrows_from(c.adst[g]))
    guard_cap(f"associativity triples of {c.name}", n_triples, cap)
    for g in range(c.n_arrows()):
        for f in c.arrows_to(c.asrc[g]):
            gf = c.compose(g, f)
            for h in c.arrows_from(c.adst[g]):
                checked += 1
                if c.compose(h, gf) != c.compose(c.compose(h, g), f):
                    problems.append(
                        "associativity fails on triple "
                        f"({c.arrow_names[h]}, {c.arrow_names[g]}, {c.arrow_names[f]})")
                    return ValidationReport(False, tuple(problems), checked)
    return ValidationReport(True, (), checked)


# -- functors and natural transformations ------------------------------------


class FinFunctor:
    """A functor between finite categories, given by total index maps."""

    __slots__ = ("dom", "cod", "omap", "amap", "name")

    def __init__(self, dom: FinCat, cod: FinCat, omap: Sequence[int],
                 amap: Sequence[int], name: str = "F"):
        self.dom = dom
        self.cod = cod
        self.omap = tuple(omap)
        self.amap = tuple(amap)
        self.name = name
        if len(self.omap) != dom.n_objects() or len(self.amap) != dom.n_arrows():
            raise ValidationError(f"{name}: object/arrow map has wrong length")

    def ob(self, x: int) -> int:
        return self.omap[x]

    def ar(self, a: int) -> int:
        return self.amap[a]

    def __eq__(self, other) -> bool:
        return (isinstance(other, FinFunctor) and self.dom == other.dom
                and self.cod == other.cod and self.omap == other.omap
                and self.amap == other.amap)

    def __hash__(self) -> int:
        return hash((self.omap, self.amap))

    def __repr__(self) -> str:
        return f"FinFunctor({self.name!r}: {self.dom.name} -> {self.cod.name})"


def validate_functor(f: FinFunctor) -> ValidationReport:
    """Exhaustively check that f preserves endpoints, identities and composition."""
    c, d = f.dom, f.cod
    problems = []
    checked = 0
    for a in range(c.n_arrows()):
        checked += 1
        if d.asrc[f.ar(a)] != f.ob(c.asrc[a]) or d.adst[f.ar(a)] != f.ob(c.adst[a]):
            problems.append(f"{f.name} breaks endpoints at {c.arrow_names[a]}")
    for x in range(c.n_objects()):
        checked += 1
        if f.ar(c.ident[x]) != d.ident[f.ob(x)]:
            problems.append(f"{f.name} breaks identity at {c.objects[x]}")
    if not problems:
        for g in range(c.n_arrows()):
            for a in c.arrows_to(c.asrc[g]):
                checked += 1
                if f.ar(c.compose(g, a)) != d.compose(f.ar(g), f.ar(a)):
                    problems.append(
                        f"{f.name} breaks composition on "
                        f"({c.arrow_names[g]}, {c.arrow_names[a]})")
                    return ValidationReport(False, tuple(problems), checked)
    return ValidationReport(not problems, tuple(problems), checked)


def identity_functor(c: FinCat) -> FinFunctor:
    return FinFunctor(c, c, range(c.n_objects()), range(c.n_arrows()), f"id_{c.name}")


def compose_functors(g: FinFunctor, f: FinFunctor) -> FinFunctor:
    if f.cod is not g.dom and f.cod != g.dom:
        raise ValidationError("functors not composable")
    return FinFunctor(f.dom, g.cod,
                      [g.ob(x) for x in f.omap],
                      [g.ar(a) for a in f.amap],
                      f"{g.name}.{f.name}")


def constant_functor(dom: FinCat, cod: FinCat, x: int) -> FinFunctor:
    return FinFunctor(dom, cod, [x] * dom.n_objects(),
                      [cod.ident[x]] * dom.n_arrows(), f"const_{cod.objects[x]}")


class NatTrans:
    """A natural transformation given by its components."""

    __slots__ = ("src", "dst", "components")

    def __init__(self, src: FinFunctor, dst: FinFunctor, components: Sequence[int]):
        if src.dom != dst.dom or src.cod != dst.cod:
            raise ValidationError("natural transformation needs parallel functors")
        self.src = src
        self.dst = dst
        self.components = tuple(components)


def validate_nat_trans(t: NatTrans) -> ValidationReport:
    c, d = t.src.dom, t.src.cod
    problems = []
    for x in range(c.n_objects()):
        comp = t.components[x]
        if d.asrc[comp] != t.src.ob(x) or d.adst[comp] != t.dst.ob(x):
            problems.append(f"component at {c.objects[x]} has wrong endpoints")
    if not problems:
        for a in range(c.n_arrows()):
            x, y = c.asrc[a], c.adst[a]
            if d.compose(t.components[y], t.src.ar(a)) != d.compose(t.dst.ar(a), t.components[x]):
                problems.append(f"naturality fails at {c.arrow_names[a]}")
                break
    return ValidationReport(not problems, tuple(problems), c.n_objects() + c.n_arrows())


@dataclass(frozen=True)
class MapSubset:
    """A set of arrow ids inside a fixed carrier category."""

    carrier: FinCat
    members: frozenset[int]

    def __post_init__(self):
        for a in self.members:
            if not (0 <= a < self.carrier.n_arrows()):
                raise ValidationError("map subset contains an invalid arrow id")

    def __contains__(self, a: int) -> bool:
        return a in self.members


# -- constructions -----------------------------------------------------------


def build_fincat(objects: Sequence[str],
                 arrows: Sequence[tuple[str, str, str]],
                 compose_pairs: Iterable[tuple[str, str, str]] = (),
                 identities: Optional[Mapping[str, str]] = None,
                 name: str = "C") -> FinCat:
    """Assemble a FinCat from named data, synthesising identities if omitted.

    ``arrows`` lists non-identity arrows as (name, src, dst) unless
    ``identities`` points at explicitly listed ones.  Composition entries for
    identity laws may be omitted.
    """
    objects = list(objects)
    oidx = {o: i for i, o in enumerate(objects)}
    names = [a[0] for a in arrows]
    if identities is None:
        identities = {}
    arr: list[tuple[str, int, int]] = []
    for (nm, s, t) in arrows:
        if s not in oidx or t not in oidx:
            raise ValidationError(f"arrow {nm} references unknown object")
        arr.append((nm, oidx[s], oidx[t]))
    aidx = {a[0]: i for i, a in enumerate(arr)}
    ident: list[int] = []
    for o in objects:
        if o in identities:
            nm = identities[o]
            if nm not in aidx:
                raise ValidationError(f"identity {nm} of {o} not among arrows")
            ident.append(aidx[nm])
        else:
            nm = f"id_{o}"
            if nm in aidx:
                ident.append(aidx[nm])
            else:
                arr.append((nm, oidx[o], oidx[o]))
                aidx[nm] = len(arr) - 1
                ident.append(aidx[nm])
    table: dict[tuple[int, int], int] = {}
    for (g, f, gf) in compose_pairs:
        for nm in (g, f, gf):
            if nm not in aidx:
                raise ValidationError(f"composition entry references unknown arrow {nm}")
        table[(aidx[g], aidx[f])] = aidx[gf]
    # fill identity laws
    for k, (nm, s, t) in enumerate(arr):
        table[(ident[t], k)] = k
        table[(k, ident[s])] = k
    return FinCat(objects, arr, ident, table, name=name)


def from_generators(objects: Sequence[str],
                    generators: Sequence[tuple[str, str, str]],
                    relations: Optional[Mapping[tuple[str, str], str]] = None,
                    cap: int = 10_000,
                    name: str = "C") -> FinCat:
    """Close a generating graph under composition, consulting ``relations``.

    ``relations[(g, f)]`` names the composite of two composable words; pairs
    without a relation get a fresh arrow named ``g.f``.  The closure stops
    with a SizeCapError above ``cap`` arrows, since free composition need not
    terminate.
    """
    relations = dict(relations or {})
    oidx = {o: i for i, o in enumerate(objects)}
    arr: list[tuple[str, int, int]] = []
    aidx: dict[str, int] = {}

    def add(nm: str, s: int, t: int) -> int:
        if nm in aidx:
            return aidx[nm]
        arr.append((nm, s, t))
        aidx[nm] = len(arr) - 1
        guard_cap(f"generator closure of {name}", len(arr), cap)
        return aidx[nm]

    ident = [add(f"id_{o}", i, i) for o, i in ((o, oidx[o]) for o in objects)]
    for (nm, s, t) in generators:
        add(nm, oidx[s], oidx[t])
    table: dict[tuple[int, int], int] = {}
    dirty = True
    while dirty:
        dirty = False
        for g in range(len(arr)):
            for f in range(len(arr)):
                if arr[f][2] != arr[g][1] or (g, f) in table:
                    continue
                if g in ident:
                    table[(g, f)] = f
                elif f in ident:
                    table[(g, f)] = g
                else:
                    key = (arr[g][0], arr[f][0])
                    nm = relations.get(key, f"{arr[g][0]}.{arr[f][0]}")
                    table[(g, f)] = add(nm, arr[f][1], arr[g][2])
                dirty = True
    return FinCat(objects, arr, ident, table, name=name)


def opposite(c: FinCat) -> FinCat:
    """Reverse all arrows; applying it twice gives back an identical table."""
    arrows = [(c.arrow_names[k], c.adst[k], c.asrc[k]) for k in range(c.n_arrows())]
    table = {(f, g): h for (g, f), h in c.table.items()}
    return FinCat(c.objects, arrows, c.ident, table, name=f"{c.name}^op")


def chain(n: int) -> FinCat:
    """The poset category [n] = 0 -> 1 -> ... -> n."""
    objects = [str(i) for i in range(n + 1)]
    arrows = [(f"a{i}{j}", i, j) for i in range(n + 1) for j in range(i, n + 1)]
    idx = {(i, j): k for k, (_, i, j) in enumerate(arrows)}
    ident = [idx[(i, i)] for i in range(n + 1)]
    table = {}
    for (i, j) in idx:
        for (j2, k) in idx:
            if j2 == j:
                table[(idx[(j, k)], idx[(i, j)])] = idx[(i, k)]
    return FinCat(objects, arrows, ident, table, name=f"[{n}]")


def discrete(k: int) -> FinCat:
    objects = [str(i) for i in range(k)]
    arrows = [(f"id_{i}", i, i) for i in range(k)]
    table = {(i, i): i for i in range(k)}
    return FinCat(objects, arrows, list(range(k)), table, name=f"disc{k}")


def group_z2() -> FinCat:
    """The one-object group of order two."""
    arrows = [("e", 0, 0), ("s", 0, 0)]
    table = {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 0}
    return FinCat(["*"], arrows, [0], table, name="BZ2")


def walking_iso() -> FinCat:
    """Two objects and one isomorphism between them."""
    arrows = [("id_0", 0, 0), ("id_1", 1, 1), ("u", 0, 1), ("v", 1, 0)]
    table = {(0, 0): 0, (1, 1): 1, (2, 0): 2, (1, 2): 2, (3, 1): 3, (0, 3): 3,
             (3, 2): 0, (2, 3): 1}
    return FinCat(["0", "1"], arrows, [0, 1], table, name="J")


def product(c: FinCat, d: FinCat) -> FinCat:
    """The product category; arrows are pairs composed coordinatewise."""
    objects = [f"({c.objects[i]},{d.objects[j]})"
               for i in range(c.n_objects()) for j in range(d.n_objects())]
    oid = lambda i, j: i * d.n_objects() + j
    arrows = []
    aid: dict[tuple[int, int], int] = {}
    for a in range(c.n_arrows()):
        for b in range(d.n_arrows()):
            aid[(a, b)] = len(arrows)
            arrows.append((f"({c.arrow_names[a]},{d.arrow_names[b]})",
                           oid(c.asrc[a], d.asrc[b]), oid(c.adst[a], d.adst[b])))
    ident = [aid[(c.ident[i], d.ident[j])]
             for i in range(c.n_objects()) for j in range(d.n_objects())]
    table = {}
    for (a1, b1), k1 in aid.items():
        for (a2, b2), k2 in aid.items():
            if c.adst[a2] == c.asrc[a1] and d.adst[b2] == d.asrc[b1]:
                table[(k1, k2)] = aid[(c.compose(a1, a2), d.compose(b1, b2))]
    return FinCat(objects, arrows, ident, table, name=f"{c.name}x{d.name}")


# -- universal-property detectors ---------------------------------------------


@dataclass(frozen=True)
class ExtremalReport:
    """Result of an initial/terminal object search."""

    object: Optional[int]
    all_found: tuple[int, ...]
    unique: bool


def find_terminal(c: FinCat) -> ExtremalReport:
    """Objects receiving exactly one arrow from everywhere; least index wins."""
    found = [t for t in range(c.n_objects())
             if all(len(c.hom(x, t)) == 1 for x in range(c.n_objects()))]
    return ExtremalReport(found[0] if found else None, tuple(found), len(found) <= 1)


def find_initial(c: FinCat) -> ExtremalReport:
    found = [s for s in range(c.n_objects())
             if all(len(c.hom(s, x)) == 1 for x in range(c.n_objects()))]
    return ExtremalReport(found[0] if found else None, tuple(found), len(found) <= 1)


@dataclass(frozen=True)
class CommaCat:
    """A comma category together with its two projections.

    Objects are triples ``(a, b, phi)`` with ``phi: f(a) -> g(b)``; arrows are
    pairs making the evident square commute.
    """

    cat: FinCat
    objects: tuple[tuple[int, int, int], ...]
    arrows: tuple[tuple[int, int], ...]
    proj_src: FinFunctor
    proj_tgt: FinFunctor


def comma(f: FinFunctor, g: FinFunctor, cap: int = DEFAULT_CAP) -> CommaCat:
    """The comma category of a cospan f: A -> C <- B :g."""
    if f.cod != g.cod:
        raise ValidationError("comma needs functors with a common codomain")
    a_cat, b_cat, c_cat = f.dom, g.dom, f.cod
    objs: list[tuple[int, int, int]] = []
    for a in range(a_cat.n_objects()):
        for b in range(b_cat.n_objects()):
            for phi in c_cat.hom(f.ob(a), g.ob(b)):
                objs.append((a, b, phi))
                guard_cap("comma objects", len(objs), cap)
    opos = {o: i for i, o in enumerate(objs)}
    arrows: list[tuple[int, int]] = []
    aidx: dict[tuple[int, int, int], int] = {}  # (obj_from, u, v) -> arrow id
    names: list[tuple[str, int, int]] = []
    for i, (a, b, phi) in enumerate(objs):
        for u in a_cat.arrows_from(a):
            for v in b_cat.arrows_from(b):
                tgt = (a_cat.adst[u], b_cat.adst[v])
                for phi2 in c_cat.hom(f.ob(tgt[0]), g.ob(tgt[1])):
                    if c_cat.compose(g.ar(v), phi) == c_cat.compose(phi2, f.ar(u)):
                        j = opos[(tgt[0], tgt[1], phi2)]
                        aidx[(i, u, v)] = len(arrows)
                        arrows.append((u, v))
                        names.append((f"({a_cat.arrow_names[u]},{b_cat.arrow_names[v]})@{i}",
                                      i, j))
                        guard_cap("comma arrows", len(arrows), cap)
    ident = []
    for i, (a, b, phi) in enumerate(objs):
        ident.append(aidx[(i, a_cat.ident[a], b_cat.ident[b])])
    table = {}
    for k1, (nm1, i1, j1) in enumerate(names):
        u1, v1 = arrows[k1]
        for k2, (nm2, i2, j2) in enumerate(names):
            if j2 != i1:
                continue
            u2, v2 = arrows[k2]
            comp = aidx[(i2, a_cat.compose(u1, u2), b_cat.compose(v1, v2))]
            table[(k1, k2)] = comp
    obj_names = [f"({a_cat.objects[a]},{b_cat.objects[b]},{c_cat.arrow_names[phi]})"
                 for (a, b, phi) in objs]
    cat = FinCat(obj_names, names, ident, table, name=f"({f.name}/{g.name})")
    proj_src = FinFunctor(cat, a_cat, [o[0] for o in objs], [u for (u, _) in arrows], "pr1")
    proj_tgt = FinFunctor(cat, b_cat, [o[1] for o in objs], [v for (_, v) in arrows], "pr2")
    return CommaCat(cat, tuple(objs), tuple(arrows), proj_src, proj_tgt)


@dataclass(frozen=True)
class AdjunctionReport:
    """Outcome of an exhaustive adjunction check.

    When ``ok``, ``unit`` and ``counit`` hold verified component lists and the
    triangle identities have been asserted.  Otherwise ``counterexample``
    holds an object pair with mismatched hom sets (if any) and ``reason``
    explains the failure.
    """

    ok: bool
    unit: tuple[int, ...] = ()
    counit: tuple[int, ...] = ()
    counterexample: Optional[tuple[int, int]] = None
    reason: str = ""


def check_adjunction(l: FinFunctor, r: FinFunctor, cap: int = DEFAULT_CAP) -> AdjunctionReport:
    """Decide whether l is left adjoint to r by exhaustive matching.

    Searches for a natural unit making every map
    ``Hom(l a, b) -> Hom(a, r b), g |-> r(g) . eta_a`` bijective, derives the
    counit, and asserts both triangle identities.
    """
    a_cat, b_cat = l.dom, l.cod
    if r.dom != b_cat or r.cod != a_cat:
        raise ValidationError("check_adjunction needs l: A -> B and r: B -> A")
    for a in range(a_cat.n_objects()):
        for b in range(b_cat.n_objects()):
            if len(b_cat.hom(l.ob(a), b)) != len(a_cat.hom(a, r.ob(b))):
                return AdjunctionReport(
                    False, counterexample=(a, b),
                    reason=f"hom sets differ at ({a_cat.objects[a]}, {b_cat.objects[b]})")

    def transposes_bijectively(a: int, eta_a: int) -> bool:
        for b in range(b_cat.n_objects()):
            seen = set()
            for g in b_cat.hom(l.ob(a), b):
                seen.add(a_cat.compose(r.ar(g), eta_a))
            if len(seen) != len(b_cat.hom(l.ob(a), b)):
                return False
        return True

    candidates: list[list[int]] = []
    total = 1
    for a in range(a_cat.n_objects()):
        cs = [e for e in a_cat.hom(a, r.ob(l.ob(a))) if transposes_bijectively(a, e)]
        if not cs:
            return AdjunctionReport(False, reason=f"no unit component at {a_cat.objects[a]}")
        candidates.append(cs)
        total *= len(cs)
        guard_cap("unit candidates", total, cap)

    def natural_so_far(partial: list[int]) -> bool:
        k = len(partial) - 1
        for u in range(a_cat.n_arrows()):
            x, y = a_cat.asrc[u], a_cat.adst[u]
            if x <= k and y <= k and (x == k or y == k):
                lhs = a_cat.compose(partial[y], u)
                rhs = a_cat.compose(r.ar(l.ar(u)), partial[x])
                if lhs != rhs:
                    return False
        return True

    def derive_counit(eta: list[int]) -> Optional[list[int]]:
        eps: list[int] = []
        for b in range(b_cat.n_objects()):
            rb = r.ob(b)
            pick = None
            for e in b_cat.hom(l.ob(rb), b):
                if a_cat.compose(r.ar(e), eta[rb]) == a_cat.ident[rb]:
                    pick = e
                    break
            if pick is None:
                return None
            eps.append(pick)
        # naturality of the counit
        for v in range(b_cat.n_arrows()):
            x, y = b_cat.asrc[v], b_cat.adst[v]
            if b_cat.compose(v, eps[x]) != b_cat.compose(eps[y], l.ar(r.ar(v))):
                return None
        # first triangle: eps_{l a} . l(eta_a) = id
        for a in range(a_cat.n_objects()):
            if b_cat.compose(eps[l.ob(a)], l.ar(eta[a])) != b_cat.ident[l.ob(a)]:
                return None
        return eps

    def search(partial: list[int]) -> Optional[tuple[list[int], list[int]]]:
        if len(partial) == a_cat.n_objects():
            eps = derive_counit(partial)
            if eps is not None:
                return partial, eps
            return None
        for e in candidates[len(partial)]:
            partial.append(e)
            if natural_so_far(partial):
                got = search(partial)
                if got is not None:
                    return got
            partial.pop()
        return None

    got = search([])
    if got is None:
        return AdjunctionReport(False, reason="hom counts match but no natural unit/counit")
    eta, eps = got
    return AdjunctionReport(True, unit=tuple(eta), counit=tuple(eps))


@dataclass(frozen=True)
class EquivalenceReport:
    ok: bool
    fully_faithful: bool
    essentially_surjective: bool
    witness: str = ""


def is_equivalence(f: FinFunctor) -> EquivalenceReport:
    """Fully faithful + essentially surjective, by enumeration."""
    c, d = f.dom, f.cod
    ff, witness = True, ""
    for x in range(c.n_objects()):
        for y in range(c.n_objects()):
            images = [f.ar(a) for a in c.hom(x, y)]
            target = d.hom(f.ob(x), f.ob(y))
            if len(set(images)) != len(images) or set(images) != set(target):
                ff = False
                witness = (f"hom({c.objects[x]},{c.objects[y]}) does not match "
                           f"hom({d.objects[f.ob(x)]},{d.objects[f.ob(y)]})")
                break
        if not ff:
            break
    hit = set()
    for x in range(c.n_objects()):
        fx = f.ob(x)
        hit.add(fx)
        for a in d.isos():
            if d.asrc[a] == fx:
                hit.add(d.adst[a])
    es = hit == set(range(d.n_objects()))
    if ff and not es:
        missing = min(set(range(d.n_objects())) - hit)
        witness = f"{d.objects[missing]} is not in the essential image"
    return EquivalenceReport(ff and es, ff, es, witness)


def find_isomorphism(c: FinCat, d: FinCat, cap: int = DEFAULT_CAP) -> Optional[FinFunctor]:
    """Search for an isomorphism of categories c -> d (exact table match)."""
    if (c.n_objects() != d.n_objects() or c.n_arrows() != d.n_arrows()):
        return None

    def obj_inv(cat: FinCat, x: int):
        outs = sorted(len(cat.hom(x, y)) for y in range(cat.n_objects()))
        ins = sorted(len(cat.hom(y, x)) for y in range(cat.n_objects()))
        return (tuple(outs), tuple(ins))

    cinv = [obj_inv(c, x) for x in range(c.n_objects())]
    dinv = [obj_inv(d, x) for x in range(d.n_objects())]
    if sorted(cinv) != sorted(dinv):
        return None

    n = c.n_objects()
    attempts = 0

    def extend_arrows(omap: list[int]) -> Optional[list[int]]:
        amap: list[int] = [-1] * c.n_arrows()
        homs = []
        for x in range(n):
            for y in range(n):
                src_h = c.hom(x, y)
                dst_h = d.hom(omap[x], omap[y])
                if len(src_h) != len(dst_h):
                    return None
                homs.append((src_h, dst_h))

        def assign(i: int) -> bool:
            nonlocal attempts
            if i == len(homs):
                return True
            src_h, dst_h = homs[i]
            if not src_h:
                return assign(i + 1)
            for perm in itertools.permutations(dst_h):
                attempts += 1
                if attempts > cap:
                    raise SizeCapError("isomorphism search", attempts, cap)
                ok = True
                for a, b in zip(src_h, perm):
                    if c.is_identity(a) != d.is_identity(b):
                        ok = False
                        break
                if not ok:
                    continue
                for a, b in zip(src_h, perm):
                    amap[a] = b
                if check_partial(amap):
                    if assign(i + 1):
                        return True
                for a in src_h:
                    amap[a] = -1
            return False

        def check_partial(am: list[int]) -> bool:
            for g in range(c.n_arrows()):
                if am[g] < 0:
                    continue
                for f2 in c.arrows_to(c.asrc[g]):
                    if am[f2] < 0:
                        continue
                    gf = c.compose(g, f2)
                    if am[gf] < 0:
                        continue
                    if d.compose(am[g], am[f2]) != am[gf]:
                        return False
            return True

        if assign(0):
            return amap
        return None

    def backtrack(omap: list[int], used: set[int]) -> Optional[FinFunctor]:
        x = len(omap)
        if x == n:
            amap = extend_arrows(omap)
            if amap is not None:
                return FinFunctor(c, d, omap, amap, f"iso:{c.name}->{d.name}")
            return None
        for y in range(n):
            if y in used or cinv[x] != dinv[y]:
                continue
            got = backtrack(omap + [y], used | {y})
            if got is not None:
                return got
        return None

    return backtrack([], set())


# -- fibre limits used by the extension module --------------------------------


def find_terminal_object(c: FinCat) -> Optional[int]:
    return find_terminal(c).object


def find_pullback(c: FinCat, f: int, g: int) -> Optional[tuple[int, int, int]]:
    """A pullback of the cospan ``f: X -> Z <- Y :g`` with least-index choice.

    Returns ``(P, p1: P -> X, p2: P -> Y)`` or None; the universal property is
    verified exhaustively against every competing cone.
    """
    if c.adst[f] != c.adst[g]:
        raise ValidationError("pullback needs a cospan")
    x, y = c.asrc[f], c.asrc[g]
    cones = []
    for p in range(c.n_objects()):
        for p1 in c.hom(p, x):
            for p2 in c.hom(p, y):
                if c.compose(f, p1) == c.compose(g, p2):
                    cones.append((p, p1, p2))
    for (p, p1, p2) in cones:
        universal = True
        for (q, q1, q2) in cones:
            mediating = [m for m in c.hom(q, p)
                         if c.compose(p1, m) == q1 and c.compose(p2, m) == q2]
            if len(mediating) != 1:
                universal = False
                break
        if universal:
            return (p, p1, p2)
    return None


def find_binary_product(c: FinCat, x: int, y: int) -> Optional[tuple[int, int, int]]:
    """A product of two objects with least-index choice, or None."""
    cones = []
    for p in range(c.n_objects()):
        for p1 in c.hom(p, x):
            for p2 in c.hom(p, y):
                cones.append((p, p1, p2))
    for (p, p1, p2) in cones:
        universal = True
        for (q, q1, q2) in cones:
            mediating = [m for m in c.hom(q, p)
                         if c.compose(p1, m) == q1 and c.compose(p2, m) == q2]
            if len(mediating) != 1:
                universal = False
                break
        if universal:
            return (p, p1, p2)
    return None


# -- localisation by formal inversion -----------------------------------------


@dataclass(frozen=True)
class Localization:
    """A finite localisation with representative words for its arrows.

    ``words[k]`` presents arrow k of the quotient as a signed generator
    sequence: value g >= 0 is the original arrow g, value -(w+1) is the formal
    inverse of the inverted arrow w.
    """

    cat: FinCat
    functor: FinFunctor
    words: tuple[tuple[int, ...], ...]


def localize(c: FinCat, members: frozenset[int], cap: int = DEFAULT_CAP
             ) -> Localization:
    """Formally invert the given arrows, keeping the category finite.

    Runs a Todd-Coxeter style closure over words in the arrows and formal
    inverses; raises QuotientNotFiniteError when the state count passes the
    cap, since localisations of finite categories need not be finite.
    Returns the quotient, the canonical functor into it and representative
    words.
    """
    # generators: arrows of c, then formal inverses of members (in index order)
    inv_list = sorted(members)
    gen_src = list(c.asrc) + [c.adst[w] for w in inv_list]
    gen_dst = list(c.adst) + [c.asrc[w] for w in inv_list]
    n_gen = len(gen_src)

    parent: list[int] = []
    state_src: list[int] = []
    state_dst: list[int] = []
    succ: list[dict[int, int]] = []  # state -> generator -> state
    word: list[tuple[int, ...]] = []

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def new_state(s: int, t: int, w: tuple[int, ...]) -> int:
        parent.append(len(parent))
        state_src.append(s)
        state_dst.append(t)
        succ.append({})
        word.append(w)
        if len(parent) > cap:
            raise QuotientNotFiniteError(
                f"localisation of {c.name} exceeded {cap} states")
        return len(parent) - 1

    ident_state = [new_state(x, x, ()) for x in range(c.n_objects())]

    pending: list[tuple[int, int]] = []

    def union(i: int, j: int) -> None:
        i, j = find(i), find(j)
        if i != j:
            pending.append((i, j))

    def process_unions() -> None:
        while pending:
            i, j = pending.pop()
            i, j = find(i), find(j)
            if i == j:
                continue
            if j < i:
                i, j = j, i
            parent[j] = i
            for g, t in list(succ[j].items()):
                if g in succ[i]:
                    union(succ[i][g], t)
                else:
                    succ[i][g] = find(t)
            succ[j] = {}

    def step(state: int, g: int) -> int:
        state = find(state)
        if g in succ[state]:
            return find(succ[state][g])
        t = new_state(state_src[state], gen_dst[g], word[state] + (g,))
        succ[state][g] = t
        return t

    # close under all generator applications while enforcing the relations
    changed = True
    while changed:
        changed = False
        n_before = len(parent)
        roots = sorted({find(i) for i in range(len(parent))})
        for s in roots:
            s = find(s)
            at = state_dst[s]
            for g in range(n_gen):
                if gen_src[g] == at and g not in succ[s]:
                    step(s, g)
        roots = sorted({find(i) for i in range(len(parent))})
        for s in roots:
            s = find(s)
            at = state_dst[s]
            # composition table: s.f.g == s.(g o f)
            for f in c.arrows_from(at):
                sf = step(s, f)
                for g in c.arrows_from(c.adst[f]):
                    union(step(sf, g), step(find(s), c.compose(g, f)))
            # identities are neutral
            union(step(find(s), c.ident[at]), find(s))
            # inverse pairs cancel
            for k, w in enumerate(inv_list):
                gi = c.n_arrows() + k
                if c.asrc[w] == at:
                    union(step(step(find(s), w), gi), find(s))
                if c.adst[w] == at:
                    union(step(step(find(s), gi), w), find(s))
        had_unions = bool(pending)
        process_unions()
        if len(parent) != n_before or had_unions:
            changed = True

    # states reachable from identities are exactly all states (built that way)
    roots = sorted({find(i) for i in range(len(parent))})
    # quotient arrows = states whose source object is the base point of their word
    arr_states = [s for s in roots]
    sidx = {s: k for k, s in enumerate(arr_states)}
    arrows = []
    for s in arr_states:
        nm = "~".join(
            (c.arrow_names[g] if g < c.n_arrows() else c.arrow_names[inv_list[g - c.n_arrows()]] + "^-")
            for g in word[s]) or f"id_{c.objects[state_src[s]]}"
        arrows.append((nm, state_src[s], state_dst[s]))
    ident = [sidx[find(ident_state[x])] for x in range(c.n_objects())]
    table = {}
    for s in arr_states:
        for t in arr_states:
            if state_dst[t] != state_src[s]:
                continue
            # walk s's word starting from t
            acc = t
            for g in word[s]:
                acc = find(step(find(acc), g))
            process_unions()
            table[(sidx[s], sidx[t])] = sidx[find(acc)]
    loc = FinCat([o for o in c.objects], arrows, ident, table, name=f"{c.name}[W^-1]")
    to_loc = FinFunctor(c, loc, list(range(c.n_objects())),
                        [sidx[find(step(find(ident_state[c.asrc[a]]), a))] for a in range(c.n_arrows())],
                        "loc")
    words = tuple(
        tuple(g if g < c.n_arrows() else -(inv_list[g - c.n_arrows()] + 1)
              for g in word[s])
        for s in arr_states)
    return Localization(loc, to_loc, words)
