"""Split indexed categories and their total categories.

An indexed category is a strict Cat-valued functor on a finite base,
presented fibrewise; the Grothendieck construction produces the associated
opfibration, the transpose produces the fibration over the opposite base
with the same fibres, and both carry their marked (op)cartesian maps, whose
universal property is verifiable by enumeration.  Strictness is exact here:
every finite opfibration is equivalent to a split one, and split data keeps
all downstream checks decidable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .config import DEFAULT_CAP
from .errors import ValidationError
from .fincat import (
    FinCat,
    FinFunctor,
    MapSubset,
    ValidationReport,
    compose_functors,
    guard_cap,
    identity_functor,
    opposite,
    validate_functor,
)


class IndexedCat:
    """A strict Cat-valued functor on a finite category, given fibrewise."""

    __slots__ = ("base", "fibres", "transitions", "name")

    def __init__(self, base: FinCat, fibres: Sequence[FinCat],
                 transitions: Sequence[FinFunctor], name: str = "E"):
        if len(fibres) != base.n_objects() or len(transitions) != base.n_arrows():
            raise ValidationError(f"{name}: need one fibre per object and one transition per arrow")
        self.base = base
        self.fibres = tuple(fibres)
        self.transitions = tuple(transitions)
        self.name = name

    def fibre(self, x: int) -> FinCat:
        return self.fibres[x]

    def transition(self, a: int) -> FinFunctor:
        return self.transitions[a]

    def push(self, a: int, x: int) -> int:
        """Transition applied to a fibre object."""
        return self.transitions[a].ob(x)

    def push_arrow(self, a: int, phi: int) -> int:
        return self.transitions[a].ar(phi)


def constant_indexed(base: FinCat, fibre: FinCat, name: str = "const") -> IndexedCat:
    idf = identity_functor(fibre)
    return IndexedCat(base, [fibre] * base.n_objects(),
                      [idf] * base.n_arrows(), name=name)


def validate_indexed(e: IndexedCat) -> ValidationReport:
    """Strict functoriality: identities to identities, composites on the nose."""
    problems = []
    checked = 0
    for a in range(e.base.n_arrows()):
        t = e.transitions[a]
        if t.dom != e.fibres[e.base.asrc[a]] or t.cod != e.fibres[e.base.adst[a]]:
            problems.append(f"transition of {e.base.arrow_names[a]} has wrong fibres")
        else:
            rep = validate_functor(t)
            checked += rep.checked
            if not rep.ok:
                problems.append(f"transition of {e.base.arrow_names[a]}: {rep.first()}")
    for x in range(e.base.n_objects()):
        checked += 1
        if e.transitions[e.base.ident[x]] != identity_functor(e.fibres[x]):
            problems.append(f"transition of id_{e.base.objects[x]} is not the identity")
    if not problems:
        for g in range(e.base.n_arrows()):
            for f in e.base.arrows_to(e.base.asrc[g]):
                checked += 1
                gf = e.base.compose(g, f)
                lhs = compose_functors(e.transitions[g], e.transitions[f])
                if (lhs.omap, lhs.amap) != (e.transitions[gf].omap, e.transitions[gf].amap):
                    problems.append(
                        f"transition of {e.base.arrow_names[g]} after "
                        f"{e.base.arrow_names[f]} is not strictly the composite")
                    break
            if problems:
                break
    return ValidationReport(not problems, tuple(problems), checked)


@dataclass(frozen=True)
class TotalCat:
    """A total category with projection and marked (op)cartesian maps.

    ``objects[k] = (base object, fibre object)``; ``arrow_data[k]`` is the
    pair (base arrow, fibre component) presenting the arrow.
    """

    total: FinCat
    proj: FinFunctor
    marked: MapSubset
    objects: tuple[tuple[int, int], ...]
    arrow_data: tuple[tuple[int, int], ...]
    kind: str  # "opfibration" | "fibration"

    def object_index(self, c: int, x: int) -> int:
        return self.objects.index((c, x))


def grothendieck_op(e: IndexedCat, cap: int = DEFAULT_CAP) -> TotalCat:
    """The covariant Grothendieck construction of a split indexed category.

    Objects are pairs (c, x); a morphism (c, x) -> (c', x') over f: c -> c'
    is a fibre map f_! x -> x'.  The marked maps are those with invertible
    fibre component; they are exactly the opcartesian ones.
    """
    base = e.base
    objs: list[tuple[int, int]] = []
    for c in range(base.n_objects()):
        for x in range(e.fibre(c).n_objects()):
            objs.append((c, x))
    guard_cap(f"total objects of {e.name}", len(objs), cap)
    opos = {o: i for i, o in enumerate(objs)}
    arrows: list[tuple[str, int, int]] = []
    data: list[tuple[int, int]] = []
    lookup: dict[tuple[int, int, int], int] = {}  # (src total obj, base arrow, phi)
    for i, (c, x) in enumerate(objs):
        for f in base.arrows_from(c):
            fx = e.push(f, x)
            cod_fibre = e.fibre(base.adst[f])
            for x2 in range(cod_fibre.n_objects()):
                for phi in cod_fibre.hom(fx, x2):
                    j = opos[(base.adst[f], x2)]
                    lookup[(i, f, phi)] = len(arrows)
                    arrows.append(
                        (f"({base.arrow_names[f]};{cod_fibre.arrow_names[phi]})", i, j))
                    data.append((f, phi))
                    guard_cap(f"total arrows of {e.name}", len(arrows), cap)
    ident = []
    for i, (c, x) in enumerate(objs):
        ident.append(lookup[(i, base.ident[c], e.fibre(c).ident[x])])
    by_src: dict[int, list[int]] = {}
    for k, (_, s, _) in enumerate(arrows):
        by_src.setdefault(s, []).append(k)
    table: dict[tuple[int, int], int] = {}
    for a1 in range(len(arrows)):
        i1 = arrows[a1][1]
        f1, phi1 = data[a1]
        mid = arrows[a1][2]
        for a2 in by_src.get(mid, ()):
            f2, phi2 = data[a2]
            fibre = e.fibre(base.adst[f2])
            chi = fibre.compose(phi2, e.push_arrow(f2, phi1))
            table[(a2, a1)] = lookup[(i1, base.compose(f2, f1), chi)]
    obj_names = [f"({base.objects[c]},{e.fibre(c).objects[x]})" for (c, x) in objs]
    total = FinCat(obj_names, arrows, ident, table, name=f"tot({e.name})")
    proj = FinFunctor(total, base, [c for (c, _) in objs], [f for (f, _) in data], "proj")
    marked = MapSubset(total, frozenset(
        a for a in range(len(arrows))
        if e.fibre(base.adst[data[a][0]]).is_iso(data[a][1])))
    return TotalCat(total, proj, marked, tuple(objs), tuple(data), "opfibration")


def transpose(e: IndexedCat, cap: int = DEFAULT_CAP) -> TotalCat:
    """The transpose fibration over the opposite base.

    Same objects (c, x); a morphism (c, x) -> (c', z) lying over the base
    arrow g: c' -> c is a fibre map x -> g_! z.  This is the closed form of
    the isomorphism-class-of-cospans description in the split case; marked
    (cartesian) maps are those with invertible component, matching the
    cospans whose fibrewise leg is an identity.
    """
    base = e.base
    base_op = opposite(base)
    objs: list[tuple[int, int]] = []
    for c in range(base.n_objects()):
        for x in range(e.fibre(c).n_objects()):
            objs.append((c, x))
    guard_cap(f"transpose objects of {e.name}", len(objs), cap)
    opos = {o: i for i, o in enumerate(objs)}
    arrows: list[tuple[str, int, int]] = []
    data: list[tuple[int, int]] = []
    # the component does not determine the target when the transition is not
    # injective, so the target object is part of the key
    lookup: dict[tuple[int, int, int, int], int] = {}
    for i, (c, x) in enumerate(objs):
        fib = e.fibre(c)
        for g in base.arrows_to(c):  # g: c' -> c, an arrow c -> c' of the opposite
            c2 = base.asrc[g]
            for z in range(e.fibre(c2).n_objects()):
                gz = e.push(g, z)
                for phi in fib.hom(x, gz):
                    j = opos[(c2, z)]
                    lookup[(i, g, j, phi)] = len(arrows)
                    arrows.append(
                        (f"({base.arrow_names[g]};{fib.arrow_names[phi]})^t", i, j))
                    data.append((g, phi))
                    guard_cap(f"transpose arrows of {e.name}", len(arrows), cap)
    ident = []
    for i, (c, x) in enumerate(objs):
        ident.append(lookup[(i, base.ident[c], i, e.fibre(c).ident[x])])
    by_src: dict[int, list[int]] = {}
    for k, (_, s, _) in enumerate(arrows):
        by_src.setdefault(s, []).append(k)
    table: dict[tuple[int, int], int] = {}
    for a1 in range(len(arrows)):
        i1 = arrows[a1][1]
        g1, phi1 = data[a1]
        mid = arrows[a1][2]
        for a2 in by_src.get(mid, ()):
            g2, phi2 = data[a2]
            fib1 = e.fibre(objs[i1][0])
            chi = fib1.compose(e.push_arrow(g1, phi2), phi1)
            table[(a2, a1)] = lookup[(i1, base.compose(g1, g2), arrows[a2][2], chi)]
    obj_names = [f"({base.objects[c]},{e.fibre(c).objects[x]})^t" for (c, x) in objs]
    total = FinCat(obj_names, arrows, ident, table, name=f"tr({e.name})")
    proj = FinFunctor(total, base_op, [c for (c, _) in objs], [g for (g, _) in data], "proj^t")
    marked = MapSubset(total, frozenset(
        a for a in range(len(arrows))
        if e.fibre(objs[arrows[a][1]][0]).is_iso(data[a][1])))
    return TotalCat(total, proj, marked, tuple(objs), tuple(data), "fibration")


def pullback_indexed(f: FinFunctor, e: IndexedCat) -> IndexedCat:
    """Reindex an indexed category along a functor into its base."""
    if f.cod != e.base:
        raise ValidationError("pullback needs a functor into the base")
    return IndexedCat(f.dom,
                      [e.fibre(f.ob(x)) for x in range(f.dom.n_objects())],
                      [e.transition(f.ar(a)) for a in range(f.dom.n_arrows())],
                      name=f"{f.name}^*{e.name}")


# -- universal-property verification ------------------------------------------


def verify_opcartesian(tc: TotalCat, m: int) -> bool:
    """Check the opcartesian universal property of one arrow by enumeration."""
    t, base = tc.total, tc.proj.cod
    x, y = t.asrc[m], t.adst[m]
    for h in t.arrows_from(x):
        z = t.adst[h]
        for k in base.hom(tc.proj.ob(y), tc.proj.ob(z)):
            if base.compose(k, tc.proj.ar(m)) != tc.proj.ar(h):
                continue
            lifts = [l for l in t.hom(y, z)
                     if tc.proj.ar(l) == k and t.compose(l, m) == h]
            if len(lifts) != 1:
                return False
    return True


def verify_cartesian(tc: TotalCat, m: int) -> bool:
    """Check the cartesian universal property of one arrow by enumeration."""
    t, base = tc.total, tc.proj.cod
    x, y = t.asrc[m], t.adst[m]
    for h in t.arrows_to(y):
        z = t.asrc[h]
        for k in base.hom(tc.proj.ob(z), tc.proj.ob(x)):
            if base.compose(tc.proj.ar(m), k) != tc.proj.ar(h):
                continue
            lifts = [l for l in t.hom(z, x)
                     if tc.proj.ar(l) == k and t.compose(m, l) == h]
            if len(lifts) != 1:
                return False
    return True


def marked_maps_are_exactly_opcartesian(tc: TotalCat) -> bool:
    return all(verify_opcartesian(tc, m) == (m in tc.marked)
               for m in range(tc.total.n_arrows()))


def marked_maps_are_exactly_cartesian(tc: TotalCat) -> bool:
    return all(verify_cartesian(tc, m) == (m in tc.marked)
               for m in range(tc.total.n_arrows()))


def cospan_class_count(e: IndexedCat, g: int, x: int, z: int,
                       cap: int = DEFAULT_CAP) -> int:
    """Isomorphism classes of cospans presenting transpose maps, by brute force.

    For a base arrow g: c' -> c, a fibre object x over c and z over c',
    enumerate cospans x -> y <- z in the total category with fibrewise left
    leg and opcartesian right leg, and quotient by isomorphisms at y.  The
    count must equal |Hom(x, g_! z)|; the closed-form transpose is tested
    against this oracle.
    """
    tc = grothendieck_op(e, cap)
    base = e.base
    c, c2 = base.adst[g], base.asrc[g]
    t = tc.total
    ox = tc.object_index(c, x)
    oz = tc.object_index(c2, z)
    cospans = []
    for y_obj in range(t.n_objects()):
        if tc.objects[y_obj][0] != c:
            continue
        for left in t.hom(ox, y_obj):
            if not base.is_identity(tc.proj.ar(left)):
                continue
            for right in t.hom(oz, y_obj):
                if tc.proj.ar(right) != g or right not in tc.marked:
                    continue
                cospans.append((y_obj, left, right))
    classes: list[tuple[int, int, int]] = []
    for (y1, l1, r1) in cospans:
        found = False
        for (y2, l2, r2) in classes:
            for w in t.hom(y1, y2):
                if (w in tc.marked and base.is_identity(tc.proj.ar(w))
                        and t.compose(w, l1) == l2 and t.compose(w, r1) == r2):
                    found = True
                    break
            if found:
                break
        if not found:
            classes.append((y1, l1, r1))
    return len(classes)


# -- marked fibres -------------------------------------------------------------


@dataclass(frozen=True)
class MarkedIndexedCat:
    """An indexed category with a class of marked maps in every fibre."""

    indexed: IndexedCat
    weq: tuple[frozenset[int], ...]

    def marked(self, c: int) -> frozenset[int]:
        return self.weq[c]

    def is_marked(self, c: int, phi: int) -> bool:
        return phi in self.weq[c]


def mark_isos(e: IndexedCat) -> MarkedIndexedCat:
    return MarkedIndexedCat(e, tuple(f.isos() for f in e.fibres))


def mark_all(e: IndexedCat) -> MarkedIndexedCat:
    return MarkedIndexedCat(e, tuple(frozenset(range(f.n_arrows())) for f in e.fibres))


def check_marked(m: MarkedIndexedCat) -> ValidationReport:
    """Identities marked, closure under composition with isos, transitions preserve marks."""
    e = m.indexed
    problems = []
    checked = 0
    for c in range(e.base.n_objects()):
        fib = e.fibre(c)
        w = m.weq[c]
        for a in w:
            if not (0 <= a < fib.n_arrows()):
                problems.append(f"marking at {e.base.objects[c]} has invalid arrow id")
        for x in range(fib.n_objects()):
            checked += 1
            if fib.ident[x] not in w:
                problems.append(
                    f"marking at {e.base.objects[c]} misses id_{fib.objects[x]}")
        for a in w:
            for i in fib.isos():
                if fib.adst[a] == fib.asrc[i] and fib.compose(i, a) not in w:
                    problems.append(
                        f"marking at {e.base.objects[c]} not closed under postcomposition "
                        f"with iso {fib.arrow_names[i]}")
                if fib.adst[i] == fib.asrc[a] and fib.compose(a, i) not in w:
                    problems.append(
                        f"marking at {e.base.objects[c]} not closed under precomposition "
                        f"with iso {fib.arrow_names[i]}")
                checked += 2
    for f in range(e.base.n_arrows()):
        c, c2 = e.base.asrc[f], e.base.adst[f]
        for a in m.weq[c]:
            checked += 1
            if e.push_arrow(f, a) not in m.weq[c2]:
                problems.append(
                    f"transition of {e.base.arrow_names[f]} does not preserve the marking "
                    f"(image of {e.fibre(c).arrow_names[a]})")
    return ValidationReport(not problems, tuple(sorted(set(problems))), checked)


def has_two_of_three(m: MarkedIndexedCat) -> tuple[bool, str]:
    """Whether every fibre marking satisfies two-out-of-three."""
    e = m.indexed
    for c in range(e.base.n_objects()):
        fib = e.fibre(c)
        w = m.weq[c]
        for g in range(fib.n_arrows()):
            for f in fib.arrows_to(fib.asrc[g]):
                gf = fib.compose(g, f)
                flags = (f in w, g in w, gf in w)
                if sum(flags) == 2 and not all(flags):
                    return (False,
                            f"two-of-three fails at {e.base.objects[c]} on "
                            f"({fib.arrow_names[g]}, {fib.arrow_names[f]})")
    return (True, "")
