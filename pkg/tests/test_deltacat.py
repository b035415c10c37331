import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sectkit.deltacat import (
    ElementsCat,
    SimplexMap,
    SimplexString,
    TruncatedSSet,
    all_maps_up_to,
    classify_map,
    collapse,
    delta_op_category,
    edgewise_reindex,
    edgewise_subdivide,
    enumerate_strings,
    factor_initial,
    factor_reedy,
    left_interval,
    localisation_witnesses,
    monotone_maps,
    nerve,
    precompose_string,
    right_interval,
    simplicial_replacement,
    skip,
    validate_sset,
)
from sectkit.errors import TruncationBudgetError
from sectkit.fincat import chain, group_z2, validate, validate_functor


simplex_maps = st.integers(0, 4).flatmap(
    lambda m: st.integers(0, 4).flatmap(
        lambda n: st.lists(st.integers(0, n), min_size=m + 1, max_size=m + 1)
        .map(sorted)
        .map(lambda v: SimplexMap(m, n, tuple(v)))))


class TestSimplexMap:
    def test_compose_and_identity(self):
        f = SimplexMap(1, 2, (0, 2))
        g = SimplexMap(2, 3, (0, 1, 3))
        assert f.then(g).values == (0, 3)
        assert f.then(SimplexMap.identity(2)) == f

    def test_text_roundtrip(self):
        f = SimplexMap(2, 3, (0, 0, 2))
        assert SimplexMap.parse(f.text()) == f

    @given(simplex_maps)
    def test_reedy_factorisation_recomposes(self, f):
        s, i = factor_reedy(f)
        assert s.is_surjective() and i.is_injective()
        assert s.then(i) == f

    @given(simplex_maps)
    @settings(max_examples=40)
    def test_reedy_factorisation_unique(self, f):
        s0, i0 = factor_reedy(f)
        found = []
        for k in range(min(f.m, f.n) + 1):
            for s in monotone_maps(f.m, k):
                if not s.is_surjective():
                    continue
                for i in monotone_maps(k, f.n):
                    if i.is_injective() and s.then(i) == f:
                        found.append((s, i))
        assert found == [(s0, i0)]

    def test_reedy_example(self):
        f = SimplexMap(3, 3, (0, 0, 2, 3))
        s, i = factor_reedy(f)
        assert s.values == (0, 0, 1, 2)
        assert i.values == (0, 2, 3)


class TestFactorInitial:
    def test_non_initial_flagged(self):
        f = SimplexMap(1, 2, (1, 2))
        got = factor_initial(f)
        assert not got.initial
        assert got.initial_part == f
        assert got.interval_part.is_identity()
        assert "not initial" in got.diagnostic

    def test_already_initial(self):
        f = SimplexMap(1, 2, (0, 2))
        got = factor_initial(f)
        assert got.initial
        assert got.initial_part == SimplexMap(1, 2, (0, 2))
        assert got.interval_part.is_identity()

    def test_left_interval_factor(self):
        f = SimplexMap(1, 3, (0, 1))
        got = factor_initial(f)
        assert got.initial
        assert got.initial_part.is_identity()
        assert got.interval_part == left_interval(1, 3)

    @given(simplex_maps)
    def test_recomposes_with_minimal_interval(self, f):
        got = factor_initial(f)
        assert got.initial_part.then(got.interval_part) == f
        if got.initial:
            assert got.initial_part.values[0] == 0
            assert got.interval_part.is_left_interval()
            # minimality: the interval is the smallest one containing the image
            assert got.interval_part.m == f.values[-1]


class TestClassify:
    def test_left_interval_is_segal_face(self):
        labels = classify_map(left_interval(1, 2))
        assert "segal" in labels and "face" in labels
        assert "anti_segal" not in labels

    def test_right_point_is_anti_segal_anchor_face(self):
        labels = classify_map(SimplexMap(0, 2, (2,)))
        assert {"anti_segal", "anchor", "face"} <= labels
        assert "segal" not in labels

    def test_identity_has_all_labels(self):
        labels = classify_map(SimplexMap.identity(2))
        assert labels == {"segal", "anti_segal", "anchor", "convex", "degeneracy", "face"}

    def test_segal_closed_under_composition(self):
        for f in all_maps_up_to(3):
            if not f.is_left_interval():
                continue
            for g in monotone_maps(f.n, 3):
                if g.is_left_interval():
                    assert f.then(g).is_left_interval()

    def test_degeneracies_closed_under_composition(self):
        for f in all_maps_up_to(3):
            if not f.is_surjective():
                continue
            for g in monotone_maps(f.m, 3):
                if g.is_surjective():
                    assert g.then(f).is_surjective()


class TestNerve:
    def test_walking_arrow_counts(self):
        assert nerve(chain(1), 3).sizes() == (2, 3, 4, 5)

    def test_point_counts(self):
        assert nerve(chain(0), 4).sizes() == (1, 1, 1, 1, 1)

    def test_bz2_counts(self):
        assert nerve(group_z2(), 2).sizes() == (1, 2, 4)

    def test_functoriality(self):
        ok, problems = validate_sset(nerve(chain(1), 3))
        assert ok, problems
        ok, problems = validate_sset(nerve(group_z2(), 2))
        assert ok, problems

    def test_precompose_string(self):
        c = chain(2)
        strings = enumerate_strings(c, 2)
        s = next(x for x in strings if x.arrows and all(not c.is_identity(a) for a in x.arrows))
        collapsed = precompose_string(c, s, SimplexMap(1, 2, (0, 2)))
        assert collapsed.objects == (s.objects[0], s.objects[2])
        assert collapsed.arrows == (c.compose(s.arrows[1], s.arrows[0]),)


class TestReplacement:
    def test_object_counts_match_nerve(self):
        for base in (chain(1), group_z2()):
            rep = simplicial_replacement(base, 2)
            by_dim = [0] * 3
            for o in range(rep.cat.n_objects()):
                by_dim[rep.dim(o)] += 1
            assert tuple(by_dim) == nerve(base, 2).sizes()

    def test_point_replacement(self):
        # one object per dimension; every map factors as a face of the point
        # string followed by a degeneracy (the lifted Reedy factorisation)
        rep = simplicial_replacement(chain(0), 3)
        assert rep.cat.n_objects() == 4
        for a in range(rep.cat.n_arrows()):
            delta = rep.delta(a)
            surj, inj = factor_reedy(delta)
            face = rep.arrow(rep.cat.asrc[a], inj)
            degen = rep.arrow(rep.cat.adst[face], surj)
            assert rep.cat.compose(degen, face) == a
            assert "face" in rep.classify(face)
            assert "degeneracy" in rep.classify(degen)

    def test_carrier_category_valid(self):
        rep = simplicial_replacement(chain(1), 2)
        assert validate(rep.cat, cap=500_000).ok

    def test_head_tail_proj_are_functors(self):
        rep = simplicial_replacement(chain(1), 2)
        assert validate_functor(rep.head).ok
        assert validate_functor(rep.tail).ok
        assert validate_functor(rep.proj).ok

    def test_head_collapses_segal_and_degeneracies(self):
        rep = simplicial_replacement(group_z2(), 2)
        for a in rep.segal_arrows():
            assert rep.base.is_identity(rep.head.ar(a))
        for a in range(rep.cat.n_arrows()):
            if "degeneracy" in rep.classify(a):
                assert rep.base.is_identity(rep.head.ar(a))
                assert rep.base_op.is_identity(rep.tail.ar(a))

    def test_segal_map_head_is_identity_on_walking_arrow(self):
        rep = simplicial_replacement(chain(1), 2)
        c = rep.base
        u = c.arrow_names.index("a01")
        s = rep.string_index[SimplexString((0, 1), (u,))]
        seg = rep.arrow(s, SimplexMap(0, 1, (0,)))
        assert c.is_identity(rep.head.ar(seg))


class TestWitnesses:
    def test_point_zigzags(self):
        rep = simplicial_replacement(chain(0), 3)
        report = localisation_witnesses(rep)
        assert report.ok
        kinds = {z.kind for z in report.zigzags}
        assert "identity" in kinds and "general" in kinds

    def test_walking_arrow_zigzags(self):
        rep = simplicial_replacement(chain(1), 3)
        report = localisation_witnesses(rep)
        assert report.ok
        # every head-identity map got a zigzag
        n_hid = sum(1 for a in range(rep.cat.n_arrows())
                    if rep.base.is_identity(rep.head.ar(a)))
        assert len(report.zigzags) == n_hid

    def test_identity_zigzag_empty(self):
        rep = simplicial_replacement(chain(0), 2)
        report = localisation_witnesses(rep)
        for z in report.zigzags:
            if rep.cat.is_identity(z.arrow):
                assert z.maps == () and z.kind == "identity"


class TestEdgewise:
    def test_k1_is_identity(self):
        x = nerve(chain(1), 2)
        y = edgewise_subdivide(1, x)
        assert y.sizes() == x.sizes()

    def test_k2_on_walking_arrow(self):
        x = nerve(chain(1), 5)
        y = edgewise_subdivide(2, x)
        assert y.sizes() == (3, 5, 7)

    def test_functoriality_of_subdivision(self):
        y = edgewise_subdivide(2, nerve(chain(1), 5))
        ok, problems = validate_sset(y)
        assert ok, problems

    def test_budget_error(self):
        with pytest.raises(TruncationBudgetError):
            edgewise_subdivide(2, nerve(chain(1), 2), N_out=2)

    @given(simplex_maps, st.integers(1, 3))
    @settings(max_examples=30)
    def test_reindex_is_functorial(self, f, k):
        for g in itertools.islice(monotone_maps(f.n, min(f.n + 1, 4)), 5):
            lhs = edgewise_reindex(k, f.then(g))
            rhs = edgewise_reindex(k, f).then(edgewise_reindex(k, g))
            assert lhs == rhs


class TestElements:
    def test_elements_of_point_nerve(self):
        els = ElementsCat(nerve(chain(0), 2))
        assert els.cat.n_objects() == 3
        assert validate(els.cat, cap=200_000).ok

    def test_delta_op_category(self):
        dc = delta_op_category(2)
        assert validate(dc, cap=200_000).ok
        assert dc.n_objects() == 3


def test_generators_compose_to_simplicial_identities():
    # d_j d_i = d_i d_{j-1} for i < j, as maps into [2]
    i, j = 0, 2
    lhs = skip(1, i).then(skip(2, j))
    rhs = skip(1, j - 1).then(skip(2, i))
    assert lhs == rhs
    assert collapse(2, 0).then(collapse(1, 0)) == collapse(2, 1).then(collapse(1, 0))
