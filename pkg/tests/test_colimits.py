import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from conftest import finset, parallel_pairs, set_map, set_maps
from nwfs.catalog import get_category, representable
from nwfs.colimits import chain_colimit, coequalizer, coproduct, induce, initial, pushout, quotient
from nwfs.core import (
    IncompatibleInput,
    compose_maps,
    enumerate_maps,
    is_injective,
    is_iso,
    is_surjective,
    maps_equal,
    validate,
)


def closure_oracle(X, pairs):
    """Independent congruence closure: saturate pairs under all actions,
    then compute equivalence classes by repeated merging over frozensets."""
    classes = {a: {x: frozenset([x]) for x in X.at(a)} for a in X.base.objects}
    work = [(a, x, y) for a, x, y in pairs]
    while work:
        a, x, y = work.pop()
        cx, cy = classes[a][x], classes[a][y]
        if cx == cy:
            continue
        merged = cx | cy
        for z in merged:
            classes[a][z] = merged
        for m in X.base.morphisms:
            if m.cod == a:
                for u in cx:
                    for v in cy:
                        work.append((m.dom, X.act(m.name, u), X.act(m.name, v)))
    return {a: {frozenset(c) for c in classes[a].values()} for a in X.base.objects}


def test_initial_is_empty():
    base = get_category("delta<=1")
    empty = initial(base)
    assert empty.total_size == 0
    assert validate(empty) == []


def test_quotient_matches_independent_closure():
    base = get_category("delta<=1")
    edge = representable(base, "1")
    two = coproduct([edge, edge])
    X = two.apex
    nondeg = edge.at("1")[-1]  # carrier is sorted by hom name, identity last
    # glue one endpoint of the first edge to the other endpoint of the second
    tip = two.legs[0].at("0", edge.act("f01_1", nondeg))
    tail = two.legs[1].at("0", edge.act("f01_0", nondeg))
    cone = quotient(X, [("0", tip, tail)])
    oracle = closure_oracle(X, [("0", tip, tail)])
    proj = cone.legs[0]
    for a in base.objects:
        got = {}
        for x in X.at(a):
            got.setdefault(proj.at(a, x), set()).add(x)
        assert {frozenset(c) for c in got.values()} == oracle[a]
    assert validate(cone.apex) == []
    # a path of two edges: 3 vertices, 2 nondegenerate + 3 degenerate edges
    assert cone.apex.sizes == {"0": 3, "1": 5}


def test_quotient_propagates_along_actions():
    base = get_category("delta<=1")
    edge = representable(base, "1")
    two = coproduct([edge, edge])
    nondeg = edge.at("1")[-1]
    # glue the two nondegenerate edges themselves: endpoints must follow
    e0 = two.legs[0].at("1", nondeg)
    e1 = two.legs[1].at("1", nondeg)
    cone = quotient(two.apex, [("1", e0, e1)])
    assert cone.apex.sizes == {"0": 2, "1": 3}
    oracle = closure_oracle(two.apex, [("1", e0, e1)])
    assert sorted(len(c) for c in oracle["0"]) == [2, 2]


def test_coproduct_legs_partition_the_apex():
    parts = [finset(2), finset(0), finset(3)]
    cone = coproduct(parts)
    assert cone.apex.sizes == {"0": 5}
    seen = set()
    for part, leg in zip(parts, cone.legs):
        assert is_injective(leg)
        img = set(leg.components["0"].values())
        assert not (img & seen)
        seen |= img
    assert seen == set(cone.apex.at("0"))


@given(parallel_pairs())
@settings(max_examples=60)
def test_coequalizer_universal_property(pair):
    f, g = pair
    cone = coequalizer(f, g)
    proj = cone.legs[0]
    assert is_surjective(proj)
    assert maps_equal(compose_maps(proj, f), compose_maps(proj, g))
    T = finset(3)
    for h in enumerate_maps(f.target, T):
        if not maps_equal(compose_maps(h, f), compose_maps(h, g)):
            continue
        u = induce(cone, [h])
        assert maps_equal(compose_maps(u, proj), h)
        matches = [v for v in enumerate_maps(cone.apex, T) if maps_equal(compose_maps(v, proj), h)]
        assert len(matches) == 1


@given(st.data())
@settings(max_examples=60)
def test_pushout_square_and_mono_preservation(data):
    f = data.draw(set_maps(max_size=5))
    n = len(f.source.at("0"))
    m = data.draw(st.integers(1, 4)) if n else data.draw(st.integers(0, 4))
    g = set_map(n, m, [data.draw(st.integers(0, m - 1)) for _ in range(n)])
    cone = pushout(f, g)
    left, right = cone.legs
    assert maps_equal(compose_maps(left, f), compose_maps(right, g))
    covered = set(left.components["0"].values()) | set(right.components["0"].values())
    assert covered == set(cone.apex.at("0"))
    if is_injective(f):
        assert is_injective(right)


def test_pushout_of_disjoint_corners_is_a_coproduct():
    f = set_map(0, 2, [])
    g = set_map(0, 3, [])
    cone = pushout(f, g)
    assert cone.apex.sizes == {"0": 5}
    assert is_injective(cone.legs[0]) and is_injective(cone.legs[1])


def test_chain_colimit_stabilizing_chain():
    steps = [set_map(2, 3, [0, 1]), set_map(3, 3, [0, 1, 2]), set_map(3, 3, [0, 1, 2])]
    cone = chain_colimit(steps)
    assert cone.apex.sizes == {"0": 3}
    for i, leg in enumerate(cone.legs[:-1]):
        assert maps_equal(leg, compose_maps(cone.legs[i + 1], steps[i]))
    assert is_iso(cone.legs[-1])


def test_chain_colimit_with_collapsing_links():
    steps = [set_map(3, 2, [0, 0, 1]), set_map(2, 1, [0, 0])]
    cone = chain_colimit(steps)
    assert cone.apex.sizes == {"0": 1}
    assert all(is_surjective(leg) for leg in cone.legs)


def test_induce_rejects_disagreeing_targets():
    f = set_map(1, 2, [0])
    g = set_map(1, 2, [1])
    cone = coequalizer(f, g)  # glues the two target elements
    h = set_map(2, 2, [0, 1])  # does not respect the gluing
    with pytest.raises(IncompatibleInput):
        induce(cone, [h])


def test_induce_folds_coproduct():
    cone = coproduct([finset(2), finset(3)])
    h0 = set_map(2, 3, [0, 1])
    h1 = set_map(3, 3, [0, 1, 2])
    folded = induce(cone, [h0, h1])
    assert maps_equal(compose_maps(folded, cone.legs[0]), h0)
    assert maps_equal(compose_maps(folded, cone.legs[1]), h1)
