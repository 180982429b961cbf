import pytest
from hypothesis import given, settings

from conftest import set_map, set_maps
from nwfs.arrows import Square, as_arrow, generating_squares, identity_square
from nwfs.catalog import get_gens
from nwfs.core import (
    IncompatibleInput,
    compose_maps,
    identity_map,
    is_injective,
    maps_equal,
    validate,
)
from nwfs.onestep import build_onestep, onestep_on_square

POINT = get_gens("point")
CODIAG = get_gens("codiagonal")


def test_generating_squares_counts_for_point():
    g = set_map(2, 3, [1, 1])
    squares = generating_squares(POINT, as_arrow(g))
    # the generator has an empty domain, so squares = elements of the target
    assert [sq.bottom.components["0"][0] for _, sq in squares] == [0, 1, 2]


def test_point_step_is_plain_coproduct():
    g = set_map(2, 3, [1, 1])
    step = build_onestep(POINT, as_arrow(g))
    assert step.mid.sizes == {"0": 5}
    assert maps_equal(compose_maps(step.right, step.left), g)
    assert is_injective(step.left)
    # left embeds the source first, cells append the target afterwards
    assert step.left.components["0"] == {0: 0, 1: 1}
    assert step.right.components["0"] == {0: 1, 1: 1, 2: 0, 3: 1, 4: 2}


def test_codiagonal_step_is_kernel_quotient():
    g = set_map(4, 2, [0, 0, 1, 1])
    step = build_onestep(CODIAG, as_arrow(g))
    # gluing both members of every fiber collapses onto the image
    assert step.mid.sizes == {"0": 2}
    assert maps_equal(compose_maps(step.right, step.left), g)
    assert validate(step.mid) == []


def test_step_with_no_squares_is_trivial():
    g = set_map(0, 0, [])
    step = build_onestep(POINT, as_arrow(g))
    assert step.squares == ()
    assert step.mid.sizes == {"0": 0}
    assert maps_equal(compose_maps(step.right, step.left), g)


@given(set_maps())
@settings(max_examples=50)
def test_step_factors_the_arrow(g):
    for gens in (POINT, CODIAG):
        step = build_onestep(gens, as_arrow(g))
        assert maps_equal(compose_maps(step.right, step.left), g)
        assert validate(step.mid) == []
        assert validate(step.left) == [] and validate(step.right) == []


@given(set_maps(max_size=4))
@settings(max_examples=40)
def test_step_cocone_is_jointly_surjective(g):
    step = build_onestep(CODIAG, as_arrow(g))
    covered = set(step.left.components["0"].values())
    for n in range(len(step.squares)):
        covered |= set(step.cell_leg(n).components["0"].values())
    assert covered == set(step.mid.at("0"))


def test_identity_square_induces_identity():
    g = as_arrow(set_map(3, 2, [0, 1, 0]))
    step = build_onestep(CODIAG, g)
    induced = onestep_on_square(CODIAG, identity_square(g), source_step=step, target_step=step)
    assert maps_equal(induced, identity_map(step.mid))


def test_on_square_is_functorial():
    f = as_arrow(set_map(2, 2, [0, 0]))
    g = as_arrow(set_map(3, 2, [0, 0, 1]))
    h = as_arrow(set_map(3, 3, [0, 1, 1]))
    sq1 = Square(source=f, target=g, top=set_map(2, 3, [1, 0]), bottom=set_map(2, 2, [0, 1]))
    sq2 = Square(source=g, target=h, top=set_map(3, 3, [0, 0, 1]), bottom=set_map(2, 3, [0, 1]))
    sf, sg, sh = (build_onestep(POINT, a) for a in (f, g, h))
    one = onestep_on_square(POINT, sq1, source_step=sf, target_step=sg)
    two = onestep_on_square(POINT, sq2, source_step=sg, target_step=sh)
    both = onestep_on_square(
        POINT,
        Square(source=f, target=h, top=compose_maps(sq2.top, sq1.top), bottom=compose_maps(sq2.bottom, sq1.bottom)),
        source_step=sf,
        target_step=sh,
    )
    assert maps_equal(both, compose_maps(two, one))


def test_on_square_commutes_with_the_step_halves():
    f = as_arrow(set_map(2, 2, [0, 0]))
    g = as_arrow(set_map(3, 2, [0, 0, 1]))
    sq = Square(source=f, target=g, top=set_map(2, 3, [0, 0]), bottom=set_map(2, 2, [0, 1]))
    sf, sg = build_onestep(POINT, f), build_onestep(POINT, g)
    induced = onestep_on_square(POINT, sq, source_step=sf, target_step=sg)
    assert maps_equal(compose_maps(induced, sf.left), compose_maps(sg.left, sq.top))
    assert maps_equal(compose_maps(sg.right, induced), compose_maps(sq.bottom, sf.right))


def test_on_square_rejects_noncommuting_input():
    f = as_arrow(set_map(1, 1, [0]))
    g = as_arrow(set_map(2, 2, [0, 1]))
    bad = Square(source=f, target=g, top=set_map(1, 2, [0]), bottom=set_map(1, 2, [1]))
    with pytest.raises(IncompatibleInput):
        onestep_on_square(POINT, bad)


def test_new_cell_rides_above_the_old_one():
    # factoring the generator itself: the induced endo-map of middles sends
    # the original cell onto the cell of the pasted square, not onto itself
    j = POINT.members[0]
    s0 = build_onestep(POINT, j)
    assert s0.mid.sizes == {"0": 1}
    rho = as_arrow(s0.right)
    s1 = build_onestep(POINT, rho)
    assert s1.mid.sizes == {"0": 2}
    lift = onestep_on_square(
        POINT,
        Square(source=j, target=rho, top=s0.left, bottom=identity_map(j.f.target)),
        source_step=s0,
        target_step=s1,
    )
    assert lift.components["0"] == {0: 1}
    assert s1.left.components["0"] == {0: 0}
