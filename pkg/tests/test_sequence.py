import random

import pytest
from hypothesis import given, settings

from conftest import random_set_map, set_map, set_maps
from nwfs.arrows import Square, as_arrow
from nwfs.catalog import get_gens
from nwfs.core import IncompatibleInput, compose_maps, identity_map, is_iso, maps_equal
from nwfs.onestep import build_onestep, onestep_on_square
from nwfs.sequence import (
    FREE,
    PLAIN,
    OrdinalBudget,
    build_comparison,
    run_free,
    run_plain,
)

POINT = get_gens("point")
CODIAG = get_gens("codiagonal")


def test_budget_rejects_nonsense():
    with pytest.raises(IncompatibleInput):
        OrdinalBudget(successors_per_block=0)
    with pytest.raises(IncompatibleInput):
        OrdinalBudget(successors_per_block=3, omega_blocks=0)


def test_plain_point_growth_follows_the_recurrence():
    # with a single empty-domain generator each step glues one fresh copy of
    # the target, so the middles grow by |D| every stage
    g = set_map(2, 3, [0, 2])
    state = run_plain(POINT, g, budget=OrdinalBudget(5, 1))
    expected = [2 + 3 * n for n in range(6)]
    assert [s.mid.total_size for s in state.stages] == expected
    assert state.converged_at is None and state.exhausted
    assert state.mode == PLAIN


def test_free_point_run_stops_immediately():
    g = set_map(2, 3, [0, 2])
    state = run_free(POINT, g)
    assert state.mode == FREE
    assert state.converged_at == 1
    assert not state.exhausted
    assert state.stages[1].mid.total_size == 5


def test_free_codiagonal_is_image_factorisation():
    rng = random.Random(7)
    for _ in range(10):
        g = random_set_map(rng, max_size=5, min_source=1)
        state = run_free(CODIAG, g)
        assert state.converged_at is not None
        stage = state.stages[state.converged_at]
        image_size = len(set(g.components["0"].values()))
        assert stage.mid.total_size == image_size


def test_every_stage_factors_the_arrow():
    g = set_map(3, 2, [0, 0, 1])
    for state in (run_free(POINT, g, budget=OrdinalBudget(3, 1)),
                  run_plain(POINT, g, budget=OrdinalBudget(3, 1))):
        for stage in state.stages:
            assert maps_equal(compose_maps(stage.right, stage.left), g)
        for i, link in enumerate(state.links):
            assert maps_equal(state.stages[i + 1].left, compose_maps(link, state.stages[i].left))
            assert maps_equal(compose_maps(state.stages[i + 1].right, link), state.stages[i].right)


def test_folds_collapse_the_step_middles():
    g = set_map(2, 2, [0, 0])
    state = run_free(POINT, g, budget=OrdinalBudget(3, 1), stop_at_convergence=False)
    for i, fold in enumerate(state.folds):
        if fold is None:
            continue
        step = state.steps[i]
        assert maps_equal(state.links[i], compose_maps(fold, step.left))
        u1, u2 = state.pairs[i] if state.pairs[i] else (None, None)
        if u1 is not None:
            assert maps_equal(compose_maps(fold, u1), compose_maps(fold, u2))


def test_first_coequalizer_pair_is_the_pinned_one():
    g = set_map(2, 3, [1, 1])
    state = run_free(POINT, g, budget=OrdinalBudget(2, 1), stop_at_convergence=False)
    s0 = build_onestep(POINT, as_arrow(g))
    s1 = build_onestep(POINT, as_arrow(state.stages[1].right))
    first, second = state.pairs[1]
    assert maps_equal(first, s1.left)
    expected_second = onestep_on_square(
        POINT,
        Square(
            source=as_arrow(g),
            target=as_arrow(state.stages[1].right),
            top=state.links[0],
            bottom=identity_map(g.target),
        ),
        source_step=s0,
        target_step=s1,
    )
    assert maps_equal(second, expected_second)


def test_limit_stage_bookkeeping():
    g = set_map(2, 2, [0, 0])
    state = run_free(POINT, g, budget=OrdinalBudget(2, 3), stop_at_convergence=False)
    kinds = [s.kind for s in state.stages]
    assert kinds == ["zero", "onestep", "successor", "limit", "successor", "successor",
                     "limit", "successor", "successor"]
    ordinals = [s.ordinal for s in state.stages]
    assert ordinals == ["0", "1", "2", "ω", "ω+1", "ω+2", "ω·2", "ω·2+1", "ω·2+2"]
    limit = state.stages[3]
    assert limit.cocone is not None
    # the limit cocone legs commute with the links below it
    for i in range(3):
        assert maps_equal(limit.cocone.legs[i], state.connect(i, 3))


def test_connect_composes_links():
    g = set_map(1, 2, [0])
    state = run_plain(POINT, g, budget=OrdinalBudget(3, 1), stop_at_convergence=False)
    assert maps_equal(state.connect(0, 0), identity_map(state.stages[0].mid))
    two_step = compose_maps(state.links[1], state.links[0])
    assert maps_equal(state.connect(0, 2), two_step)
    with pytest.raises(IncompatibleInput):
        state.connect(2, 99)


def test_convergence_detection_is_sound():
    g = set_map(3, 2, [0, 1, 1])
    state = run_free(CODIAG, g)
    gamma = state.converged_at
    assert gamma is not None
    assert is_iso(state.links[gamma])
    assert all(not is_iso(state.links[i]) for i in range(gamma))


@given(set_maps(max_size=4))
@settings(max_examples=25, deadline=None)
def test_comparison_is_componentwise_surjective(g):
    budget = OrdinalBudget(3, 1)
    free = run_free(POINT, g, budget=budget, stop_at_convergence=False)
    plain = run_plain(POINT, g, budget=budget, stop_at_convergence=False)
    report = build_comparison(free, plain)
    assert report.ok
    assert len(report.maps) == len(free.stages) == len(plain.stages)
    assert maps_equal(report.maps[0], identity_map(g.source))


def test_comparison_rejects_mismatched_runs():
    g = set_map(2, 2, [0, 1])
    h = set_map(2, 2, [0, 0])
    free = run_free(POINT, g, budget=OrdinalBudget(2, 1), stop_at_convergence=False)
    plain = run_plain(POINT, h, budget=OrdinalBudget(2, 1), stop_at_convergence=False)
    with pytest.raises(IncompatibleInput):
        build_comparison(free, plain)


def test_comparison_crosses_limit_stages():
    g = set_map(2, 2, [0, 0])
    budget = OrdinalBudget(2, 2)
    free = run_free(POINT, g, budget=budget, stop_at_convergence=False)
    plain = run_plain(POINT, g, budget=budget, stop_at_convergence=False)
    report = build_comparison(free, plain)
    assert report.ok


def test_work_counters_are_deterministic():
    g = set_map(2, 3, [0, 1])
    a = run_free(POINT, g).work
    b = run_free(POINT, g).work
    assert a == b
    assert set(a) == {"stages", "steps_built", "squares", "elements"}
