"""Algebra structures for the one-step factorisation and lifting tables.

An algebra structure on an arrow g retracts the one-step middle back onto
g's domain compatibly with both factorisation halves. A lifting table picks
one diagonal filler for every generating square into g. The two notions
determine each other: cells go to fillers by composing with the structure
map, and fillers induce a structure map through the pushout because the top
triangle of each filler agrees with the identity on everything the pushout
glues. `check_bijection` verifies that correspondence exhaustively and
compares the counts against the product of the per-square filler counts.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

from .arrows import (
    ArrowObj,
    GeneratingSet,
    Square,
    as_arrow,
    components_key,
    generating_squares,
    square_key,
)
from .colimits import induce
from .core import (
    IncompatibleInput,
    InternalCheckFailed,
    PresheafMap,
    compose_maps,
    enumerate_maps,
    identity_map,
    inverse_map,
    maps_equal,
)
from .onestep import OneStepFactorization, build_onestep
from .sequence import SequenceState


@dataclass(frozen=True)
class AlgebraStructure:
    """A structure map for the one-step factorisation of `target`.

    `structure` runs from the step middle back to the arrow's domain; it
    restricts to the identity along the left half and covers the right half
    over the arrow itself.
    """

    target: ArrowObj
    structure: PresheafMap
    step: OneStepFactorization


def validate_algebra(alg: AlgebraStructure) -> list[str]:
    out = []
    p, step = alg.structure, alg.step
    if compose_maps(p, step.left).components != identity_map(alg.target.dom).components:
        out.append("structure map does not retract the left half")
    if compose_maps(alg.target.f, p).components != step.right.components:
        out.append("structure map does not cover the right half")
    return out


@dataclass(frozen=True)
class LiftingTable:
    """One chosen diagonal filler per generating square into `target`."""

    target: ArrowObj
    gens: GeneratingSet
    squares: tuple[tuple[int, Square], ...]
    fillers: tuple[PresheafMap, ...]

    @cached_property
    def _index(self) -> dict[tuple, PresheafMap]:
        return {
            square_key(i, s): filler
            for (i, s), filler in zip(self.squares, self.fillers)
        }

    def lookup(self, gen_index: int, sq: Square) -> PresheafMap:
        if components_key(sq.target.f) != components_key(self.target.f):
            raise IncompatibleInput("lookup: square lands in a different arrow")
        filler = self._index.get(square_key(gen_index, sq))
        if filler is None:
            raise IncompatibleInput("lookup: square not present in the table")
        return filler


def validate_table(table: LiftingTable) -> list[str]:
    out = []
    for n, ((i, sq), filler) in enumerate(zip(table.squares, table.fillers)):
        j = table.gens.members[i]
        if compose_maps(filler, j.f).components != sq.top.components:
            out.append(f"filler {n} breaks the top triangle")
        if compose_maps(table.target.f, filler).components != sq.bottom.components:
            out.append(f"filler {n} breaks the bottom triangle")
    return out


def extract_algebra(state: SequenceState) -> AlgebraStructure:
    """Read the algebra off a converged free run.

    At the converged stage the connecting map is invertible, so the fold
    followed by that inverse retracts the step middle onto the stage middle.
    """
    gamma = state.converged_at
    if gamma is None:
        raise IncompatibleInput("extract_algebra needs a converged run")
    step = state.steps[gamma]
    if step is None:
        raise InternalCheckFailed("converged stage is missing its one-step data")
    fold = state.folds[gamma]
    if fold is None:
        fold = identity_map(step.mid)
    p = compose_maps(inverse_map(state.links[gamma]), fold)
    alg = AlgebraStructure(target=ArrowObj(state.stages[gamma].right), structure=p, step=step)
    problems = validate_algebra(alg)
    if problems:
        raise InternalCheckFailed(f"extracted algebra is invalid: {problems[0]}")
    return alg


def fillers_from_algebra(alg: AlgebraStructure) -> LiftingTable:
    """Solve every generating square by routing its cell through the structure map."""
    fillers = tuple(
        compose_maps(alg.structure, alg.step.cell_leg(n))
        for n in range(len(alg.step.squares))
    )
    table = LiftingTable(
        target=alg.target,
        gens=alg.step.gens,
        squares=alg.step.squares,
        fillers=fillers,
    )
    problems = validate_table(table)
    if problems:
        raise InternalCheckFailed(f"derived table is invalid: {problems[0]}")
    return table


def algebra_from_fillers(
    table: LiftingTable, step: OneStepFactorization | None = None
) -> AlgebraStructure:
    """Induce the structure map from a full table of fillers.

    Well-definedness over the pushout comes from the top triangles, which is
    re-checked during induction.
    """
    if step is None:
        step = build_onestep(table.gens, table.target)
    if len(step.squares) != len(table.squares):
        raise IncompatibleInput("table does not cover the generating squares of its arrow")
    C = table.target.dom
    base = C.base
    if table.fillers:
        cells_target = induce(step.gen_codomains, list(table.fillers))
    else:
        cells_target = PresheafMap(step.gen_codomains.apex, C, {a: {} for a in base.objects})
    p = induce(step.factorisation_cocone(), [identity_map(C), cells_target])
    alg = AlgebraStructure(target=table.target, structure=p, step=step)
    problems = validate_algebra(alg)
    if problems:
        raise InternalCheckFailed(f"induced algebra is invalid: {problems[0]}")
    return alg


def _filler_candidates(j: ArrowObj, g: ArrowObj, sq: Square) -> list[PresheafMap]:
    """All diagonal fillers of one square, by constrained enumeration."""
    base = g.f.source.base
    pinned: dict[tuple[str, int], int] = {}
    for a in base.objects:
        for x in j.dom.carrier[a]:
            spot = (a, j.f.components[a][x])
            want = sq.top.components[a][x]
            if pinned.get(spot, want) != want:
                return []
            pinned[spot] = want
    allowed = {
        (a, u): tuple(
            c for c in g.dom.carrier[a] if g.f.components[a][c] == sq.bottom.components[a][u]
        )
        for a in base.objects
        for u in j.cod.carrier[a]
    }
    return enumerate_maps(j.cod, g.dom, pinned=pinned, allowed=allowed)


def square_filler_sets(
    gens: GeneratingSet, g: PresheafMap | ArrowObj
) -> tuple[tuple[tuple[int, Square], ...], list[list[PresheafMap]]]:
    """Per generating square, every filler it admits."""
    arrow = as_arrow(g)
    squares = tuple(generating_squares(gens, arrow))
    sets = [_filler_candidates(gens.members[i], arrow, sq) for i, sq in squares]
    return squares, sets


def enumerate_lifting_tables(gens: GeneratingSet, g: PresheafMap | ArrowObj) -> list[LiftingTable]:
    """Every lifting table on g, as the product of the per-square filler sets.

    Exhaustive by design; meant for small instances.
    """
    arrow = as_arrow(g)
    squares, sets = square_filler_sets(gens, arrow)
    if any(not s for s in sets):
        return []
    return [
        LiftingTable(target=arrow, gens=gens, squares=squares, fillers=choice)
        for choice in itertools.product(*sets)
    ]


def enumerate_algebra_structures(
    gens: GeneratingSet, g: PresheafMap | ArrowObj
) -> list[AlgebraStructure]:
    """Every algebra structure on the one-step factorisation of g.

    The structure map is pinned to the identity on the image of the left
    half and constrained over the right half elementwise, so the search
    space is the genuine solution space rather than all maps.
    """
    arrow = as_arrow(g)
    step = build_onestep(gens, arrow)
    C = arrow.dom
    base = C.base
    pinned: dict[tuple[str, int], int] = {}
    for a in base.objects:
        for c in C.carrier[a]:
            spot = (a, step.left.components[a][c])
            if pinned.get(spot, c) != c:
                return []
            pinned[spot] = c
    allowed = {
        (a, u): tuple(
            c for c in C.carrier[a] if arrow.f.components[a][c] == step.right.components[a][u]
        )
        for a in base.objects
        for u in step.mid.carrier[a]
    }
    return [
        AlgebraStructure(target=arrow, structure=p, step=step)
        for p in enumerate_maps(step.mid, C, pinned=pinned, allowed=allowed)
    ]


@dataclass(frozen=True)
class BijectionReport:
    algebra_count: int
    table_count: int
    product_count: int
    problems: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.problems and self.algebra_count == self.table_count == self.product_count


def check_bijection(gens: GeneratingSet, g: PresheafMap | ArrowObj) -> BijectionReport:
    """Exhaustively verify that algebras and tables determine each other."""
    arrow = as_arrow(g)
    algebras = enumerate_algebra_structures(gens, arrow)
    tables = enumerate_lifting_tables(gens, arrow)
    _, sets = square_filler_sets(gens, arrow)
    product_count = math.prod(len(s) for s in sets)
    problems: list[str] = []

    if len(algebras) != len(tables):
        problems.append(f"{len(algebras)} algebras against {len(tables)} tables")

    step = algebras[0].step if algebras else None
    table_keys = {
        tuple(components_key(f) for f in t.fillers): n for n, t in enumerate(tables)
    }
    hit = set()
    for n, alg in enumerate(algebras):
        t = fillers_from_algebra(alg)
        key = tuple(components_key(f) for f in t.fillers)
        m = table_keys.get(key)
        if m is None:
            problems.append(f"algebra {n} maps to a table outside the enumeration")
            continue
        if m in hit:
            problems.append(f"algebras collide on table {m}")
        hit.add(m)
        back = algebra_from_fillers(t, step=alg.step)
        if not maps_equal(back.structure, alg.structure):
            problems.append(f"round trip through tables moves algebra {n}")
    for m, t in enumerate(tables):
        back = fillers_from_algebra(algebra_from_fillers(t, step=step))
        if not all(maps_equal(a, b) for a, b in zip(back.fillers, t.fillers)):
            problems.append(f"round trip through algebras moves table {m}")
    return BijectionReport(
        algebra_count=len(algebras),
        table_count=len(tables),
        product_count=product_count,
        problems=tuple(problems),
    )


def compose_lifting_tables(first: LiftingTable, second: LiftingTable) -> LiftingTable:
    """Table for the composite arrow, given tables for both factors.

    `first` solves squares into the arrow applied first. A square into the
    composite is solved in two moves: push its top through the first arrow
    and lift against `second`, then use that lift as the bottom of a square
    solved by `first`.
    """
    if first.gens != second.gens:
        raise IncompatibleInput("compose_lifting_tables: tables use different generating sets")
    f, g = first.target, second.target
    composite = as_arrow(compose_maps(g.f, f.f))
    gens = first.gens
    squares = tuple(generating_squares(gens, composite))
    fillers = []
    for i, sq in squares:
        j = gens.members[i]
        through = second.lookup(
            i,
            Square(source=j, target=g, top=compose_maps(f.f, sq.top), bottom=sq.bottom),
        )
        fillers.append(
            first.lookup(i, Square(source=j, target=f, top=sq.top, bottom=through))
        )
    table = LiftingTable(target=composite, gens=gens, squares=squares, fillers=tuple(fillers))
    problems = validate_table(table)
    if problems:
        raise InternalCheckFailed(f"composite table is invalid: {problems[0]}")
    return table
