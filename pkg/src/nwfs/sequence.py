"""Iterated factorisation sequences and the comparison between them.

Two modes share the bookkeeping. The free mode folds each new step back onto
the previous one with a coequalizer, so cells that an earlier stage already
provided get identified instead of duplicated; convergence at a finite stage
is then detectable as the connecting map becoming an isomorphism. The plain
mode just re-applies the step and never identifies anything.

Budgets are organised in blocks of successor steps. Between blocks the
sequence passes to the colimit of the chain built so far (a limit stage); in
free mode the first step after a limit stage coequalizes against the whole
chain rather than a single predecessor. Limit-stage connecting maps are the
last legs of a finite chain colimit and are isomorphisms by construction, so
they are excluded from the convergence test.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arrows import ArrowObj, GeneratingSet, Square, as_arrow
from .colimits import Cocone, chain_colimit, coequalizer, induce
from .core import (
    IncompatibleInput,
    Presheaf,
    PresheafMap,
    compose_maps,
    identity_map,
    is_iso,
    is_surjective,
)
from .onestep import OneStepFactorization, build_onestep, onestep_on_square

FREE = "free"
PLAIN = "plain"


@dataclass(frozen=True)
class OrdinalBudget:
    """How far a run may iterate.

    `successors_per_block` bounds the successor steps inside one block and
    `omega_blocks` is the number of blocks; a limit stage is interposed
    between consecutive blocks, so a budget of b blocks allows b - 1 limit
    stages.
    """

    successors_per_block: int = 32
    omega_blocks: int = 1

    def __post_init__(self):
        if self.successors_per_block < 1:
            raise IncompatibleInput("successors_per_block must be at least 1")
        if self.omega_blocks < 1:
            raise IncompatibleInput("omega_blocks must be at least 1")


@dataclass(frozen=True)
class Stage:
    """One stage of a factorisation sequence: C -> mid -> D."""

    index: int
    ordinal: str
    kind: str  # "zero", "onestep", "successor" or "limit"
    mid: Presheaf
    left: PresheafMap
    right: PresheafMap
    cocone: Cocone | None = None  # the chain colimit cocone, limit stages only


@dataclass(frozen=True)
class SequenceState:
    """A finished (converged or exhausted) run of either sequence.

    Indexing: `links[i]` connects stage i to stage i + 1, `steps[i]` is the
    one-step factorisation of stage i's right part when it was needed, and
    for the free mode `folds[i]` maps that step's middle onto stage i + 1.
    `pairs[i]` records the parallel pair whose coequalizer produced stage
    i + 1, when one was taken.
    """

    mode: str
    gens: GeneratingSet
    arrow: ArrowObj
    budget: OrdinalBudget
    stages: tuple[Stage, ...]
    links: tuple[PresheafMap, ...]
    steps: tuple[OneStepFactorization | None, ...]
    folds: tuple[PresheafMap | None, ...]
    pairs: tuple[tuple[PresheafMap, PresheafMap] | None, ...]
    converged_at: int | None
    exhausted: bool

    def connect(self, i: int, j: int) -> PresheafMap:
        """The composite connecting map from stage i to stage j."""
        if not 0 <= i <= j < len(self.stages):
            raise IncompatibleInput(f"connect({i}, {j}) out of range for {len(self.stages)} stages")
        out = identity_map(self.stages[i].mid)
        for k in range(i, j):
            out = compose_maps(self.links[k], out)
        return out

    @property
    def cardinalities(self) -> list[dict[str, int]]:
        return [stage.mid.sizes for stage in self.stages]

    @property
    def work(self) -> dict[str, int]:
        """Deterministic size counters, used by certificates instead of clocks."""
        return {
            "stages": len(self.stages),
            "steps_built": sum(1 for s in self.steps if s is not None),
            "squares": sum(len(s.squares) for s in self.steps if s is not None),
            "elements": sum(stage.mid.total_size for stage in self.stages),
        }


class _Run:
    """Mutable scaffolding shared by both modes; frozen into a SequenceState."""

    def __init__(self, mode: str, gens: GeneratingSet, arrow: ArrowObj, budget: OrdinalBudget):
        self.mode = mode
        self.gens = gens
        self.arrow = arrow
        self.budget = budget
        C = arrow.f.source
        self.stages: list[Stage] = [
            Stage(0, "0", "zero", C, identity_map(C), arrow.f)
        ]
        self.links: list[PresheafMap] = []
        self.steps: list[OneStepFactorization | None] = []
        self.folds: list[PresheafMap | None] = []
        self.pairs: list[tuple[PresheafMap, PresheafMap] | None] = []
        self.converged_at: int | None = None

    @property
    def last(self) -> Stage:
        return self.stages[-1]

    def right_arrow(self, i: int) -> ArrowObj:
        return ArrowObj(self.stages[i].right)

    def step_of(self, i: int) -> OneStepFactorization:
        built = self.steps[i]
        if built is None:
            raise IncompatibleInput(f"one-step data for stage {i} was not built")
        return built

    def connect(self, i: int, j: int) -> PresheafMap:
        out = identity_map(self.stages[i].mid)
        for k in range(i, j):
            out = compose_maps(self.links[k], out)
        return out

    def push(self, stage: Stage, link: PresheafMap, step, fold, pair) -> None:
        self.stages.append(stage)
        self.links.append(link)
        self.steps.append(step)
        self.folds.append(fold)
        self.pairs.append(pair)
        if stage.kind != "limit" and self.converged_at is None and is_iso(link):
            self.converged_at = stage.index - 1

    def freeze(self) -> SequenceState:
        # steps/folds/pairs are aligned with links; pad to stage count so the
        # last stage has explicit (absent) entries.
        pad = len(self.stages) - len(self.steps)
        return SequenceState(
            mode=self.mode,
            gens=self.gens,
            arrow=self.arrow,
            budget=self.budget,
            stages=tuple(self.stages),
            links=tuple(self.links),
            steps=tuple(self.steps) + (None,) * pad,
            folds=tuple(self.folds) + (None,) * pad,
            pairs=tuple(self.pairs) + (None,) * pad,
            converged_at=self.converged_at,
            exhausted=self.converged_at is None,
        )


def _ordinal_label(block: int, offset: int) -> str:
    if block == 0:
        return str(offset)
    prefix = "ω" if block == 1 else f"ω·{block}"
    return prefix if offset == 0 else f"{prefix}+{offset}"


def _first_step(run: _Run, ordinal: str) -> None:
    """Stage 1 (or the stage after a limit in plain mode): apply the step."""
    idx = run.last.index
    step = build_onestep(run.gens, run.right_arrow(idx))
    fold = identity_map(step.mid) if run.mode == FREE else None
    stage = Stage(
        index=idx + 1,
        ordinal=ordinal,
        kind="onestep",
        mid=step.mid,
        left=compose_maps(step.left, run.last.left),
        right=step.right,
    )
    run.push(stage, link=step.left, step=None, fold=None, pair=None)
    # the entry belongs to the stage whose right part was factored
    run.steps[idx] = step
    run.folds[idx] = fold


def _successor_step(run: _Run, ordinal: str) -> None:
    """Free-mode successor: coequalize the step against the previous fold."""
    beta = run.last.index
    alpha = beta - 1
    step_b = build_onestep(run.gens, run.right_arrow(beta))
    fold_a = run.folds[alpha]
    if fold_a is None:
        raise IncompatibleInput("successor step without a fold to coequalize against")
    first = compose_maps(step_b.left, fold_a)
    second = onestep_on_square(
        run.gens,
        Square(
            source=run.right_arrow(alpha),
            target=run.right_arrow(beta),
            top=run.links[alpha],
            bottom=identity_map(run.arrow.f.target),
        ),
        source_step=run.step_of(alpha),
        target_step=step_b,
    )
    _finish_coequalizer_stage(run, step_b, first, second, ordinal)


def _limit_stage(run: _Run, block: int) -> None:
    """Pass to the colimit of the chain built so far."""
    cocone = chain_colimit(list(run.links), start=run.stages[0].mid)
    stage = Stage(
        index=run.last.index + 1,
        ordinal=_ordinal_label(block, 0),
        kind="limit",
        mid=cocone.apex,
        left=compose_maps(cocone.legs[-1], run.last.left),
        right=induce(cocone, [s.right for s in run.stages]),
        cocone=cocone,
    )
    run.push(stage, link=cocone.legs[-1], step=None, fold=None, pair=None)


def _limit_successor_step(run: _Run, ordinal: str) -> None:
    """Free-mode step directly after a limit stage.

    Coequalizes against every fold below the limit at once: the folds are
    transported up the chain of step middles and compared with the step
    functor applied to the connecting maps into the limit.
    """
    omega = run.last.index
    limit = run.stages[omega]
    if limit.kind != "limit" or limit.cocone is None:
        raise IncompatibleInput("limit successor taken without a limit stage")
    step_w = build_onestep(run.gens, run.right_arrow(omega))
    below = [i for i in range(omega) if run.folds[i] is not None]
    # stages right under an earlier limit have no fold, so consecutive
    # members of `below` are not always adjacent; connect them composite-wise
    chain = [
        onestep_on_square(
            run.gens,
            Square(
                source=run.right_arrow(i),
                target=run.right_arrow(j),
                top=run.connect(i, j),
                bottom=identity_map(run.arrow.f.target),
            ),
            source_step=run.step_of(i),
            target_step=run.step_of(j),
        )
        for i, j in zip(below, below[1:])
    ]
    web = chain_colimit(chain, start=run.step_of(below[0]).mid)
    first = induce(
        web,
        [
            compose_maps(
                step_w.left,
                compose_maps(limit.cocone.legs[i + 1], run.folds[i]),
            )
            for i in below
        ],
    )
    second = induce(
        web,
        [
            onestep_on_square(
                run.gens,
                Square(
                    source=run.right_arrow(i),
                    target=run.right_arrow(omega),
                    top=run.connect(i, omega),
                    bottom=identity_map(run.arrow.f.target),
                ),
                source_step=run.step_of(i),
                target_step=step_w,
            )
            for i in below
        ],
    )
    _finish_coequalizer_stage(run, step_w, first, second, ordinal)


def _finish_coequalizer_stage(
    run: _Run,
    step: OneStepFactorization,
    first: PresheafMap,
    second: PresheafMap,
    ordinal: str,
) -> None:
    beta = run.last.index
    coeq = coequalizer(first, second)
    fold = coeq.legs[0]
    link = compose_maps(fold, step.left)
    stage = Stage(
        index=beta + 1,
        ordinal=ordinal,
        kind="successor",
        mid=coeq.apex,
        left=compose_maps(link, run.last.left),
        right=induce(coeq, [step.right]),
    )
    run.push(stage, link=link, step=None, fold=None, pair=None)
    run.steps[beta] = step
    run.folds[beta] = fold
    run.pairs[beta] = (first, second)


def _run_sequence(
    mode: str,
    gens: GeneratingSet,
    g: PresheafMap | ArrowObj,
    budget: OrdinalBudget,
    stop_at_convergence: bool,
) -> SequenceState:
    arrow = as_arrow(g)
    if gens.members and not arrow.f.source.base == gens.members[0].f.source.base:
        raise IncompatibleInput("generating set and arrow live over different base categories")
    run = _Run(mode, gens, arrow, budget)
    for block in range(budget.omega_blocks):
        if block > 0:
            _limit_stage(run, block)
        taken = 0
        while taken < budget.successors_per_block:
            if stop_at_convergence and run.converged_at is not None:
                return run.freeze()
            if mode == PLAIN or run.last.kind == "zero":
                _first_step(run, _ordinal_label(block, taken + 1))
            elif run.last.kind == "limit":
                _limit_successor_step(run, _ordinal_label(block, taken + 1))
            else:
                _successor_step(run, _ordinal_label(block, taken + 1))
            taken += 1
        if stop_at_convergence and run.converged_at is not None:
            return run.freeze()
    return run.freeze()


def run_free(
    gens: GeneratingSet,
    g: PresheafMap | ArrowObj,
    budget: OrdinalBudget | None = None,
    stop_at_convergence: bool = True,
) -> SequenceState:
    """Run the free sequence on g until convergence or budget exhaustion."""
    return _run_sequence(FREE, gens, g, budget or OrdinalBudget(), stop_at_convergence)


def run_plain(
    gens: GeneratingSet,
    g: PresheafMap | ArrowObj,
    budget: OrdinalBudget | None = None,
    stop_at_convergence: bool = True,
) -> SequenceState:
    """Run the plain re-application sequence on g under the same budget rules."""
    return _run_sequence(PLAIN, gens, g, budget or OrdinalBudget(), stop_at_convergence)


@dataclass(frozen=True)
class ComparisonReport:
    """Stagewise comparison from the plain sequence onto the free one.

    `maps[n]` runs from the plain stage n middle to the free stage n middle.
    Each map must commute with both factorisation halves and be
    componentwise surjective; `ok` records the conjunction over all stages.
    """

    maps: tuple[PresheafMap, ...]
    left_commutes: tuple[bool, ...]
    right_commutes: tuple[bool, ...]
    surjective: tuple[bool, ...]

    @property
    def ok(self) -> bool:
        return all(self.left_commutes) and all(self.right_commutes) and all(self.surjective)


def build_comparison(free: SequenceState, plain: SequenceState) -> ComparisonReport:
    """Compare a plain run against a free run of the same input.

    Stage patterns must line up, which holds whenever both runs used the same
    budget and the free run was told not to stop early.
    """
    if free.mode != FREE or plain.mode != PLAIN:
        raise IncompatibleInput("build_comparison expects (free run, plain run) in that order")
    if free.gens != plain.gens:
        raise IncompatibleInput("the two runs used different generating sets")
    if free.arrow.f.components != plain.arrow.f.components:
        raise IncompatibleInput("the two runs factored different arrows")
    n_stages = min(len(free.stages), len(plain.stages))
    for n in range(n_stages):
        if free.stages[n].kind != plain.stages[n].kind and {
            free.stages[n].kind,
            plain.stages[n].kind,
        } != {"onestep", "successor"}:
            raise IncompatibleInput(f"stage {n} kinds differ between the runs")

    start = plain.stages[0].mid
    maps: list[PresheafMap] = [
        PresheafMap(
            start,
            free.stages[0].mid,
            {a: {x: x for x in start.carrier[a]} for a in start.base.objects},
        )
    ]
    for n in range(1, n_stages):
        fs, ps = free.stages[n], plain.stages[n]
        if ps.kind == "limit":
            if ps.cocone is None or fs.cocone is None:
                raise IncompatibleInput(f"stage {n} is a limit stage without its cocone")
            maps.append(
                induce(
                    ps.cocone,
                    [compose_maps(fs.cocone.legs[i], maps[i]) for i in range(n)],
                )
            )
            continue
        carried = onestep_on_square(
            free.gens,
            Square(
                source=ArrowObj(plain.stages[n - 1].right),
                target=ArrowObj(free.stages[n - 1].right),
                top=maps[n - 1],
                bottom=identity_map(free.arrow.f.target),
            ),
            source_step=plain.steps[n - 1],
            target_step=free.steps[n - 1],
        )
        fold = free.folds[n - 1]
        maps.append(carried if fold is None else compose_maps(fold, carried))

    left_ok = []
    right_ok = []
    surj = []
    for n in range(n_stages):
        q = maps[n]
        left_ok.append(
            compose_maps(q, plain.stages[n].left).components == free.stages[n].left.components
        )
        right_ok.append(
            compose_maps(free.stages[n].right, q).components == plain.stages[n].right.components
        )
        surj.append(is_surjective(q))
    return ComparisonReport(
        maps=tuple(maps),
        left_commutes=tuple(left_ok),
        right_commutes=tuple(right_ok),
        surjective=tuple(surj),
    )
