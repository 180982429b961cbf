"""Pointwise factorisation rules and their composites.

A rule assigns every arrow a factorisation through a middle object,
functorially in commuting squares, and optionally carries two structural
maps: a comultiplication into the middle of the left half and a
multiplication out of the middle of the right half. The law checker in
`laws` consumes exactly this interface.

Two composites are provided. The tensor composite factors the inner rule's
right half with the outer rule, the odot composite factors the inner left
half instead, and `interchange` produces the canonical comparison between
the two ways of stacking four rules. All of it is computed elementwise on
finite carriers, nothing is symbolic.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Mapping

from .arrows import ArrowObj, Square, as_arrow, validate_square
from .colimits import coproduct, induce
from .core import (
    IncompatibleInput,
    InternalCheckFailed,
    Presheaf,
    PresheafMap,
    compose_maps,
    identity_map,
    presheaf,
)


@dataclass(frozen=True)
class FactorTriple:
    """One arrow factored: left into the middle, right out of it."""

    left: PresheafMap
    mid: Presheaf
    right: PresheafMap


@dataclass(frozen=True)
class FactorizationRule:
    name: str
    factor: Callable[[PresheafMap], FactorTriple]
    on_square: Callable[[Square], PresheafMap]
    comult: Callable[[PresheafMap], PresheafMap] | None = None
    mult: Callable[[PresheafMap], PresheafMap] | None = None


@dataclass(frozen=True)
class ProductData:
    """A binary product with enough bookkeeping to pair maps into it."""

    apex: Presheaf
    proj1: PresheafMap
    proj2: PresheafMap
    index: Mapping[str, Mapping[tuple[int, int], int]]

    def pair(self, f: PresheafMap, g: PresheafMap) -> PresheafMap:
        Z = f.source
        comps = {
            a: {
                z: self.index[a][(f.components[a][z], g.components[a][z])]
                for z in Z.carrier[a]
            }
            for a in Z.base.objects
        }
        return PresheafMap(Z, self.apex, comps)


def product_presheaf(X: Presheaf, Y: Presheaf) -> ProductData:
    """Binary product, pairs enumerated lexicographically per object."""
    base = X.base
    index: dict[str, dict[tuple[int, int], int]] = {}
    for a in base.objects:
        index[a] = {
            (x, y): n
            for n, (x, y) in enumerate(
                (x, y) for x in X.carrier[a] for y in Y.carrier[a]
            )
        }
    back = {a: {n: xy for xy, n in index[a].items()} for a in base.objects}
    carrier = {a: tuple(range(len(index[a]))) for a in base.objects}
    action = {
        m.name: {
            n: index[m.dom][
                (X.action[m.name][back[m.cod][n][0]], Y.action[m.name][back[m.cod][n][1]])
            ]
            for n in carrier[m.cod]
        }
        for m in base.morphisms
    }
    apex = presheaf(base, carrier, action)
    proj1 = PresheafMap(apex, X, {a: {n: back[a][n][0] for n in carrier[a]} for a in base.objects})
    proj2 = PresheafMap(apex, Y, {a: {n: back[a][n][1] for n in carrier[a]} for a in base.objects})
    return ProductData(apex=apex, proj1=proj1, proj2=proj2, index=index)


def graph_rule() -> FactorizationRule:
    """Factor through the product of the endpoints.

    The left half pairs the identity with the arrow, the right half is the
    second projection, and both structural maps are reshuffles of product
    coordinates.
    """

    def factor(f: PresheafMap) -> FactorTriple:
        P = product_presheaf(f.source, f.target)
        return FactorTriple(left=P.pair(identity_map(f.source), f), mid=P.apex, right=P.proj2)

    def on_square(sq: Square) -> PresheafMap:
        Pf = product_presheaf(sq.source.dom, sq.source.cod)
        Pg = product_presheaf(sq.target.dom, sq.target.cod)
        return Pg.pair(
            compose_maps(sq.top, Pf.proj1), compose_maps(sq.bottom, Pf.proj2)
        )

    def comult(f: PresheafMap) -> PresheafMap:
        Pf = product_presheaf(f.source, f.target)
        Pm = product_presheaf(f.source, Pf.apex)
        return Pm.pair(Pf.proj1, identity_map(Pf.apex))

    def mult(f: PresheafMap) -> PresheafMap:
        Pf = product_presheaf(f.source, f.target)
        Pr = product_presheaf(Pf.apex, f.target)
        return Pf.pair(compose_maps(Pf.proj1, Pr.proj1), Pr.proj2)

    return FactorizationRule("graph", factor, on_square, comult, mult)


def cograph_rule() -> FactorizationRule:
    """Factor through the sum of the endpoints.

    The left half is the first injection, the right half folds the arrow
    with the identity.
    """

    def factor(f: PresheafMap) -> FactorTriple:
        cp = coproduct([f.source, f.target])
        return FactorTriple(
            left=cp.legs[0],
            mid=cp.apex,
            right=induce(cp, [f, identity_map(f.target)]),
        )

    def on_square(sq: Square) -> PresheafMap:
        cpf = coproduct([sq.source.dom, sq.source.cod])
        cpg = coproduct([sq.target.dom, sq.target.cod])
        return induce(
            cpf,
            [compose_maps(cpg.legs[0], sq.top), compose_maps(cpg.legs[1], sq.bottom)],
        )

    def comult(f: PresheafMap) -> PresheafMap:
        cpf = coproduct([f.source, f.target])
        cpm = coproduct([f.source, cpf.apex])
        return induce(
            cpf,
            [cpm.legs[0], compose_maps(cpm.legs[1], cpf.legs[1])],
        )

    def mult(f: PresheafMap) -> PresheafMap:
        cpf = coproduct([f.source, f.target])
        cpr = coproduct([cpf.apex, f.target])
        return induce(cpr, [identity_map(cpf.apex), cpf.legs[1]])

    return FactorizationRule("cograph", factor, on_square, comult, mult)


def trivial_left_rule() -> FactorizationRule:
    """The middle is the domain: nothing happens on the left."""

    def factor(f: PresheafMap) -> FactorTriple:
        return FactorTriple(left=identity_map(f.source), mid=f.source, right=f)

    def on_square(sq: Square) -> PresheafMap:
        return sq.top

    def comult(f: PresheafMap) -> PresheafMap:
        return identity_map(f.source)

    def mult(f: PresheafMap) -> PresheafMap:
        return identity_map(f.source)

    return FactorizationRule("trivial-left", factor, on_square, comult, mult)


def trivial_right_rule() -> FactorizationRule:
    """The middle is the codomain: nothing happens on the right."""

    def factor(f: PresheafMap) -> FactorTriple:
        return FactorTriple(left=f, mid=f.target, right=identity_map(f.target))

    def on_square(sq: Square) -> PresheafMap:
        return sq.bottom

    def comult(f: PresheafMap) -> PresheafMap:
        return identity_map(f.target)

    def mult(f: PresheafMap) -> PresheafMap:
        return identity_map(f.target)

    return FactorizationRule("trivial-right", factor, on_square, comult, mult)


def tensor_product(outer: FactorizationRule, inner: FactorizationRule) -> FactorizationRule:
    """Compose by refactoring the inner right half with the outer rule."""

    def factor(f: PresheafMap) -> FactorTriple:
        fi = inner.factor(f)
        fo = outer.factor(fi.right)
        return FactorTriple(
            left=compose_maps(fo.left, fi.left), mid=fo.mid, right=fo.right
        )

    def on_square(sq: Square) -> PresheafMap:
        carried = inner.on_square(sq)
        return outer.on_square(
            Square(
                source=as_arrow(inner.factor(sq.source.f).right),
                target=as_arrow(inner.factor(sq.target.f).right),
                top=carried,
                bottom=sq.bottom,
            )
        )

    return FactorizationRule(f"{outer.name}⊗{inner.name}", factor, on_square)


def odot_product(outer: FactorizationRule, inner: FactorizationRule) -> FactorizationRule:
    """Compose by refactoring the inner left half with the outer rule."""

    def factor(f: PresheafMap) -> FactorTriple:
        fi = inner.factor(f)
        fo = outer.factor(fi.left)
        return FactorTriple(
            left=fo.left, mid=fo.mid, right=compose_maps(fi.right, fo.right)
        )

    def on_square(sq: Square) -> PresheafMap:
        carried = inner.on_square(sq)
        return outer.on_square(
            Square(
                source=as_arrow(inner.factor(sq.source.f).left),
                target=as_arrow(inner.factor(sq.target.f).left),
                top=sq.top,
                bottom=carried,
            )
        )

    return FactorizationRule(f"{outer.name}⊙{inner.name}", factor, on_square)


def interchange(
    A: FactorizationRule,
    B: FactorizationRule,
    C: FactorizationRule,
    D: FactorizationRule,
    f: PresheafMap,
) -> PresheafMap:
    """The canonical map between the two stackings of four rules at f.

    Runs from the middle that (A odot B) tensor (C odot D) assigns f to the
    middle assigned by (A tensor C) odot (B tensor D). It is A applied to a
    square whose halves are C on the left-whiskered unit square and B on the
    right-whiskered one.
    """
    fd = D.factor(f)
    cd_right = compose_maps(fd.right, C.factor(fd.left).right)
    bd_left = compose_maps(B.factor(fd.right).left, fd.left)
    top = C.on_square(
        Square(
            source=as_arrow(fd.left),
            target=as_arrow(bd_left),
            top=identity_map(f.source),
            bottom=B.factor(fd.right).left,
        )
    )
    bottom = B.on_square(
        Square(
            source=as_arrow(cd_right),
            target=as_arrow(fd.right),
            top=C.factor(fd.left).right,
            bottom=identity_map(f.target),
        )
    )
    return A.on_square(
        Square(
            source=as_arrow(B.factor(cd_right).left),
            target=as_arrow(C.factor(bd_left).right),
            top=top,
            bottom=bottom,
        )
    )


@dataclass(frozen=True)
class RuleCoalgebra:
    """A coalgebra for a rule: a section of the right half over the codomain."""

    arrow: ArrowObj
    component: PresheafMap


@dataclass(frozen=True)
class RuleAlgebra:
    """An algebra for a rule: a retraction of the left half onto the domain."""

    arrow: ArrowObj
    component: PresheafMap


def validate_rule_coalgebra(rule: FactorizationRule, co: RuleCoalgebra) -> list[str]:
    out = []
    triple = rule.factor(co.arrow.f)
    if compose_maps(co.component, co.arrow.f).components != triple.left.components:
        out.append("section does not extend the left half")
    if compose_maps(triple.right, co.component).components != identity_map(co.arrow.cod).components:
        out.append("section is not a section of the right half")
    return out


def validate_rule_algebra(rule: FactorizationRule, al: RuleAlgebra) -> list[str]:
    out = []
    triple = rule.factor(al.arrow.f)
    if compose_maps(al.component, triple.left).components != identity_map(al.arrow.dom).components:
        out.append("retraction does not retract the left half")
    if compose_maps(al.arrow.f, al.component).components != triple.right.components:
        out.append("retraction does not cover the right half")
    return out


def canonical_lift(
    rule: FactorizationRule,
    s: RuleCoalgebra,
    p: RuleAlgebra,
    sq: Square,
) -> PresheafMap:
    """Solve a lifting problem from a coalgebra against an algebra.

    The square runs from the coalgebra's arrow to the algebra's; the lift is
    the retraction after the functorial image of the square after the
    section, and both triangle identities are re-verified before returning.
    """
    problems = validate_square(sq)
    problems += validate_rule_coalgebra(rule, s)
    problems += validate_rule_algebra(rule, p)
    if sq.source != s.arrow and sq.source.f.components != s.arrow.f.components:
        problems.append("square does not start at the coalgebra's arrow")
    if sq.target != p.arrow and sq.target.f.components != p.arrow.f.components:
        problems.append("square does not end at the algebra's arrow")
    if problems:
        raise IncompatibleInput(f"canonical_lift: {problems[0]}")
    lift = compose_maps(p.component, compose_maps(rule.on_square(sq), s.component))
    if compose_maps(lift, s.arrow.f).components != sq.top.components:
        raise InternalCheckFailed("canonical_lift: lift breaks the top triangle")
    if compose_maps(p.arrow.f, lift).components != sq.bottom.components:
        raise InternalCheckFailed("canonical_lift: lift breaks the bottom triangle")
    return lift


def compose_coalgebras(
    rule: FactorizationRule,
    first: RuleCoalgebra,
    second: RuleCoalgebra,
) -> RuleCoalgebra:
    """Coalgebra for the composite of two coalgebra-bearing arrows.

    `first` sits on the arrow applied first. The section of the composite
    threads the second section through two functorial reshapings and lands
    via the rule's multiplication; both coalgebra equations are re-verified.
    """
    if rule.mult is None:
        raise IncompatibleInput("compose_coalgebras needs a rule with a multiplication")
    problems = validate_rule_coalgebra(rule, first) + validate_rule_coalgebra(rule, second)
    if problems:
        raise IncompatibleInput(f"compose_coalgebras: {problems[0]}")
    f, g = first.arrow.f, second.arrow.f
    gf = compose_maps(g, f)
    triple_f = rule.factor(f)
    triple_gf = rule.factor(gf)
    over_right = compose_maps(g, triple_f.right)
    widen = rule.on_square(
        Square(
            source=as_arrow(g),
            target=as_arrow(over_right),
            top=first.component,
            bottom=identity_map(g.target),
        )
    )
    absorb = rule.on_square(
        Square(
            source=as_arrow(over_right),
            target=as_arrow(triple_gf.right),
            top=rule.on_square(
                Square(
                    source=as_arrow(f),
                    target=as_arrow(gf),
                    top=identity_map(f.source),
                    bottom=g,
                )
            ),
            bottom=identity_map(g.target),
        )
    )
    component = compose_maps(
        rule.mult(gf), compose_maps(absorb, compose_maps(widen, second.component))
    )
    out = RuleCoalgebra(arrow=as_arrow(gf), component=component)
    problems = validate_rule_coalgebra(rule, out)
    if problems:
        raise InternalCheckFailed(f"compose_coalgebras: {problems[0]}")
    return out


def _cograph_shift(Y: Presheaf) -> PresheafMap:
    """Rotate each carrier one step; identity where a carrier is a singleton.

    Only safe over bases without nonidentity morphisms, which is where the
    mutant rules are exercised.
    """
    comps = {}
    for a in Y.base.objects:
        xs = Y.carrier[a]
        if len(xs) < 2:
            comps[a] = {x: x for x in xs}
        else:
            comps[a] = {x: xs[(i + 1) % len(xs)] for i, x in enumerate(xs)}
    return PresheafMap(Y, Y, comps)


MUTANT_COUNT = 6


def mutant_rule(index: int) -> FactorizationRule:
    """A deliberately broken builtin rule, for law-checker calibration.

    Each mutant perturbs exactly one structural map of the graph or cograph
    rule in a way some law detects on a small arrow.
    """
    if not 0 <= index < MUTANT_COUNT:
        raise IncompatibleInput(f"mutant_rule index must lie in [0, {MUTANT_COUNT})")

    if index <= 2:
        rule = graph_rule()

        def bad_mult_first(f: PresheafMap) -> PresheafMap:
            Pf = product_presheaf(f.source, f.target)
            Pr = product_presheaf(Pf.apex, f.target)
            return Pr.proj1

        def bad_comult_through(f: PresheafMap) -> PresheafMap:
            Pf = product_presheaf(f.source, f.target)
            Pm = product_presheaf(f.source, Pf.apex)
            return Pm.pair(Pf.proj1, Pf.pair(Pf.proj1, compose_maps(f, Pf.proj1)))

        def bad_mult_collapse(f: PresheafMap) -> PresheafMap:
            Pf = product_presheaf(f.source, f.target)
            Pr = product_presheaf(Pf.apex, f.target)
            first = compose_maps(Pf.proj1, Pr.proj1)
            return Pf.pair(first, compose_maps(f, first))

        if index == 0:
            return replace(rule, name="graph!mult-first", mult=bad_mult_first)
        if index == 1:
            return replace(rule, name="graph!comult-through", comult=bad_comult_through)
        return replace(rule, name="graph!mult-collapse", mult=bad_mult_collapse)

    rule = cograph_rule()

    def bad_mult_misroute(f: PresheafMap) -> PresheafMap:
        cpf = coproduct([f.source, f.target])
        cpr = coproduct([cpf.apex, f.target])
        folded = induce(cpf, [compose_maps(cpf.legs[1], f), cpf.legs[1]])
        return induce(cpr, [folded, cpf.legs[1]])

    def bad_comult_misroute(f: PresheafMap) -> PresheafMap:
        cpf = coproduct([f.source, f.target])
        cpm = coproduct([f.source, cpf.apex])
        return induce(
            cpf,
            [
                compose_maps(cpm.legs[1], cpf.legs[0]),
                compose_maps(cpm.legs[1], cpf.legs[1]),
            ],
        )

    def bad_mult_shift(f: PresheafMap) -> PresheafMap:
        cpf = coproduct([f.source, f.target])
        cpr = coproduct([cpf.apex, f.target])
        return induce(
            cpr,
            [identity_map(cpf.apex), compose_maps(cpf.legs[1], _cograph_shift(f.target))],
        )

    if index == 3:
        return replace(rule, name="cograph!mult-misroute", mult=bad_mult_misroute)
    if index == 4:
        return replace(rule, name="cograph!comult-misroute", comult=bad_comult_misroute)
    return replace(rule, name="cograph!mult-shift", mult=bad_mult_shift)
