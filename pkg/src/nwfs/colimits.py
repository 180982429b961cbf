"""Exact finite colimits of presheaves.

All constructions return a `Cocone` whose apex carriers are densely
renumbered (each carrier is range(n)) in a deterministic order, so repeated
runs on equal inputs produce identical apexes. Quotients are computed by
union-find congruence closure: merging two elements propagates along every
base morphism into the element's object until saturation, which is exactly
what makes the apex a presheaf again.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import (
    FinCategory,
    IncompatibleInput,
    InternalCheckFailed,
    Presheaf,
    PresheafMap,
    _same,
    compose_maps,
    identity_map,
    presheaf,
)


@dataclass(frozen=True)
class Cocone:
    apex: Presheaf
    legs: tuple[PresheafMap, ...]
    provenance: str


class UnionFind:
    """Disjoint sets over ints with the least member as representative."""

    def __init__(self, elements: Iterable[int]):
        self.parent: dict[int, int] = {e: e for e in elements}
        self.least: dict[int, int] = {e: e for e in self.parent}
        self.merges = 0

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        """Merge the classes of x and y; report whether anything changed."""
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        self.parent[ry] = rx
        self.least[rx] = min(self.least[rx], self.least[ry])
        self.merges += 1
        return True

    def representative(self, x: int) -> int:
        return self.least[self.find(x)]


def initial(base: FinCategory) -> Presheaf:
    return presheaf(base, {}, {m.name: {} for m in base.morphisms})


def quotient(X: Presheaf, pairs: Iterable[tuple[str, int, int]]) -> Cocone:
    """Quotient X by the presheaf congruence generated by `pairs`.

    Each pair (a, u, v) identifies elements u and v at object a. The single
    leg of the returned cocone is the projection X -> X/~.
    """
    base = X.base
    uf = {a: UnionFind(X.carrier[a]) for a in base.objects}
    into: dict[str, list] = {a: [] for a in base.objects}
    for m in base.nonidentity:
        into[m.cod].append(m)

    work = list(pairs)
    while work:
        a, u, v = work.pop()
        if uf[a].union(u, v):
            for m in into[a]:
                act = X.action[m.name]
                work.append((m.dom, act[u], act[v]))

    reps = {a: sorted({uf[a].representative(x) for x in X.carrier[a]}) for a in base.objects}
    rank = {a: {r: i for i, r in enumerate(reps[a])} for a in base.objects}
    carrier = {a: tuple(range(len(reps[a]))) for a in base.objects}
    action = {
        m.name: {
            rank[m.cod][r]: rank[m.dom][uf[m.dom].representative(X.action[m.name][r])]
            for r in reps[m.cod]
        }
        for m in base.morphisms
    }
    apex = presheaf(base, carrier, action)
    proj = PresheafMap(
        X,
        apex,
        {a: {x: rank[a][uf[a].representative(x)] for x in X.carrier[a]} for a in base.objects},
    )
    return Cocone(apex=apex, legs=(proj,), provenance="quotient")


def coproduct(parts: Sequence[Presheaf], base: FinCategory | None = None) -> Cocone:
    """Disjoint union, summands in the given order, elements renumbered densely."""
    if not parts:
        if base is None:
            raise IncompatibleInput("coproduct of no parts needs an explicit base category")
        return Cocone(apex=initial(base), legs=(), provenance="coproduct")
    base = parts[0].base
    for p in parts[1:]:
        if not _same(p.base, base):
            raise IncompatibleInput("coproduct: summands live over different bases")

    offset: list[dict[str, int]] = []
    sizes = {a: 0 for a in base.objects}
    for p in parts:
        offset.append(dict(sizes))
        for a in base.objects:
            sizes[a] += len(p.carrier[a])

    rank = [
        {a: {x: i for i, x in enumerate(p.carrier[a])} for a in base.objects}
        for p in parts
    ]
    carrier = {a: tuple(range(sizes[a])) for a in base.objects}
    action: dict[str, dict[int, int]] = {m.name: {} for m in base.morphisms}
    for i, p in enumerate(parts):
        for m in base.morphisms:
            for x in p.carrier[m.cod]:
                tagged = offset[i][m.cod] + rank[i][m.cod][x]
                action[m.name][tagged] = offset[i][m.dom] + rank[i][m.dom][p.action[m.name][x]]
    apex = presheaf(base, carrier, action)
    legs = tuple(
        PresheafMap(
            p,
            apex,
            {a: {x: offset[i][a] + rank[i][a][x] for x in p.carrier[a]} for a in base.objects},
        )
        for i, p in enumerate(parts)
    )
    return Cocone(apex=apex, legs=legs, provenance="coproduct")


def coequalizer(f: PresheafMap, g: PresheafMap) -> Cocone:
    """Coequalizer of the parallel pair f, g; the single leg is the quotient map."""
    if not (_same(f.source, g.source) and _same(f.target, g.target)):
        raise IncompatibleInput("coequalizer: the two maps are not a parallel pair")
    pairs = [
        (a, f.components[a][x], g.components[a][x])
        for a in f.source.base.objects
        for x in f.source.carrier[a]
    ]
    q = quotient(f.target, pairs)
    return Cocone(apex=q.apex, legs=q.legs, provenance="coequalizer")


def pushout(f: PresheafMap, g: PresheafMap) -> Cocone:
    """Pushout of the span f: A -> B, g: A -> C.

    Computed as the coequalizer of the two composites A -> B + C. Legs come
    back in the order (from B, from C).
    """
    if not _same(f.source, g.source):
        raise IncompatibleInput("pushout: the two maps do not share a source")
    cp = coproduct([f.target, g.target])
    coeq = coequalizer(compose_maps(cp.legs[0], f), compose_maps(cp.legs[1], g))
    proj = coeq.legs[0]
    legs = (compose_maps(proj, cp.legs[0]), compose_maps(proj, cp.legs[1]))
    return Cocone(apex=coeq.apex, legs=legs, provenance="pushout")


def chain_colimit(steps: Sequence[PresheafMap], start: Presheaf | None = None) -> Cocone:
    """Colimit of a finite chain X0 -> X1 -> ... -> Xn, one leg per stage.

    With no steps the chain is the single presheaf `start` and the colimit is
    that presheaf with an identity leg.
    """
    if not steps:
        if start is None:
            raise IncompatibleInput("chain_colimit of an empty chain needs its single object")
        return Cocone(apex=start, legs=(identity_map(start),), provenance="chain")
    stages = [steps[0].source]
    for i, m in enumerate(steps):
        if not _same(m.source, stages[-1]):
            raise IncompatibleInput(f"chain_colimit: step {i} does not start where step {i - 1} ended")
        stages.append(m.target)
    cp = coproduct(stages)
    pairs = []
    for i, m in enumerate(steps):
        inj_here, inj_next = cp.legs[i], cp.legs[i + 1]
        for a in m.source.base.objects:
            for x in m.source.carrier[a]:
                pairs.append((a, inj_here.components[a][x], inj_next.components[a][m.components[a][x]]))
    q = quotient(cp.apex, pairs)
    proj = q.legs[0]
    legs = tuple(compose_maps(proj, inj) for inj in cp.legs)
    return Cocone(apex=q.apex, legs=legs, provenance="chain")


def induce(cocone: Cocone, targets: Sequence[PresheafMap]) -> PresheafMap:
    """The unique map out of the apex determined by one target map per leg.

    Targets must agree wherever legs identify elements, and together they
    must reach a common codomain; both are checked. The legs of every cocone
    built in this module are jointly surjective, which is what makes the
    induced map total.
    """
    if len(targets) != len(cocone.legs):
        raise IncompatibleInput(
            f"induce: {len(cocone.legs)} legs but {len(targets)} target maps"
        )
    if not targets:
        raise IncompatibleInput("induce: need at least one target map to determine the codomain")
    Z = targets[0].target
    for i, t in enumerate(targets):
        if not _same(t.target, Z):
            raise IncompatibleInput(f"induce: target map {i} has a different codomain")
        if not _same(t.source, cocone.legs[i].source):
            raise IncompatibleInput(f"induce: target map {i} does not start at leg {i}'s source")

    apex = cocone.apex
    comps: dict[str, dict[int, int]] = {a: {} for a in apex.base.objects}
    for leg, t in zip(cocone.legs, targets):
        for a in apex.base.objects:
            lc, tc = leg.components[a], t.components[a]
            for x in leg.source.carrier[a]:
                y, z = lc[x], tc[x]
                seen = comps[a].get(y)
                if seen is None:
                    comps[a][y] = z
                elif seen != z:
                    raise IncompatibleInput(
                        f"induce: targets disagree at object {a!r}, apex element {y} "
                        f"receives both {seen} and {z}"
                    )
    for a in apex.base.objects:
        missing = [y for y in apex.carrier[a] if y not in comps[a]]
        if missing:
            raise InternalCheckFailed(
                f"induce: apex elements {missing} at object {a!r} not reached by any leg"
            )
    return PresheafMap(apex, Z, comps)
