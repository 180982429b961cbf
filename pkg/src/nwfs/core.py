"""Finite index categories and finite presheaves on them.

Everything here is exact and deterministic. A presheaf is a contravariant
set-valued functor presented by explicit carrier sets (sorted tuples of ints)
and explicit action functions (dicts). Maps between presheaves are natural
transformations presented componentwise. Validation never raises; it returns
a list of human-readable violation strings naming the offending ids, so the
CLI can surface them and tests can assert emptiness.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence


class EngineError(Exception):
    """Base class for errors raised by the engine proper."""


class IncompatibleInput(EngineError):
    """Two pieces of data that must agree (bases, endpoints) do not."""


class InternalCheckFailed(EngineError):
    """A consistency check that should be unreachable fired anyway.

    Raised by constructions that re-verify their own output, for example a
    cocone induction whose candidate assignment turns out not to be well
    defined. Seeing this means a bug, not bad user input.
    """


@dataclass(frozen=True)
class Morphism:
    name: str
    dom: str
    cod: str


@dataclass(frozen=True)
class FinCategory:
    """A finite category with a total composition table.

    `table` maps (after, before) pairs of morphism names to the composite
    name; `compose(g, f)` is g after f. Identities are listed per object in
    `identity`. Objects and morphisms are identified by string ids, and all
    deterministic orderings elsewhere in the package sort those ids.
    """

    name: str
    objects: tuple[str, ...]
    morphisms: tuple[Morphism, ...]
    identity: Mapping[str, str]
    table: Mapping[tuple[str, str], str]

    @cached_property
    def _by_name(self) -> dict[str, Morphism]:
        return {m.name: m for m in self.morphisms}

    def morphism(self, name: str) -> Morphism:
        try:
            return self._by_name[name]
        except KeyError:
            raise IncompatibleInput(f"unknown morphism id {name!r} in category {self.name!r}") from None

    def dom(self, name: str) -> str:
        return self.morphism(name).dom

    def cod(self, name: str) -> str:
        return self.morphism(name).cod

    def compose(self, g: str, f: str) -> str:
        """Name of the composite g after f."""
        gm, fm = self.morphism(g), self.morphism(f)
        if fm.cod != gm.dom:
            raise IncompatibleInput(
                f"cannot compose {g!r} after {f!r}: cod({f!r}) = {fm.cod!r} but dom({g!r}) = {gm.dom!r}"
            )
        return self.table[(g, f)]

    def hom(self, a: str, b: str) -> tuple[str, ...]:
        return tuple(sorted(m.name for m in self.morphisms if m.dom == a and m.cod == b))

    @cached_property
    def nonidentity(self) -> tuple[Morphism, ...]:
        ids = set(self.identity.values())
        return tuple(m for m in self.morphisms if m.name not in ids)


def _validate_category(cat: FinCategory) -> list[str]:
    out: list[str] = []
    names = [m.name for m in cat.morphisms]
    if len(names) != len(set(names)):
        dupes = sorted({n for n in names if names.count(n) > 1})
        out.append(f"duplicate morphism ids: {dupes}")
        return out
    objs = set(cat.objects)
    if len(cat.objects) != len(objs):
        out.append("duplicate object ids")
    for m in cat.morphisms:
        if m.dom not in objs:
            out.append(f"morphism {m.name!r} has unknown dom {m.dom!r}")
        if m.cod not in objs:
            out.append(f"morphism {m.name!r} has unknown cod {m.cod!r}")
    for a in cat.objects:
        i = cat.identity.get(a)
        if i is None:
            out.append(f"object {a!r} has no identity")
            continue
        if i not in cat._by_name:
            out.append(f"identity of {a!r} is an unknown morphism {i!r}")
            continue
        m = cat._by_name[i]
        if (m.dom, m.cod) != (a, a):
            out.append(f"identity {i!r} of {a!r} is not an endomap of {a!r}")
    if out:
        return out

    comp = {}
    for m in cat.morphisms:
        for n in cat.morphisms:
            if n.cod == m.dom:
                got = cat.table.get((m.name, n.name))
                if got is None:
                    out.append(f"missing composite ({m.name!r}, {n.name!r})")
                    continue
                gm = cat._by_name.get(got)
                if gm is None:
                    out.append(f"composite ({m.name!r}, {n.name!r}) = {got!r} is unknown")
                elif (gm.dom, gm.cod) != (n.dom, m.cod):
                    out.append(
                        f"composite ({m.name!r}, {n.name!r}) = {got!r} has endpoints "
                        f"({gm.dom!r}, {gm.cod!r}), expected ({n.dom!r}, {m.cod!r})"
                    )
                comp[(m.name, n.name)] = got
    for (g, f), gf in cat.table.items():
        if (g, f) not in comp:
            gm = cat._by_name.get(g)
            fm = cat._by_name.get(f)
            if gm is None or fm is None:
                out.append(f"composition table mentions unknown morphism in ({g!r}, {f!r})")
            else:
                out.append(f"composition table entry ({g!r}, {f!r}) is not composable")
    if out:
        return out

    for m in cat.morphisms:
        le = cat.table[(cat.identity[m.cod], m.name)]
        ri = cat.table[(m.name, cat.identity[m.dom])]
        if le != m.name:
            out.append(f"left unit law fails: id . {m.name!r} = {le!r}")
        if ri != m.name:
            out.append(f"right unit law fails: {m.name!r} . id = {ri!r}")
    for h in cat.morphisms:
        for g in cat.morphisms:
            if g.cod != h.dom:
                continue
            hg = cat.table[(h.name, g.name)]
            for f in cat.morphisms:
                if f.cod != g.dom:
                    continue
                lhs = cat.table[(hg, f.name)]
                rhs = cat.table[(h.name, cat.table[(g.name, f.name)])]
                if lhs != rhs:
                    out.append(
                        f"associativity fails on ({h.name!r}, {g.name!r}, {f.name!r}): "
                        f"{lhs!r} != {rhs!r}"
                    )
    return out


@dataclass(frozen=True)
class Presheaf:
    """A finite presheaf on `base`.

    `carrier[a]` is the sorted tuple of element ids at object a, and
    `action[m]` sends elements at cod(m) to elements at dom(m); identities
    act as identity functions and composites act contravariantly, which
    `validate` checks exhaustively.
    """

    base: FinCategory
    carrier: Mapping[str, tuple[int, ...]]
    action: Mapping[str, Mapping[int, int]]

    def at(self, obj: str) -> tuple[int, ...]:
        return self.carrier[obj]

    def act(self, mor: str, elt: int) -> int:
        return self.action[mor][elt]

    @property
    def sizes(self) -> dict[str, int]:
        return {a: len(self.carrier[a]) for a in self.base.objects}

    @property
    def total_size(self) -> int:
        return sum(len(self.carrier[a]) for a in self.base.objects)


def presheaf(
    base: FinCategory,
    carrier: Mapping[str, Iterable[int]],
    action: Mapping[str, Mapping[int, int]] | None = None,
) -> Presheaf:
    """Normalising constructor: sorts carriers, fills identity actions.

    Missing carrier entries become empty; actions for identity morphisms may
    be omitted. Non-identity actions must be supplied for every morphism that
    has a nonempty codomain carrier.
    """
    action = dict(action or {})
    carr = {a: tuple(sorted(set(carrier.get(a, ())))) for a in base.objects}
    full: dict[str, dict[int, int]] = {}
    for m in base.morphisms:
        if m.name in action:
            full[m.name] = dict(action[m.name])
        elif base.identity[m.dom] == m.name and m.dom == m.cod:
            full[m.name] = {x: x for x in carr[m.cod]}
        elif not carr[m.cod]:
            full[m.name] = {}
        else:
            raise IncompatibleInput(f"no action supplied for morphism {m.name!r}")
    return Presheaf(base=base, carrier=carr, action=full)


def _validate_presheaf(X: Presheaf) -> list[str]:
    out: list[str] = []
    out.extend(_validate_category(X.base))
    if out:
        return [f"base category invalid: {v}" for v in out]
    objs = set(X.base.objects)
    for a in X.carrier:
        if a not in objs:
            out.append(f"carrier mentions unknown object {a!r}")
    for a in X.base.objects:
        if a not in X.carrier:
            out.append(f"carrier missing object {a!r}")
    if out:
        return out
    for m in X.base.morphisms:
        act = X.action.get(m.name)
        if act is None:
            out.append(f"no action for morphism {m.name!r}")
            continue
        src = set(X.carrier[m.cod])
        tgt = set(X.carrier[m.dom])
        for x in src:
            if x not in act:
                out.append(f"action of {m.name!r} undefined on element {x} at {m.cod!r}")
            elif act[x] not in tgt:
                out.append(f"action of {m.name!r} sends {x} to {act[x]}, not in carrier at {m.dom!r}")
        for x in act:
            if x not in src:
                out.append(f"action of {m.name!r} defined on stray element {x}")
    if out:
        return out
    for a in X.base.objects:
        i = X.base.identity[a]
        for x in X.carrier[a]:
            if X.action[i][x] != x:
                out.append(f"identity action {i!r} moves element {x} at {a!r}")
    for g in X.base.morphisms:
        for f in X.base.morphisms:
            if f.cod != g.dom:
                continue
            gf = X.base.table[(g.name, f.name)]
            # actions are contravariant: the composite acts on the carrier at
            # g's codomain, through g's action first and then f's
            for x in X.carrier[g.cod]:
                lhs = X.action[gf].get(x)
                rhs = X.action[f.name].get(X.action[g.name][x])
                if lhs != rhs:
                    out.append(
                        f"functoriality fails: action[{gf!r}]({x}) = {lhs}, "
                        f"action[{f.name!r}](action[{g.name!r}]({x})) = {rhs}"
                    )
    return out


@dataclass(frozen=True)
class PresheafMap:
    """A natural transformation, one component function per base object."""

    source: Presheaf
    target: Presheaf
    components: Mapping[str, Mapping[int, int]]

    def at(self, obj: str, elt: int) -> int:
        return self.components[obj][elt]


def _same(x: object, y: object) -> bool:
    return x is y or x == y


def _validate_map(f: PresheafMap) -> list[str]:
    out: list[str] = []
    if not _same(f.source.base, f.target.base):
        return ["source and target live over different base categories"]
    base = f.source.base
    for a in base.objects:
        comp = f.components.get(a)
        if comp is None:
            out.append(f"missing component at object {a!r}")
            continue
        tgt = set(f.target.carrier[a])
        for x in f.source.carrier[a]:
            if x not in comp:
                out.append(f"component at {a!r} undefined on element {x}")
            elif comp[x] not in tgt:
                out.append(f"component at {a!r} sends {x} to {comp[x]}, not in target carrier")
        for x in comp:
            if x not in set(f.source.carrier[a]):
                out.append(f"component at {a!r} defined on stray element {x}")
    if out:
        return out
    for m in base.morphisms:
        for x in f.source.carrier[m.cod]:
            lhs = f.components[m.dom][f.source.action[m.name][x]]
            rhs = f.target.action[m.name][f.components[m.cod][x]]
            if lhs != rhs:
                out.append(
                    f"naturality fails at morphism {m.name!r} on element {x}: "
                    f"component(action(x)) = {lhs}, action(component(x)) = {rhs}"
                )
    return out


def validate(thing: FinCategory | Presheaf | PresheafMap) -> list[str]:
    """Check an object exhaustively; return violations instead of raising."""
    if isinstance(thing, FinCategory):
        return _validate_category(thing)
    if isinstance(thing, Presheaf):
        return _validate_presheaf(thing)
    if isinstance(thing, PresheafMap):
        return _validate_map(thing)
    raise TypeError(f"cannot validate {type(thing).__name__}")


def identity_map(X: Presheaf) -> PresheafMap:
    return PresheafMap(X, X, {a: {x: x for x in X.carrier[a]} for a in X.base.objects})


def compose_maps(g: PresheafMap, f: PresheafMap) -> PresheafMap:
    """The composite g after f."""
    if not _same(f.target, g.source):
        raise IncompatibleInput("compose_maps: target of the first map is not the source of the second")
    comps = {
        a: {x: g.components[a][f.components[a][x]] for x in f.source.carrier[a]}
        for a in f.source.base.objects
    }
    return PresheafMap(f.source, g.target, comps)


def is_injective(f: PresheafMap) -> bool:
    return all(
        len(set(f.components[a].values())) == len(f.source.carrier[a])
        for a in f.source.base.objects
    )


def is_surjective(f: PresheafMap) -> bool:
    return all(
        set(f.components[a].values()) == set(f.target.carrier[a])
        for a in f.source.base.objects
    )


def is_iso(f: PresheafMap) -> bool:
    return is_injective(f) and is_surjective(f)


def inverse_map(f: PresheafMap) -> PresheafMap:
    if not is_iso(f):
        raise IncompatibleInput("inverse_map: the map is not a componentwise bijection")
    comps = {a: {y: x for x, y in f.components[a].items()} for a in f.source.base.objects}
    return PresheafMap(f.target, f.source, comps)


def maps_equal(f: PresheafMap, g: PresheafMap) -> bool:
    """Componentwise equality, ignoring presheaf object identity."""
    return (
        f.components == g.components
        and f.source.carrier == g.source.carrier
        and f.target.carrier == g.target.carrier
    )


def enumerate_maps(
    X: Presheaf,
    Y: Presheaf,
    *,
    pinned: Mapping[tuple[str, int], int] | None = None,
    allowed: Mapping[tuple[str, int], Sequence[int]] | None = None,
) -> list[PresheafMap]:
    """All natural transformations X -> Y, in a fixed order.

    Enumeration is exhaustive backtracking over element assignments.
    Variables are ordered by object id then element id, candidate targets
    ascend, and outputs appear in lexicographic order of the resulting
    assignment vectors. A naturality constraint is checked the moment both
    elements it mentions have been assigned, so dead branches are cut early.

    `pinned` forces single values for chosen source elements and `allowed`
    restricts the candidate set for others; both are keyed by (object id,
    element id). Pins win over restrictions.
    """
    if not _same(X.base, Y.base):
        raise IncompatibleInput("enumerate_maps: presheaves live over different bases")
    pinned = pinned or {}
    allowed = allowed or {}
    base = X.base
    variables: list[tuple[str, int]] = [
        (a, x) for a in sorted(base.objects) for x in X.carrier[a]
    ]
    index = {v: i for i, v in enumerate(variables)}

    # constraints[i] lists (m, b, x) with i the later-assigned endpoint of the
    # naturality square for morphism m at element x of X(cod m) = X(b).
    constraints: list[list[tuple[str, str, int]]] = [[] for _ in variables]
    for m in base.morphisms:
        if base.identity.get(m.dom) == m.name:
            continue
        for x in X.carrier[m.cod]:
            i = index[(m.cod, x)]
            j = index[(m.dom, X.action[m.name][x])]
            constraints[max(i, j)].append((m.name, m.cod, x))

    assignment: dict[tuple[str, int], int] = {}
    results: list[PresheafMap] = []

    def ok(pos: int) -> bool:
        for mor, b, x in constraints[pos]:
            a = base.dom(mor)
            lhs = assignment[(a, X.action[mor][x])]
            rhs = Y.action[mor][assignment[(b, x)]]
            if lhs != rhs:
                return False
        return True

    def walk(pos: int) -> None:
        if pos == len(variables):
            comps: dict[str, dict[int, int]] = {a: {} for a in base.objects}
            for (a, x), y in assignment.items():
                comps[a][x] = y
            results.append(PresheafMap(X, Y, comps))
            return
        a, x = variables[pos]
        if (a, x) in pinned:
            candidates: Sequence[int] = (pinned[(a, x)],)
        else:
            candidates = allowed.get((a, x), Y.carrier[a])
        for y in candidates:
            assignment[(a, x)] = y
            if ok(pos):
                walk(pos + 1)
        assignment.pop((a, x), None)

    walk(0)
    return results
