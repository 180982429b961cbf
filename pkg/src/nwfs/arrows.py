"""Arrows as objects, commuting squares between them, generating sets."""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    IncompatibleInput,
    Presheaf,
    PresheafMap,
    _same,
    compose_maps,
    enumerate_maps,
    identity_map,
)


@dataclass(frozen=True)
class ArrowObj:
    """A presheaf map viewed as a single object in its own right."""

    f: PresheafMap
    label: str | None = None

    @property
    def dom(self) -> Presheaf:
        return self.f.source

    @property
    def cod(self) -> Presheaf:
        return self.f.target


def as_arrow(f: PresheafMap | ArrowObj, label: str | None = None) -> ArrowObj:
    if isinstance(f, ArrowObj):
        return f
    return ArrowObj(f=f, label=label)


@dataclass(frozen=True)
class Square:
    """A commuting square from `source` to `target`.

    `top` runs between the domains and `bottom` between the codomains;
    commutation means target.f . top == bottom . source.f, which
    `validate_square` checks elementwise.
    """

    source: ArrowObj
    target: ArrowObj
    top: PresheafMap
    bottom: PresheafMap


def square_commutes(sq: Square) -> bool:
    lhs = compose_maps(sq.target.f, sq.top)
    rhs = compose_maps(sq.bottom, sq.source.f)
    return lhs.components == rhs.components


def validate_square(sq: Square) -> list[str]:
    out: list[str] = []
    if not _same(sq.top.source, sq.source.dom):
        out.append("top map does not start at the source arrow's domain")
    if not _same(sq.top.target, sq.target.dom):
        out.append("top map does not end at the target arrow's domain")
    if not _same(sq.bottom.source, sq.source.cod):
        out.append("bottom map does not start at the source arrow's codomain")
    if not _same(sq.bottom.target, sq.target.cod):
        out.append("bottom map does not end at the target arrow's codomain")
    if out:
        return out
    if not square_commutes(sq):
        out.append("square does not commute")
    return out


def identity_square(f: ArrowObj) -> Square:
    return Square(source=f, target=f, top=identity_map(f.dom), bottom=identity_map(f.cod))


def compose_squares(second: Square, first: Square) -> Square:
    """Paste squares vertically: first from f to g, second from g to h."""
    if first.target != second.source:
        raise IncompatibleInput("compose_squares: middle arrows differ")
    return Square(
        source=first.source,
        target=second.target,
        top=compose_maps(second.top, first.top),
        bottom=compose_maps(second.bottom, first.bottom),
    )


@dataclass(frozen=True)
class GeneratingSet:
    """A finite family of arrows used to generate a factorisation system."""

    members: tuple[ArrowObj, ...]
    name: str | None = None

    def __post_init__(self):
        if not self.members:
            return
        base = self.members[0].f.source.base
        for m in self.members[1:]:
            if not _same(m.f.source.base, base):
                raise IncompatibleInput("generating set mixes base categories")


def enumerate_squares(j: ArrowObj, g: ArrowObj) -> list[Square]:
    """All commuting squares from j to g.

    Ordering is fixed: top maps in enumerate_maps order form the outer loop,
    bottom maps the inner one, and non-commuting pairs are skipped.
    """
    out = []
    bottoms = enumerate_maps(j.cod, g.cod)
    for top in enumerate_maps(j.dom, g.dom):
        reach = compose_maps(g.f, top)
        for bottom in bottoms:
            if compose_maps(bottom, j.f).components == reach.components:
                out.append(Square(source=j, target=g, top=top, bottom=bottom))
    return out


def generating_squares(gens: GeneratingSet, g: ArrowObj) -> list[tuple[int, Square]]:
    """Squares from every generator into g, tagged with the generator index."""
    out: list[tuple[int, Square]] = []
    for i, j in enumerate(gens.members):
        for sq in enumerate_squares(j, g):
            out.append((i, sq))
    return out


def components_key(f: PresheafMap) -> tuple:
    """Hashable fingerprint of a map's components, for square lookup tables."""
    return tuple(
        (a, tuple(sorted(f.components[a].items())))
        for a in sorted(f.components)
    )


def square_key(i: int, sq: Square) -> tuple:
    return (i, components_key(sq.top), components_key(sq.bottom))
