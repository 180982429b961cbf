"""Shared builders for tests: set-shaped presheaves and random instances."""

from __future__ import annotations

import random

import hypothesis.strategies as st

from nwfs.catalog import terminal_category
from nwfs.core import Presheaf, PresheafMap, presheaf


def finset(elements) -> Presheaf:
    """A presheaf on the one-object one-morphism base, i.e. a plain set."""
    if isinstance(elements, int):
        elements = range(elements)
    return presheaf(terminal_category(), {"0": list(elements)}, {})


def set_map(source_size: int, target_size: int, values) -> PresheafMap:
    src, tgt = finset(source_size), finset(target_size)
    return PresheafMap(src, tgt, {"0": {i: v for i, v in enumerate(values)}})


def random_set_map(rng: random.Random, max_size: int = 6, min_source: int = 0) -> PresheafMap:
    n_src = rng.randint(min_source, max_size)
    n_tgt = rng.randint(1, max_size) if n_src else rng.randint(0, max_size)
    return set_map(n_src, n_tgt, [rng.randrange(n_tgt) for _ in range(n_src)])


def random_surjection(rng: random.Random, max_size: int = 4) -> PresheafMap:
    n_tgt = rng.randint(1, max_size)
    extra = rng.randint(0, max_size - 1)
    values = list(range(n_tgt)) + [rng.randrange(n_tgt) for _ in range(extra)]
    rng.shuffle(values)
    return set_map(n_tgt + extra, n_tgt, values)


@st.composite
def set_maps(draw, max_size: int = 5):
    n_src = draw(st.integers(0, max_size))
    n_tgt = draw(st.integers(1 if n_src else 0, max_size))
    values = draw(st.lists(st.integers(0, n_tgt - 1), min_size=n_src, max_size=n_src)) if n_src else []
    return set_map(n_src, n_tgt, values)


@st.composite
def parallel_pairs(draw, max_size: int = 4):
    """Two maps sharing endpoints, for coequalizer properties."""
    n_src = draw(st.integers(0, max_size))
    n_tgt = draw(st.integers(1 if n_src else 0, max_size))
    mk = lambda: [draw(st.integers(0, n_tgt - 1)) for _ in range(n_src)]
    src, tgt = finset(n_src), finset(n_tgt)
    f = PresheafMap(src, tgt, {"0": dict(enumerate(mk()))})
    g = PresheafMap(src, tgt, {"0": dict(enumerate(mk()))})
    return f, g
