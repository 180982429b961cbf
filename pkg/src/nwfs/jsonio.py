"""JSON documents: inputs, certificates and their re-validation.

Input documents are plain JSON. Categories list objects, morphisms, the
identity assignment and the full composition table as [after, before,
composite] triples. Presheaves list carriers under "sets" and actions per
morphism; maps carry their endpoint presheaves plus components. A generating
set is a list of arrows, each either a map document or a catalog key.

Certificates are self-contained: they embed the normalised inputs, their
digests, and the full run, so `validate_certificate` can recheck every
composition, quotient and triangle without recomputing any colimit. All
serialization is deterministic (sorted keys, fixed list orders, no clocks),
which is what makes byte-identical reruns possible.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any, Mapping

from . import catalog
from .arrows import ArrowObj, GeneratingSet
from .core import (
    EngineError,
    FinCategory,
    Morphism,
    Presheaf,
    PresheafMap,
    presheaf,
    validate,
)

SCHEMA_SEQUENCE = "nwfs.sequence/1"
SCHEMA_COMPARE = "nwfs.compare/1"
SCHEMA_LAWS = "nwfs.laws/1"
SCHEMA_ENUMERATION = "nwfs.enumeration/1"
SCHEMA_FILLER = "nwfs.filler/1"

TOOL = {"name": "nwfs", "version": "0.1.0"}


class InputError(EngineError):
    """A malformed or inconsistent input document, with a document path."""

    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")


def _expect(doc: Any, key: str, kind: type | tuple, path: str) -> Any:
    if not isinstance(doc, dict):
        raise InputError(path, f"expected an object, got {type(doc).__name__}")
    if key not in doc:
        raise InputError(f"{path}/{key}", "missing")
    value = doc[key]
    if not isinstance(value, kind):
        names = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise InputError(f"{path}/{key}", f"expected {names}, got {type(value).__name__}")
    return value


def _int_keyed(doc: Any, path: str) -> dict[int, int]:
    if not isinstance(doc, dict):
        raise InputError(path, f"expected an object, got {type(doc).__name__}")
    out = {}
    for k, v in doc.items():
        try:
            ik = int(k)
        except (TypeError, ValueError):
            raise InputError(f"{path}/{k}", "key is not an integer element id") from None
        if not isinstance(v, int) or isinstance(v, bool):
            raise InputError(f"{path}/{k}", "value is not an integer element id")
        out[ik] = v
    return out


def parse_components(doc: Any, path: str) -> dict[str, dict[int, int]]:
    if not isinstance(doc, dict):
        raise InputError(path, f"expected an object, got {type(doc).__name__}")
    return {obj: _int_keyed(val, f"{path}/{obj}") for obj, val in doc.items()}


# ---------------------------------------------------------------------------
# loading


def load_category(doc: Any, path: str = "$") -> FinCategory:
    if isinstance(doc, str):
        try:
            return catalog.get_category(doc)
        except catalog.UnknownCatalogKey as err:
            raise InputError(path, str(err)) from None
    objects = _expect(doc, "objects", list, path)
    for i, obj in enumerate(objects):
        if not isinstance(obj, str):
            raise InputError(f"{path}/objects/{i}", "object ids must be strings")
    raw_mors = _expect(doc, "morphisms", list, path)
    mors = []
    for i, m in enumerate(raw_mors):
        mp = f"{path}/morphisms/{i}"
        mors.append(
            Morphism(
                _expect(m, "id", str, mp),
                _expect(m, "dom", str, mp),
                _expect(m, "cod", str, mp),
            )
        )
    identities = _expect(doc, "identities", dict, path)
    for obj, mid in identities.items():
        if not isinstance(mid, str):
            raise InputError(f"{path}/identities/{obj}", "identity must be a morphism id")
    raw_table = _expect(doc, "compose", list, path)
    table = {}
    for i, row in enumerate(raw_table):
        rp = f"{path}/compose/{i}"
        if not (isinstance(row, list) and len(row) == 3 and all(isinstance(x, str) for x in row)):
            raise InputError(rp, "expected a [after, before, composite] triple of morphism ids")
        table[(row[0], row[1])] = row[2]
    cat = FinCategory(
        name=doc.get("name", "custom") if isinstance(doc.get("name", "custom"), str) else "custom",
        objects=tuple(objects),
        morphisms=tuple(mors),
        identity=dict(identities),
        table=table,
    )
    problems = validate(cat)
    if problems:
        raise InputError(path, f"invalid category: {problems[0]}")
    return cat


def load_presheaf(doc: Any, path: str, ambient: FinCategory | None) -> Presheaf:
    if not isinstance(doc, dict):
        raise InputError(path, f"expected an object, got {type(doc).__name__}")
    if "category" in doc:
        base = load_category(doc["category"], f"{path}/category")
    elif ambient is not None:
        base = ambient
    else:
        raise InputError(f"{path}/category", "missing and no ambient category given")
    raw_sets = _expect(doc, "sets", dict, path)
    carrier: dict[str, list[int]] = {}
    for obj, elems in raw_sets.items():
        op = f"{path}/sets/{obj}"
        if obj not in base.objects:
            raise InputError(op, f"unknown object {obj!r}")
        if not isinstance(elems, list) or not all(
            isinstance(e, int) and not isinstance(e, bool) for e in elems
        ):
            raise InputError(op, "expected a list of integer element ids")
        carrier[obj] = elems
    actions = {
        mor: _int_keyed(act, f"{path}/actions/{mor}")
        for mor, act in _expect(doc, "actions", dict, path).items()
    }
    for mor in actions:
        if mor not in {m.name for m in base.morphisms}:
            raise InputError(f"{path}/actions/{mor}", "unknown morphism id")
    try:
        X = presheaf(base, carrier, actions)
    except EngineError as err:
        raise InputError(path, str(err)) from None
    problems = validate(X)
    if problems:
        raise InputError(path, f"invalid presheaf: {problems[0]}")
    return X


def load_map(doc: Any, path: str, ambient: FinCategory | None) -> PresheafMap:
    source = load_presheaf(_expect(doc, "source", dict, path), f"{path}/source", ambient)
    target = load_presheaf(_expect(doc, "target", dict, path), f"{path}/target", ambient)
    comps = parse_components(_expect(doc, "components", dict, path), f"{path}/components")
    for obj in comps:
        if obj not in source.base.objects:
            raise InputError(f"{path}/components/{obj}", f"unknown object {obj!r}")
    for obj in source.base.objects:
        comps.setdefault(obj, {})
    f = PresheafMap(source, target, comps)
    problems = validate(f)
    if problems:
        raise InputError(path, f"invalid map: {problems[0]}")
    return f


def load_gens(doc: Any, path: str, ambient: FinCategory) -> GeneratingSet:
    if isinstance(doc, str):
        try:
            gens = catalog.get_gens(doc)
        except catalog.UnknownCatalogKey as err:
            raise InputError(path, str(err)) from None
        if gens.members and gens.members[0].f.source.base != ambient:
            raise InputError(path, f"generating set {doc!r} lives over a different category")
        return gens
    arrows = _expect(doc, "arrows", list, path)
    members: list[ArrowObj] = []
    for i, entry in enumerate(arrows):
        ep = f"{path}/arrows/{i}"
        if isinstance(entry, str):
            try:
                sub = catalog.get_gens(entry)
            except catalog.UnknownCatalogKey as err:
                raise InputError(ep, str(err)) from None
            if sub.members and sub.members[0].f.source.base != ambient:
                raise InputError(ep, f"generating set {entry!r} lives over a different category")
            members.extend(sub.members)
        else:
            label = entry.get("label") if isinstance(entry, dict) else None
            members.append(
                ArrowObj(
                    load_map(entry, ep, ambient),
                    label=label if isinstance(label, str) else f"gen{i}",
                )
            )
    if not members:
        raise InputError(f"{path}/arrows", "generating set is empty")
    return GeneratingSet(members=tuple(members), name=doc.get("name") if isinstance(doc, dict) else None)


# ---------------------------------------------------------------------------
# dumping


def components_doc(f: PresheafMap | Mapping[str, Mapping[int, int]]) -> dict:
    comps = f.components if isinstance(f, PresheafMap) else f
    return {a: {str(x): y for x, y in sorted(comps[a].items())} for a in sorted(comps)}


def presheaf_doc(X: Presheaf, category: Any = None) -> dict:
    doc: dict[str, Any] = {
        "sets": {a: list(X.carrier[a]) for a in sorted(X.base.objects)},
        "actions": {
            m.name: {str(x): y for x, y in sorted(X.action[m.name].items())}
            for m in sorted(X.base.morphisms, key=lambda m: m.name)
        },
    }
    if category is not None:
        doc["category"] = category
    return doc


def map_doc(f: PresheafMap, category: Any = None, label: str | None = None) -> dict:
    doc = {
        "source": presheaf_doc(f.source, category),
        "target": presheaf_doc(f.target, category),
        "components": components_doc(f),
    }
    if label is not None:
        doc["label"] = label
    return doc


def category_doc(cat: FinCategory) -> dict:
    return {
        "name": cat.name,
        "objects": list(cat.objects),
        "morphisms": [
            {"id": m.name, "dom": m.dom, "cod": m.cod}
            for m in sorted(cat.morphisms, key=lambda m: m.name)
        ],
        "identities": {a: cat.identity[a] for a in sorted(cat.objects)},
        "compose": [[g, f, gf] for (g, f), gf in sorted(cat.table.items())],
    }


def gens_doc(gens: GeneratingSet) -> dict:
    return {
        "name": gens.name or "custom",
        "arrows": [
            map_doc(m.f, label=m.label or f"gen{i}") for i, m in enumerate(gens.members)
        ],
    }


def canonical_bytes(doc: Any) -> bytes:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def pretty_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def digest(doc: Any) -> str:
    return hashlib.sha256(canonical_bytes(doc)).hexdigest()


# ---------------------------------------------------------------------------
# certificates


def sequence_body(state) -> dict:
    def opt_comps(m):
        return None if m is None else components_doc(m)

    return {
        "mode": state.mode,
        "budget": {
            "successors_per_block": state.budget.successors_per_block,
            "omega_blocks": state.budget.omega_blocks,
        },
        "converged_at": state.converged_at,
        "exhausted": state.exhausted,
        "stages": [
            {
                "index": s.index,
                "ordinal": s.ordinal,
                "kind": s.kind,
                "mid": presheaf_doc(s.mid),
                "left": components_doc(s.left),
                "right": components_doc(s.right),
            }
            for s in state.stages
        ],
        "links": [components_doc(m) for m in state.links],
        "folds": [opt_comps(m) for m in state.folds],
        "pairs": [
            None if p is None else {"first": components_doc(p[0]), "second": components_doc(p[1])}
            for p in state.pairs
        ],
        "steps": [
            None
            if st is None
            else {
                "mid": presheaf_doc(st.mid),
                "left": components_doc(st.left),
                "right": components_doc(st.right),
                "cells": components_doc(st.cells),
                "squares": [
                    {
                        "gen": i,
                        "top": components_doc(sq.top),
                        "bottom": components_doc(sq.bottom),
                        "cell_leg": components_doc(st.cell_leg(n)),
                    }
                    for n, (i, sq) in enumerate(st.squares)
                ],
            }
            for st in state.steps
        ],
        "cardinalities": [dict(sorted(c.items())) for c in state.cardinalities],
    }


def input_block(cat: FinCategory, gens: GeneratingSet, arrow: PresheafMap) -> tuple[dict, dict]:
    docs = {
        "category": category_doc(cat),
        "gens": gens_doc(gens),
        "arrow": map_doc(arrow),
    }
    digests = {k: digest(v) for k, v in docs.items()}
    return docs, digests


def sequence_certificate(state, algebra=None, table=None, seed: int | None = None) -> dict:
    docs, digests = input_block(state.arrow.f.source.base, state.gens, state.arrow.f)
    return {
        "schema": SCHEMA_SEQUENCE,
        "tool": TOOL,
        "inputs": docs,
        "digests": digests,
        "seed": seed,
        "run": sequence_body(state),
        "algebra": None if algebra is None else {"structure": components_doc(algebra.structure)},
        "lifting_table": None
        if table is None
        else {"fillers": [components_doc(f) for f in table.fillers]},
        "timing": {"elapsed_s": None, "work": state.work},
    }


def compare_certificate(free, plain, report, seed: int | None = None) -> dict:
    docs, digests = input_block(free.arrow.f.source.base, free.gens, free.arrow.f)
    return {
        "schema": SCHEMA_COMPARE,
        "tool": TOOL,
        "inputs": docs,
        "digests": digests,
        "seed": seed,
        "free": sequence_body(free),
        "plain": sequence_body(plain),
        "comparison": {
            "maps": [components_doc(m) for m in report.maps],
            "left_commutes": list(report.left_commutes),
            "right_commutes": list(report.right_commutes),
            "surjective": list(report.surjective),
            "ok": report.ok,
        },
        "timing": {
            "elapsed_s": None,
            "work": {"free": free.work, "plain": plain.work},
        },
    }


def laws_certificate(report, rule_tokens, sample_spec, seed: int | None = None) -> dict:
    return {
        "schema": SCHEMA_LAWS,
        "tool": TOOL,
        "rules": list(rule_tokens),
        "sample": sample_spec,
        "seed": seed,
        "checks": [
            {"rule": c.rule, "law": c.law, "arrow": c.arrow, "ok": c.ok, "detail": c.detail}
            for c in report.checks
        ],
        "ok": report.ok,
        "timing": {"elapsed_s": None, "work": {"checks": len(report.checks)}},
    }


def enumeration_certificate(report, algebras, tables, cat, gens, arrow, seed=None) -> dict:
    docs, digests = input_block(cat, gens, arrow)
    small = report.algebra_count <= 64 and report.table_count <= 64
    return {
        "schema": SCHEMA_ENUMERATION,
        "tool": TOOL,
        "inputs": docs,
        "digests": digests,
        "seed": seed,
        "algebra_count": report.algebra_count,
        "table_count": report.table_count,
        "product_count": report.product_count,
        "problems": list(report.problems),
        "ok": report.ok,
        "algebras": [components_doc(a.structure) for a in algebras] if small else None,
        "tables": [[components_doc(f) for f in t.fillers] for t in tables] if small else None,
        "timing": {"elapsed_s": None, "work": {"algebras": report.algebra_count}},
    }


def filler_certificate(cat, gen_index, gen_arrow, target, top, bottom, filler) -> dict:
    return {
        "schema": SCHEMA_FILLER,
        "tool": TOOL,
        "category": category_doc(cat),
        "generator": gen_index,
        "gen_arrow": map_doc(gen_arrow.f, label=gen_arrow.label),
        "target": map_doc(target),
        "top": components_doc(top),
        "bottom": components_doc(bottom),
        "filler": components_doc(filler),
    }


# ---------------------------------------------------------------------------
# re-validation


def _rebuild_map(doc, path, source, target, problems) -> PresheafMap | None:
    """Parse a components document into a checked map between known presheaves."""
    try:
        comps = parse_components(doc, path)
    except InputError as err:
        problems.append(str(err))
        return None
    f = PresheafMap(source, target, comps)
    bad = validate(f)
    if bad:
        problems.append(f"{path}: {bad[0]}")
        return None
    return f


def _check(problems: list[str], cond: bool, path: str, message: str) -> bool:
    if not cond:
        problems.append(f"{path}: {message}")
    return cond


def _load_inputs(doc, problems) -> tuple | None:
    inputs = doc.get("inputs")
    if not isinstance(inputs, dict):
        problems.append("/inputs: missing or not an object")
        return None
    try:
        cat = load_category(inputs.get("category"), "/inputs/category")
        gens = load_gens(inputs.get("gens"), "/inputs/gens", cat)
        arrow = load_map(inputs.get("arrow"), "/inputs/arrow", cat)
    except InputError as err:
        problems.append(str(err))
        return None
    digests = doc.get("digests")
    if isinstance(digests, dict):
        for key in ("category", "gens", "arrow"):
            want = digests.get(key)
            got = digest(inputs[key])
            _check(problems, want == got, f"/digests/{key}", f"digest mismatch: recorded {want}, recomputed {got}")
    else:
        problems.append("/digests: missing or not an object")
    return cat, gens, arrow


def _validate_run(body, path, cat, gens, arrow, problems) -> dict | None:
    """Recheck one serialized sequence run; return rebuilt pieces on success."""
    from .arrows import as_arrow, generating_squares
    from .core import compose_maps, identity_map, is_iso, is_surjective, maps_equal

    if not isinstance(body, dict):
        problems.append(f"{path}: missing or not an object")
        return None
    mode = body.get("mode")
    if mode not in ("free", "plain"):
        problems.append(f"{path}/mode: expected 'free' or 'plain', got {mode!r}")
        return None
    raw_stages = body.get("stages")
    if not isinstance(raw_stages, list) or not raw_stages:
        problems.append(f"{path}/stages: missing or empty")
        return None
    n = len(raw_stages)
    links_doc = body.get("links", [])
    steps_doc = body.get("steps", [])
    folds_doc = body.get("folds", [])
    pairs_doc = body.get("pairs", [])
    if not (len(links_doc) == n - 1 and len(steps_doc) == len(folds_doc) == len(pairs_doc) == n):
        problems.append(f"{path}: stage/link/step list lengths are inconsistent")
        return None

    C, D = arrow.source, arrow.target
    mids: list = []
    lefts: list = []
    rights: list = []
    before = len(problems)
    for i, sdoc in enumerate(raw_stages):
        sp = f"{path}/stages/{i}"
        try:
            mid = load_presheaf(sdoc.get("mid"), f"{sp}/mid", cat)
        except InputError as err:
            problems.append(str(err))
            return None
        left = _rebuild_map(sdoc.get("left"), f"{sp}/left", C, mid, problems)
        right = _rebuild_map(sdoc.get("right"), f"{sp}/right", mid, D, problems)
        if left is None or right is None:
            return None
        _check(
            problems,
            maps_equal(compose_maps(right, left), arrow),
            sp,
            "right half composed with left half differs from the input arrow",
        )
        mids.append(mid)
        lefts.append(left)
        rights.append(right)

    kinds = [s.get("kind") for s in raw_stages]
    _check(problems, kinds[0] == "zero", f"{path}/stages/0/kind", f"expected 'zero', got {kinds[0]!r}")
    if kinds[0] == "zero":
        _check(problems, maps_equal(lefts[0], identity_map(C)), f"{path}/stages/0", "left half is not the identity")
        _check(problems, maps_equal(rights[0], arrow), f"{path}/stages/0", "right half is not the input arrow")
    for i, kind in enumerate(kinds[1:], start=1):
        if mode == "plain":
            ok = kind in ("onestep", "limit")
        else:
            ok = kind == "onestep" if i == 1 else kind in ("successor", "limit")
        _check(problems, ok, f"{path}/stages/{i}/kind", f"kind {kind!r} is not allowed here in {mode} mode")

    links: list = []
    for i, ldoc in enumerate(links_doc):
        lp = f"{path}/links/{i}"
        link = _rebuild_map(ldoc, lp, mids[i], mids[i + 1], problems)
        if link is None:
            return None
        _check(problems, maps_equal(lefts[i + 1], compose_maps(link, lefts[i])), lp, "link does not extend the left half")
        _check(problems, maps_equal(compose_maps(rights[i + 1], link), rights[i]), lp, "link does not cover the right half")
        links.append(link)

    steps: list = []
    for i, tdoc in enumerate(steps_doc):
        if tdoc is None:
            steps.append(None)
            continue
        tp = f"{path}/steps/{i}"
        try:
            smid = load_presheaf(tdoc.get("mid"), f"{tp}/mid", cat)
        except InputError as err:
            problems.append(str(err))
            return None
        sleft = _rebuild_map(tdoc.get("left"), f"{tp}/left", mids[i], smid, problems)
        sright = _rebuild_map(tdoc.get("right"), f"{tp}/right", smid, D, problems)
        if sleft is None or sright is None:
            return None
        _check(problems, maps_equal(compose_maps(sright, sleft), rights[i]), tp, "step does not factor the stage's right half")

        expected = generating_squares(gens, as_arrow(rights[i]))
        sq_docs = tdoc.get("squares")
        if not isinstance(sq_docs, list) or len(sq_docs) != len(expected):
            problems.append(
                f"{tp}/squares: recorded {len(sq_docs) if isinstance(sq_docs, list) else '?'} squares, "
                f"recomputation finds {len(expected)}"
            )
            return None
        cell_legs = []
        covered = {a: set(sleft.components[a].values()) for a in cat.objects}
        for sn, sqdoc in enumerate(sq_docs):
            qp = f"{tp}/squares/{sn}"
            gi = sqdoc.get("gen")
            want_gi, want_sq = expected[sn]
            if not _check(problems, gi == want_gi, f"{qp}/gen", f"recorded generator {gi}, recomputation gives {want_gi}"):
                return None
            j = gens.members[gi]
            top = _rebuild_map(sqdoc.get("top"), f"{qp}/top", j.f.source, mids[i], problems)
            bottom = _rebuild_map(sqdoc.get("bottom"), f"{qp}/bottom", j.f.target, D, problems)
            leg = _rebuild_map(sqdoc.get("cell_leg"), f"{qp}/cell_leg", j.f.target, smid, problems)
            if top is None or bottom is None or leg is None:
                return None
            _check(problems, maps_equal(top, want_sq.top) and maps_equal(bottom, want_sq.bottom), qp, "square differs from the canonical enumeration")
            _check(problems, maps_equal(compose_maps(rights[i], top), compose_maps(bottom, j.f)), qp, "square does not commute")
            _check(problems, maps_equal(compose_maps(sright, leg), bottom), qp, "cell does not project to the square's bottom")
            _check(
                problems,
                maps_equal(compose_maps(leg, j.f), compose_maps(sleft, top)),
                qp,
                "cell does not agree with the attached top on the generator's domain",
            )
            for a in cat.objects:
                covered[a].update(leg.components[a].values())
            cell_legs.append(leg)
        for a in cat.objects:
            _check(
                problems,
                covered[a] == set(smid.carrier[a]),
                tp,
                f"step middle is not covered by the left half and the cells at object {a!r}",
            )
        steps.append({"mid": smid, "left": sleft, "right": sright, "cells": cell_legs})

    folds: list = []
    for i, fdoc in enumerate(folds_doc):
        if fdoc is None:
            folds.append(None)
            continue
        fp = f"{path}/folds/{i}"
        if steps[i] is None:
            problems.append(f"{fp}: fold recorded for a stage without a step")
            return None
        if i + 1 >= n:
            problems.append(f"{fp}: fold recorded for the final stage")
            return None
        fold = _rebuild_map(fdoc, fp, steps[i]["mid"], mids[i + 1], problems)
        if fold is None:
            return None
        _check(problems, is_surjective(fold), fp, "fold is not surjective")
        _check(problems, maps_equal(links[i], compose_maps(fold, steps[i]["left"])), fp, "fold does not reproduce the link")
        _check(problems, maps_equal(compose_maps(rights[i + 1], fold), steps[i]["right"]), fp, "fold does not cover the step's right half")
        folds.append(fold)

    for i, pdoc in enumerate(pairs_doc):
        if pdoc is None:
            continue
        pp = f"{path}/pairs/{i}"
        if folds[i] is None:
            problems.append(f"{pp}: parallel pair recorded without a fold")
            continue
        try:
            u1 = parse_components(pdoc.get("first"), f"{pp}/first")
            u2 = parse_components(pdoc.get("second"), f"{pp}/second")
        except InputError as err:
            problems.append(str(err))
            continue
        fold = folds[i]
        for a in cat.objects:
            c1, c2 = u1.get(a, {}), u2.get(a, {})
            if set(c1) != set(c2):
                problems.append(f"{pp}: the two parallel maps have different domains at object {a!r}")
                continue
            for x, y1 in c1.items():
                y2 = c2[x]
                if y1 not in fold.components[a] or y2 not in fold.components[a]:
                    problems.append(f"{pp}: pair lands outside the step middle at object {a!r}")
                    break
                if fold.components[a][y1] != fold.components[a][y2]:
                    problems.append(f"{pp}: fold does not coequalize the recorded pair at object {a!r}, element {x}")
                    break

    if mode == "plain":
        _check(problems, all(f is None for f in folds_doc), f"{path}/folds", "plain mode must not record folds")
        _check(problems, all(p is None for p in pairs_doc), f"{path}/pairs", "plain mode must not record pairs")
    else:
        for i in range(n - 1):
            _check(problems, steps_doc[i] is not None, f"{path}/steps/{i}", "free mode stage is missing its step")
            _check(problems, folds_doc[i] is not None, f"{path}/folds/{i}", "free mode stage is missing its fold")

    gamma = body.get("converged_at")
    if gamma is not None:
        if not isinstance(gamma, int) or not 0 <= gamma < n - 1:
            problems.append(f"{path}/converged_at: index {gamma!r} out of range")
        else:
            _check(problems, is_iso(links[gamma]), f"{path}/converged_at", f"link {gamma} is not an isomorphism")
            for i in range(gamma):
                if is_iso(links[i]):
                    _check(
                        problems,
                        raw_stages[i + 1].get("kind") == "limit",
                        f"{path}/converged_at",
                        f"link {i} is already an isomorphism",
                    )
    else:
        _check(problems, body.get("exhausted") is True, f"{path}/exhausted", "run neither converged nor exhausted")

    cards = body.get("cardinalities")
    if isinstance(cards, list) and len(cards) == n:
        for i, card in enumerate(cards):
            _check(problems, card == mids[i].sizes, f"{path}/cardinalities/{i}", "recorded sizes differ from the stage middle")
    else:
        problems.append(f"{path}/cardinalities: missing or wrong length")

    if len(problems) > before + 24:
        del problems[before + 24 :]
        problems.append(f"{path}: further problems suppressed")
    return {"mids": mids, "lefts": lefts, "rights": rights, "links": links, "steps": steps, "converged_at": gamma}


def _validate_sequence_cert(doc, problems) -> None:
    loaded = _load_inputs(doc, problems)
    if loaded is None:
        return
    cat, gens, arrow = loaded
    run = _validate_run(doc.get("run"), "/run", cat, gens, arrow, problems)
    if run is None:
        return
    from .core import compose_maps, identity_map, maps_equal

    gamma = run["converged_at"]
    alg = doc.get("algebra")
    if alg is not None:
        if gamma is None or run["steps"][gamma] is None:
            problems.append("/algebra: recorded without a converged stage step")
        else:
            step = run["steps"][gamma]
            p = _rebuild_map(alg.get("structure"), "/algebra/structure", step["mid"], run["mids"][gamma], problems)
            if p is not None:
                _check(
                    problems,
                    maps_equal(compose_maps(p, step["left"]), identity_map(run["mids"][gamma])),
                    "/algebra/structure",
                    "structure map does not retract the step's left half",
                )
                _check(
                    problems,
                    maps_equal(compose_maps(run["rights"][gamma], p), step["right"]),
                    "/algebra/structure",
                    "structure map does not live over the factored arrow",
                )
    table = doc.get("lifting_table")
    if table is not None:
        if gamma is None or run["steps"][gamma] is None:
            problems.append("/lifting_table: recorded without a converged stage step")
            return
        from .arrows import as_arrow, generating_squares

        squares = generating_squares(gens, as_arrow(run["rights"][gamma]))
        fillers = table.get("fillers")
        if not isinstance(fillers, list) or len(fillers) != len(squares):
            problems.append(
                f"/lifting_table/fillers: expected {len(squares)} fillers, got "
                f"{len(fillers) if isinstance(fillers, list) else '?'}"
            )
            return
        for sn, fdoc in enumerate(fillers):
            fp = f"/lifting_table/fillers/{sn}"
            gi, sq = squares[sn]
            j = gens.members[gi]
            filler = _rebuild_map(fdoc, fp, j.f.target, run["mids"][gamma], problems)
            if filler is None:
                continue
            _check(problems, maps_equal(compose_maps(filler, j.f), sq.top), fp, "upper filler triangle fails")
            _check(problems, maps_equal(compose_maps(run["rights"][gamma], filler), sq.bottom), fp, "lower filler triangle fails")


def _validate_compare_cert(doc, problems) -> None:
    loaded = _load_inputs(doc, problems)
    if loaded is None:
        return
    cat, gens, arrow = loaded
    free = _validate_run(doc.get("free"), "/free", cat, gens, arrow, problems)
    plain = _validate_run(doc.get("plain"), "/plain", cat, gens, arrow, problems)
    if free is None or plain is None:
        return
    if isinstance(doc.get("free"), dict):
        _check(problems, doc["free"].get("mode") == "free", "/free/mode", "expected the free sequence")
    if isinstance(doc.get("plain"), dict):
        _check(problems, doc["plain"].get("mode") == "plain", "/plain/mode", "expected the plain sequence")
    comp = doc.get("comparison")
    if not isinstance(comp, dict):
        problems.append("/comparison: missing or not an object")
        return
    maps_doc = comp.get("maps")
    n = min(len(plain["mids"]), len(free["mids"]))
    if not isinstance(maps_doc, list) or len(maps_doc) != n or len(plain["mids"]) != len(free["mids"]):
        problems.append(f"/comparison/maps: expected one map per stage ({n} stages)")
        return
    from .core import compose_maps, is_surjective, maps_equal

    left_flags, right_flags, surj_flags = [], [], []
    for i, mdoc in enumerate(maps_doc):
        mp = f"/comparison/maps/{i}"
        q = _rebuild_map(mdoc, mp, plain["mids"][i], free["mids"][i], problems)
        if q is None:
            return
        left_flags.append(maps_equal(compose_maps(q, plain["lefts"][i]), free["lefts"][i]))
        right_flags.append(maps_equal(compose_maps(free["rights"][i], q), plain["rights"][i]))
        surj_flags.append(is_surjective(q))
        _check(problems, left_flags[-1], mp, "does not commute with the left halves")
        _check(problems, right_flags[-1], mp, "does not commute with the right halves")
        _check(problems, surj_flags[-1], mp, "is not componentwise surjective")
    for key, got in (("left_commutes", left_flags), ("right_commutes", right_flags), ("surjective", surj_flags)):
        _check(problems, comp.get(key) == got, f"/comparison/{key}", "recorded flags differ from recomputation")
    _check(problems, comp.get("ok") == all(left_flags + right_flags + surj_flags), "/comparison/ok", "summary flag is wrong")


def rule_from_token(token: str):
    from . import rules

    builders = {
        "graph": rules.graph_rule,
        "cograph": rules.cograph_rule,
        "trivial-left": rules.trivial_left_rule,
        "trivial-right": rules.trivial_right_rule,
    }
    if token in builders:
        return builders[token]()
    if token.startswith("mutant"):
        try:
            return rules.mutant_rule(int(token[len("mutant") :]))
        except (ValueError, EngineError):
            pass
    for i in range(rules.MUTANT_COUNT):
        rule = rules.mutant_rule(i)
        if rule.name == token:
            return rule
    raise InputError("/rules", f"unknown rule token {token!r}")


def _sample_from_spec(spec, problems) -> list | None:
    from . import laws

    if not isinstance(spec, dict):
        problems.append("/sample: missing or not an object")
        return None
    kind = spec.get("kind")
    if kind == "exhaustive":
        max_total = spec.get("max_total")
        if not isinstance(max_total, int) or max_total < 0:
            problems.append("/sample/max_total: expected a non-negative integer")
            return None
        return laws.exhaustive_arrows(max_total)
    if kind == "seeded":
        try:
            base = load_category(spec.get("category"), "/sample/category")
        except InputError as err:
            problems.append(str(err))
            return None
        count, seed = spec.get("count"), spec.get("seed")
        if not isinstance(count, int) or not isinstance(seed, int):
            problems.append("/sample: seeded samples need integer count and seed")
            return None
        return laws.sample_arrows(base, count, seed)
    problems.append(f"/sample/kind: unknown kind {kind!r}")
    return None


def _validate_laws_cert(doc, problems) -> None:
    from . import laws

    tokens = doc.get("rules")
    if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
        problems.append("/rules: expected a list of rule tokens")
        return
    try:
        rules_ = [rule_from_token(t) for t in tokens]
    except InputError as err:
        problems.append(str(err))
        return
    sample = _sample_from_spec(doc.get("sample"), problems)
    if sample is None:
        return
    report = laws.check_laws(rules_, sample)
    recorded = doc.get("checks")
    recomputed = [
        {"rule": c.rule, "law": c.law, "arrow": c.arrow, "ok": c.ok} for c in report.checks
    ]
    if not isinstance(recorded, list) or len(recorded) != len(recomputed):
        problems.append(f"/checks: expected {len(recomputed)} entries")
        return
    for i, (rec, new) in enumerate(zip(recorded, recomputed)):
        slim = {k: rec.get(k) for k in ("rule", "law", "arrow", "ok")} if isinstance(rec, dict) else None
        _check(problems, slim == new, f"/checks/{i}", f"recorded verdict differs from recomputation ({slim} vs {new})")
    _check(problems, doc.get("ok") == report.ok, "/ok", "summary flag differs from recomputation")


def _validate_enumeration_cert(doc, problems) -> None:
    loaded = _load_inputs(doc, problems)
    if loaded is None:
        return
    cat, gens, arrow = loaded
    from . import algebras

    report = algebras.check_bijection(gens, arrow)
    for key in ("algebra_count", "table_count", "product_count"):
        _check(
            problems,
            doc.get(key) == getattr(report, key),
            f"/{key}",
            f"recorded {doc.get(key)}, recomputed {getattr(report, key)}",
        )
    _check(problems, list(doc.get("problems", [])) == list(report.problems), "/problems", "recorded problems differ")
    _check(problems, doc.get("ok") == report.ok, "/ok", "summary flag differs from recomputation")
    if doc.get("algebras") is not None:
        listed = [components_doc(a.structure) for a in algebras.enumerate_algebra_structures(gens, arrow)]
        _check(problems, doc["algebras"] == listed, "/algebras", "recorded listing differs from recomputation")
    if doc.get("tables") is not None:
        listed = [[components_doc(f) for f in t.fillers] for t in algebras.enumerate_lifting_tables(gens, arrow)]
        _check(problems, doc["tables"] == listed, "/tables", "recorded listing differs from recomputation")


def _validate_filler_cert(doc, problems) -> None:
    try:
        cat = load_category(doc.get("category"), "/category")
        gen = load_map(doc.get("gen_arrow"), "/gen_arrow", cat)
        target = load_map(doc.get("target"), "/target", cat)
    except InputError as err:
        problems.append(str(err))
        return
    from .core import compose_maps, maps_equal

    top = _rebuild_map(doc.get("top"), "/top", gen.source, target.source, problems)
    bottom = _rebuild_map(doc.get("bottom"), "/bottom", gen.target, target.target, problems)
    filler = _rebuild_map(doc.get("filler"), "/filler", gen.target, target.source, problems)
    if top is None or bottom is None or filler is None:
        return
    _check(problems, maps_equal(compose_maps(target, top), compose_maps(bottom, gen)), "/top", "the problem square does not commute")
    _check(problems, maps_equal(compose_maps(filler, gen), top), "/filler", "upper triangle fails")
    _check(problems, maps_equal(compose_maps(target, filler), bottom), "/filler", "lower triangle fails")


_VALIDATORS = {
    SCHEMA_SEQUENCE: _validate_sequence_cert,
    SCHEMA_COMPARE: _validate_compare_cert,
    SCHEMA_LAWS: _validate_laws_cert,
    SCHEMA_ENUMERATION: _validate_enumeration_cert,
    SCHEMA_FILLER: _validate_filler_cert,
}


def validate_certificate(doc: Any) -> list[str]:
    """Recheck a certificate document; returns all problems found, or []."""
    problems: list[str] = []
    if not isinstance(doc, dict):
        return ["/: certificate must be a JSON object"]
    schema = doc.get("schema")
    validator = _VALIDATORS.get(schema)
    if validator is None:
        return [f"/schema: unknown schema {schema!r}"]
    try:
        validator(doc, problems)
    except InputError as err:
        problems.append(str(err))
    except EngineError as err:
        problems.append(f"/: recomputation failed: {err}")
    return problems
