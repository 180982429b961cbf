import copy
import json

import pytest

from conftest import set_map
from nwfs.algebras import check_bijection, enumerate_algebra_structures, enumerate_lifting_tables
from nwfs.arrows import as_arrow, generating_squares
from nwfs.catalog import get_category, get_gens, representable, terminal_category
from nwfs.core import maps_equal, validate
from nwfs.jsonio import (
    InputError,
    canonical_bytes,
    category_doc,
    compare_certificate,
    digest,
    enumeration_certificate,
    filler_certificate,
    gens_doc,
    laws_certificate,
    load_category,
    load_gens,
    load_map,
    load_presheaf,
    map_doc,
    presheaf_doc,
    sequence_certificate,
    validate_certificate,
)
from nwfs.laws import check_laws, exhaustive_arrows
from nwfs.sequence import OrdinalBudget, build_comparison, run_free, run_plain

POINT = get_gens("point")


def reload(doc):
    """Push a document through its serialized form, as a file write would."""
    return json.loads(json.dumps(doc))


def test_category_round_trip():
    for key in ("terminal", "delta<=1", "delta<=2"):
        cat = get_category(key)
        back = load_category(reload(category_doc(cat)))
        assert back.objects == cat.objects
        assert {m.name for m in back.morphisms} == {m.name for m in cat.morphisms}
        assert back.table == cat.table
        assert validate(back) == []


def test_presheaf_round_trip():
    base = get_category("delta<=1")
    X = representable(base, "1")
    back = load_presheaf(reload(presheaf_doc(X, category=category_doc(base))), "$", None)
    assert back.carrier == X.carrier
    assert back.action == X.action


def test_map_round_trip_with_ambient_category():
    f = set_map(3, 2, [1, 0, 0])
    doc = reload(map_doc(f))
    back = load_map(doc, "$", terminal_category())
    assert maps_equal(back, f)


def test_gens_round_trip_and_catalog_splice():
    gens = get_gens("horns<=1")
    back = load_gens(reload(gens_doc(gens)), "$", get_category("delta<=1"))
    assert len(back.members) == len(gens.members)
    for a, b in zip(back.members, gens.members):
        assert maps_equal(a.f, b.f)
    spliced = load_gens({"arrows": ["point"]}, "$", terminal_category())
    assert len(spliced.members) == 1


def test_load_errors_carry_pointers():
    with pytest.raises(InputError) as err:
        load_category({"objects": ["0"], "morphisms": [{"id": "id0", "dom": 3, "cod": "0"}],
                       "identities": {"0": "id0"}, "compose": []})
    assert "/morphisms/0" in str(err.value)

    with pytest.raises(InputError) as err:
        load_presheaf({"sets": {"9": [0]}, "actions": {}}, "$", terminal_category())
    assert "/sets/9" in str(err.value)

    with pytest.raises(InputError) as err:
        load_map({"source": {"sets": {"0": [0]}, "actions": {"id0": {"0": 0}}},
                  "target": {"sets": {"0": [0]}, "actions": {"id0": {"0": 0}}},
                  "components": {"0": {"0": 7}}}, "$", terminal_category())
    assert "invalid map" in str(err.value)

    with pytest.raises(InputError):
        load_gens("delta<=1", "$", terminal_category())

    with pytest.raises(InputError):
        load_gens({"arrows": ["horns<=1"]}, "$", terminal_category())


def test_digest_survives_serialization():
    doc = {"b": [1, 2, {"x": None}], "a": "text"}
    assert digest(doc) == digest(reload(doc))
    assert canonical_bytes({"a": 1, "b": 2}) == canonical_bytes({"b": 2, "a": 1})
    assert digest({"a": 1}) != digest({"a": 2})


def fresh_sequence_cert():
    g = set_map(2, 3, [0, 0])
    state = run_free(POINT, g)
    from nwfs.algebras import extract_algebra, fillers_from_algebra

    alg = extract_algebra(state)
    return sequence_certificate(state, alg, fillers_from_algebra(alg), seed=5)


def test_sequence_certificate_validates_clean():
    cert = reload(fresh_sequence_cert())
    assert validate_certificate(cert) == []


def test_sequence_certificate_catches_tampering():
    base = fresh_sequence_cert()

    stale = copy.deepcopy(reload(base))
    stale["digests"]["arrow"] = "0" * 64
    assert any("digest" in p for p in validate_certificate(stale))

    wrong_stage = copy.deepcopy(reload(base))
    wrong_stage["run"]["stages"][1]["left"]["0"]["0"] = 1
    assert validate_certificate(wrong_stage) != []

    wrong_gamma = copy.deepcopy(reload(base))
    wrong_gamma["run"]["converged_at"] = 0
    assert validate_certificate(wrong_gamma) != []

    dropped = copy.deepcopy(reload(base))
    dropped["run"]["steps"] = []
    assert validate_certificate(dropped) != []


def test_compare_certificate_validates_and_catches_tampering():
    g = set_map(2, 2, [0, 0])
    budget = OrdinalBudget(2, 1)
    free = run_free(POINT, g, budget=budget, stop_at_convergence=False)
    plain = run_plain(POINT, g, budget=budget, stop_at_convergence=False)
    report = build_comparison(free, plain)
    cert = reload(compare_certificate(free, plain, report, seed=None))
    assert validate_certificate(cert) == []

    bent = copy.deepcopy(cert)
    last = bent["comparison"]["maps"][-1]
    key = next(iter(last["0"]))
    room = len(bent["plain"]["stages"][-1]["mid"]["sets"]["0"])
    last["0"][key] = (last["0"][key] + 1) % room
    assert validate_certificate(bent) != []


def test_laws_certificate_validates_and_catches_tampering():
    from nwfs.rules import cograph_rule, graph_rule

    rules = [graph_rule(), cograph_rule()]
    sample = exhaustive_arrows(3)
    cert = reload(
        laws_certificate(
            check_laws(rules, sample),
            ["graph", "cograph"],
            {"kind": "exhaustive", "max_total": 3},
            seed=None,
        )
    )
    assert validate_certificate(cert) == []

    lie = copy.deepcopy(cert)
    lie["checks"][0]["ok"] = False
    assert validate_certificate(lie) != []


def test_enumeration_certificate_round_trip():
    g = set_map(2, 2, [0, 1])
    report = check_bijection(POINT, g)
    cert = reload(
        enumeration_certificate(
            report,
            enumerate_algebra_structures(POINT, g),
            enumerate_lifting_tables(POINT, g),
            terminal_category(),
            POINT,
            g,
        )
    )
    assert validate_certificate(cert) == []

    off = copy.deepcopy(cert)
    off["algebra_count"] += 1
    assert validate_certificate(off) != []


def test_filler_certificate_round_trip():
    g = set_map(2, 1, [0, 0])
    arrow = as_arrow(g)
    (i, sq), *_ = generating_squares(POINT, arrow)
    table = enumerate_lifting_tables(POINT, g)[0]
    cert = reload(
        filler_certificate(
            terminal_category(), i, POINT.members[i], g, sq.top, sq.bottom, table.fillers[0]
        )
    )
    assert validate_certificate(cert) == []

    broken = copy.deepcopy(cert)
    broken["filler"]["0"]["0"] = 9
    assert validate_certificate(broken) != []


def test_validator_rejects_unknown_schema():
    assert validate_certificate({"schema": "nwfs.mystery/1"}) != []
    assert validate_certificate(["not", "an", "object"]) != []
