import copy
import json

import pytest

from kummer_assoc import ale_deformation as ale
from kummer_assoc import pipeline as pl
from kummer_assoc.cli import fixture_dir


def load(tag):
    return json.loads((fixture_dir() / (tag + ".json")).read_text())


def count(d, **kw):
    comps, choices = pl.from_fixture(d["orbifold"], d["resolution"])
    return pl.count_orbifold_points(comps, choices, **kw)


def test_c2_a1_certificate():
    res = count(load("c2-a1"))
    assert res.total == 4
    (cert,) = res.certificates
    assert cert.n_f == 4 and cert.isotropy == [2, 2, 2, 2]
    assert all(i.ok for i in cert.checklist)
    assert cert.to_json()["model"]["topology"] == "S1 x S2"


def test_c2_a2_two_curves_with_distinct_homology():
    res = count(load("c2-a2"))
    assert res.total == 8
    tags = {c.homology for c in res.certificates if c.guaranteed_count}
    assert len(tags) == 2


def test_c2c2_a1_centrality_variant():
    d = load("c2c2-a1")
    assert count(d).total == 32
    assert count(d, strict_centrality=True).total == 0


def test_c2c2_a3_d4_branches():
    res = count(load("c2c2-a3-d4"))
    assert res.per_component == {"C4": 4, "Dic2": 8}


def test_t7_mechanisms():
    d = load("t7-involutions")
    comps, choices = pl.from_fixture(d["orbifold"], d["resolution"])
    assert pl.count_equivariant(comps, choices).total == 12
    # G_⋆ is trivial here, so the orbifold mechanism has no singular points to offer
    assert pl.count_orbifold_points(comps, choices).total == 0


def test_non_primitive_axis_fails_checklist():
    d = load("c2-a1")
    d["resolution"]["components"][0]["axes"][0]["xi"] = [2, 0, 0]
    res = count(d)
    assert res.total == 0
    items = {i.name: i.ok for i in res.certificates[0].checklist}
    assert not items["ii.primitive"]


def test_deformation_point_on_wall_fails():
    d = load("c2-a1")
    d["resolution"]["components"][0]["zeta"] = [[0, 0], [0, 0], [0, 0]]
    res = count(d)
    assert res.total == 0
    item = res.certificates[0].checklist[0]
    assert item.name == "i.curve" and not item.ok


def test_rotation_not_lifting_fails():
    d = load("c2-a1")
    # ζ along j is fixed by R2 only through the nontrivial Weyl element, but no
    # segment lies along i, so no curve is found along the axis
    d["resolution"]["components"][0]["zeta"] = [[0, 0], [1, -1], [0, 0]]
    assert count(d).total == 0


def test_missing_lift_data_raises():
    d = load("c2-a1")
    del d["orbifold"]["components"][0]["rho"]
    with pytest.raises(pl.LiftDataUnavailable):
        count(d)


def test_unknown_component_rejected():
    d = load("c2-a1")
    d["resolution"]["components"][0]["component"] = "nope"
    with pytest.raises(pl.FixtureError):
        count(d)


def test_unbalanced_zeta_rejected():
    d = load("c2-a1")
    d["resolution"]["components"][0]["zeta"] = [[1, 0], [0, 0], [0, 0]]
    with pytest.raises(ale.ChargeError):
        count(d)


def test_certificate_consistency_enforced():
    bad = [pl.Item("ii.primitive", False, "gcd 2")]
    with pytest.raises(ValueError):
        pl.AssociativeCertificate("x", (2, 0, 0), 1, None, 4, bad, pl.ORBIFOLD_POINTS, 4, "")


def test_rotation_of_quaternion_pair():
    from kummer_assoc import crystallographic as cr
    assert pl.rotation_of({"a": [0, -1, 0, 0], "b": [0, -1, 0, 0]}) == cr.R2


def test_mapping_torus_model():
    assert pl.MappingTorusModel().topology == "S1 x S2"
    with pytest.raises(ValueError):
        pl.MappingTorusModel(monodromy="flip").topology
