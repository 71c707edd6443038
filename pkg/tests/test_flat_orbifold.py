import json

import pytest

from kummer_assoc import flat_orbifold as fo
from kummer_assoc import pipeline as pl
from kummer_assoc.cli import fixture_dir


@pytest.fixture(scope="module")
def t7():
    d = json.loads((fixture_dir() / "t7-involutions.json").read_text())
    return pl.t7_setup(d["orbifold"])


def test_generators_preserve_phi(t7):
    G, ss, lam = t7
    assert all(fo.preserves_phi(g) for g in G.generators)
    assert fo.preserves_phi(lam)


def test_singular_set_shape(t7):
    G, ss, lam = t7
    assert len(ss.components) == 12
    assert ss.strata() == {"A1": 4, "A2": 4, "A3": 4}
    assert not ss.flags
    assert {c.isotropy for c in ss.components} == {"C2"}
    assert {c.dimension for c in ss.components} == {3}


def test_component_ids_are_deterministic(t7):
    G, ss, lam = t7
    again = fo.singular_components(G, {"iota1": "A1", "iota2": "A2", "iota3": "A3"})
    assert [c.id for c in again.components] == [c.id for c in ss.components]
    assert [c.to_json() for c in again.components] == [c.to_json() for c in ss.components]


def test_components_are_pairwise_disjoint(t7):
    G, ss, lam = t7
    tori = [t for c in ss.components for t in c.orbit]
    for a in range(len(tori)):
        for b in range(a + 1, len(tori)):
            assert not fo.tori_intersect(tori[a], tori[b])


def test_symmetry_normalizes_and_permutes(t7):
    G, ss, lam = t7
    assert fo.normalizes(G, lam)
    act = fo.symmetry_action_on_components(G, lam, ss)
    ids = {c.id for c in ss.components}
    assert set(act.permutation) == ids and set(act.permutation.values()) == ids
    # the stated symmetry fixes every component of this quotient (see the ledger)
    assert len(act.fixed) == 12 and not act.cycles


def test_local_model_of_a1_component(t7):
    G, ss, lam = t7
    m = fo.local_model(ss.components[0], ss)
    # Γ = C2 (type A1); G_α is trivial because no element of the quotient moves along the torus
    assert (m.gamma, m.g_class, m.rho) == ("C2", "1", "trivial")
