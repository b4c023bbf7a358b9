"""Tests for atoms, worlds, rule closure and partition-based models."""

import random

import pytest

from ltpal.errors import EvaluationError, IngestionError
from ltpal.model import (
    Atom,
    PALModel,
    RuleSet,
    World,
    enrich_model,
    equivalence_closure,
    rule_closure,
)

from generators import ATOM_POOL, random_model_with_pairs
from oracles import bfs_partition, closure_fixpoint


def test_atom_str_and_ordering():
    atom = Atom("x", "Cat")
    assert str(atom) == "x:Cat"
    assert Atom("a", "B") < Atom("a", "C") < Atom("b", "A")


@pytest.mark.parametrize("data_id", ["", "a b", "a:b", "a,b", "a(b", "a]b", None])
def test_atom_rejects_bad_names(data_id):
    with pytest.raises(ValueError):
        Atom(data_id, "Cat")
    with pytest.raises(ValueError):
        Atom("x", data_id)


def test_world_coerces_atoms_to_frozenset():
    world = World("w", [Atom("x", "Cat"), Atom("x", "Cat")])
    assert world.atoms == frozenset({Atom("x", "Cat")})


def test_world_rejects_non_atoms():
    with pytest.raises(ValueError):
        World("w", ["x:Cat"])
    with pytest.raises(ValueError):
        World("", [])


def test_ruleset_merges_and_reports():
    rules = RuleSet({"Cat": ["Animal", "Pet"], "Dog": ["Animal"]})
    assert rules.implied_by("Cat") == frozenset({"Animal", "Pet"})
    assert rules.implied_by("Sofa") == frozenset()
    assert rules
    assert not RuleSet({})


def test_rule_closure_follows_chains_and_cycles():
    rules = RuleSet({"Cat": ["Feline"], "Feline": ["Animal"], "Animal": ["Cat"]})
    closed = rule_closure([Atom("x", "Cat")], rules)
    assert closed == frozenset(
        {Atom("x", "Cat"), Atom("x", "Feline"), Atom("x", "Animal")}
    )


def test_rule_closure_is_per_datum():
    rules = RuleSet({"Cat": ["Animal"]})
    closed = rule_closure([Atom("x", "Cat"), Atom("y", "Dog")], rules)
    assert Atom("x", "Animal") in closed
    assert Atom("y", "Animal") not in closed


def test_rule_closure_matches_fixpoint_oracle():
    rng = random.Random(1337)
    classes = ["Cat", "Dog", "Fox", "Animal", "Pet", "Being"]
    for _ in range(200):
        rule_map = {
            c: rng.sample(classes, rng.randint(0, 3))
            for c in rng.sample(classes, rng.randint(0, len(classes)))
        }
        rules = RuleSet(rule_map)
        atoms = {
            Atom(rng.choice("xyz"), rng.choice(classes))
            for _ in range(rng.randint(0, 4))
        }
        assert rule_closure(atoms, rules) == closure_fixpoint(atoms, rules.items())


def test_equivalence_closure_matches_bfs_oracle():
    rng = random.Random(99)
    for _ in range(200):
        ids = [f"w{k}" for k in range(rng.randint(1, 7))]
        pairs = [(rng.choice(ids), rng.choice(ids)) for _ in range(rng.randint(0, 8))]
        blocks = equivalence_closure(pairs, ids)
        assert sorted(blocks, key=min) == sorted(bfs_partition(pairs, ids), key=min)
        assert list(blocks) == sorted(blocks, key=min)


def test_equivalence_closure_rejects_unknown_worlds():
    with pytest.raises(IngestionError, match="unknown world id"):
        equivalence_closure([("w0", "nope")], ["w0"])


def _two_worlds():
    return [World("w0", [Atom("x", "Cat")]), World("w1", [Atom("x", "Dog")])]


def test_model_basic_accessors():
    model = PALModel(_two_worlds(), ["a", "b"], {"a": [{"w0", "w1"}]})
    assert [w.id for w in model.worlds] == ["w0", "w1"]
    assert model.agents == ("a", "b")
    assert model.labels("w0") == frozenset({Atom("x", "Cat")})
    assert model.block("a", "w0") == frozenset({"w0", "w1"})
    assert model.block("b", "w0") == frozenset({"w0"})
    assert model.partition("b") == (frozenset({"w0"}), frozenset({"w1"}))
    assert not model.is_empty


def test_model_missing_agent_defaults_to_identity():
    model = PALModel(_two_worlds(), ["a"])
    assert model.partition("a") == (frozenset({"w0"}), frozenset({"w1"}))


def test_model_validation_errors():
    worlds = _two_worlds()
    with pytest.raises(IngestionError, match="duplicate world id"):
        PALModel(worlds + [World("w0")], ["a"])
    with pytest.raises(IngestionError, match="duplicate agent"):
        PALModel(worlds, ["a", "a"])
    with pytest.raises(IngestionError, match="unknown agent"):
        PALModel(worlds, ["a"], {"b": [{"w0", "w1"}]})
    with pytest.raises(IngestionError, match="empty relation block"):
        PALModel(worlds, ["a"], {"a": [set(), {"w0", "w1"}]})
    with pytest.raises(IngestionError, match="two relation blocks"):
        PALModel(worlds, ["a"], {"a": [{"w0", "w1"}, {"w1"}]})
    with pytest.raises(IngestionError, match="does not cover"):
        PALModel(worlds, ["a"], {"a": [{"w0"}]})
    with pytest.raises(IngestionError, match="unknown world id"):
        PALModel(worlds, ["a"], {"a": [{"w0", "w1", "w9"}]})


def test_model_unknown_lookups_raise():
    model = PALModel(_two_worlds(), ["a"])
    with pytest.raises(EvaluationError, match="unknown world id"):
        model.world("zz")
    with pytest.raises(EvaluationError, match="unknown agent"):
        model.partition("zz")
    with pytest.raises(EvaluationError, match="unknown agent"):
        model.block("zz", "w0")
    with pytest.raises(EvaluationError, match="unknown world id"):
        model.block("a", "zz")


def test_from_pairs_closes_relations():
    worlds = [World("w0"), World("w1"), World("w2")]
    model = PALModel.from_pairs(worlds, ["a"], {"a": [("w0", "w1"), ("w1", "w2")]})
    assert model.block("a", "w2") == frozenset({"w0", "w1", "w2"})


def test_restricted_keeps_order_and_intersects():
    worlds = [World("w0"), World("w1"), World("w2")]
    model = PALModel(worlds, ["a"], {"a": [{"w0", "w1"}, {"w2"}]})
    sub = model.restricted({"w2", "w0"})
    assert [w.id for w in sub.worlds] == ["w0", "w2"]
    assert sub.partition("a") == (frozenset({"w0"}), frozenset({"w2"}))


def test_restricted_to_nothing_is_empty():
    model = PALModel(_two_worlds(), ["a"])
    sub = model.restricted([])
    assert sub.is_empty
    assert sub.agents == ("a",)


def test_restricted_rejects_unknown_ids():
    model = PALModel(_two_worlds(), ["a"])
    with pytest.raises(EvaluationError, match="unknown world id"):
        model.restricted({"w0", "zz"})


def test_renamed_rewrites_worlds_and_blocks():
    model = PALModel(_two_worlds(), ["a"], {"a": [{"w0", "w1"}]})
    renamed = model.renamed(lambda wid: f"L1_{wid}")
    assert [w.id for w in renamed.worlds] == ["L1_w0", "L1_w1"]
    assert renamed.block("a", "L1_w0") == frozenset({"L1_w0", "L1_w1"})
    assert renamed.labels("L1_w0") == model.labels("w0")


def test_model_equality_is_structural():
    a = PALModel(_two_worlds(), ["a"], {"a": [{"w0", "w1"}]})
    b = PALModel(_two_worlds(), ["a"], {"a": [["w1", "w0"]]})
    c = PALModel(_two_worlds(), ["a"])
    assert a == b
    assert a != c


def test_enrich_model_closes_every_world():
    rules = RuleSet({"Cat": ["Animal"], "Dog": ["Animal"]})
    model = PALModel(_two_worlds(), ["a"], {"a": [{"w0", "w1"}]})
    rich = enrich_model(model, rules)
    assert rich.labels("w0") == frozenset({Atom("x", "Cat"), Atom("x", "Animal")})
    assert rich.labels("w1") == frozenset({Atom("x", "Dog"), Atom("x", "Animal")})
    assert rich.partition("a") == model.partition("a")


def test_random_models_expose_consistent_blocks():
    rng = random.Random(7)
    for _ in range(100):
        model, pairs = random_model_with_pairs(rng)
        ids = [w.id for w in model.worlds]
        for agent, raw_pairs in pairs.items():
            expected = {fs for fs in bfs_partition(raw_pairs, ids)}
            assert set(model.partition(agent)) == expected
            for wid in ids:
                assert wid in model.block(agent, wid)
