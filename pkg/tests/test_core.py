import pytest
from fractions import Fraction as F

from oracles import brute_kappa
from scop.core import ExperimentSpec, ScopSystem, experiment_violations, validate
from scop.errors import UnknownId
from scop.generate import generate
from scop.subset_prob import ONE, ZERO, SubsetProb


def test_mu_default_and_stored(coin):
    assert coin.mu("look", "h", "flip", "up") == ZERO
    assert coin.mu("flip", "h", "flip", "up") == SubsetProb.point("1/2")
    with pytest.raises(UnknownId):
        coin.mu("nope", "h", "flip", "up")


def test_deterministic_transition(deterministic):
    assert deterministic.mu("tick", "p1", "tick", "p0") == ONE


def test_xi_and_kappa(coin):
    assert coin.xi("up") == frozenset()
    assert coin.kappa("landed") == {"h", "t"}
    with pytest.raises(UnknownId):
        coin.xi("zzz")
    with pytest.raises(UnknownId):
        coin.kappa("zzz")


def test_improper_property():
    sys = ScopSystem(["p"], ["e"], ["never"], {("e", "p", "e", "p"): ONE}, {})
    assert sys.kappa("never") == frozenset()


@pytest.mark.parametrize("seed", range(30))
def test_duality_on_random_systems(seed):
    sys = generate(seed, 6, 2, 6)
    for p in sys.states:
        for a in sys.properties:
            assert (a in sys.xi(p)) == (p in sys.kappa(a))
        for a in sys.properties:
            assert sys.kappa(a) == brute_kappa(sys, a)


def test_explicit_zero_entries_are_dropped():
    sys = ScopSystem(["p"], ["e"], [], {("e", "p", "e", "p"): ONE, ("e", "p", "e", "q"): ZERO}, {})
    assert ("e", "p", "e", "q") not in sys.mu_table


def test_validate_clean(deterministic, coin):
    assert validate(deterministic).ok
    assert validate(coin).ok


def test_validate_empty_row():
    sys = ScopSystem(["p", "q"], ["e"], [], {("e", "q", "e", "p"): ONE}, {})
    rep = validate(sys)
    assert rep.no_reachable_couple == [("e", "q")]
    assert rep.to_dict()["no_reachable_couple"][0]["violation"] == "no reachable couple"


def test_validate_singleton_sum():
    sys = ScopSystem(
        ["p", "q"],
        ["e"],
        [],
        {("e", "p", "e", "p"): SubsetProb.point("0.9"), ("e", "q", "e", "q"): ONE},
        {},
    )
    rep = validate(sys)
    assert rep.singleton_sum == [("e", "p", F(9, 10))]
    assert rep.to_dict()["singleton_sum"][0]["violation"] == "singleton sum != 1"


def test_sum_rule_not_applied_to_interval_systems():
    sys = ScopSystem(["p"], ["e"], [], {("e", "p", "e", "p"): SubsetProb.interval("0.2", "0.9")}, {})
    assert validate(sys).ok


def test_validate_unknown_and_duplicate_ids():
    sys = ScopSystem(
        ["p", "p"], ["e"], ["a"], {("e", "p", "e", "p"): ONE, ("g", "p", "e", "zz"): ONE}, {"p": ["b"], "ghost": []}
    )
    rep = validate(sys)
    assert any("'p' declared 2 times" in m for m in rep.duplicate_ids)
    text = " ".join(rep.unknown_ids)
    assert "'g'" in text and "'zz'" in text and "'b'" in text and "'ghost'" in text
    assert not rep.ok


def test_validate_is_pure(coin):
    before = dict(coin.mu_table)
    assert validate(coin).to_dict() == validate(coin).to_dict()
    assert coin.mu_table == before


def test_experiment_missing_outcome(coin):
    bad = ExperimentSpec("look", {("look", "h", "h"): "H", ("look", "t", "t"): "T"})
    sys = coin.replace(experiments={"look": bad})
    rep = validate(sys)
    assert any("has no outcome" in m for m in rep.experiments)


def test_experiment_outcome_on_impossible_transition(coin):
    spec = dict(coin.experiments["look"].outcomes)
    spec[("look", "h", "t")] = "H"
    sys = coin.replace(experiments={"look": ExperimentSpec("look", spec)})
    assert any("impossible transition" in m for m in experiment_violations(sys, "look"))


def test_experiment_collapse_consistency(coin):
    spec = dict(coin.experiments["flip"].outcomes)
    spec[("flip", "t", "t")] = "H"  # H now leads to h from up but to t from t
    sys = coin.replace(experiments={**coin.experiments, "flip": ExperimentSpec("flip", spec)})
    assert any("leads to" in m for m in experiment_violations(sys, "flip"))


@pytest.mark.parametrize("profile", ["generic", "d-classical", "operational"])
def test_generated_systems_validate(profile):
    for seed in range(10):
        assert validate(generate(seed, 5, 3, 5, profile)).ok, (profile, seed)
