import pytest

from oracles import (
    brute_infimum,
    brute_kappa,
    brute_property_complete,
    brute_state_complete,
    brute_supremum,
    powerset,
)
from scop.core import ScopSystem
from scop.errors import NotComplete
from scop.generate import generate
from scop.preorder import (
    check_property_completeness,
    check_state_completeness,
    classify_proper,
    equivalence_classes,
    hasse_edges,
    infimum_set,
    join_states,
    meet_properties,
    preorder_failures,
    property_implies,
    property_state,
    property_view,
    state_implies,
    state_property,
    state_view,
    supremum_set,
)
from scop.subset_prob import ONE


def _loops(states, contexts=("e",)):
    return {(e, p, e, p): ONE for e in contexts for p in states}


def powerset_fixture(n=3):
    states = [f"s{i}" for i in range(n)]
    subsets = [frozenset(c) for c in powerset(states)]
    props = ["k{" + ",".join(sorted(X)) + "}" for X in subsets]
    xi = {p: {a for a, X in zip(props, subsets) if p in X} for p in states}
    return ScopSystem(states, ["e"], props, _loops(states), xi)


def chain_fixture():
    """Totally ordered: s0 < s1 < s2 via nested actual-property sets; complete both ways."""
    states = ["s0", "s1", "s2"]
    xi = {"s0": {"a", "b", "c"}, "s1": {"b", "c"}, "s2": {"c"}}
    return ScopSystem(states, ["e"], ["a", "b", "c"], _loops(states), xi)


def test_property_implies_basics(coin):
    sys = ScopSystem(["p"], ["e"], ["void", "x"], _loops(["p"]), {"p": {"x"}})
    assert property_implies(sys, "void", "x")
    assert property_implies(sys, "x", "x")
    assert property_implies(coin, "heads", "landed")
    assert not property_implies(coin, "landed", "heads")


def test_state_implies_basics(coin):
    assert state_implies(coin, "h", "h")
    # the improper state is implied by everything
    assert all(state_implies(coin, p, "up") for p in coin.states)
    assert not state_implies(coin, "up", "h")


@pytest.mark.parametrize("seed", range(40))
def test_actuality_propagates_down(seed):
    sys = generate(seed, 6, 1, 6)
    for a in sys.properties:
        for q in sys.kappa(a):
            for p in sys.states:
                if state_implies(sys, p, q):
                    assert p in sys.kappa(a)
    for a in sys.properties:
        for b in sys.properties:
            if property_implies(sys, a, b):
                assert all(b in sys.xi(p) for p in sys.states if a in sys.xi(p))


@pytest.mark.parametrize("seed", range(40))
def test_views_are_preorders(seed):
    sys = generate(seed, 7, 1, 7)
    assert preorder_failures(state_view(sys)) == []
    assert preorder_failures(property_view(sys)) == []


@pytest.mark.parametrize("seed", range(20))
def test_equivalence_classes_against_pairing(seed):
    sys = generate(seed, 7, 1, 6)
    for view in (state_view(sys), property_view(sys)):
        classes = equivalence_classes(view)
        assert sorted(x for c in classes for x in c) == sorted(view.carrier)
        cls_of = {x: c for c in classes for x in c}
        for x in view.carrier:
            for y in view.carrier:
                mutual = view.leq(x, y) and view.leq(y, x)
                assert mutual == (cls_of[x] is cls_of[y])
        assert [c[0] for c in classes] == sorted(c[0] for c in classes)


def test_antisymmetric_gives_singletons():
    assert equivalence_classes(state_view(chain_fixture())) == [("s0",), ("s1",), ("s2",)]


@pytest.mark.parametrize("seed", range(20))
def test_infimum_supremum_against_definition(seed):
    sys = generate(seed, 6, 1, 5)
    for view in (state_view(sys), property_view(sys)):
        for fam in powerset(view.carrier):
            if len(fam) > 3:
                continue
            assert infimum_set(view, fam) == brute_infimum(view.leq, view.carrier, fam)
            assert supremum_set(view, fam) == brute_supremum(view.leq, view.carrier, fam)


def test_infimum_examples():
    sys = chain_fixture()
    pv = property_view(sys)
    assert infimum_set(pv, ["b"]) == {"b"}
    # the infimum of all properties is the least one
    assert infimum_set(pv, sys.properties) == {"a"}
    # empty family: the greatest elements
    assert infimum_set(pv, []) == {"c"}
    assert supremum_set(pv, []) == {"a"}
    two = ScopSystem(["p", "q"], ["e"], ["x", "y"], _loops(["p", "q"]), {"p": {"x"}, "q": {"y"}})
    # kappa(x), kappa(y) are disjoint singletons and no property has empty kappa
    assert infimum_set(property_view(two), ["x", "y"]) == frozenset()


@pytest.mark.parametrize("seed", range(20))
def test_hasse_edges_are_covers(seed):
    sys = generate(seed, 6, 1, 6)
    view = property_view(sys)
    reps = [c[0] for c in equivalence_classes(view)]
    strictly = lambda x, y: view.leq(x, y) and not view.leq(y, x)
    expected = {
        (x, y)
        for x in reps
        for y in reps
        if strictly(x, y) and not any(strictly(x, z) and strictly(z, y) for z in reps)
    }
    assert set(hasse_edges(view)) == expected


@pytest.mark.parametrize("seed", range(30))
def test_meet_and_join_against_brute_force(seed):
    sys = generate(seed, 5, 1, 6)
    pv, sv = property_view(sys), state_view(sys)
    for fam in powerset(sys.properties):
        if len(fam) > 3:
            continue
        target = set(sys.states)
        for a in fam:
            target &= brute_kappa(sys, a)
        got = meet_properties(sys, fam)
        assert got == {c for c in sys.properties if brute_kappa(sys, c) == target}
        for c in got:
            assert c in infimum_set(pv, fam)
    for fam in powerset(sys.states):
        if len(fam) > 3:
            continue
        got = join_states(sys, fam)
        for s in got:
            # defining biconditional over every property
            for a in sys.properties:
                assert (s in sys.kappa(a)) == all(p in sys.kappa(a) for p in fam)
            assert s in supremum_set(sv, fam)


def test_meet_of_disjoint_properties_is_the_improper_one():
    sys = ScopSystem(
        ["p", "q"], ["e"], ["x", "y", "never"], _loops(["p", "q"]), {"p": {"x"}, "q": {"y"}}
    )
    assert meet_properties(sys, ["x", "y"]) == {"never"}
    assert meet_properties(sys, ["x"]) == {"x"}
    assert join_states(sys, ["p"]) == {"p"}


@pytest.mark.parametrize("seed", range(60))
def test_completeness_against_brute_force(seed):
    profile = "operational" if seed % 6 == 0 else "generic"
    sys = generate(seed, 5, 2, 6, profile)
    if len(sys.properties) <= 8:
        assert check_property_completeness(sys).complete == brute_property_complete(sys)
    if len(sys.states) <= 8:
        assert check_state_completeness(sys).complete == brute_state_complete(sys)


def test_completeness_witnesses():
    assert check_property_completeness(powerset_fixture()).complete
    sys = ScopSystem(
        ["p", "q", "r"],
        ["e"],
        ["x", "y", "top"],
        _loops(["p", "q", "r"]),
        {"p": {"x", "top"}, "q": {"x", "y", "top"}, "r": {"y", "top"}},
    )
    rep = check_property_completeness(sys)
    assert not rep.complete
    assert rep.missing == [("x", "y")]
    no_top = sys.replace(properties=("x", "y"))
    assert () in check_property_completeness(no_top).missing


def test_property_state_needs_completeness():
    sys = powerset_fixture()
    assert not check_state_completeness(sys).complete
    with pytest.raises(NotComplete):
        property_state(sys, "s0")
    with pytest.raises(NotComplete):
        state_property(sys, "k{s0}")


def test_interval_laws_on_chain():
    sys = chain_fixture()
    assert property_state(sys, "s1") == "b"
    assert state_property(sys, "b") == "s1"
    for p in sys.states:
        s = property_state(sys, p)
        assert sys.xi(p) == {a for a in sys.properties if property_implies(sys, s, a)}
    for a in sys.properties:
        t = state_property(sys, a)
        assert sys.kappa(a) == {p for p in sys.states if state_implies(sys, p, t)}


def test_classify_proper(coin):
    got = classify_proper(coin)
    assert got["improper_states"] == ["up"]
    assert got["improper_properties"] == []
    sys = chain_fixture()
    assert classify_proper(sys)["improper_states"] == []
