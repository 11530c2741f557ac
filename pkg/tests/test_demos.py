import math
import random

import numpy as np
import pytest

from scop.core import validate
from scop.demos import (
    MAX_BLOCKS,
    WaveFunction,
    build_classical_scop,
    build_quantum_scop,
    cells_in,
    collapse_wavefunction,
    equal_blocks,
    l2_distance,
    position_probability,
    verify_cascade_identities,
)
from scop.dynamics import classify, is_eigenstate
from scop.errors import (
    DuplicatePosition,
    EmptyRegion,
    NotNested,
    PartitionInvalid,
    TooManyBlocks,
    ZeroProbabilityRegion,
)
from scop.experiments import is_cascade_experiment, is_first_kind_experiment, outcomes
from scop.subset_prob import ONE


@pytest.fixture
def uniform():
    return WaveFunction.uniform(0.0, 4.0, 64)


def test_wavefunction_checks_norm():
    with pytest.raises(ValueError):
        WaveFunction(0.0, 1.0, np.ones(4) * 2)
    with pytest.raises(ValueError):
        WaveFunction(1.0, 1.0, np.ones(4))
    psi = WaveFunction.gaussian(-5, 5, 300, 0.3, 0.7, k0=2.0)
    assert abs(position_probability(psi, range(psi.n_cells)) - 1) < 1e-12
    with pytest.raises(ValueError):
        psi.amplitudes[0] = 0


def test_uniform_probabilities(uniform):
    half = cells_in(uniform, 0, 2)
    assert half == frozenset(range(32))
    assert position_probability(uniform, half) == pytest.approx(0.5, abs=1e-12)
    after = collapse_wavefunction(uniform, half)
    assert np.allclose(after.amplitudes[:32], uniform.amplitudes[:32] * math.sqrt(2), atol=1e-12)
    assert not after.amplitudes[32:].any()
    assert position_probability(after, half) == pytest.approx(1, abs=1e-12)


def test_collapse_identities(uniform):
    full = range(uniform.n_cells)
    assert l2_distance(collapse_wavefunction(uniform, full), uniform) < 1e-12
    once = collapse_wavefunction(uniform, range(10))
    assert l2_distance(collapse_wavefunction(once, range(10)), once) < 1e-12


def test_region_errors(uniform):
    with pytest.raises(EmptyRegion):
        position_probability(uniform, [])
    with pytest.raises(IndexError):
        position_probability(uniform, [64])
    narrow = WaveFunction.gaussian(0, 10, 200, 1.0, 0.1)
    with pytest.raises(ZeroProbabilityRegion):
        collapse_wavefunction(narrow, range(150, 200))


def test_cascade_uniform(uniform):
    rep = verify_cascade_identities(uniform, cells_in(uniform, 0, 2), cells_in(uniform, 0, 1))
    assert rep.p2_direct == pytest.approx(0.25, abs=1e-12)
    assert rep.p1 == pytest.approx(0.5, abs=1e-12) and rep.p2_after == pytest.approx(0.5, abs=1e-12)
    assert rep.ok
    same = verify_cascade_identities(uniform, range(8), range(8))
    assert same.p2_after == pytest.approx(1, abs=1e-12) and same.state_distance < 1e-12
    with pytest.raises(NotNested):
        verify_cascade_identities(uniform, range(4), range(8))


def test_cascade_gaussian_random_dyadic():
    n = 512
    psi = WaveFunction.gaussian(0, 8, n, 4.0, 1.0, k0=1.5)
    rng = random.Random(7)
    for _ in range(100):
        # dyadic intervals: widths are powers of two, aligned to their width
        w1 = 2 ** rng.randint(4, 9)
        s1 = rng.randrange(n // w1) * w1
        w2 = w1 >> rng.randint(0, 3)
        s2 = s1 + rng.randrange(w1 // w2) * w2
        omega1, omega2 = range(s1, s1 + w1), range(s2, s2 + w2)
        if position_probability(psi, omega2) <= 1e-12:
            continue
        rep = verify_cascade_identities(psi, omega1, omega2, tol=1e-10)
        assert rep.ok, rep.to_dict()


def test_grid_refinement():
    coarse = WaveFunction.gaussian(0, 8, 256, 3.3, 0.8)
    fine = WaveFunction.gaussian(0, 8, 512, 3.3, 0.8)
    for lo, hi in ((0, 2), (2.5, 4), (3, 3.5), (4, 8)):
        diff = abs(position_probability(coarse, cells_in(coarse, lo, hi))
                   - position_probability(fine, cells_in(fine, lo, hi)))
        assert diff <= coarse.dx


def test_partition_errors(uniform):
    with pytest.raises(PartitionInvalid):
        build_quantum_scop(uniform, [range(0, 40), range(30, 64)])
    with pytest.raises(PartitionInvalid):
        build_quantum_scop(uniform, [range(0, 40)])
    with pytest.raises(PartitionInvalid):
        build_quantum_scop(uniform, [[], range(64)])
    with pytest.raises(TooManyBlocks):
        build_quantum_scop(uniform, equal_blocks(64, MAX_BLOCKS + 1))
    with pytest.raises(PartitionInvalid):
        equal_blocks(4, 5)


def test_two_block_eigenstates(uniform):
    sys = build_quantum_scop(uniform, equal_blocks(64, 2)).system
    eigen = [p for p in sys.states if is_eigenstate(sys, p, "e")]
    assert sorted(eigen) == ["psi@{b0}", "psi@{b1}"]
    for q in eigen:
        assert sys.mu("e", q, "e", q) == ONE


def test_quantum_demo_structure():
    psi = WaveFunction.gaussian(0, 4, 256, 2.2, 0.5)
    demo = build_quantum_scop(psi, equal_blocks(256, 4), destruction=True)
    sys = demo.system
    assert len(sys.states) == 15 + 1 and sys.destruction == "0"
    assert sum(demo.weights.values()) == 1
    assert validate(sys).ok
    assert is_first_kind_experiment(sys, "e").ok
    assert is_cascade_experiment(sys, "e").ok
    assert outcomes(sys, "e", "psi@{b1+b2}") == {frozenset({"b1"}), frozenset({"b2"}), frozenset({"b1", "b2"})}
    # a collapsed state is an eigenstate of the collapsing outcome
    for q, wf in demo.wavefunctions.items():
        assert l2_distance(collapse_wavefunction(wf, np.nonzero(wf.amplitudes)[0]), wf) < 1e-12
    atoms = [f"psi@{{b{i}}}" for i in range(4)]
    assert all(is_eigenstate(sys, q, "e") for q in atoms)
    probs = demo.weights
    assert float(sys.mu("e", "psi@{b1}", "e", "psi").value) == pytest.approx(
        position_probability(psi, demo.blocks["b1"]), abs=1e-12
    )
    assert probs["b1"] == sys.mu("e", "psi@{b1}", "e", "psi").value


def test_zero_probability_blocks_are_dropped():
    narrow = WaveFunction.gaussian(0, 10, 200, 1.0, 0.1)
    demo = build_quantum_scop(narrow, equal_blocks(200, 4))
    assert "psi@{b3}" not in demo.system.states
    assert validate(demo.system).ok


def test_classical_demo():
    demo = build_classical_scop([(0.0, 1.0), (1.5, -2.0), (3.0, 0.0)])
    sys = demo.system
    assert classify(sys).d_classical
    for p, (u, _) in demo.positions.items():
        assert is_eigenstate(sys, p, "picture")
        assert outcomes(sys, "picture", p) == {repr(u)}
    one = build_classical_scop([(2.0, 1.0)]).system
    assert list(one.mu_table) == [("picture", "(2.0,1.0)", "picture", "(2.0,1.0)")]
    with pytest.raises(DuplicatePosition):
        build_classical_scop([(1.0, 0.0), (1.0, 5.0)])
