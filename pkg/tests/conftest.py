import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from scop.core import ExperimentSpec, ScopSystem  # noqa: E402
from scop.subset_prob import ONE, SubsetProb  # noqa: E402


def half():
    return SubsetProb.point("1/2")


@pytest.fixture
def coin():
    """Two contexts on three states; ``flip`` is random, ``look`` is an observation."""
    states = ["h", "t", "up"]
    mu = {
        ("flip", "h", "flip", "up"): half(),
        ("flip", "t", "flip", "up"): half(),
        ("flip", "h", "flip", "h"): ONE,
        ("flip", "t", "flip", "t"): ONE,
        ("look", "h", "look", "h"): ONE,
        ("look", "t", "look", "t"): ONE,
        ("look", "up", "look", "up"): ONE,
    }
    xi = {"h": {"heads", "landed"}, "t": {"tails", "landed"}, "up": set()}
    look = ExperimentSpec(
        "look", {("look", "h", "h"): "H", ("look", "t", "t"): "T", ("look", "up", "up"): "?"}
    )
    flip = ExperimentSpec(
        "flip",
        {
            ("flip", "h", "up"): "H",
            ("flip", "t", "up"): "T",
            ("flip", "h", "h"): "H",
            ("flip", "t", "t"): "T",
        },
    )
    return ScopSystem(
        states,
        ["flip", "look"],
        ["heads", "tails", "landed"],
        mu,
        xi,
        experiments={"look": look, "flip": flip},
    )


@pytest.fixture
def deterministic():
    """d-classical cycle: ``tick`` moves p0 -> p1 -> p2 -> p0 and ``stay`` fixes states."""
    states = ["p0", "p1", "p2"]
    mu = {}
    for i, p in enumerate(states):
        mu[("tick", states[(i + 1) % 3], "tick", p)] = ONE
        mu[("stay", p, "stay", p)] = ONE
    xi = {"p0": {"a"}, "p1": {"a", "b"}, "p2": set()}
    return ScopSystem(states, ["tick", "stay"], ["a", "b"], mu, xi)
