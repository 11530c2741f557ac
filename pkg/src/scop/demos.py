"""
Worked examples: a discretized position measurement and a classical observation.

The quantum example keeps a wave function on a uniform 1-D grid.  Position
tests are regions made of grid cells.  :func:`build_quantum_scop` turns a
partition of the grid into a finite system whose single context measures
"which union of blocks", with exact rational probabilities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

import numpy as np

from .core import ExperimentSpec, ScopSystem, label_text
from .errors import (
    DuplicatePosition,
    EmptyRegion,
    NotNested,
    PartitionInvalid,
    TooManyBlocks,
    ZeroProbabilityRegion,
)
from .subset_prob import ONE, SubsetProb

__all__ = [
    "WaveFunction",
    "cells_in",
    "position_probability",
    "collapse_wavefunction",
    "l2_distance",
    "CascadeDemoReport",
    "verify_cascade_identities",
    "equal_blocks",
    "QuantumDemo",
    "build_quantum_scop",
    "ClassicalDemo",
    "build_classical_scop",
    "MAX_BLOCKS",
]

NORM_TOL = 1e-12
MAX_BLOCKS = 16


@dataclass(frozen=True)
class WaveFunction:
    """Complex amplitudes on ``n`` equal cells of ``[x0, x1)``.

    The amplitudes must satisfy ``sum |psi_i|^2 dx = 1`` within 1e-12.
    """

    x0: float
    x1: float
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size == 0:
            raise ValueError("amplitudes must be a nonempty 1-D array")
        if not self.x1 > self.x0:
            raise ValueError("grid needs x1 > x0")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        norm = math.fsum(np.abs(amps) ** 2) * self.dx
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"wave function is not normalized (norm {norm!r})")

    @property
    def n_cells(self) -> int:
        return self.amplitudes.size

    @property
    def dx(self) -> float:
        return (self.x1 - self.x0) / self.amplitudes.size

    @property
    def centers(self) -> np.ndarray:
        return self.x0 + (np.arange(self.n_cells) + 0.5) * self.dx

    @classmethod
    def normalized(cls, x0: float, x1: float, amplitudes) -> "WaveFunction":
        amps = np.asarray(amplitudes, dtype=complex)
        dx = (x1 - x0) / amps.size
        norm = math.sqrt(math.fsum(np.abs(amps) ** 2) * dx)
        if norm == 0:
            raise ValueError("zero wave function")
        return cls(x0, x1, amps / norm)

    @classmethod
    def uniform(cls, x0: float, x1: float, n: int) -> "WaveFunction":
        return cls(x0, x1, np.full(n, 1 / math.sqrt(x1 - x0), dtype=complex))

    @classmethod
    def gaussian(cls, x0: float, x1: float, n: int, center: float, width: float, k0: float = 0.0):
        """Gaussian packet ``exp(-(x-c)^2 / (4 w^2) + i k0 x)``, renormalized on the grid."""
        x = x0 + (np.arange(n) + 0.5) * (x1 - x0) / n
        amps = np.exp(-((x - center) ** 2) / (4 * width**2) + 1j * k0 * x)
        return cls.normalized(x0, x1, amps)


def cells_in(psi: WaveFunction, lo: float, hi: float) -> FrozenSet[int]:
    """Indices of the cells whose left edge lies in ``[lo, hi)``."""
    left = psi.x0 + np.arange(psi.n_cells) * psi.dx
    return frozenset(int(i) for i in np.nonzero((left >= lo) & (left < hi))[0])


def _region(psi: WaveFunction, omega: Iterable[int]) -> np.ndarray:
    idx = np.array(sorted(set(int(i) for i in omega)), dtype=int)
    if idx.size == 0:
        raise EmptyRegion("region has no cells")
    if idx[0] < 0 or idx[-1] >= psi.n_cells:
        raise IndexError("region index outside the grid")
    return idx


def position_probability(psi: WaveFunction, omega: Iterable[int]) -> float:
    """Probability to find the particle in the cells ``omega``."""
    idx = _region(psi, omega)
    return math.fsum(np.abs(psi.amplitudes[idx]) ** 2) * psi.dx


def collapse_wavefunction(psi: WaveFunction, omega: Iterable[int]) -> WaveFunction:
    """Project on ``omega`` and renormalize."""
    idx = _region(psi, omega)
    prob = math.fsum(np.abs(psi.amplitudes[idx]) ** 2) * psi.dx
    if prob <= NORM_TOL:
        raise ZeroProbabilityRegion(f"region has probability {prob!r}")
    amps = np.zeros(psi.n_cells, dtype=complex)
    amps[idx] = psi.amplitudes[idx] / math.sqrt(prob)
    return WaveFunction(psi.x0, psi.x1, amps)


def l2_distance(a: WaveFunction, b: WaveFunction) -> float:
    if a.n_cells != b.n_cells or (a.x0, a.x1) != (b.x0, b.x1):
        raise ValueError("wave functions live on different grids")
    return math.sqrt(math.fsum(np.abs(a.amplitudes - b.amplitudes) ** 2) * a.dx)


@dataclass
class CascadeDemoReport:
    p1: float
    p2_direct: float
    p2_after: float
    probability_error: float
    state_distance: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.probability_error <= self.tol and self.state_distance <= self.tol

    def to_dict(self) -> dict:
        return {**self.__dict__, "ok": self.ok}


def verify_cascade_identities(
    psi: WaveFunction, omega1: Iterable[int], omega2: Iterable[int], tol: float = 1e-12
) -> CascadeDemoReport:
    """Nested position tests ``omega2`` inside ``omega1``.

    Checks that the direct probability of ``omega2`` is the probability of
    ``omega1`` times that of ``omega2`` after collapsing on ``omega1``, and
    that collapsing twice gives the directly collapsed state.
    """
    omega1, omega2 = frozenset(omega1), frozenset(omega2)
    if not omega2 <= omega1:
        raise NotNested("the second region must lie inside the first")
    if tol <= 0:
        raise ValueError("tol must be positive")
    p1 = position_probability(psi, omega1)
    p2 = position_probability(psi, omega2)
    after = collapse_wavefunction(psi, omega1)
    p21 = position_probability(after, omega2)
    twice = collapse_wavefunction(after, omega2)
    direct = collapse_wavefunction(psi, omega2)
    return CascadeDemoReport(p1, p2, p21, abs(p2 - p1 * p21), l2_distance(twice, direct), tol)


def equal_blocks(n_cells: int, k: int) -> List[FrozenSet[int]]:
    """Split ``range(n_cells)`` into ``k`` contiguous blocks of near-equal size."""
    if not 1 <= k <= n_cells:
        raise PartitionInvalid(f"cannot split {n_cells} cells into {k} blocks")
    edges = [round(i * n_cells / k) for i in range(k + 1)]
    return [frozenset(range(edges[i], edges[i + 1])) for i in range(k)]


@dataclass
class QuantumDemo:
    system: ScopSystem
    spec: ExperimentSpec
    wavefunctions: Dict[str, WaveFunction]
    weights: Dict[str, Fraction]
    blocks: Dict[str, FrozenSet[int]] = field(default_factory=dict)


def _check_partition(psi: WaveFunction, partition: Sequence[Iterable[int]]) -> List[FrozenSet[int]]:
    blocks = [frozenset(int(i) for i in b) for b in partition]
    if len(blocks) > MAX_BLOCKS:
        raise TooManyBlocks(f"{len(blocks)} blocks; at most {MAX_BLOCKS} are supported")
    if not blocks or any(not b for b in blocks):
        raise PartitionInvalid("blocks must be nonempty")
    seen = set()
    for b in blocks:
        if seen & b:
            raise PartitionInvalid("blocks overlap")
        seen |= b
    if seen != set(range(psi.n_cells)):
        raise PartitionInvalid("blocks do not cover the grid exactly")
    return blocks


def _state_id(S: FrozenSet[str], support: FrozenSet[str]) -> str:
    return "psi" if S == support else f"psi@{{{label_text(S)}}}"


def build_quantum_scop(
    psi: WaveFunction,
    outcome_partition: Sequence[Iterable[int]],
    *,
    destruction: bool = False,
    properties: bool = True,
) -> QuantumDemo:
    """Finite system of a position measurement with outcomes = unions of blocks.

    States are the collapses of ``psi`` onto every nonempty union ``S`` of
    blocks of positive probability (``"psi"`` itself when ``S`` is the
    whole support).  The single context ``"e"`` changes ``psi_T`` to
    ``psi_S`` for every nonempty ``S`` inside ``T``, with outcome ``S``
    and probability ``w(S) / w(T)``, where ``w`` are the block
    probabilities converted exactly from floats.  Contexts do not change.

    Properties ``"in:{...}"`` (one per nonempty union of blocks) say the
    particle is localized in that region.  The construction visits
    ``3^k`` transitions for ``k`` blocks; ``properties=False`` skips the
    ``4^k`` actual-property table.
    """
    blocks = _check_partition(psi, outcome_partition)
    names = [f"b{i}" for i in range(len(blocks))]
    raw = {b: Fraction(position_probability(psi, cells)) for b, cells in zip(names, blocks)}
    # below the wave function tolerance a block cannot be collapsed onto
    raw = {b: (w if w > NORM_TOL else Fraction(0)) for b, w in raw.items()}
    total = sum(raw.values())
    weights = {b: w / total for b, w in raw.items()}
    support = frozenset(b for b in names if weights[b] > 0)
    members = sorted(support)
    subsets = [
        frozenset(c) for r in range(1, len(members) + 1) for c in combinations(members, r)
    ]
    w = {S: sum(weights[b] for b in S) for S in subsets}
    ids = {S: _state_id(S, support) for S in subsets}
    e = "e"
    mu, outcomes = {}, {}
    for T in subsets:
        for S in subsets:
            if S <= T:
                mu[(e, ids[S], e, ids[T])] = SubsetProb.point(w[S] / w[T])
                outcomes[(e, ids[S], ids[T])] = S
    states = [ids[S] for S in subsets]
    xi: Dict[str, FrozenSet[str]] = {}
    props: List[str] = []
    if properties:
        regions = [
            frozenset(c) for r in range(1, len(names) + 1) for c in combinations(names, r)
        ]
        props = [f"in:{{{label_text(R)}}}" for R in regions]
        for S in subsets:
            xi[ids[S]] = frozenset(f"in:{{{label_text(R)}}}" for R in regions if S <= R)
    dstate = None
    if destruction:
        dstate = "0"
        states.append(dstate)
        mu[(e, dstate, e, dstate)] = ONE
    spec = ExperimentSpec(e, outcomes, frozenset(names))
    system = ScopSystem(
        states=states,
        contexts=[e],
        properties=props,
        mu_table=mu,
        xi_table=xi,
        destruction=dstate,
        experiments={e: spec},
    )
    cells = {b: c for b, c in zip(names, blocks)}
    wavefunctions = {}
    for S in subsets:
        region = frozenset().union(*(cells[b] for b in S))
        wavefunctions[ids[S]] = psi if S == support else collapse_wavefunction(psi, region)
    return QuantumDemo(system, spec, wavefunctions, weights, cells)


@dataclass
class ClassicalDemo:
    system: ScopSystem
    spec: ExperimentSpec
    positions: Dict[str, Tuple[float, float]]


def build_classical_scop(positions: Sequence[Tuple[float, float]]) -> ClassicalDemo:
    """Point particle states ``(u, mv)`` observed by a picture taking context.

    The observation leaves every state unchanged and has outcome ``u``.
    """
    if not positions:
        raise ValueError("need at least one particle state")
    seen = set()
    for u, _ in positions:
        if float(u) in seen:
            raise DuplicatePosition(f"position {u!r} appears twice")
        seen.add(float(u))
    e = "picture"
    states, mu, outcomes, xi, table = [], {}, {}, {}, {}
    for u, mv in positions:
        u, mv = float(u), float(mv)
        p = f"({u!r},{mv!r})"
        states.append(p)
        table[p] = (u, mv)
        mu[(e, p, e, p)] = ONE
        outcomes[(e, p, p)] = repr(u)
        xi[p] = frozenset([f"at:{u!r}"])
    props = [f"at:{float(u)!r}" for u, _ in positions]
    spec = ExperimentSpec(e, outcomes)
    system = ScopSystem(
        states=states,
        contexts=[e],
        properties=props,
        mu_table=mu,
        xi_table=xi,
        experiments={e: spec},
    )
    return ClassicalDemo(system, spec, table)
