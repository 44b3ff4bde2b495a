"""The ``q(n, .)``-chains on fragmented permutations, compositions and
partitions.

One step: draw ``x ~ q(n, .)``, pick an ordered sequence of ``x`` distinct
balls uniformly, pull them out of their boxes and put them, in that order,
into a new box on the left.  Boxes left empty disappear.  Forgetting ball
labels gives the composition chain; forgetting box order as well gives
the partition chain.
"""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from math import comb, factorial, perm, sqrt
from typing import Sequence

import numpy as np

from .core import (
    ZERO,
    DomainError,
    InvariantViolation,
    check_limit,
    draw_index,
    enumerate_compositions,
    enumerate_partitions,
    make_rng,
    rank,
)
from .kernels import DecrementRow, as_row
from .linalg import stationary_vector
from .regen import composition_probability, full_matrix, partition_probability


@dataclass(frozen=True)
class FragmentedPermutation:
    """Balls ``sigma`` read left to right, cut into boxes of sizes ``lam``."""

    sigma: tuple
    lam: tuple

    def __post_init__(self):
        object.__setattr__(self, "sigma", tuple(self.sigma))
        object.__setattr__(self, "lam", tuple(self.lam))
        n = len(self.sigma)
        if sorted(self.sigma) != list(range(1, n + 1)):
            raise DomainError(f"{self.sigma} is not a permutation of 1..{n}")
        if sum(self.lam) != n or any(b < 1 for b in self.lam):
            raise DomainError(f"{self.lam} is not a composition of {n}")

    @classmethod
    def from_boxes(cls, boxes: Sequence[Sequence[int]]) -> "FragmentedPermutation":
        return cls(tuple(b for box in boxes for b in box), tuple(len(box) for box in boxes))

    @classmethod
    def parse(cls, text: str) -> "FragmentedPermutation":
        """Read ``"2,3,9|1,8|6,7,5|4"``."""
        boxes = [[int(b) for b in chunk.split(",")] for chunk in text.split("|") if chunk.strip()]
        return cls.from_boxes(boxes)

    @property
    def n(self) -> int:
        return len(self.sigma)

    @property
    def boxes(self) -> tuple[tuple[int, ...], ...]:
        out, i = [], 0
        for size in self.lam:
            out.append(self.sigma[i:i + size])
            i += size
        return tuple(out)

    def __str__(self):
        return "|".join(",".join(map(str, box)) for box in self.boxes)


def move_to_new_box(state: FragmentedPermutation, seq: Sequence[int]) -> FragmentedPermutation:
    """Deterministic part of a step: extract ``seq`` into a new leftmost box."""
    taken = set(seq)
    if len(taken) != len(seq) or not taken <= set(state.sigma) or not seq:
        raise DomainError(f"{tuple(seq)} is not a sequence of distinct balls of {state}")
    kept = [tuple(b for b in box if b not in taken) for box in state.boxes]
    return FragmentedPermutation.from_boxes([tuple(seq)] + [box for box in kept if box])


def _draw_size(q_row: DecrementRow, rng: random.Random) -> int:
    return draw_index(q_row.as_tuple(), rng) + 1


def step_fragperm(state: FragmentedPermutation, q_row, rng: random.Random) -> FragmentedPermutation:
    q_row = as_row(q_row)
    if q_row.n != state.n:
        raise DomainError(f"row at level {q_row.n} for a state of size {state.n}")
    x = _draw_size(q_row, rng)
    # random.sample returns the chosen balls in selection order
    return move_to_new_box(state, rng.sample(state.sigma, x))


def _remove(c: Sequence[int], ks: Sequence[int], x: int) -> tuple[int, ...]:
    return (x,) + tuple(ci - ki for ci, ki in zip(c, ks) if ci > ki)


def step_composition(c: Sequence[int], q_row, rng: random.Random) -> tuple[int, ...]:
    """One composition-chain step with removal counts drawn box by box.

    Box ``i`` loses ``k`` balls with the conditional hypergeometric law given
    what the earlier boxes lost; jointly the counts are multivariate
    hypergeometric ``prod C(c_i, k_i) / C(n, x)``.
    """
    q_row = as_row(q_row)
    n = sum(c)
    if q_row.n != n:
        raise DomainError(f"row at level {q_row.n} for a composition of {n}")
    x = _draw_size(q_row, rng)
    need, rest, ks = x, n, []
    for ci in c:
        weights = [Fraction(comb(ci, k) * comb(rest - ci, need - k), comb(rest, need))
                   for k in range(0, min(ci, need) + 1)]
        k = draw_index(weights, rng)
        ks.append(k)
        need -= k
        rest -= ci
    return _remove(c, ks, x)


def composition_transitions(c: Sequence[int], q_row: DecrementRow) -> dict[tuple, Fraction]:
    """Exact one-step law from composition ``c``."""
    c = tuple(c)
    n = sum(c)
    out: dict[tuple, Fraction] = {}
    for x in range(1, n + 1):
        qx = q_row[x]
        if not qx:
            continue
        total = comb(n, x)
        for ks in product(*(range(min(ci, x) + 1) for ci in c)):
            if sum(ks) != x:
                continue
            w = 1
            for ci, ki in zip(c, ks):
                w *= comb(ci, ki)
            target = _remove(c, ks, x)
            out[target] = out.get(target, ZERO) + qx * Fraction(w, total)
    return out


def fragperm_transitions(state: FragmentedPermutation, q_row: DecrementRow) -> dict:
    n = state.n
    out: dict = {}
    for x in range(1, n + 1):
        qx = q_row[x]
        if not qx:
            continue
        w = qx / perm(n, x)
        for seq in permutations(state.sigma, x):
            target = move_to_new_box(state, seq)
            out[target] = out.get(target, ZERO) + w
    return out


# --------------------------------------------------------------------------
# exact chains

class ExactChain:
    """Finite chain with exact rational transition probabilities.

    ``matrix[i]`` is a sparse row ``{j: P(i, j)}`` over ``states``.
    """

    def __init__(self, kind: str, states: list, matrix: list[dict[int, Fraction]]):
        self.kind = kind
        self.states = list(states)
        self.index = {s: i for i, s in enumerate(self.states)}
        self.matrix = matrix
        for i, row in enumerate(matrix):
            if sum(row.values(), ZERO) != 1:
                raise InvariantViolation(f"row of {self.states[i]} sums to {sum(row.values())}")

    def __len__(self):
        return len(self.states)

    def P(self, s, t) -> Fraction:
        return self.matrix[self.index[s]].get(self.index[t], ZERO)

    def row(self, s) -> dict:
        return {self.states[j]: v for j, v in self.matrix[self.index[s]].items()}

    def support_matrix(self) -> np.ndarray:
        out = np.zeros((len(self), len(self)), dtype=bool)
        for i, row in enumerate(self.matrix):
            for j, v in row.items():
                out[i, j] = v > 0
        return out


def fragperm_states(n: int) -> list[FragmentedPermutation]:
    return [FragmentedPermutation(s, c) for s in permutations(range(1, n + 1))
            for c in enumerate_compositions(n)]


def _build(kind, states, transitions) -> ExactChain:
    index = {s: i for i, s in enumerate(states)}
    matrix = [{index[t]: v for t, v in transitions(s).items()} for s in states]
    return ExactChain(kind, states, matrix)


def exact_chain(kind: str, n: int, q_row) -> ExactChain:
    """Full transition matrix of the ``q(n, .)``-chain of the given ``kind``.

    ``kind`` is ``"composition"``, ``"partition"`` or ``"fragperm"``.
    """
    q_row = as_row(q_row)
    if q_row.n != n:
        raise DomainError(f"decrement row is at level {q_row.n}, chain at {n}")
    if kind == "composition":
        check_limit("composition_chain", n)
        return _build(kind, enumerate_compositions(n), lambda c: composition_transitions(c, q_row))
    if kind == "partition":
        check_limit("partition_chain", n)

        def ranked(lam):
            out: dict = {}
            for c, v in composition_transitions(lam.parts, q_row).items():
                key = rank(c)
                out[key] = out.get(key, ZERO) + v
            return out

        return _build(kind, enumerate_partitions(n), ranked)
    if kind == "fragperm":
        check_limit("fragperm_chain", n)
        return _build(kind, fragperm_states(n), lambda s: fragperm_transitions(s, q_row))
    raise DomainError(f"unknown chain kind {kind!r}")


def stationary(chain: ExactChain) -> dict:
    """Exact stationary law by nullspace extraction."""
    pi = stationary_vector(chain.matrix)
    return dict(zip(chain.states, pi))


# --------------------------------------------------------------------------
# structural checks

def verify_l1(n: int, q_row) -> dict:
    """Check the stationary fragmented-permutation law exactly.

    Under it the permutation is uniform, independent of the composition,
    and the composition follows the residual-allocation law of ``q``.
    Raises :class:`InvariantViolation` naming the first offending state.
    """
    q_row = as_row(q_row)
    chain = exact_chain("fragperm", n, q_row)
    pi = stationary(chain)
    perm_marg: Counter = Counter()
    comp_marg: Counter = Counter()
    for s, p in pi.items():
        perm_marg[s.sigma] += p
        comp_marg[s.lam] += p
    uniform = Fraction(1, factorial(n))
    for sigma, p in perm_marg.items():
        if p != uniform:
            raise InvariantViolation(f"permutation {sigma} has mass {p}, expected {uniform}")
    for s, p in pi.items():
        if p != perm_marg[s.sigma] * comp_marg[s.lam]:
            raise InvariantViolation(f"state {s} breaks independence of permutation and composition")
    Q = full_matrix(q_row)
    for c in enumerate_compositions(n):
        law = composition_probability(Q, c)
        if comp_marg[c] != law:
            raise InvariantViolation(f"composition {c} has stationary mass {comp_marg[c]}, expected {law}")
    return {
        "n": n,
        "states": len(chain),
        "permutation_uniform": True,
        "independent": True,
        "composition_law": True,
    }


def _lump(chain: ExactChain, f, target: ExactChain) -> None:
    """Check that ``chain`` pushed forward by ``f`` equals ``target``."""
    for i, s in enumerate(chain.states):
        agg: dict = {}
        for j, v in chain.matrix[i].items():
            key = f(chain.states[j])
            agg[key] = agg.get(key, ZERO) + v
        expected = target.row(f(s))
        if {k: v for k, v in agg.items() if v} != {k: v for k, v in expected.items() if v}:
            raise InvariantViolation(
                f"{chain.kind} row of {s} does not aggregate to the {target.kind} row of {f(s)}")


def pushforward_check(n: int, q_row) -> dict:
    """Fragmented permutations -> compositions -> partitions commute exactly."""
    q_row = as_row(q_row)
    frag = exact_chain("fragperm", n, q_row)
    comp = exact_chain("composition", n, q_row)
    part = exact_chain("partition", n, q_row)
    _lump(frag, lambda s: s.lam, comp)
    _lump(comp, rank, part)
    return {"n": n, "fragperm_to_composition": True, "composition_to_partition": True}


def canonical_target(n: int, q_row) -> tuple[FragmentedPermutation, int]:
    """The state ``1..n`` cut as ``(m, ..., m, r)`` and the count ``k`` of full boxes.

    ``m`` is the largest size charged by ``q(n, .)`` and ``1 <= r <= m``;
    extracting ``n-m+1..n`` and then the blocks ``(k-1)m+1..km``, ..., ``1..m``
    reaches it from anywhere in ``k+1`` steps.
    """
    q_row = as_row(q_row)
    m = max(x for x in range(1, n + 1) if q_row[x] > 0)
    k = (n - 1) // m
    r = n - k * m
    return FragmentedPermutation(tuple(range(1, n + 1)), (m,) * k + (r,)), k


def reachability_check(n: int, q_row) -> bool:
    """Every state reaches the canonical state in exactly ``k+1`` steps."""
    chain = exact_chain("fragperm", n, q_row)
    target, k = canonical_target(n, q_row)
    step = chain.support_matrix().astype(np.int64)
    reach = np.eye(len(chain), dtype=np.int64)
    for _ in range(k + 1):
        reach = np.minimum(reach @ step, 1)
    return bool(reach[:, chain.index[target]].all())


# --------------------------------------------------------------------------
# simulation

@dataclass
class ChainSimulationReport:
    kind: str
    n: int
    steps: int
    burn_in: int
    seed: int
    counts: Counter
    exact: dict

    def deviations(self, k: float = 3.0) -> list[tuple]:
        """``(state, count, expected, sd, within)`` with binomial ``sd``."""
        out = []
        N = self.steps
        for s, p in self.exact.items():
            mean = N * float(p)
            sd = sqrt(N * float(p) * (1 - float(p)))
            dev = abs(self.counts.get(s, 0) - mean)
            out.append((s, self.counts.get(s, 0), mean, sd, dev <= k * sd if sd else dev == 0))
        return out

    def all_within(self, k: float = 3.0) -> bool:
        return all(row[-1] for row in self.deviations(k))


def simulate_chain(kind: str, n: int, q_row, steps: int, burn_in: int, seed: int,
                   start=None) -> ChainSimulationReport:
    """Run the chain and compare occupation counts with the exact stationary law.

    The exact law is the residual-allocation law of ``q`` (compositions) or
    its ranked push-forward (partitions).
    """
    q_row = as_row(q_row)
    rng = make_rng(seed)
    Q = full_matrix(q_row)
    if kind == "composition":
        state = tuple(start) if start else (n,)
        step = lambda s: step_composition(s, q_row, rng)  # noqa: E731
        exact = {c: composition_probability(Q, c) for c in enumerate_compositions(n)}
    elif kind == "partition":
        state = tuple(start) if start else (n,)
        step = lambda s: tuple(rank(step_composition(s, q_row, rng)).parts)  # noqa: E731
        exact = {lam.parts: partition_probability(Q, lam) for lam in enumerate_partitions(n)}
    else:
        raise DomainError(f"simulation supports composition and partition chains, not {kind!r}")
    for _ in range(burn_in):
        state = step(state)
    counts: Counter = Counter()
    for _ in range(steps):
        state = step(state)
        counts[state] += 1
    return ChainSimulationReport(kind, n, steps, burn_in, seed, counts, exact)
