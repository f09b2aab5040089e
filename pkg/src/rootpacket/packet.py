"""Degree-product packet construction and trajectory tracking.

A vertex belongs to the epsilon-packet of a tree snapshot when one of its
edges {i, j} satisfies

    D_j(n) * D_i(n)^2 > eps    or    D_i(n) * D_j(n)^2 > eps,

with D_i(n) = d_i(n) / (alpha_n * sqrt(pi)).  In raw degrees the condition
reads  max(d_j * d_i^2, d_i * d_j^2) > eps * (sqrt(pi) * alpha_n)^3,  which
is how it is evaluated: the degree products stay exact integers and only the
right-hand side is floating point.  Within one ulp-scale band around the
threshold (relative ~1e-12, from the alpha product and the cube) the
comparison inherits the float rounding; ties at the exact boundary are
excluded by the strict inequality and have probability zero.

The inequality is strict (">"), matching the defining event.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from heapq import heappush, heappop

import numpy as np

from . import _kernels
from .ba_tree import SQRT_PI, GrowingTree, grow, grow_to

# d^3 must stay below 2^63; degrees above this bound trigger the exact
# arbitrary-precision path (never reached by preferential attachment growth
# at feasible sizes, but epsilon_packet accepts arbitrary trees).
_INT64_SAFE_DEGREE = 2_000_000


def packet_threshold(epsilon: float, alpha: float) -> int:
    """Integer threshold: degree products must strictly exceed it.

    Equals floor(eps * (sqrt(pi)*alpha)^3).  Because the products are
    integers, ``product > floor(T)`` is equivalent to ``product > T`` for
    every non-integer T, so no precision is lost in the comparison itself.
    """
    return math.floor(epsilon * (SQRT_PI * alpha) ** 3)


def edge_score_exceeds(d_i: int, d_j: int, alpha_n: float, epsilon: float) -> bool:
    """Whether the edge with endpoint degrees (d_i, d_j) passes the packet test.

    Exact in the degree products (Python integers), floating only in the
    threshold; symmetric in (d_i, d_j).
    """
    d_i, d_j = int(d_i), int(d_j)
    return max(d_i * d_i * d_j, d_j * d_j * d_i) > packet_threshold(epsilon, alpha_n)


@dataclass
class EpsilonPacket:
    """The packet of one tree snapshot: vertex set plus its parameters."""

    epsilon: float
    members: set[int]
    n: int

    def sorted_ids(self) -> list[int]:
        return sorted(self.members)

    def to_lines(self) -> str:
        """One sorted vertex id per line."""
        return "".join(f"{i}\n" for i in self.sorted_ids())

    def to_json(self) -> str:
        return "[" + ", ".join(str(i) for i in self.sorted_ids()) + "]"


def _edge_scores(tree: GrowingTree):
    """max(d_i^2 d_j, d_j^2 d_i) for every edge (child i = 2..n)."""
    n = tree.n
    deg = tree.degree
    child = np.arange(2, n + 1)
    use_object = n >= 2 and int(deg[1:].max(initial=0)) > _INT64_SAFE_DEGREE
    dtype = object if use_object else np.int64
    di = deg[2:].astype(dtype)
    dj = deg[tree.parent[2:]].astype(dtype)
    return child, np.maximum(di * di * dj, dj * dj * di)


def epsilon_packet(tree: GrowingTree, epsilon: float) -> EpsilonPacket:
    """Evaluate the packet on a tree snapshot.

    A single-vertex tree has no edges and yields the empty packet.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if tree.n < 2:
        return EpsilonPacket(epsilon, set(), tree.n)
    child, scores = _edge_scores(tree)
    thr = packet_threshold(epsilon, tree.alpha)
    hit = scores > thr
    members = set(map(int, child[hit]))
    members.update(map(int, tree.parent[2:][hit]))
    return EpsilonPacket(epsilon, members, tree.n)


def top_k_degree(tree: GrowingTree, k: int, seed: int) -> set[int]:
    """The k vertices of largest degree; ties broken uniformly at random.

    The tie-break uses random keys from the given seed, never vertex labels.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > tree.n:
        raise ValueError(f"k={k} exceeds tree size {tree.n}")
    rng = np.random.default_rng(seed)
    tiebreak = rng.random(tree.n)
    order = np.lexsort((tiebreak, -tree.degree[1:].astype(np.int64)))
    return set(int(v) + 1 for v in order[:k])


# -- trajectories ------------------------------------------------------------

def checkpoint_grid(n_target: int, ratio: float = 2.0) -> list[int]:
    """Geometric evaluation grid {2, ceil(2r), ceil(2r^2), ...} ending at n_target."""
    if n_target < 2:
        raise ValueError(f"n_target must be >= 2, got {n_target}")
    if not ratio > 1.0:
        raise ValueError(f"checkpoint ratio must be > 1, got {ratio}")
    grid = [2]
    level = 2.0
    while True:
        level *= ratio
        c = math.ceil(level)
        if c >= n_target:
            break
        if c > grid[-1]:
            grid.append(c)
    if n_target > grid[-1]:
        grid.append(n_target)
    return grid


@dataclass
class TrajectoryRecord:
    """Packet statistics of one growth run, sampled on a checkpoint grid."""

    epsilon: float
    checkpoints: list[int]
    sizes: list[int]
    root_in: list[bool]
    running_max_size: int = field(init=False)
    root_always_in: bool = field(init=False)

    def __post_init__(self):
        self.running_max_size = max(self.sizes)
        self.root_always_in = all(self.root_in)

    def to_csv_rows(self) -> list[tuple[int, int, bool]]:
        return list(zip(self.checkpoints, self.sizes, self.root_in))


def packet_trajectory(
    n_target: int,
    epsilon: float,
    checkpoint_ratio: float = 2.0,
    seed: int = 0,
) -> TrajectoryRecord:
    """Grow one tree to n_target, evaluating the packet at every checkpoint."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    grid = checkpoint_grid(n_target, checkpoint_ratio)
    tree = grow(2, seed)
    sizes: list[int] = []
    root_in: list[bool] = []
    thr = np.empty(1, dtype=np.int64)
    for cp in grid:
        grow_to(tree, cp)
        thr[0] = packet_threshold(epsilon, tree.alpha)
        size, root = _kernels.packet_stats(tree._parent, tree._degree, cp, thr)
        sizes.append(int(size[0]))
        root_in.append(bool(root[0]))
    return TrajectoryRecord(epsilon, grid, sizes, root_in)


# -- exact incremental mode ---------------------------------------------------

class _ExactPacketTracker:
    """Running packet size/membership evaluated at every n (not just checkpoints).

    Maintains a per-edge qualification flag and a lazy min-heap of qualifying
    edges keyed by score.  Per step: the threshold rises (monotone in n), so
    stale heap entries are popped and re-checked; the one new edge is scored;
    and the edges incident to the new vertex's attachment target are rescored
    (their scores only grow).  Intended for n up to ~1e5.
    """

    def __init__(self, epsilon: float):
        self.epsilon = epsilon
        self.deg = [0, 1, 1]  # degrees of vertices 0(unused), 1, 2 at n=2
        self.parent = [0, 0, 1]
        self.children: list[list[int]] = [[], [2], []]
        self.alpha = 1.0
        self.score = [0, 0, 1]     # per-edge score, indexed by child vertex
        self.qual = [False, False, False]
        self.incount = [0, 0, 0]   # qualifying incident edges per vertex
        self.size = 0
        self.heap: list[tuple[int, int]] = []
        self.n = 2
        self._rescore(2)

    def _edge_score(self, child: int) -> int:
        di, dj = self.deg[child], self.deg[self.parent[child]]
        return max(di * di * dj, dj * dj * di)

    def _set_qual(self, child: int, value: bool) -> None:
        if value == self.qual[child]:
            return
        self.qual[child] = value
        delta = 1 if value else -1
        for v in (child, self.parent[child]):
            before = self.incount[v] > 0
            self.incount[v] += delta
            after = self.incount[v] > 0
            if after and not before:
                self.size += 1
            elif before and not after:
                self.size -= 1

    def _rescore(self, child: int) -> None:
        s = self._edge_score(child)
        self.score[child] = s
        thr = packet_threshold(self.epsilon, self.alpha)
        if s > thr:
            if not self.qual[child]:
                self._set_qual(child, True)
            heappush(self.heap, (s, child))
        else:
            self._set_qual(child, False)

    def step(self, target: int) -> None:
        """Attach vertex n+1 to ``target`` and refresh packet state."""
        nv = self.n + 1
        self.alpha *= 1.0 + 0.5 / (self.n - 1)
        self.deg.append(1)
        self.parent.append(target)
        self.children.append([])
        self.children[target].append(nv)
        self.deg[target] += 1
        self.score.append(0)
        self.qual.append(False)
        self.incount.append(0)
        self.n = nv
        # rising threshold: evict entries whose stored score no longer passes
        thr = packet_threshold(self.epsilon, self.alpha)
        while self.heap and self.heap[0][0] <= thr:
            s, child = heappop(self.heap)
            if s != self.score[child]:
                continue  # stale entry; the live score was pushed separately
            if self.qual[child]:
                self._set_qual(child, False)
        # new edge, then edges whose scores changed with target's degree
        self._rescore(nv)
        if target != 1:
            self._rescore(target)
        for c in self.children[target]:
            if c != nv:
                self._rescore(c)

    @property
    def root_in(self) -> bool:
        return self.incount[1] > 0


def exact_packet_trajectory(n_target: int, epsilon: float, seed: int) -> TrajectoryRecord:
    """Trajectory with the packet evaluated after every single attachment.

    Grows the tree with the usual kernel, then replays the attachment
    sequence through an incremental tracker.  O(n log n)-ish; use the
    checkpoint grid beyond ~1e5 vertices.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if n_target < 2:
        raise ValueError(f"n_target must be >= 2, got {n_target}")
    tree = grow(n_target, seed)
    tracker = _ExactPacketTracker(epsilon)
    sizes = [tracker.size]
    root_in = [tracker.root_in]
    for v in range(3, n_target + 1):
        tracker.step(int(tree.parent[v]))
        sizes.append(tracker.size)
        root_in.append(tracker.root_in)
    return TrajectoryRecord(epsilon, list(range(2, n_target + 1)), sizes, root_in)
