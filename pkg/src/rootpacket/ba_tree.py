"""Preferential-attachment tree process with O(1) amortized growth.

The process starts from a single vertex 1; vertex 2 attaches to it, and every
later vertex n+1 attaches to an existing vertex with probability proportional
to its degree.  Degree-proportional sampling is realized by indexing uniformly
into a flat array of edge endpoints (each edge contributes both of its ends).

Alongside the raw degrees the tree maintains the normalizer

    alpha_n = prod_{k=1}^{n-2} (1 + 1/(2k)),   alpha_2 = 1,

which grows like 2*sqrt(n/pi); the normalized degrees
``d_i(n) / (alpha_n * sqrt(pi))`` are positive martingales in n, which is
what the packet construction and all statistical checks are built on.

Vertex ids are 1-based.  All randomness is a deterministic function of the
seed (see :mod:`rootpacket.rng`).  A tree instance is single-threaded (the
process is inherently sequential), but independent trees share no mutable
state and grow in parallel freely; the memory footprint is three int32
arrays, ~16 bytes per vertex, plus a lazily built child table on demand.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from . import _kernels
from .rng import seed_sequence

SQRT_PI = math.sqrt(math.pi)

_EXPORT_FORMATS = ("edge-list", "graphml", "dot")


class GrowingTree:
    """A labeled preferential-attachment tree plus its growth state.

    Attributes are exposed as trimmed views over preallocated arrays:

    - ``n``: number of vertices.
    - ``parent``: int32 array of length n+1; ``parent[i]`` is the attachment
      target of vertex i (entries 0 and 1 are unused and hold 0).
    - ``degree``: int32 array of length n+1; ``degree[i]`` = d_i(n).
    - ``endpoints``: int32 array of length 2(n-1); edge k (the one created by
      vertex k) occupies slots 2(k-2) and 2(k-2)+1 as (k, parent[k]).
    - ``alpha``: the normalizer alpha_n (1.0 for n <= 2).
    - ``rng_state``: 4-word uint64 xoshiro256++ state.
    """

    __slots__ = ("n", "alpha", "rng_state", "_parent", "_degree", "_endpoints",
                 "_child_offsets", "_child_data")

    def __init__(self, capacity: int, rng_state: np.ndarray):
        capacity = max(int(capacity), 2)
        self.n = 1
        self.alpha = 1.0
        self.rng_state = rng_state
        self._parent = np.zeros(capacity + 1, dtype=np.int32)
        self._degree = np.zeros(capacity + 1, dtype=np.int32)
        self._endpoints = np.zeros(2 * (capacity - 1), dtype=np.int32)
        self._child_offsets = None
        self._child_data = None

    # -- views ------------------------------------------------------------

    @property
    def parent(self) -> np.ndarray:
        return self._parent[: self.n + 1]

    @property
    def degree(self) -> np.ndarray:
        return self._degree[: self.n + 1]

    @property
    def endpoints(self) -> np.ndarray:
        return self._endpoints[: 2 * (self.n - 1)] if self.n >= 2 else self._endpoints[:0]

    def nbytes_per_vertex(self) -> float:
        """Resident array bytes per vertex (documented budget: <= 48)."""
        total = self._parent.nbytes + self._degree.nbytes + self._endpoints.nbytes
        if self._child_offsets is not None:
            total += self._child_offsets.nbytes + self._child_data.nbytes
        return total / self.n

    # -- internal ---------------------------------------------------------

    def _ensure_capacity(self, n_new: int) -> None:
        cap = self._parent.shape[0] - 1
        if n_new <= cap:
            return
        new_cap = max(n_new, cap + (cap >> 1))
        for name, size in (("_parent", new_cap + 1), ("_degree", new_cap + 1),
                           ("_endpoints", 2 * (new_cap - 1))):
            old = getattr(self, name)
            arr = np.zeros(size, dtype=np.int32)
            arr[: old.shape[0]] = old
            setattr(self, name, arr)

    def _invalidate_children(self) -> None:
        self._child_offsets = None
        self._child_data = None

    def _children_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Lazily build a CSR table of children, rebuilt after growth."""
        if self._child_offsets is None:
            parents = self.parent[2:]
            counts = np.bincount(parents, minlength=self.n + 1)
            offsets = np.zeros(self.n + 2, dtype=np.int64)
            np.cumsum(counts, out=offsets[1:])
            # stable sort by parent keeps each child list in ascending order
            order = np.argsort(parents, kind="stable")
            self._child_data = (order + 2).astype(np.int32)
            self._child_offsets = offsets
        return self._child_offsets, self._child_data


def grow(n_target: int, seed: int) -> GrowingTree:
    """Grow a fresh tree to ``n_target`` vertices, deterministically in seed."""
    if n_target < 1:
        raise ValueError(f"n_target must be >= 1, got {n_target}")
    if n_target > 2**31 - 2:
        raise ValueError("n_target exceeds int32 vertex-id range")
    state = np.empty(4, dtype=np.uint64)
    state[:] = seed_sequence(seed)
    tree = GrowingTree(n_target, state)
    if n_target == 1:
        return tree
    tree._parent[2] = 1
    tree._degree[1] = 1
    tree._degree[2] = 1
    tree._endpoints[0] = 2
    tree._endpoints[1] = 1
    tree.n = 2
    if n_target > 2:
        tree.alpha = _kernels.grow_range(
            tree._parent, tree._degree, tree._endpoints, tree.rng_state,
            2, n_target, tree.alpha,
        )
        tree.n = n_target
    return tree


def grow_to(tree: GrowingTree, n_stop: int) -> None:
    """Continue an existing tree up to ``n_stop`` vertices in place."""
    if n_stop <= tree.n:
        return
    if tree.n < 2:
        raise ValueError("cannot continue growth from a single-vertex tree; use grow()")
    tree._ensure_capacity(n_stop)
    tree.alpha = _kernels.grow_range(
        tree._parent, tree._degree, tree._endpoints, tree.rng_state,
        tree.n, n_stop, tree.alpha,
    )
    tree.n = n_stop
    tree._invalidate_children()


def attach_step(tree: GrowingTree) -> int:
    """Attach one new vertex; returns the vertex it attached to."""
    if tree.n < 2:
        raise ValueError("attach_step requires n >= 2 (the 1->2 step is deterministic)")
    grow_to(tree, tree.n + 1)
    return int(tree._parent[tree.n])


def from_parents(parents: Iterable[int], seed: int = 0) -> GrowingTree:
    """Build a tree from an explicit parent sequence (parents[k] for vertex k+2).

    The sequence lists the attachment target of vertices 2, 3, ... in order;
    each target must be a previously existing vertex.  Used by the edge-list
    parser and by tests that need hand-built trees.
    """
    parents = [int(p) for p in parents]
    n = len(parents) + 1
    state = np.empty(4, dtype=np.uint64)
    state[:] = seed_sequence(seed)
    tree = GrowingTree(max(n, 2), state)
    alpha = 1.0
    for k, p in enumerate(parents, start=2):
        if not 1 <= p < k:
            raise ValueError(f"vertex {k} attaches to {p}, which does not precede it")
        tree._parent[k] = p
        tree._degree[k] = 1
        tree._degree[p] += 1
        tree._endpoints[2 * (k - 2)] = k
        tree._endpoints[2 * (k - 2) + 1] = p
        if k >= 3:
            alpha *= 1.0 + 0.5 / (k - 2)
    tree.n = n
    tree.alpha = alpha
    return tree


def alpha_of(n: int) -> float:
    """The degree normalizer alpha_n, by stable incremental product.

    alpha_2 = 1 and alpha_{n+1} = alpha_n * (1 + 1/(2(n-1))); the sequential
    product matches the growth kernel's op order bit for bit.  Relative
    rounding error is O(n ulp), irrelevant at the documented guard band.
    """
    if n < 2:
        raise ValueError(f"alpha_n is defined for n >= 2, got {n}")
    return float(_kernels.alpha_product(n))


class NormalizedDegreeView:
    """Mapping vertex -> d_i(n) / (alpha_n * sqrt(pi)) for one tree snapshot."""

    __slots__ = ("values", "n", "alpha")

    def __init__(self, values: np.ndarray, n: int, alpha: float):
        self.values = values
        self.n = n
        self.alpha = alpha

    def __getitem__(self, i: int) -> float:
        if not 1 <= i <= self.n:
            raise ValueError(f"vertex id {i} out of range 1..{self.n}")
        return float(self.values[i])

    def __len__(self) -> int:
        return self.n


def normalized_degrees(tree: GrowingTree) -> NormalizedDegreeView:
    """Normalized degrees D_i(n) for all vertices of the tree."""
    if tree.n < 2:
        raise ValueError("normalized degrees need n >= 2")
    values = tree.degree / (tree.alpha * SQRT_PI)
    values[0] = np.nan
    return NormalizedDegreeView(values, tree.n, tree.alpha)


def neighbors(tree: GrowingTree, i: int) -> list[int]:
    """All neighbors of vertex i: its parent (if any) plus its children."""
    if not 1 <= i <= tree.n:
        raise ValueError(f"vertex id {i} out of range 1..{tree.n}")
    offsets, data = tree._children_csr()
    out = [] if i == 1 else [int(tree._parent[i])]
    out.extend(int(c) for c in data[offsets[i]:offsets[i + 1]])
    return out


# -- serialization ----------------------------------------------------------

def export_tree(tree: GrowingTree, fmt: str = "edge-list") -> bytes:
    """Serialize the edges (i, parent[i]) for i = 2..n.

    Formats: ``edge-list`` (one "i<TAB>parent" pair per line), ``graphml``,
    ``dot``.
    """
    if fmt not in _EXPORT_FORMATS:
        raise ValueError(f"unknown export format {fmt!r}; expected one of {_EXPORT_FORMATS}")
    n = tree.n
    parent = tree.parent
    if fmt == "edge-list":
        lines = "".join(f"{i}\t{parent[i]}\n" for i in range(2, n + 1))
        return lines.encode("ascii")
    if fmt == "dot":
        body = "".join(f"  {i} -- {parent[i]};\n" for i in range(2, n + 1))
        return f"graph tree {{\n{body}}}\n".encode("ascii")
    # graphml
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>\n',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">\n',
        '  <graph id="tree" edgedefault="undirected">\n',
    ]
    parts.extend(f'    <node id="{i}"/>\n' for i in range(1, n + 1))
    parts.extend(
        f'    <edge source="{i}" target="{parent[i]}"/>\n' for i in range(2, n + 1)
    )
    parts.append("  </graph>\n</graphml>\n")
    return "".join(parts).encode("ascii")


def parse_edge_list(data: bytes | str) -> GrowingTree:
    """Rebuild a tree from an edge-list export (inverse of export_tree)."""
    if isinstance(data, bytes):
        data = data.decode("ascii")
    parents = []
    for ln, line in enumerate(data.splitlines(), start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise ValueError(f"line {ln}: expected 'child<TAB>parent', got {line!r}")
        child, par = int(fields[0]), int(fields[1])
        if child != len(parents) + 2:
            raise ValueError(f"line {ln}: vertex ids must be contiguous from 2, got {child}")
        parents.append(par)
    return from_parents(parents)
