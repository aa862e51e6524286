"""Directed weighted networks: construction, rewiring, exposure sums."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

_MAX_BUILD_TRIES = 1000


class RewireWarning(UserWarning):
    """An edge had no legal new endpoint and was left in place."""


@dataclass(frozen=True)
class DirectedNetwork:
    """Directed graph with positive edge weights, stored as parallel arrays.

    No self-loops and no duplicate (src, dst) pairs. Instances are treated
    as immutable: every operation returns a new network, which makes shared
    use from multiple threads safe.
    """

    n: int
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "src", np.asarray(self.src, dtype=np.int64))
        object.__setattr__(self, "dst", np.asarray(self.dst, dtype=np.int64))
        object.__setattr__(self, "weight", np.asarray(self.weight, dtype=np.float64))
        if self.n < 1:
            raise ValueError("node count must be >= 1")
        if not (self.src.shape == self.dst.shape == self.weight.shape) or self.src.ndim != 1:
            raise ValueError("src, dst and weight must be 1-d arrays of equal length")
        if self.m > 0:
            if self.src.min() < 0 or self.src.max() >= self.n:
                raise ValueError("edge source out of range")
            if self.dst.min() < 0 or self.dst.max() >= self.n:
                raise ValueError("edge destination out of range")
            if np.any(self.src == self.dst):
                raise ValueError("self-loops are not allowed")
            if np.any(~np.isfinite(self.weight)) or np.any(self.weight <= 0):
                raise ValueError("edge weights must be positive and finite")
            key = self.src * self.n + self.dst
            if np.unique(key).size != key.size:
                raise ValueError("duplicate edges are not allowed")

    @property
    def m(self) -> int:
        """Edge count."""
        return int(self.src.size)

    @classmethod
    def from_edges(cls, n, edges):
        """Build from an iterable of (src, dst, weight) triples."""
        triples = list(edges)
        if not triples:
            empty = np.empty(0, dtype=np.int64)
            return cls(n, empty, empty.copy(), np.empty(0, dtype=np.float64))
        src, dst, w = zip(*triples)
        return cls(n, np.asarray(src), np.asarray(dst), np.asarray(w, dtype=np.float64))

    def edge_list(self):
        """Edges as a list of (src, dst, weight) tuples, in storage order."""
        return [
            (int(s), int(d), float(w))
            for s, d, w in zip(self.src, self.dst, self.weight)
        ]

    def to_dense(self) -> np.ndarray:
        """Dense n-by-n weight matrix W with W[i, j] the weight of edge i -> j."""
        w = np.zeros((self.n, self.n))
        w[self.src, self.dst] = self.weight
        return w

    def out_degree(self) -> np.ndarray:
        return np.bincount(self.src, minlength=self.n)

    def in_degree(self) -> np.ndarray:
        return np.bincount(self.dst, minlength=self.n)


@dataclass(frozen=True)
class DegreeSequences:
    indegree: np.ndarray
    outdegree: np.ndarray


def degree_sequences(net: DirectedNetwork) -> DegreeSequences:
    return DegreeSequences(indegree=net.in_degree(), outdegree=net.out_degree())


def make_regular_network(n: int, d: int, rng: np.random.Generator) -> DirectedNetwork:
    """Random unit-weight network where every node has indegree and outdegree d.

    Built from d fixed-point-free random permutations that share no edge;
    each permutation contributes one out-edge per node. Retries draws that
    violate the no-self-loop or no-duplicate constraints.
    """
    if d < 1 or d >= n:
        raise ValueError(f"outdegree must satisfy 1 <= d < n, got d={d} with n={n}")
    nodes = np.arange(n)
    used: set[int] = set()
    dst_rounds = []
    for _ in range(d):
        for _attempt in range(_MAX_BUILD_TRIES):
            perm = rng.permutation(n)
            if np.any(perm == nodes):
                continue
            keys = (nodes * n + perm).tolist()
            if used.isdisjoint(keys):
                used.update(keys)
                dst_rounds.append(perm)
                break
        else:
            raise RuntimeError(
                f"could not place {d} edge-disjoint permutations on {n} nodes"
            )
    src = np.tile(nodes, d)
    dst = np.concatenate(dst_rounds)
    return DirectedNetwork(n, src, dst, np.ones(n * d))


def rewire_receivers(net: DirectedNetwork, k: int, rng: np.random.Generator) -> DirectedNetwork:
    """Give k uniformly chosen edges a new uniformly chosen receiver.

    The new receiver differs from the old one, is not the sender and does
    not duplicate an existing edge, so outdegrees are preserved exactly.
    An edge with no legal candidate keeps its endpoint and a RewireWarning
    is issued.
    """
    if k < 0 or k > net.m:
        raise ValueError(f"rewire count must be in [0, {net.m}], got {k}")
    if k == 0:
        return net
    dst = net.dst.copy()
    out_nbrs: dict[int, set[int]] = {}
    for s, t in zip(net.src.tolist(), dst.tolist()):
        out_nbrs.setdefault(s, set()).add(t)
    chosen = rng.choice(net.m, size=k, replace=False)
    for e in chosen:
        s, old = int(net.src[e]), int(dst[e])
        legal = np.ones(net.n, dtype=bool)
        legal[s] = False
        legal[list(out_nbrs[s])] = False  # includes the current endpoint
        cand = np.flatnonzero(legal)
        if cand.size == 0:
            warnings.warn(
                f"edge {s}->{old} has no legal new receiver; left in place",
                RewireWarning,
            )
            continue
        new = int(cand[rng.integers(cand.size)])
        out_nbrs[s].remove(old)
        out_nbrs[s].add(new)
        dst[e] = new
    return DirectedNetwork(net.n, net.src.copy(), dst, net.weight.copy())


def rewire_senders(net: DirectedNetwork, k: int, rng: np.random.Generator) -> DirectedNetwork:
    """Mirror of rewire_receivers: k edges get a new sender, indegrees kept."""
    return transpose(rewire_receivers(transpose(net), k, rng))


def transpose(net: DirectedNetwork) -> DirectedNetwork:
    """Reverse every edge, keeping weights and storage order."""
    return DirectedNetwork(net.n, net.dst.copy(), net.src.copy(), net.weight.copy())


def exposure(net: DirectedNetwork, y, direction: str = "forward") -> np.ndarray:
    """Weighted sum of neighbor values for every node.

    forward: out-edges, node i receives sum_j W[i, j] * y[j].
    reverse: in-edges, node i receives sum_j W[j, i] * y[j].
    """
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (net.n,):
        raise ValueError(f"value vector must have shape ({net.n},), got {y.shape}")
    if direction == "forward":
        return np.bincount(net.src, weights=net.weight * y[net.dst], minlength=net.n)
    if direction == "reverse":
        return np.bincount(net.dst, weights=net.weight * y[net.src], minlength=net.n)
    raise ValueError(f"direction must be 'forward' or 'reverse', got {direction!r}")


def row_normalize(net: DirectedNetwork) -> DirectedNetwork:
    """Scale out-edge weights so every non-isolated node's weights sum to one."""
    sums = np.bincount(net.src, weights=net.weight, minlength=net.n)
    return DirectedNetwork(net.n, net.src.copy(), net.dst.copy(), net.weight / sums[net.src])
