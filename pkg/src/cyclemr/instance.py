"""Cycle instances, run configuration, and the permutation refinement tree.

An instance places the n+1 point IDs {0, ..., n} onto the fixed location
circle q_0..q_n, with the pivot invariant id 0 -> q_0.  A one-cycle instance
is a single circular order over all locations; a two-cycle instance splits
the locations into two circular halves.

The refinement tree enumerates one-cycle labelings level by level: a level-r
node is a partition of [n] into n/rho^r ordered segments of length rho^r,
and each child concatenates rho parent segments while preserving their
internal order.  Leaves are full permutations of [n]; the subspace of a node
is the set of leaves below it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (
    BadSize,
    CapExceeded,
    IndexOutOfRange,
    LeafNode,
    NotInSubspace,
    UnknownID,
)
from ._mix import stable_seed

ONE_CYCLE = "one-cycle"
TWO_CYCLE = "two-cycle"

DEFAULT_NODE_CAP = 10**6


def _pow_int(n: int, exponent: float) -> int:
    """ceil(n**exponent), snapping exact integer powers despite float error."""
    x = n**exponent
    r = round(x)
    if abs(x - r) < 1e-9:
        return int(r)
    return int(math.ceil(x))


def is_power(n: int, rho: int) -> bool:
    if n < 1 or rho < 2:
        return False
    while n % rho == 0:
        n //= rho
    return n == 1


def levels_for(n: int, rho: int) -> int:
    """Leaf level of the refinement tree, log_rho(n)."""
    lv = 0
    while rho**lv < n:
        lv += 1
    return lv


@dataclass(frozen=True)
class Config:
    """Run parameters: point budget, machine/memory scaling, round budget.

    ``machines`` and the per-machine path cap both scale as ceil(n^(1-epsilon)).
    The cap additionally gets a feasibility floor of ceil((n+1)/machines) so
    the n+1 input points can be stored at all, and scales by ``memory_factor``
    for harness runs that need replication headroom (see README).
    """

    n: int
    epsilon: float = 0.5
    rho: int = 2
    rounds: int | None = None
    seed: int = 0
    memory_factor: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.rho < 2:
            raise ValueError("rho must be at least 2")
        if self.memory_factor < 1.0:
            raise ValueError("memory_factor must be >= 1")

    @property
    def machines(self) -> int:
        return _pow_int(self.n, 1.0 - self.epsilon)

    @property
    def memory_cap(self) -> int:
        base = _pow_int(self.n, 1.0 - self.epsilon)
        floor = -(-(self.n + 1) // self.machines)
        return max(int(math.ceil(self.memory_factor * base)), floor)

    @property
    def round_budget(self) -> int:
        if self.rounds is not None:
            return self.rounds
        return max(1, round((self.epsilon / 2.0) * math.log(self.n, self.rho)))

    def require_tree_compatible(self):
        if not is_power(self.n, self.rho):
            raise ValueError(f"n={self.n} is not a power of rho={self.rho}")


class Instance:
    """A labeling of the location circle(s) by point IDs.

    ``id_at_loc[j]`` is the ID occupying location q_j; ``loc_of_id`` is the
    inverse.  ``cycles`` lists (base, size) location ranges, one per cycle.
    Immutable after construction.
    """

    __slots__ = ("n", "topology", "id_at_loc", "loc_of_id", "cycles", "__dict__")

    def __init__(self, n: int, topology: str, id_at_loc):
        arr = np.asarray(id_at_loc, dtype=np.int64)
        if arr.shape != (n + 1,):
            raise BadSize(f"expected {n + 1} point IDs, got {arr.shape}")
        if arr[0] != 0:
            raise BadSize("pivot id 0 must sit at location q_0")
        if not np.array_equal(np.sort(arr), np.arange(n + 1)):
            raise BadSize("id assignment is not a bijection onto {0..n}")
        self.n = n
        self.topology = topology
        self.id_at_loc = arr
        self.id_at_loc.setflags(write=False)
        inv = np.empty(n + 1, dtype=np.int64)
        inv[arr] = np.arange(n + 1)
        inv.setflags(write=False)
        self.loc_of_id = inv
        if topology == ONE_CYCLE:
            self.cycles = ((0, n + 1),)
        elif topology == TWO_CYCLE:
            k = (n + 2) // 2  # ceil((n+1)/2); pivot half is never the smaller one
            self.cycles = ((0, k), (k, n + 1 - k))
        else:
            raise ValueError(f"unknown topology {topology!r}")

    @cached_property
    def _key(self):
        return (self.topology, self.n, self.id_at_loc.tobytes())

    def __eq__(self, other):
        return isinstance(other, Instance) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"Instance({self.serialize()!r})"

    def cycle_of_loc(self, loc: int) -> int:
        if self.topology == ONE_CYCLE:
            return 0
        return 0 if loc < self.cycles[1][0] else 1

    def successor(self, point: int) -> int:
        """The clockwise next point on the cycle containing ``point``."""
        if not 0 <= point <= self.n:
            raise UnknownID(f"no point with id {point}")
        loc = int(self.loc_of_id[point])
        base, size = self.cycles[self.cycle_of_loc(loc)]
        return int(self.id_at_loc[base + (loc - base + 1) % size])

    def predecessor(self, point: int) -> int:
        if not 0 <= point <= self.n:
            raise UnknownID(f"no point with id {point}")
        loc = int(self.loc_of_id[point])
        base, size = self.cycles[self.cycle_of_loc(loc)]
        return int(self.id_at_loc[base + (loc - base - 1) % size])

    def serialize(self) -> str:
        """``topology;n;perm`` line; two-cycle halves separated by ``|``."""
        ids = self.id_at_loc
        if self.topology == ONE_CYCLE:
            body = ",".join(str(int(v)) for v in ids[1:])
        else:
            k = self.cycles[1][0]
            first = ",".join(str(int(v)) for v in ids[1:k])
            second = ",".join(str(int(v)) for v in ids[k:])
            body = f"{first}|{second}"
        return f"{self.topology};{self.n};{body}"

    @staticmethod
    def parse(line: str) -> "Instance":
        topology, n_str, body = line.strip().split(";")
        n = int(n_str)
        if topology == ONE_CYCLE:
            ids = [0] + [int(v) for v in body.split(",")]
        else:
            first, second = body.split("|")
            ids = [0]
            if first:
                ids += [int(v) for v in first.split(",")]
            ids += [int(v) for v in second.split(",")]
        inst = Instance(n, topology, ids)
        if topology == TWO_CYCLE:
            k = inst.cycles[1][0]
            got_first = len([v for v in first.split(",") if v != ""]) + 1
            if got_first != k:
                raise BadSize(f"first half has {got_first} points, expected {k}")
        return inst


def from_permutation(perm, topology: str = ONE_CYCLE) -> Instance:
    """Instance with IDs ``perm`` placed at q_1..q_n in order (pivot at q_0)."""
    perm = list(perm)
    return Instance(len(perm), topology, [0] + perm)


def random_instance(n: int, seed: int) -> Instance:
    """Uniform one-cycle labeling; equals sampling the tree root's subspace."""
    rng = np.random.Generator(np.random.Philox(key=stable_seed("one-cycle", n, seed)))
    perm = rng.permutation(n) + 1
    return Instance(n, ONE_CYCLE, np.concatenate(([0], perm)))


def two_cycle_instance(n: int, seed: int, strict: bool = False) -> Instance:
    """Random two-cycle labeling.

    The pivot half holds ceil((n+1)/2) points including id 0; membership and
    the circular order of each half are uniform.  ``strict`` rejects odd
    point counts, where the halves cannot be equal.
    """
    if n < 3:
        raise BadSize("two cycles need at least 4 points")
    if strict and (n + 1) % 2 != 0:
        raise BadSize(f"{n + 1} points cannot split into equal halves")
    rng = np.random.Generator(np.random.Philox(key=stable_seed("two-cycle", n, seed)))
    perm = rng.permutation(n) + 1
    return Instance(n, TWO_CYCLE, np.concatenate(([0], perm)))


# ---------------------------------------------------------------------------
# Refinement tree


@dataclass(frozen=True)
class PartitionNode:
    """A level-r node: a set of ordered ID segments, each of length rho^r."""

    n: int
    rho: int
    level: int
    segments: tuple[tuple[int, ...], ...]
    parent: "PartitionNode | None" = field(default=None, compare=False, repr=False)

    @property
    def is_leaf(self) -> bool:
        return len(self.segments) == 1

    @property
    def subspace_size(self) -> int:
        """Number of leaf instances below this node: (#segments)!."""
        return math.factorial(len(self.segments))

    def leaf_instance(self) -> Instance:
        if not self.is_leaf:
            raise LeafNode("only leaves convert directly to an instance")
        return from_permutation(self.segments[0])

    def __repr__(self):
        segs = ", ".join("<" + ",".join(map(str, s)) + ">" for s in self.segments)
        return f"PartitionNode(level={self.level}, {{{segs}}})"


def build_tree(n: int, rho: int) -> PartitionNode:
    """Root of the refinement tree: the level-0 partition into singletons.

    The tree is expanded lazily through :func:`children`; exhaustive walks go
    through :func:`level_nodes` / :func:`leaves`, which enforce a node cap.
    """
    if not is_power(n, rho):
        raise ValueError(f"n={n} must be a power of rho={rho}")
    segments = tuple((i,) for i in range(1, n + 1))
    return PartitionNode(n=n, rho=rho, level=0, segments=segments)


def count_at_level(n: int, rho: int, level: int) -> int:
    """Number of level-``level`` partitions: n! / (n/rho^level)!."""
    if not is_power(n, rho):
        raise ValueError(f"n={n} must be a power of rho={rho}")
    if not 0 <= level <= levels_for(n, rho):
        raise IndexOutOfRange(f"no level {level} in a tree of depth {levels_for(n, rho)}")
    return math.factorial(n) // math.factorial(n // rho**level)


def child_count(node: PartitionNode) -> int:
    if node.is_leaf:
        raise LeafNode("leaves have no children")
    m = len(node.segments)
    return math.factorial(m) // math.factorial(m // node.rho)


def children(node: PartitionNode) -> list[PartitionNode]:
    """All refinements of ``node``: its segments arranged into ordered groups
    of rho, each group concatenated into one child segment.

    Children are, as sets of segments, pairwise distinct and exhaustive;
    enumeration anchors each group on its lowest remaining segment so every
    child appears exactly once.
    """
    if node.is_leaf:
        raise LeafNode("leaves have no children")
    rho = node.rho
    segs = node.segments
    out: list[PartitionNode] = []

    def arrange(remaining: tuple[int, ...], acc: list[tuple[int, ...]]):
        if not remaining:
            grouped = tuple(sorted(acc))
            out.append(
                PartitionNode(
                    n=node.n,
                    rho=rho,
                    level=node.level + 1,
                    segments=grouped,
                    parent=node,
                )
            )
            return
        anchor, rest = remaining[0], remaining[1:]
        for partners in itertools.combinations(rest, rho - 1):
            members = (anchor,) + partners
            left = tuple(i for i in rest if i not in partners)
            for order in itertools.permutations(members):
                merged = tuple(itertools.chain.from_iterable(segs[i] for i in order))
                arrange(left, acc + [merged])

    arrange(tuple(range(len(segs))), [])
    return out


def parent_partition(node: PartitionNode) -> PartitionNode | None:
    """Structural parent: each segment re-split into rho^(level-1) chunks."""
    if node.level == 0:
        return None
    if node.parent is not None:
        return node.parent
    width = node.rho ** (node.level - 1)
    chunks = []
    for seg in node.segments:
        chunks.extend(tuple(seg[i : i + width]) for i in range(0, len(seg), width))
    return PartitionNode(
        n=node.n, rho=node.rho, level=node.level - 1, segments=tuple(sorted(chunks))
    )


def ancestry(node: PartitionNode) -> list[PartitionNode]:
    """Proper ancestors from level 0 (root) down to ``node``'s parent."""
    chain = []
    cur = parent_partition(node)
    while cur is not None:
        chain.append(cur)
        cur = parent_partition(cur)
    return list(reversed(chain))


def level_nodes(
    root: PartitionNode, level: int, node_cap: int = DEFAULT_NODE_CAP
) -> list[PartitionNode]:
    """All partitions at ``level``; raises CapExceeded before materializing
    more than ``node_cap`` nodes."""
    expected = count_at_level(root.n, root.rho, level)
    if expected > node_cap:
        raise CapExceeded(f"level {level} holds {expected} nodes, cap is {node_cap}")
    nodes = [root]
    for _ in range(level):
        nxt: list[PartitionNode] = []
        for nd in nodes:
            nxt.extend(children(nd))
            if len(nxt) > node_cap:
                raise CapExceeded(f"expansion exceeded node cap {node_cap}")
        nodes = nxt
    return nodes


def leaves(root: PartitionNode, node_cap: int = DEFAULT_NODE_CAP) -> list[PartitionNode]:
    return level_nodes(root, levels_for(root.n, root.rho), node_cap)


def subspace_instances(node: PartitionNode) -> list[Instance]:
    """Every leaf instance below ``node``: all orderings of its segments."""
    out = []
    for order in itertools.permutations(node.segments):
        out.append(from_permutation(itertools.chain.from_iterable(order)))
    return out


def sample_from_subspace(node: PartitionNode, seed: int) -> Instance:
    """Uniform leaf below ``node``.

    A uniform ordering of the node's segments is exactly the distribution
    produced by refining one uniform child at a time down to a leaf, since
    every ordering corresponds to one leaf and each leaf is reached with
    probability 1/(#segments)!.
    """
    rng = np.random.Generator(
        np.random.Philox(key=stable_seed("subspace", node.n, node.level, seed))
    )
    order = rng.permutation(len(node.segments))
    perm = itertools.chain.from_iterable(node.segments[i] for i in order)
    return from_permutation(perm)


def chunk_partition(instance: Instance, rho: int, level: int) -> PartitionNode:
    """The level-``level`` ancestor of a one-cycle instance: consecutive
    rho^level blocks of its permutation."""
    if instance.topology != ONE_CYCLE:
        raise NotInSubspace("refinement tree covers one-cycle instances only")
    if not is_power(instance.n, rho):
        raise ValueError(f"n={instance.n} is not a power of rho={rho}")
    width = rho**level
    perm = tuple(int(v) for v in instance.id_at_loc[1:])
    chunks = tuple(perm[i : i + width] for i in range(0, instance.n, width))
    return PartitionNode(
        n=instance.n, rho=rho, level=level, segments=tuple(sorted(chunks))
    )


def in_subspace(instance: Instance, node: PartitionNode) -> bool:
    if instance.topology != ONE_CYCLE or instance.n != node.n:
        return False
    return chunk_partition(instance, node.rho, node.level).segments == node.segments


# ---------------------------------------------------------------------------
# Arcs


@dataclass(frozen=True)
class Arc:
    """Level-r block of rho^r consecutive locations; arcs tile q_1..q_n."""

    level: int
    index: int
    start: int
    length: int

    @property
    def locations(self) -> tuple[int, ...]:
        return tuple(range(self.start, self.start + self.length))


def arc(level: int, index: int, rho: int, n: int) -> Arc:
    """The ``index``-th level-``level`` arc (1-based)."""
    width = rho**level
    if n % width != 0:
        raise ValueError(f"rho^{level}={width} does not divide n={n}")
    if not 1 <= index <= n // width:
        raise IndexOutOfRange(
            f"arc index {index} outside [1, {n // width}] at level {level}"
        )
    return Arc(level=level, index=index, start=1 + (index - 1) * width, length=width)


def segment_to_arc(instance: Instance, node: PartitionNode, segment: tuple[int, ...]) -> Arc:
    """The unique arc hosting ``segment`` under ``instance``'s labeling."""
    if segment not in node.segments:
        raise ValueError(f"{segment} is not a segment of the partition")
    if not in_subspace(instance, node):
        raise NotInSubspace("instance does not descend from the partition")
    width = node.rho**node.level
    j = (int(instance.loc_of_id[segment[0]]) - 1) // width
    return arc(node.level, j + 1, node.rho, instance.n)
