"""Path algebra over cycle instances.

A path is a clockwise-consecutive run of points, stored as a location
interval (cycle, start, length) plus an optional merge history.  The
interval is engine-private bookkeeping; strategies only ever see point IDs
and history.  All operations are pure and paths are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MixedInstance, NotIntersecting
from .instance import Instance


@dataclass(frozen=True)
class HistoryLeaf:
    """An initial path, as placed before any merging."""

    points: tuple[int, ...]


@dataclass(frozen=True)
class HistoryMerge:
    """A merge event: which paths were combined, where and when."""

    round_no: int | None
    machine: int | None
    children: tuple["History", ...]


History = HistoryLeaf | HistoryMerge


def history_leaf_points(h: History) -> tuple[int, ...]:
    """Sorted multiset of all leaf points under a history tree."""
    if isinstance(h, HistoryLeaf):
        return tuple(sorted(h.points))
    out: list[int] = []
    for c in h.children:
        out.extend(history_leaf_points(c))
    return tuple(sorted(out))


class _Empty:
    """The empty path: produced by trim/common, never stored on machines."""

    length = 0
    points: tuple[int, ...] = ()

    def __bool__(self):
        return False

    def __repr__(self):
        return "[]@empty"


EMPTY = _Empty()


class Path:
    """An immutable consecutive run of ``length`` points starting at location
    ``start`` on cycle ``cycle`` of ``instance``.

    A path covering its whole cycle is *closed*; closed paths are stored with
    a canonical start at the cycle base.
    """

    __slots__ = ("instance", "cycle", "start", "length", "history", "_pts")

    def __init__(self, instance: Instance, cycle: int, start: int, length: int,
                 history: History | None = None):
        base, size = instance.cycles[cycle]
        if not 1 <= length <= size:
            raise ValueError(f"path length {length} outside [1, {size}]")
        if not base <= start < base + size:
            raise ValueError(f"start {start} outside cycle {cycle}")
        if length == size:
            start = base
        object.__setattr__(self, "instance", instance)
        object.__setattr__(self, "cycle", cycle)
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "length", length)
        object.__setattr__(self, "history", history)
        object.__setattr__(self, "_pts", None)

    def __setattr__(self, *_):
        raise AttributeError("Path is immutable")

    @property
    def size(self) -> int:
        return self.instance.cycles[self.cycle][1]

    @property
    def closed(self) -> bool:
        return self.length == self.size

    @property
    def points(self) -> tuple[int, ...]:
        if self._pts is None:
            base, size = self.instance.cycles[self.cycle]
            ids = self.instance.id_at_loc
            off = self.start - base
            pts = tuple(
                int(ids[base + (off + i) % size]) for i in range(self.length)
            )
            object.__setattr__(self, "_pts", pts)
        return self._pts

    @property
    def sort_key(self):
        return (self.cycle, self.start, self.length)

    def __len__(self):
        return self.length

    def __eq__(self, other):
        return (
            isinstance(other, Path)
            and self.instance == other.instance
            and self.sort_key == other.sort_key
        )

    def __hash__(self):
        return hash((self.cycle, self.start, self.length))

    def __repr__(self):
        return format_path(self)


PathSet = tuple[Path, ...]


def format_path(p: Path | _Empty) -> str:
    """Debug format ``[id1,id2,...]@(start,len)``, stable for golden tests."""
    if not p:
        return "[]@empty"
    return "[" + ",".join(map(str, p.points)) + f"]@({p.start},{p.length})"


def from_points(instance: Instance, ids, history: History | None = None,
                fresh_leaf: bool = False) -> Path:
    """Build a path from consecutive point IDs, validating adjacency."""
    ids = [int(v) for v in ids]
    if not ids:
        raise ValueError("a path holds at least one point")
    loc = int(instance.loc_of_id[ids[0]])
    cyc = instance.cycle_of_loc(loc)
    cur = ids[0]
    for nxt in ids[1:]:
        if instance.successor(cur) != nxt:
            raise ValueError(f"{nxt} does not follow {cur} on the cycle")
        cur = nxt
    if history is None and fresh_leaf:
        history = HistoryLeaf(tuple(ids))
    return Path(instance, cyc, loc, len(ids), history)


def _require_same_instance(p1: Path, p2: Path):
    if p1.instance != p2.instance:
        raise MixedInstance("paths belong to different instances")


def _rel(p: Path) -> tuple[int, int, int]:
    """(offset within cycle, length, cycle size)."""
    base, size = p.instance.cycles[p.cycle]
    return p.start - base, p.length, size


def intersects(p1: Path, p2: Path) -> bool:
    """True iff the union of the two point sets is itself a path
    (overlapping or touching runs on the same cycle)."""
    _require_same_instance(p1, p2)
    if p1.cycle != p2.cycle:
        return False
    if p1.closed or p2.closed:
        return True
    a1, l1, size = _rel(p1)
    a2, l2, _ = _rel(p2)
    d12 = (a2 - a1) % size
    d21 = (a1 - a2) % size
    return d12 <= l1 or d21 <= l2


def merge(p1: Path, p2: Path, round_no: int | None = None,
          machine: int | None = None) -> Path:
    """Union of two intersecting paths.

    The result costs one memory unit like any path; its history records both
    parents with the (round, machine) context when histories are tracked.
    """
    _require_same_instance(p1, p2)
    if not intersects(p1, p2):
        raise NotIntersecting(f"{p1!r} and {p2!r} do not form a path")
    base, size = p1.instance.cycles[p1.cycle]
    a1, l1, _ = _rel(p1)
    a2, l2, _ = _rel(p2)
    d12 = (a2 - a1) % size
    if d12 <= l1:
        anchor, span = a1, max(l1, d12 + l2)
    else:
        d21 = (a1 - a2) % size
        anchor, span = a2, max(l2, d21 + l1)
    span = min(span, size)
    if p1.sort_key == p2.sort_key and p1.history is not None:
        history = p1.history  # idempotent merge keeps the existing record
    elif p1.history is not None and p2.history is not None:
        history = HistoryMerge(round_no, machine, (p1.history, p2.history))
    else:
        history = None
    return Path(p1.instance, p1.cycle, base + anchor, span, history)


def reduce_set(paths, round_no: int | None = None,
               machine: int | None = None) -> PathSet:
    """Merge intersecting paths repeatedly until all are pairwise disjoint.

    The fixed point collapses each connected component of the intersects
    graph to its union path; the result is independent of merge order.
    """
    items = sorted(paths, key=lambda p: p.sort_key)
    changed = True
    while changed:
        changed = False
        out: list[Path] = []
        for p in items:
            if out and intersects(out[-1], p):
                out[-1] = merge(out[-1], p, round_no, machine)
                changed = True
            else:
                out.append(p)
        if len(out) >= 2 and intersects(out[-1], out[0]):
            out[0] = merge(out[-1], out[0], round_no, machine)
            out.pop()
            changed = True
        items = sorted(out, key=lambda p: p.sort_key)
    return tuple(items)


def trim(p: Path, t: int) -> Path | _Empty:
    """The path with ``t`` points removed from both ends; EMPTY when nothing
    is left.  Closed paths have no ends to trim."""
    if t < 0:
        raise ValueError("trim count must be non-negative")
    if t == 0:
        return p
    if p.closed:
        raise ValueError("cannot trim a closed cycle")
    if p.length <= 2 * t:
        return EMPTY
    base, size = p.instance.cycles[p.cycle]
    off = (p.start - base + t) % size
    return Path(p.instance, p.cycle, base + off, p.length - 2 * t, None)


def common(p1: Path, p2: Path) -> Path | _Empty:
    """Longest common subpath of the two paths; EMPTY when point-disjoint.

    Two arcs on a circle can share two separate runs; the longer one wins,
    with the smaller start offset breaking ties.
    """
    _require_same_instance(p1, p2)
    if p1.cycle != p2.cycle:
        return EMPTY
    if p1.closed:
        return p2
    if p2.closed:
        return p1
    base, size = p1.instance.cycles[p1.cycle]
    a1, l1, _ = _rel(p1)
    a2, l2, _ = _rel(p2)
    d = (a2 - a1) % size
    # coverage of p2 relative to p1's start: [d, d+l2), wrapping at size
    len_right = max(0, min(l1, d + l2) - d) if d < l1 else 0
    len_left = max(0, min(l1, d + l2 - size))
    if len_right == 0 and len_left == 0:
        return EMPTY
    if len_left >= len_right:
        off = 0
        span = len_left
    else:
        off = d
        span = len_right
    return Path(p1.instance, p1.cycle, base + (a1 + off) % size, span, None)


def is_subpath(inner: Path, outer: Path) -> bool:
    if inner.instance != outer.instance or inner.cycle != outer.cycle:
        return False
    if outer.closed:
        return True
    if inner.closed:
        return False
    a_in, l_in, size = _rel(inner)
    a_out, l_out, _ = _rel(outer)
    d = (a_in - a_out) % size
    return d + l_in <= l_out


def restrict(tset, p: Path) -> PathSet:
    """The paper-style ``T | P``: members of ``tset`` fully contained in P."""
    return tuple(q for q in sorted(tset, key=lambda x: x.sort_key) if is_subpath(q, p))


def wedge_set(tset, p: Path) -> PathSet:
    """``T ^ P``: longest common subpath of each member with P, empties dropped."""
    hits = []
    for q in tset:
        c = common(q, p)
        if c:
            hits.append(c)
    return tuple(sorted(set(hits), key=lambda x: x.sort_key))


def canonical(paths) -> PathSet:
    """Sorted, duplicate-free view of a collection of paths."""
    return tuple(sorted(set(paths), key=lambda p: p.sort_key))
