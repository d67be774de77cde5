"""Static transform forest with chained lookup between connected frames."""

from __future__ import annotations

from collections import deque

from .core import RigidTransform, check_frame, compose, invert
from .errors import FrameError, TreeError


class TransformTree:
    """Undirected forest of static transforms.

    Each edge stores ``T_parent_child`` (child coordinates into parent
    coordinates). Inserting an edge that duplicates a frame pair or closes a
    cycle is rejected, so the path between two frames is always unique.
    Call :meth:`freeze` once configuration is loaded; lookups on a frozen
    tree are read-only and are cached.
    """

    def __init__(self):
        self._adj = {}  # frame -> {neighbour: T_frame_neighbour}
        self._edges = []  # (parent, child, transform) in insertion order
        self._component = {}  # frame -> representative (union-find)
        self._frozen = False
        self._cache = {}

    # -- construction ------------------------------------------------------

    def add_transform(self, parent, child, transform: RigidTransform) -> TransformTree:
        if self._frozen:
            raise TreeError("transform tree is frozen")
        check_frame(parent)
        check_frame(child)
        if parent == child:
            raise TreeError(f"edge {parent!r} -> {child!r} links a frame to itself")
        if child in self._adj.get(parent, {}):
            raise TreeError(f"duplicate transform between {parent!r} and {child!r}")
        if parent in self._adj and child in self._adj and self._find(parent) == self._find(child):
            raise TreeError(f"transform {parent!r} -> {child!r} would close a cycle")
        for f in (parent, child):
            self._adj.setdefault(f, {})
            self._component.setdefault(f, f)
        self._adj[parent][child] = transform
        self._adj[child][parent] = invert(transform)
        self._component[self._find(child)] = self._find(parent)
        self._edges.append((parent, child, transform))
        return self

    def add_static_transform(self, parent, child, xyz, ypr) -> TransformTree:
        """Add ``parent -> child`` from a translation and yaw/pitch/roll."""
        return self.add_transform(parent, child, RigidTransform.from_xyz_ypr(xyz, ypr))

    def freeze(self) -> TransformTree:
        self._frozen = True
        return self

    @property
    def frozen(self) -> bool:
        return self._frozen

    # -- queries -----------------------------------------------------------

    def _find(self, f):
        root = f
        while self._component[root] != root:
            root = self._component[root]
        while self._component[f] != root:
            self._component[f], f = root, self._component[f]
        return root

    @property
    def frames(self):
        return sorted(self._adj)

    @property
    def edges(self):
        return list(self._edges)

    def __contains__(self, frame):
        return frame in self._adj

    def __len__(self):
        return len(self._edges)

    def connected(self, a, b) -> bool:
        if a == b:
            return True
        return a in self._adj and b in self._adj and self._find(a) == self._find(b)

    def path(self, source, target):
        """Frames on the unique path from ``source`` to ``target``, inclusive."""
        for f in (source, target):
            if f not in self._adj:
                raise FrameError(f"unknown frame {f!r}")
        prev = {source: None}
        queue = deque([source])
        while queue:
            f = queue.popleft()
            if f == target:
                break
            for g in self._adj[f]:
                if g not in prev:
                    prev[g] = f
                    queue.append(g)
        if target not in prev:
            raise FrameError(f"frames {source!r} and {target!r} are not connected")
        out = [target]
        while out[-1] != source:
            out.append(prev[out[-1]])
        return out[::-1]

    def lookup(self, source, target) -> RigidTransform:
        """Transform mapping points in frame ``source`` into frame ``target``."""
        if source == target:
            return RigidTransform.identity()
        key = (source, target)
        if key in self._cache:
            return self._cache[key]
        hops = self.path(source, target)
        result = RigidTransform.identity()
        # walking source -> target, each hop g -> h maps g coords into h
        for g, h in zip(hops, hops[1:]):
            result = compose(self._adj[h][g], result)
        if self._frozen:
            self._cache[key] = result
        return result
