"""Small-graph utilities: catalog, isomorphism, planarity, bipartiteness.

Graphs have at most :data:`MAX_VERTICES` vertices, so adjacency is kept as
one bitmask per vertex and the search routines are exhaustive.
"""

from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional

import networkx as nx

from .errors import CatalogError, InvalidInputError

MAX_VERTICES = 16


@dataclass(frozen=True)
class SmallGraph:
    n: int
    adj: tuple[int, ...]

    def __post_init__(self) -> None:
        if not 0 <= self.n <= MAX_VERTICES:
            raise InvalidInputError(f"graph has {self.n} vertices; limit is {MAX_VERTICES}")
        if len(self.adj) != self.n:
            raise InvalidInputError("adjacency length does not match vertex count")
        for i, row in enumerate(self.adj):
            if row >> self.n:
                raise InvalidInputError(f"vertex {i} has a neighbour out of range")
            if row >> i & 1:
                raise InvalidInputError(f"self-loop at vertex {i}")
            for j in _bits(row):
                if not self.adj[j] >> i & 1:
                    raise InvalidInputError(f"adjacency not symmetric at ({i}, {j})")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "SmallGraph":
        adj = [0] * n
        for i, j in edges:
            i, j = int(i), int(j)
            if i == j:
                raise InvalidInputError(f"self-loop at vertex {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise InvalidInputError(f"edge ({i}, {j}) out of range for n={n}")
            adj[i] |= 1 << j
            adj[j] |= 1 << i
        return cls(n, tuple(adj))

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.adj[i] >> j & 1)

    def neighbors(self, i: int) -> list[int]:
        return list(_bits(self.adj[i]))

    def degree(self, i: int) -> int:
        return self.adj[i].bit_count()

    def degrees(self) -> list[int]:
        return [self.degree(i) for i in range(self.n)]

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in _bits(self.adj[i]) if i < j]

    @property
    def edge_count(self) -> int:
        return sum(self.degrees()) // 2

    def regular_degree(self) -> Optional[int]:
        degs = set(self.degrees())
        return degs.pop() if len(degs) == 1 else None

    def relabel(self, perm) -> "SmallGraph":
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        return SmallGraph.from_edges(self.n, ((perm[i], perm[j]) for i, j in self.edges()))

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges()]}

    @classmethod
    def from_json(cls, data: dict) -> "SmallGraph":
        try:
            n = int(data["n"])
            edges = [tuple(e) for e in data["edges"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed graph JSON: {exc}") from exc
        for e in edges:
            if len(e) != 2:
                raise InvalidInputError(f"edge {list(e)} is not a pair")
        return cls.from_edges(n, edges)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges())
        return g


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------


def complete_graph(n: int) -> SmallGraph:
    return SmallGraph.from_edges(n, ((i, j) for i in range(n) for j in range(i + 1, n)))


def cycle_graph(n: int) -> SmallGraph:
    if n < 3:
        raise CatalogError(f"cycle({n}) needs at least 3 vertices")
    return SmallGraph.from_edges(n, ((i, (i + 1) % n) for i in range(n)))


def path_graph(n: int) -> SmallGraph:
    if n < 1:
        raise CatalogError(f"path({n}) needs at least 1 vertex")
    return SmallGraph.from_edges(n, ((i, i + 1) for i in range(n - 1)))


def k33() -> SmallGraph:
    return SmallGraph.from_edges(6, ((i, j) for i in range(3) for j in range(3, 6)))


def octahedron() -> SmallGraph:
    # K_{2,2,2}: antipodal pairs (0,3), (1,4), (2,5) are the non-edges
    return SmallGraph.from_edges(
        6, ((i, j) for i in range(6) for j in range(i + 1, 6) if j - i != 3)
    )


_PARAM = re.compile(r"^(cycle|path)\s*[\(\s]?\s*(\d+)\s*\)?$")
_COMPLETE = re.compile(r"^k_?(\d+)$")


def named_graph(name: str) -> SmallGraph:
    """Build a catalog graph: K4..K7 (any K_n up to 16), K33, octahedron,
    cycle(n), path(n). Names are case-insensitive."""
    key = name.strip().lower().replace(" ", "")
    if key in ("k33", "k3,3", "k_{3,3}", "k_33", "k3_3"):
        return k33()
    if key in ("octahedron", "octahedral", "k222", "k2,2,2"):
        return octahedron()
    m = _COMPLETE.match(key)
    if m:
        n = int(m.group(1))
        if 1 <= n <= MAX_VERTICES:
            return complete_graph(n)
    m = _PARAM.match(key)
    if m:
        n = int(m.group(2))
        if n > MAX_VERTICES:
            raise CatalogError(f"{name!r} exceeds {MAX_VERTICES} vertices")
        return cycle_graph(n) if m.group(1) == "cycle" else path_graph(n)
    raise CatalogError(f"unknown graph name {name!r}")


def catalog_names(n: int) -> list[str]:
    """Names tried, in order, when identifying an ``n``-vertex graph."""
    names = [f"K{n}"] if 1 <= n <= MAX_VERTICES else []
    if n == 6:
        names += ["K33", "octahedron"]
    if n >= 3:
        names.append(f"cycle({n})")
    names.append(f"path({n})")
    return names


def identify(g: SmallGraph) -> Optional[str]:
    for name in catalog_names(g.n):
        if is_isomorphic(g, named_graph(name)) is not None:
            return name
    return None


# ---------------------------------------------------------------------------
# Isomorphism
# ---------------------------------------------------------------------------


def is_isomorphic(g: SmallGraph, h: SmallGraph) -> Optional[tuple[int, ...]]:
    """Return the lexicographically first adjacency-preserving bijection
    ``mapping[v_g] = v_h``, or None."""
    n = g.n
    if n != h.n or g.edge_count != h.edge_count:
        return None
    dg, dh = g.degrees(), h.degrees()
    if sorted(dg) != sorted(dh):
        return None

    mapping = [-1] * n
    used = 0

    def extend(v: int) -> bool:
        nonlocal used
        if v == n:
            return True
        for w in range(n):
            if used >> w & 1 or dh[w] != dg[v]:
                continue
            ok = True
            for u in range(v):
                if g.has_edge(u, v) != h.has_edge(mapping[u], w):
                    ok = False
                    break
            if not ok:
                continue
            mapping[v] = w
            used |= 1 << w
            if extend(v + 1):
                return True
            used &= ~(1 << w)
            mapping[v] = -1
        return False

    return tuple(mapping) if extend(0) else None


# ---------------------------------------------------------------------------
# Bipartiteness
# ---------------------------------------------------------------------------


def is_bipartite(g: SmallGraph) -> Optional[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Two-colouring by BFS; the side holding vertex 0 comes first."""
    color = [-1] * g.n
    for root in range(g.n):
        if color[root] >= 0:
            continue
        color[root] = 0
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for w in g.neighbors(v):
                if color[w] < 0:
                    color[w] = 1 - color[v]
                    queue.append(w)
                elif color[w] == color[v]:
                    return None
    left = tuple(v for v in range(g.n) if color[v] == 0)
    right = tuple(v for v in range(g.n) if color[v] == 1)
    return left, right


# ---------------------------------------------------------------------------
# Planarity
# ---------------------------------------------------------------------------


class PlanarityResult(NamedTuple):
    planar: bool
    witness: Optional[SmallGraph] = None
    witness_kind: Optional[str] = None

    def __bool__(self) -> bool:
        return self.planar


def is_planar(g: SmallGraph, witness: bool = True) -> PlanarityResult:
    """Planarity verdict, with a Kuratowski subdivision when non-planar."""
    planar, cert = nx.check_planarity(g.to_networkx(), counterexample=witness)
    if planar:
        return PlanarityResult(True)
    if not witness or cert is None:
        return PlanarityResult(False)
    sub = SmallGraph.from_edges(g.n, (tuple(sorted(e)) for e in cert.edges()))
    return PlanarityResult(False, sub, kuratowski_kind(sub))


def kuratowski_kind(w: SmallGraph) -> Optional[str]:
    """Return "K5" or "K33" if ``w`` (ignoring isolated vertices) is a
    subdivision of that graph, else None."""
    degs = w.degrees()
    if any(d == 1 or d > 4 for d in degs):
        return None
    branch = [v for v in range(w.n) if degs[v] >= 3]
    if not branch:
        return None
    index = {v: k for k, v in enumerate(branch)}
    pairs: list[tuple[int, int]] = []
    seen_inner: set[int] = set()
    for b in branch:
        for start in w.neighbors(b):
            prev, cur = b, start
            inner = []
            while degs[cur] == 2:
                inner.append(cur)
                a, c = w.neighbors(cur)
                prev, cur = cur, (c if a == prev else a)
            if cur == b:
                return None  # loop through a branch vertex
            if index[b] < index[cur]:
                if seen_inner.intersection(inner):
                    return None
                seen_inner.update(inner)
                pairs.append((index[b], index[cur]))
    # every degree-2 vertex must lie on some branch path (no stray cycles)
    if seen_inner != {v for v in range(w.n) if degs[v] == 2}:
        return None
    if len(set(pairs)) != len(pairs):
        return None  # parallel paths
    core = SmallGraph.from_edges(len(branch), pairs)
    if is_isomorphic(core, complete_graph(5)) is not None:
        return "K5"
    if is_isomorphic(core, k33()) is not None:
        return "K33"
    return None


# ---------------------------------------------------------------------------
# Penny-graph edge bound
# ---------------------------------------------------------------------------


def harborth_bound(n: int) -> int:
    """Maximum edge count floor(3n - sqrt(12n - 3)) of a planar penny graph."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidInputError(f"harborth_bound needs a positive integer, got {n!r}")
    n = int(n)
    k = 12 * n - 3
    s = math.isqrt(k)
    return 3 * n - s if s * s == k else 3 * n - s - 1
