"""Vietoris-Rips persistent homology of 2-D point clouds (H0 and H1)
and the bottleneck distance between persistence diagrams.

The filtration parameter is the edge length itself: an edge enters at
the distance between its endpoints and a triangle at its longest edge,
both truncated at ``max_radius``.  H0 comes from a union-find sweep of
the sorted edges (every component is born at 0; the elder rule keeps
the older component alive).  H1 pairs are read off a mod-2 reduction of
the triangle boundary columns over the edge basis; classes still alive
at the truncation radius are counted as essential rather than given a
fake death.

The bottleneck distance does a binary search over the candidate radii
(all pairwise L-inf costs plus all diagonal projection costs), deciding
feasibility at each radius with a Hopcroft-Karp maximum matching on the
standard point/diagonal-copy bipartite graph.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .embedding import Embedding2D
from .errors import InputError

DEFAULT_MAX_POINTS = 512


@dataclass
class PersistenceDiagram:
    """Finite (birth, death) pairs plus the count of never-dying classes.

    For H0 every bar is kept, including zero-length bars from duplicate
    points, so finite bars + essential classes always add up to the
    number of points.  For H1 zero-persistence pairs (a cycle filled the
    instant it appears) carry no information and are dropped.
    """

    dim: int
    pairs: np.ndarray
    essential: int
    essential_births: np.ndarray = field(
        default_factory=lambda: np.empty(0, dtype=np.float64)
    )

    def __post_init__(self):
        pairs = np.asarray(self.pairs, dtype=np.float64).reshape(-1, 2)
        if pairs.size and np.any(pairs[:, 1] < pairs[:, 0]):
            raise InputError("persistence pairs must satisfy death >= birth")
        if pairs.size and np.any(pairs[:, 0] < 0):
            raise InputError("births must be nonnegative")
        self.pairs = pairs
        self.essential_births = np.asarray(self.essential_births, dtype=np.float64)


@dataclass(frozen=True)
class RipsParams:
    max_radius: float
    max_points: int = DEFAULT_MAX_POINTS
    subsample_seed: int = 0

    def __post_init__(self):
        if not self.max_radius > 0.0:
            raise InputError("max_radius must be positive")


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        # elder rule with all births at zero: keep the lower root
        if ra > rb:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


def _subsample(coords: np.ndarray, params: RipsParams) -> tuple[np.ndarray, bool]:
    n = coords.shape[0]
    if n <= params.max_points:
        return coords, False
    rng = np.random.default_rng(params.subsample_seed)
    keep = np.sort(rng.choice(n, size=params.max_points, replace=False))
    return coords[keep], True


def rips_persistence(
    e: Embedding2D, params: RipsParams
) -> tuple[PersistenceDiagram, PersistenceDiagram]:
    """H0 and H1 diagrams of the Rips filtration of ``e`` up to max_radius.

    Point sets larger than ``max_points`` are first reduced by a seeded
    uniform subsample (triangle enumeration is cubic; the cap keeps the
    cost bounded and the seed keeps it reproducible).
    """
    coords, _ = _subsample(e.coords, params)
    n = coords.shape[0]
    if n < 2:
        raise InputError("persistence requires at least 2 points")
    radius = float(params.max_radius)

    diff = coords[:, None, :] - coords[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=2))

    iu, ju = np.triu_indices(n, k=1)
    within = dist[iu, ju] <= radius
    edge_i = iu[within]
    edge_j = ju[within]
    edge_w = dist[iu, ju][within]
    order = np.lexsort((edge_j, edge_i, edge_w))
    edge_i, edge_j, edge_w = edge_i[order], edge_j[order], edge_w[order]
    n_edges = edge_w.shape[0]

    # --- H0: union-find sweep, births all zero ---
    uf = _UnionFind(n)
    h0_pairs = []
    positive = np.zeros(n_edges, dtype=bool)
    for idx in range(n_edges):
        if uf.union(int(edge_i[idx]), int(edge_j[idx])):
            h0_pairs.append((0.0, float(edge_w[idx])))
        else:
            positive[idx] = True
    essential0 = n - len(h0_pairs)
    dgm0 = PersistenceDiagram(
        dim=0,
        pairs=np.asarray(h0_pairs, dtype=np.float64).reshape(-1, 2),
        essential=essential0,
        essential_births=np.zeros(essential0),
    )

    # --- H1: reduce triangle boundaries over the edge basis ---
    edge_pos = {(int(a), int(b)): p for p, (a, b) in enumerate(zip(edge_i, edge_j))}
    triangles: list[tuple[float, int, int, int]] = []
    adjacency: list[np.ndarray] = []
    for i in range(n):
        nbrs = np.nonzero(dist[i, i + 1 :] <= radius)[0] + i + 1
        adjacency.append(nbrs)
    for i in range(n):
        nbrs = adjacency[i]
        for a in range(len(nbrs)):
            j = int(nbrs[a])
            rest = nbrs[a + 1 :]
            close = rest[dist[j, rest] <= radius]
            for k in close:
                k = int(k)
                value = max(dist[i, j], dist[i, k], dist[j, k])
                triangles.append((float(value), i, j, k))
    triangles.sort()

    claimed: dict[int, int] = {}
    death_of: dict[int, float] = {}
    for value, i, j, k in triangles:
        col = (
            (1 << edge_pos[(i, j)])
            | (1 << edge_pos[(i, k)])
            | (1 << edge_pos[(j, k)])
        )
        while col:
            pivot = col.bit_length() - 1
            if pivot not in claimed:
                claimed[pivot] = col
                death_of[pivot] = value
                break
            col ^= claimed[pivot]

    h1_pairs = []
    essential1 = []
    for idx in np.nonzero(positive)[0]:
        idx = int(idx)
        birth = float(edge_w[idx])
        if idx in death_of:
            death = death_of[idx]
            if death > birth:
                h1_pairs.append((birth, death))
        else:
            essential1.append(birth)
    dgm1 = PersistenceDiagram(
        dim=1,
        pairs=np.asarray(h1_pairs, dtype=np.float64).reshape(-1, 2),
        essential=len(essential1),
        essential_births=np.asarray(essential1, dtype=np.float64),
    )
    return dgm0, dgm1


def _hopcroft_karp(n_left: int, n_right: int, adjacency: list[list[int]]) -> int:
    """Maximum-cardinality matching size via Hopcroft-Karp."""
    INF = n_left + n_right + 1
    match_left = [-1] * n_left
    match_right = [-1] * n_right
    dist = [0] * n_left

    def bfs() -> bool:
        queue = deque()
        for u in range(n_left):
            if match_left[u] == -1:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = INF
        found = False
        while queue:
            u = queue.popleft()
            for v in adjacency[u]:
                w = match_right[v]
                if w == -1:
                    found = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(u: int) -> bool:
        for v in adjacency[u]:
            w = match_right[v]
            if w == -1 or (dist[w] == dist[u] + 1 and dfs(w)):
                match_left[u] = v
                match_right[v] = u
                return True
        dist[u] = INF
        return False

    matching = 0
    while bfs():
        for u in range(n_left):
            if match_left[u] == -1 and dfs(u):
                matching += 1
    return matching


def _feasible(p1: np.ndarray, p2: np.ndarray, radius: float) -> bool:
    """Is there a full matching with every assignment cost <= radius?

    Left vertices are the points of diagram 1 followed by one diagonal
    copy per point of diagram 2; right vertices symmetrically.  Diagonal
    copies match each other for free.
    """
    n1, n2 = p1.shape[0], p2.shape[0]
    adjacency: list[list[int]] = []
    for i in range(n1):
        nbrs = []
        for j in range(n2):
            cost = max(abs(p1[i, 0] - p2[j, 0]), abs(p1[i, 1] - p2[j, 1]))
            if cost <= radius:
                nbrs.append(j)
        if (p1[i, 1] - p1[i, 0]) / 2.0 <= radius:
            nbrs.append(n2 + i)
        adjacency.append(nbrs)
    diagonal_fillers = list(range(n2, n2 + n1))
    for j in range(n2):
        nbrs = list(diagonal_fillers)
        if (p2[j, 1] - p2[j, 0]) / 2.0 <= radius:
            nbrs.append(j)
        adjacency.append(nbrs)
    return _hopcroft_karp(n1 + n2, n2 + n1, adjacency) == n1 + n2


def bottleneck(d1: PersistenceDiagram, d2: PersistenceDiagram) -> float:
    """Bottleneck distance between two diagrams of the same dimension.

    Operates on the finite pairs only (essential classes are reported
    separately by the diagrams themselves).  Ground cost is L-inf and
    unmatched points may project to the diagonal at half persistence.
    """
    if d1.dim != d2.dim:
        raise InputError(
            f"diagram dimensions differ ({d1.dim} vs {d2.dim}); "
            "bottleneck compares like with like"
        )
    p1 = d1.pairs
    p2 = d2.pairs
    if p1.shape[0] == 0 and p2.shape[0] == 0:
        return 0.0

    candidates = {0.0}
    for pts in (p1, p2):
        for b, d in pts:
            candidates.add((d - b) / 2.0)
    for b1, dd1 in p1:
        for b2, dd2 in p2:
            candidates.add(max(abs(b1 - b2), abs(dd1 - dd2)))
    ordered = sorted(candidates)

    lo, hi = 0, len(ordered) - 1
    # the largest candidate always admits the all-diagonal matching
    while lo < hi:
        mid = (lo + hi) // 2
        if _feasible(p1, p2, ordered[mid]):
            hi = mid
        else:
            lo = mid + 1
    return ordered[lo]


def export_diagrams_csv(path, diagrams) -> None:
    """Write diagrams as ``dim,birth,death,essential`` rows.

    Essential classes get death ``inf`` and essential=1.
    """
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("dim,birth,death,essential\n")
        for dgm in diagrams:
            for b, d in dgm.pairs:
                fh.write(f"{dgm.dim},{float(b)!r},{float(d)!r},0\n")
            for b in dgm.essential_births:
                fh.write(f"{dgm.dim},{float(b)!r},inf,1\n")
