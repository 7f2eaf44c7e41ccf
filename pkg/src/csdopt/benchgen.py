"""Benchmark unitary generators: quantum walks, QFT, random orthogonals.

The discrete-time walk step operator acts on the directed-arc space of an
undirected graph: one basis state per (source, target) arc.  Arcs are
ordered by source vertex (ascending vertex id) and, within a vertex, by
target id; this ordering puts the leaf-to-centre arcs of a star graph in
the first half of the basis, which fixes the operator's block layout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DisconnectedGraph, InfeasiblePattern, ShapeError
from .linalg import assert_unitary


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph: vertices 1..n_vertices, edge list of pairs."""

    n_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (1 <= u <= self.n_vertices and 1 <= v <= self.n_vertices):
                raise ValueError(f"edge ({u},{v}) outside vertex range")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge ({u},{v})")
            seen.add(key)

    def adjacency(self) -> dict[int, list[int]]:
        adj: dict[int, list[int]] = {v: [] for v in range(1, self.n_vertices + 1)}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return {v: sorted(ws) for v, ws in adj.items()}

    def is_connected(self) -> bool:
        if self.n_vertices == 0:
            return False
        adj = self.adjacency()
        seen = {1}
        stack = [1]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n_vertices


def star_graph(k: int) -> Graph:
    """k leaves (vertices 1..k) joined to a centre vertex k+1."""
    if k < 1:
        raise ValueError("star graph needs at least one leaf")
    return Graph(k + 1, tuple((i, k + 1) for i in range(1, k + 1)))


def cayley_tree(degree: int, generations: int) -> Graph:
    """Tree whose interior vertices all have the given degree.

    The root (vertex 1) has ``degree`` children; every later interior
    vertex has degree-1 children, out to ``generations`` levels.
    """
    if degree < 2 or generations < 1:
        raise ValueError("need degree >= 2 and generations >= 1")
    edges = []
    nxt = 2
    frontier = [1]
    for level in range(generations):
        new_frontier = []
        for v in frontier:
            for _ in range(degree if v == 1 else degree - 1):
                edges.append((v, nxt))
                new_frontier.append(nxt)
                nxt += 1
        frontier = new_frontier
    return Graph(nxt - 1, tuple(edges))


def arc_basis(graph: Graph) -> list[tuple[int, int]]:
    """Directed arcs in basis order: grouped by source, source and target ascending."""
    adj = graph.adjacency()
    return [(v, w) for v in sorted(adj) for w in adj[v]]


def dtqw_step(graph: Graph, coin: str = "grover") -> np.ndarray:
    """Discrete-time quantum walk step operator U = S C on the arc space.

    C applies the degree-d Grover diffusion 2/d J - I to each vertex's
    outgoing arcs; S exchanges the two directions of every edge.  The
    result is a real unitary of dimension 2 |E|.
    """
    if coin != "grover":
        raise ValueError(f"unsupported coin {coin!r}")
    if not graph.is_connected():
        raise DisconnectedGraph("walk operators need a connected graph")
    arcs = arc_basis(graph)
    index = {a: i for i, a in enumerate(arcs)}
    m = len(arcs)
    C = np.zeros((m, m))
    adj = graph.adjacency()
    for v, ws in adj.items():
        d = len(ws)
        ids = [index[(v, w)] for w in ws]
        C[np.ix_(ids, ids)] = 2.0 / d * np.ones((d, d)) - np.eye(d)
    S = np.zeros((m, m))
    for (u, v), i in index.items():
        S[index[(v, u)], i] = 1.0
    return S @ C


def qft_matrix(n_dims: int) -> np.ndarray:
    """Discrete Fourier transform matrix, entries omega^(jk) / sqrt(n)."""
    if n_dims < 1:
        raise ValueError("dimension must be positive")
    omega = np.exp(2j * np.pi / n_dims)
    jk = np.outer(np.arange(n_dims), np.arange(n_dims))
    return omega ** jk / np.sqrt(n_dims)


def random_unitary(n_dims: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = rng.standard_normal((n_dims, n_dims)) + 1j * rng.standard_normal((n_dims, n_dims))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_orthogonal(n_dims: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random real orthogonal via QR of a Gaussian matrix."""
    z = rng.standard_normal((n_dims, n_dims))
    q, r = np.linalg.qr(z)
    return q * np.sign(np.diag(r))


def random_orthogonal_sparse(n_dims: int, fill_pattern: np.ndarray,
                             seed: int) -> np.ndarray:
    """Random orthogonal matrix respecting a prescribed zero pattern.

    ``fill_pattern`` is a boolean matrix marking the entries allowed to be
    nonzero.  The pattern's rows and columns are split into connected
    components; each component must be a full square block (after row and
    column permutation), and gets an independent Haar-random orthogonal.
    Rotations never touch pivots outside a component, so forbidden entries
    stay exactly zero.
    """
    pat = np.asarray(fill_pattern, dtype=bool)
    if pat.shape != (n_dims, n_dims):
        raise ShapeError(f"pattern shape {pat.shape} != ({n_dims}, {n_dims})")
    if not pat.diagonal().all():
        raise InfeasiblePattern("every diagonal entry must be allowed")
    # union-find over rows; columns tied to rows through allowed entries
    parent = list(range(n_dims))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for i in range(n_dims):
        for j in range(n_dims):
            if pat[i, j]:
                union(i, j)
    comps: dict[int, list[int]] = {}
    for i in range(n_dims):
        comps.setdefault(find(i), []).append(i)
    rng = np.random.default_rng(seed)
    out = np.zeros((n_dims, n_dims))
    for ids in comps.values():
        block = pat[np.ix_(ids, ids)]
        if not block.all():
            raise InfeasiblePattern(
                "pattern component is not a full block; it cannot host an "
                "orthogonal matrix under rotation-based construction")
        if len(ids) == 1:
            out[ids[0], ids[0]] = 1.0
        else:
            out[np.ix_(ids, ids)] = random_orthogonal(len(ids), rng)
    return out


# The 8x8 sparse random orthogonal used as a regression fixture.  Printed
# to four decimals, which is only orthogonal to ~1e-4, so the fixture is
# re-orthonormalised by nearest-orthogonal (polar) projection; the raw
# values remain the comparison anchor at 5e-4.
_FIXTURE_RAW = np.array([
    [0.0438, 0.0000, 0.0000, 0.0000, 0.9990, 0.0000, 0.0000, 0.0000],
    [0.1297, 0.8689, -0.2956, 0.0000, -0.0057, 0.1538, -0.3423, 0.0000],
    [-0.2923, 0.0000, 0.6661, 0.0000, 0.0128, 0.0000, -0.6861, 0.0000],
    [-0.0061, -0.0412, 0.0140, 0.7058, 0.0003, 0.3008, 0.0162, -0.6397],
    [0.9147, 0.0000, 0.4021, 0.0000, -0.0401, 0.0000, 0.0000, 0.0000],
    [0.0185, 0.1242, -0.0422, 0.3961, -0.0008, -0.9073, -0.0489, 0.0000],
    [0.2424, -0.4762, -0.5524, 0.0000, -0.0106, 0.0000, -0.6397, 0.0000],
    [0.0051, 0.0343, -0.0117, -0.5874, -0.0002, -0.2503, -0.0135, -0.7686],
])


def sparse_orthogonal_fixture() -> np.ndarray:
    """8x8 sparse orthogonal regression fixture (re-orthonormalised)."""
    u, _, vt = np.linalg.svd(_FIXTURE_RAW)
    out = u @ vt
    return assert_unitary(out, 1e-12)


def sparse_orthogonal_fixture_raw() -> np.ndarray:
    """The fixture as printed (orthogonal only to ~1e-4)."""
    return _FIXTURE_RAW.copy()
