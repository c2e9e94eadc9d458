"""Backtracking searches used to build the packaged group fixtures.

Two searches live here: one finds automorphisms of a block design that
extend a seeded partial point map, the other finds automorphisms of the
two-graph of a strongly regular graph that move the added vertex.  Both
are used only by ``build_fixtures.py``; the installed package never
imports this module.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np


def coverage_tensor(blocks: Sequence[Sequence[int]], n: int) -> np.ndarray:
    """Tensor T with T[p,q,r] = number of blocks containing all of p, q, r."""
    tensor = np.zeros((n, n, n), dtype=np.uint16)
    for block in blocks:
        idx = np.fromiter(block, dtype=np.intp)
        tensor[np.ix_(idx, idx, idx)] += 1
    return tensor


def find_design_automorphism(
    blocks: Sequence[Sequence[int]],
    n: int,
    seed: dict[int, int],
    *,
    tensor: Optional[np.ndarray] = None,
    node_budget: int = 2_000_000,
) -> tuple[Optional[list[int]], int]:
    """Extend a partial point map to a design automorphism, or give up."""
    if tensor is None:
        tensor = coverage_tensor(blocks, n)
    blockset = {frozenset(b) for b in blocks}
    point_blocks: list[list[int]] = [[] for _ in range(n)]
    block_pts = [tuple(sorted(b)) for b in blocks]
    for i, b in enumerate(block_pts):
        for p in b:
            point_blocks[p].append(i)
    filled = [0] * len(blocks)
    image = [-1] * n
    used = np.zeros(n, dtype=bool)
    mapped: list[int] = []
    nodes = 0

    def place(p: int, q: int) -> Optional[list[int]]:
        image[p] = q
        used[q] = True
        mapped.append(p)
        full = []
        for bi in point_blocks[p]:
            filled[bi] += 1
            if filled[bi] == len(block_pts[bi]):
                full.append(bi)
        return full

    def unplace(p: int) -> None:
        q = image[p]
        image[p] = -1
        used[q] = False
        mapped.pop()
        for bi in point_blocks[p]:
            filled[bi] -= 1

    def full_blocks_ok(full: list[int]) -> bool:
        for bi in full:
            if frozenset(image[p] for p in block_pts[bi]) not in blockset:
                return False
        return True

    order = sorted(seed) + [p for p in range(n) if p not in seed]

    def rec(depth: int) -> bool:
        nonlocal nodes
        if depth == n:
            return True
        p = order[depth]
        ms = np.fromiter(mapped, dtype=np.intp)
        mi = np.fromiter((image[x] for x in mapped), dtype=np.intp)
        if p in seed:
            cand = [seed[p]]
        elif depth == 0:
            cand = list(range(n))
        else:
            probe = tensor[p][np.ix_(ms, ms)]
            hits = (tensor[np.ix_(~used, mi, mi)] == probe[None, :, :]).all(axis=(1, 2))
            cand = np.where(~used)[0][hits].tolist()
        for q in cand:
            nodes += 1
            if nodes > node_budget:
                return False
            full = place(p, q)
            if full_blocks_ok(full) and rec(depth + 1):
                return True
            unplace(p)
        return False

    if rec(0):
        return image, nodes
    return None, nodes


def constrained_vertex_order(adj: np.ndarray) -> list[int]:
    """Vertex order in which each vertex sees many already-ordered neighbours."""
    n = adj.shape[0]
    order = [0]
    count = adj[0].astype(np.int64).copy()
    placed = np.zeros(n, dtype=bool)
    placed[0] = True
    for _ in range(n - 1):
        nxt = int(np.where(placed, -1, count).argmax())
        order.append(nxt)
        placed[nxt] = True
        count += adj[nxt]
    return order


def descendant_automorphism(adj: np.ndarray, v: int) -> list[int]:
    """Two-graph automorphism moving the extension vertex onto vertex v.

    ``adj`` is the adjacency matrix of a graph G on n vertices; the
    two-graph on n + 1 vertices has coherent triples {x,y,z} with an odd
    number of G-edges, plus {inf,y,z} for each edge yz.  The descendant at
    any vertex is isomorphic to G whenever the two-graph is regular, and
    any such isomorphism extends to an automorphism sending inf to v.
    """
    n = adj.shape[0]
    inf = n
    total = n + 1
    desc = np.zeros((total, total), dtype=bool)
    others = np.array([y for y in range(n) if y != v])
    sub = adj[np.ix_(others, others)] ^ adj[v, others][None, :] ^ adj[v, others][:, None]
    np.fill_diagonal(sub, False)
    desc[np.ix_(others, others)] = sub
    desc[others, inf] = desc[inf, others] = adj[v, others]

    order = constrained_vertex_order(adj)
    srows = [adj[order[d], order[:d]] for d in range(n)]
    used = np.zeros(total, dtype=bool)
    used[v] = True
    image = [-1] * n

    def rec(depth: int) -> bool:
        if depth == n:
            return True
        mi = image[:depth]
        if depth == 0:
            cand = np.where(~used)[0]
        else:
            match = (desc[:, mi] == srows[depth]).all(axis=1)
            cand = np.where(match & ~used)[0]
        for q in cand:
            image[depth] = int(q)
            used[q] = True
            if rec(depth + 1):
                return True
            used[q] = False
        image[depth] = -1
        return False

    if not rec(0):
        raise RuntimeError(f"no isomorphism onto the descendant at vertex {v}")
    final = [-1] * n
    for pos, src in enumerate(order):
        final[src] = image[pos]
    return final + [v]
