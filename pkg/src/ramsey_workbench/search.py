"""Search for colorings that split every set of a hypergraph into many colors.

A dual partition arrow ``C <- (B)^A_{k,t}`` fails exactly when some
``k``-coloring of ``hom(C, A)`` gives every composition set
``hom(B, A) . w`` more than ``t`` colors.  Those composition sets are the
edges handed to this module; vertices are the morphisms being colored.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

FOUND = "found"
NONE = "none"
BUDGET = "budget"


@dataclass
class SearchResult:
    status: str
    coloring: list[int] | None = None
    stats: dict = field(default_factory=dict)


def _normalize(edges: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    return sorted({tuple(sorted(set(e))) for e in edges})


def splits_all(coloring: Sequence[int], edges: Sequence[Sequence[int]], t: int) -> bool:
    return all(len({coloring[v] for v in e}) > t for e in edges)


def refute_exhaustive(
    m: int,
    edges: Sequence[Sequence[int]],
    k: int,
    t: int,
    budget: int = 2_000_000,
    order: Sequence[int] | None = None,
) -> SearchResult:
    """Complete backtracking search for a splitting coloring.

    Colors not yet used anywhere are interchangeable, so at each branch only
    one of them is tried.  An edge that can no longer reach ``t + 1`` colors
    triggers a backtrack; an edge that needs every remaining vertex to bring
    a fresh color prunes the colors it already has from those vertices.
    """
    edges = _normalize(edges)
    stats = {"vertices": m, "edges": len(edges), "nodes": 0}
    if not edges:
        return SearchResult(FOUND, [0] * m, stats)
    if min(len(e) for e in edges) <= t or k <= t:
        return SearchResult(NONE, None, stats)

    incident: list[list[int]] = [[] for _ in range(m)]
    for i, e in enumerate(edges):
        for v in e:
            incident[v].append(i)
    if order is None:
        order = sorted(range(m), key=lambda v: (-len(incident[v]), v))
    order = list(order)

    color = [-1] * m
    full = (1 << k) - 1
    domain = [full] * m
    used_count = [0] * k
    trail: list[tuple[str, int, int]] = []

    def assign(v: int, c: int) -> bool:
        color[v] = c
        used_count[c] += 1
        trail.append(("c", v, 0))
        queue = [v]
        while queue:
            x = queue.pop()
            for ei in incident[x]:
                e = edges[ei]
                present = 0
                free = []
                for y in e:
                    if color[y] >= 0:
                        present |= 1 << color[y]
                    else:
                        free.append(y)
                j = bin(present).count("1")
                best = j + min(len(free), k - j)
                if best <= t:
                    return False
                if best == t + 1 and len(free) <= k - j:
                    for y in free:
                        d = domain[y] & ~present
                        if d != domain[y]:
                            if d == 0:
                                return False
                            trail.append(("d", y, domain[y]))
                            domain[y] = d
                            if d & (d - 1) == 0:
                                cy = d.bit_length() - 1
                                color[y] = cy
                                used_count[cy] += 1
                                trail.append(("c", y, 0))
                                queue.append(y)
        return True

    def undo(mark: int) -> None:
        while len(trail) > mark:
            kind, v, old = trail.pop()
            if kind == "c":
                used_count[color[v]] -= 1
                color[v] = -1
            else:
                domain[v] = old

    exhausted = False

    def solve(pos: int) -> bool:
        nonlocal exhausted
        while pos < m and color[order[pos]] >= 0:
            pos += 1
        if pos == m:
            return True
        v = order[pos]
        tried_fresh = False
        for c in range(k):
            if not domain[v] >> c & 1:
                continue
            if used_count[c] == 0:
                if tried_fresh:
                    continue
                tried_fresh = True
            stats["nodes"] += 1
            if stats["nodes"] > budget:
                exhausted = True
                return False
            mark = len(trail)
            if assign(v, c) and solve(pos + 1):
                return True
            undo(mark)
            if exhausted:
                return False
        return False

    if solve(0):
        return SearchResult(FOUND, list(color), stats)
    return SearchResult(BUDGET if exhausted else NONE, None, stats)


def refute_randomized(
    m: int,
    edges: Sequence[Sequence[int]],
    k: int,
    t: int,
    budget: int = 200_000,
    seed: int = 0,
    restarts: int = 10,
) -> SearchResult:
    """Local search: recolor a vertex of some under-colored edge until none is left.

    Never proves that no coloring exists; failure to find one is reported as
    ``BUDGET``.
    """
    edges = _normalize(edges)
    rng = random.Random(seed)
    stats = {"vertices": m, "edges": len(edges), "flips": 0, "seed": seed}
    if not edges:
        return SearchResult(FOUND, [0] * m, stats)
    if min(len(e) for e in edges) <= t or k <= t:
        return SearchResult(NONE, None, stats)
    incident: list[list[int]] = [[] for _ in range(m)]
    for i, e in enumerate(edges):
        for v in e:
            incident[v].append(i)
    per_restart = max(1, budget // restarts)
    for _ in range(restarts):
        coloring = [rng.randrange(k) for _ in range(m)]
        counts = [[0] * k for _ in edges]
        for i, e in enumerate(edges):
            for v in e:
                counts[i][coloring[v]] += 1
        distinct = [sum(1 for x in row if x) for row in counts]
        bad = {i for i in range(len(edges)) if distinct[i] <= t}
        for _ in range(per_restart):
            if not bad:
                return SearchResult(FOUND, coloring, stats)
            e = edges[min(bad) if len(bad) == 1 else rng.choice(sorted(bad))]
            v = rng.choice(e)
            present = {coloring[y] for y in e}
            fresh = [c for c in range(k) if c not in present]
            new = rng.choice(fresh) if fresh else rng.randrange(k)
            old = coloring[v]
            if new == old:
                continue
            coloring[v] = new
            for i in incident[v]:
                row = counts[i]
                row[old] -= 1
                if row[old] == 0:
                    distinct[i] -= 1
                if row[new] == 0:
                    distinct[i] += 1
                row[new] += 1
                if distinct[i] <= t:
                    bad.add(i)
                else:
                    bad.discard(i)
            stats["flips"] += 1
    return SearchResult(BUDGET, None, stats)


def refute_naive(m: int, edges: Sequence[Sequence[int]], k: int, t: int) -> SearchResult:
    """Plain enumeration of all colorings with vertex 0 fixed to color 0."""
    import itertools

    edges = _normalize(edges)
    stats = {"vertices": m, "edges": len(edges), "colorings": 0}
    if m == 0:
        return SearchResult(FOUND if splits_all([], edges, t) else NONE, [] if splits_all([], edges, t) else None, stats)
    for rest in itertools.product(range(k), repeat=m - 1):
        coloring = (0,) + rest
        stats["colorings"] += 1
        if splits_all(coloring, edges, t):
            return SearchResult(FOUND, list(coloring), stats)
    return SearchResult(NONE, None, stats)
