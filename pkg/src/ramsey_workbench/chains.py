"""Finite chains and the calculus of rigid surjections.

A chain of size ``n`` is the canonical well-order ``0 < 1 < ... < n-1``;
labelled chains carry an explicit sequence of element names but every
computation runs on positions.  A :class:`ChainMap` is a table of
codomain positions, one per domain position.  Rigid surjections are the
surjections whose fibre minima increase with the codomain order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Iterator, Sequence


@dataclass(frozen=True)
class Chain:
    """A finite chain, canonically ``0 < 1 < ... < size-1``.

    ``labels`` optionally names the elements in increasing order.
    """

    size: int
    labels: tuple | None = None

    def __post_init__(self):
        if self.size < 0:
            raise ValueError(f"chain size must be non-negative, got {self.size}")
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != self.size:
                raise ValueError("labels must have exactly one entry per element")
            if len(set(labels)) != len(labels):
                raise ValueError("chain labels must be distinct")
            object.__setattr__(self, "labels", labels)

    @classmethod
    def of(cls, labels: Iterable[Hashable]) -> Chain:
        labels = tuple(labels)
        return cls(len(labels), labels)

    def __len__(self) -> int:
        return self.size

    def elements(self) -> tuple:
        return self.labels if self.labels is not None else tuple(range(self.size))

    def position(self, element) -> int:
        if self.labels is None:
            if not (isinstance(element, int) and 0 <= element < self.size):
                raise KeyError(element)
            return element
        return self.labels.index(element)

    def less(self, a, b) -> bool:
        return self.position(a) < self.position(b)

    def canonical(self) -> Chain:
        return Chain(self.size)


@dataclass(frozen=True)
class ChainMap:
    """A map between canonical chains given by its table of positions."""

    n: int
    k: int
    table: tuple[int, ...] = field(default=())

    def __post_init__(self):
        table = tuple(int(v) for v in self.table)
        if len(table) != self.n:
            raise ValueError(f"table has length {len(table)}, expected {self.n}")
        for v in table:
            if not 0 <= v < self.k:
                raise ValueError(f"table entry {v} outside codomain of size {self.k}")
        object.__setattr__(self, "table", table)

    @classmethod
    def from_table(cls, table: Sequence[int], k: int | None = None) -> ChainMap:
        table = tuple(table)
        if k is None:
            k = max(table) + 1 if table else 0
        return cls(len(table), k, table)

    @classmethod
    def identity(cls, n: int) -> ChainMap:
        return cls(n, n, tuple(range(n)))

    @property
    def domain(self) -> Chain:
        return Chain(self.n)

    @property
    def codomain(self) -> Chain:
        return Chain(self.k)

    def __call__(self, x: int) -> int:
        return self.table[x]

    def is_surjective(self) -> bool:
        return len(set(self.table)) == self.k

    def fibre_minima(self) -> dict[int, int]:
        minima: dict[int, int] = {}
        for x, y in enumerate(self.table):
            minima.setdefault(y, x)
        return minima

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "table": list(self.table)}

    @classmethod
    def from_json(cls, data: dict) -> ChainMap:
        return cls(data["n"], data["k"], tuple(data["table"]))

    def __str__(self):
        return f"{self.n}->{self.k}:{list(self.table)}"


def is_rigid_surjection(f: ChainMap) -> bool:
    """True iff ``f`` is onto and ``b1 < b2`` implies ``min f^-1(b1) < min f^-1(b2)``.

    Scanning the domain in order, the fibre minima increase exactly when
    every newly seen value is the next unused codomain element.
    """
    seen = 0
    for y in f.table:
        if y == seen:
            seen += 1
        elif y > seen:
            return False
    return seen == f.k


def _require_surjective(f: ChainMap) -> None:
    if not f.is_surjective():
        raise ValueError(f"map {f} is not surjective")


def initial_segment_criterion(f: ChainMap) -> bool:
    """True iff ``f`` maps every initial segment of its domain onto an initial segment."""
    _require_surjective(f)
    image: set[int] = set()
    for y in f.table:
        image.add(y)
        if image != set(range(len(image))):
            return False
    return True


def dual_embedding(f: ChainMap) -> ChainMap:
    """The map ``b -> min f^-1(b)`` from the codomain back into the domain."""
    _require_surjective(f)
    minima = f.fibre_minima()
    return ChainMap(f.k, f.n, tuple(minima[b] for b in range(f.k)))


def is_strictly_increasing(f: ChainMap) -> bool:
    return all(a < b for a, b in zip(f.table, f.table[1:]))


def induced_order(table: Sequence[Hashable], codomain: Iterable[Hashable] | None = None) -> Chain:
    """The unique order on the image of ``table`` turning it into a rigid surjection.

    ``table[i]`` is the image of domain position ``i``.  Elements are ranked
    by their first occurrence.  If ``codomain`` is given, the map must be
    onto it.
    """
    order = list(dict.fromkeys(table))
    if codomain is not None:
        codomain = set(codomain)
        if set(order) != codomain:
            raise ValueError("map is not onto the given codomain")
    return Chain.of(order)


def _restricted_growth(n: int, k: int) -> Iterator[tuple[int, ...]]:
    # tables whose running maximum grows by at most one per step, ending at k-1
    table = [0] * n

    def extend(i: int, top: int):
        remaining = n - i
        if top + 1 + remaining < k:
            return
        if i == n:
            if top + 1 == k:
                yield tuple(table)
            return
        for v in range(min(top + 2, k)):
            table[i] = v
            yield from extend(i + 1, max(top, v))

    if n == 0:
        if k == 0:
            yield ()
        return
    table[0] = 0
    yield from extend(1, 0)


def enumerate_rigid_surjections(n: int, k: int) -> list[ChainMap]:
    """All rigid surjections from chain ``n`` onto chain ``k``, in lex order of tables."""
    if k > n or k < 0:
        return []
    return [ChainMap(n, k, t) for t in _restricted_growth(n, k)]


def compose(g: ChainMap, f: ChainMap) -> ChainMap:
    """``g o f``: apply ``f`` first."""
    if f.k != g.n:
        raise ValueError(f"cannot compose {g} after {f}: codomain {f.k} != domain {g.n}")
    return ChainMap(f.n, g.k, tuple(g.table[y] for y in f.table))


def ordinal_sum(chains: Sequence[Chain]) -> Chain:
    """Concatenate chains; elements are labelled ``(summand index, position)``."""
    labels = [(i, x) for i, c in enumerate(chains) for x in range(c.size)]
    return Chain.of(labels)


def lex_power(c: Chain, n: int) -> Chain:
    """The ``n``-th lexicographic power; labels are tuples, most significant first."""
    return Chain.of(itertools.product(range(c.size), repeat=n))


def tuple_index(t: Sequence[int], base: int) -> int:
    idx = 0
    for x in t:
        idx = idx * base + x
    return idx


def lex_product_map(f: ChainMap, n: int) -> ChainMap:
    """The coordinatewise map ``A^n -> B^n`` between lexicographic powers."""
    if n < 1:
        raise ValueError("power must be positive")
    if not is_rigid_surjection(f):
        raise ValueError(f"{f} is not a rigid surjection")
    table = tuple(
        tuple_index([f.table[a] for a in t], f.k)
        for t in itertools.product(range(f.n), repeat=n)
    )
    return ChainMap(f.n**n, f.k**n, table)
