"""Linearly ordered finite algebras and rigid epimorphisms between them.

The free algebra of a variety is ordered by the neat-minimal term in each
class, which makes the natural map from the neat term chain a rigid
surjection.  Homomorphisms between ordered algebras are checked three
ways: they must commute with the operations, be onto, and be rigid on the
underlying chains.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ramsey_workbench.algebras import (
    FiniteAlgebra,
    FreeAlgebra,
    Homomorphism,
    Variety,
    VarietyMembershipError,
    epi_set,
    evaluate,
    free_algebra,
    generated_elements,
    is_homomorphism,
    product,
    require_in_variety,
    subalgebra_on,
)
from ramsey_workbench.chains import Chain, ChainMap, induced_order, is_rigid_surjection
from ramsey_workbench.terms import (
    Term,
    Var,
    enumerate_neat,
    fill,
    flatten,
    neat_key,
    shapes_of_length,
    substitute,
    variables,
)


class NotRigidError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class OrderedAlgebra:
    """A finite algebra with a linear order; ``order`` lists the carrier increasingly."""

    algebra: FiniteAlgebra
    order: tuple[int, ...]

    def __post_init__(self):
        order = tuple(int(x) for x in self.order)
        if sorted(order) != list(range(self.algebra.size)):
            raise ValueError("order must list every carrier element exactly once")
        object.__setattr__(self, "order", order)

    @classmethod
    def natural(cls, algebra: FiniteAlgebra) -> OrderedAlgebra:
        return cls(algebra, tuple(range(algebra.size)))

    @property
    def size(self) -> int:
        return self.algebra.size

    @property
    def signature(self):
        return self.algebra.signature

    @property
    def chain(self) -> Chain:
        return Chain.of(self.order)

    @functools.cached_property
    def positions(self) -> tuple[int, ...]:
        pos = [0] * self.size
        for i, x in enumerate(self.order):
            pos[x] = i
        return tuple(pos)

    def __eq__(self, other):
        if not isinstance(other, OrderedAlgebra):
            return NotImplemented
        return self.algebra == other.algebra and self.order == other.order

    def __hash__(self):
        return hash((self.algebra, self.order))

    def __repr__(self):
        return f"OrderedAlgebra({self.algebra!r}, order={list(self.order)})"

    def to_json(self) -> dict:
        data = self.algebra.to_json()
        data["order"] = list(self.order)
        return data

    @classmethod
    def from_json(cls, data: dict) -> OrderedAlgebra:
        return cls(FiniteAlgebra.from_json(data), tuple(data["order"]))


def position_map(dom: OrderedAlgebra, cod: OrderedAlgebra, table: Sequence[int]) -> ChainMap:
    """``table`` (on carriers) read as a map between the two chains of positions."""
    return ChainMap(dom.size, cod.size, tuple(cod.positions[table[x]] for x in dom.order))


def rigid_epi_checks(dom: OrderedAlgebra, cod: OrderedAlgebra, table: Sequence[int]) -> dict[str, bool]:
    table = tuple(table)
    if dom.signature != cod.signature:
        raise ValueError("algebras have different signatures")
    in_range = len(table) == dom.size and all(0 <= y < cod.size for y in table)
    return {
        "homomorphism": in_range and is_homomorphism(dom.algebra, cod.algebra, table),
        "surjective": in_range and set(table) == set(range(cod.size)),
        "rigid": in_range and is_rigid_surjection(position_map(dom, cod, table)),
    }


def is_rigid_epi(dom: OrderedAlgebra, cod: OrderedAlgebra, table: Sequence[int]) -> bool:
    return all(rigid_epi_checks(dom, cod, table).values())


@dataclass(frozen=True, eq=False)
class RigidEpimorphism:
    domain: OrderedAlgebra
    codomain: OrderedAlgebra
    table: tuple[int, ...]
    checks: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        table = tuple(int(x) for x in self.table)
        object.__setattr__(self, "table", table)
        checks = rigid_epi_checks(self.domain, self.codomain, table)
        object.__setattr__(self, "checks", checks)
        failed = [name for name, ok in checks.items() if not ok]
        if failed:
            raise NotRigidError(f"{list(table)} is not a rigid epimorphism (fails: {', '.join(failed)})")

    def __call__(self, x: int) -> int:
        return self.table[x]

    def __eq__(self, other):
        if not isinstance(other, RigidEpimorphism):
            return NotImplemented
        return self.domain == other.domain and self.codomain == other.codomain and self.table == other.table

    def __hash__(self):
        return hash(self.table)

    @property
    def chain_map(self) -> ChainMap:
        return position_map(self.domain, self.codomain, self.table)

    def then(self, other: RigidEpimorphism) -> RigidEpimorphism:
        """``other o self``."""
        if other.domain != self.codomain:
            raise ValueError("maps are not composable")
        return RigidEpimorphism(self.domain, other.codomain, tuple(other.table[y] for y in self.table))

    def to_json(self) -> dict:
        return {
            "n": self.domain.size,
            "k": self.codomain.size,
            "table": list(self.table),
            "checks": dict(self.checks),
        }


def identity_epi(A: OrderedAlgebra) -> RigidEpimorphism:
    return RigidEpimorphism(A, A, tuple(range(A.size)))


def rigid_epi_set(dom: OrderedAlgebra, cod: OrderedAlgebra) -> list[RigidEpimorphism]:
    out = []
    for h in epi_set(dom.algebra, cod.algebra):
        if is_rigid_surjection(position_map(dom, cod, h.table)):
            out.append(RigidEpimorphism(dom, cod, h.table))
    return out


def automorphisms(A: OrderedAlgebra) -> list[RigidEpimorphism]:
    return rigid_epi_set(A, A)


# --- ordered free algebras --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class OrderedFreeAlgebra:
    """A free algebra ordered by neat-minimal representatives.

    ``min_terms[i]`` is the neat-least term naming element ``order[i]``;
    ``cover_length`` is the shape length at which every element was reached.
    """

    free: FreeAlgebra
    order: tuple[int, ...]
    min_terms: tuple[Term, ...]
    cover_length: int

    @property
    def n(self) -> int:
        return self.free.n_generators

    @property
    def size(self) -> int:
        return self.free.size

    @functools.cached_property
    def ordered(self) -> OrderedAlgebra:
        return OrderedAlgebra(self.free.underlying, self.order)

    def min_term(self, element: int) -> Term:
        return self.min_terms[self.ordered.positions[element]]

    def nu(self, t: Term) -> int:
        return self.free.term_to_element(t)

    def term_chain(self, max_shape_length: int | None = None) -> list[Term]:
        return enumerate_neat(self.free.variety.signature, self.n, max_shape_length or self.cover_length)

    def nu_chain_map(self, max_shape_length: int | None = None) -> ChainMap:
        """The natural map from the truncated neat term chain, on positions."""
        pos = self.ordered.positions
        terms = self.term_chain(max_shape_length)
        return ChainMap(len(terms), self.size, tuple(pos[self.nu(t)] for t in terms))


def shape_values(A: FiniteAlgebra, shape: Term, values: np.ndarray) -> np.ndarray:
    """Evaluate ``shape`` in ``A`` for every way of filling its ``xi`` slots from ``values``.

    Slot ``j`` (left to right) varies along axis ``j``, so the C-order
    flattening lists fillings in lexicographic order.
    """
    m = len(variables(shape))
    counter = iter(range(m))

    def ev(s):
        if isinstance(s, Var):
            j = next(counter)
            return values.reshape((1,) * j + (-1,) + (1,) * (m - j - 1))
        return A.tables[s.op][tuple(ev(a) for a in s.args)]

    out = np.asarray(ev(shape))
    return np.broadcast_to(out, (len(values),) * m)


@functools.lru_cache(maxsize=64)
def ordered_free(V: Variety, n: int, max_length: int = 64) -> OrderedFreeAlgebra:
    """Order the free algebra on ``n`` generators by first appearance along the neat order."""
    if not V.is_nontrivial():
        raise ValueError("the trivial variety collapses all generators; no ordered free algebra")
    F = free_algebra(V, n)
    gens = np.asarray(F.generator_elements, dtype=np.int64)
    first: dict[int, Term] = {}
    length = 0
    while len(first) < F.size:
        length += 1
        if length > max_length:
            raise RuntimeError(f"neat enumeration did not cover the free algebra by length {max_length}")
        for shape in shapes_of_length(V.signature, length):
            flat = shape_values(F.underlying, shape, gens).reshape(-1)
            elements, where = np.unique(flat, return_index=True)
            for x, i in sorted(zip(elements.tolist(), where.tolist()), key=lambda p: p[1]):
                if x not in first:
                    m = len(variables(shape))
                    slots = np.unravel_index(i, (n,) * m) if m else ()
                    first[x] = fill(shape, (int(v) for v in slots))
            if len(first) == F.size:
                break
    order = tuple(sorted(first, key=lambda x: neat_key(first[x], V.signature)))
    return OrderedFreeAlgebra(F, order, tuple(first[x] for x in order), length)


def hat_T_V(f: ChainMap, V: Variety) -> RigidEpimorphism:
    """The rigid epimorphism between ordered free algebras induced by renaming generators."""
    if not is_rigid_surjection(f):
        raise NotRigidError(f"{f} is not a rigid surjection")
    src, dst = ordered_free(V, f.n), ordered_free(V, f.k)
    table = tuple(dst.nu(substitute(f, src.free.witness_terms[x])) for x in range(src.size))
    return RigidEpimorphism(src.ordered, dst.ordered, table)


def check_eval_rigid(A: OrderedAlgebra, max_shape_length: int) -> bool:
    """Evaluation from the truncated neat term chain over ``A``'s chain is rigid and onto."""
    terms = enumerate_neat(A.signature, A.size, max_shape_length)
    table = tuple(A.positions[evaluate(A.algebra, t, A.order)] for t in terms)
    return is_rigid_surjection(ChainMap(len(terms), A.size, table))


def generator_extension(F: OrderedFreeAlgebra, A: OrderedAlgebra, images: Sequence[int]) -> tuple[int, ...]:
    """Values on the free algebra of the extension of ``x_i -> images[i]``, via minimal terms.

    The result is a homomorphism only when ``A`` satisfies the identities of
    the variety; callers verify.
    """
    return tuple(evaluate(A.algebra, F.min_term(x), images) for x in range(F.size))


def factor_reflection(
    V: Variety, n: int, A: OrderedAlgebra, images: Sequence[int], via_terms: bool = False
) -> RigidEpimorphism:
    """Factor the term-algebra map ``x_i -> images[i]`` through the ordered free algebra.

    Raises :class:`VarietyMembershipError` if the map is not constant on the
    classes of the free algebra, and :class:`NotRigidError` if the term map
    is not a rigid surjection.  The natural map from the neat term chain
    onto the ordered free algebra is itself rigid and onto, so by
    cancellation the term map is rigid exactly when the factor is; the
    factor is what gets checked unless ``via_terms`` asks for the term
    chain (truncated at the cover length) to be walked as well.
    """
    F = ordered_free(V, n)
    images = tuple(int(a) for a in images)
    if len(images) != n:
        raise ValueError(f"need {n} generator images, got {len(images)}")
    table = generator_extension(F, A, images)
    if not is_homomorphism(F.free.underlying, A.algebra, table):
        raise VarietyMembershipError("the term map identifies less than the variety does")
    if not is_rigid_surjection(position_map(F.ordered, A, table)):
        raise NotRigidError("the term map is not a rigid surjection")
    if via_terms:
        terms = F.term_chain()
        term_map = ChainMap(len(terms), A.size, tuple(A.positions[evaluate(A.algebra, t, images)] for t in terms))
        if not is_rigid_surjection(term_map):
            raise NotRigidError("the term map is not a rigid surjection")
    return RigidEpimorphism(F.ordered, A, table)


@dataclass(frozen=True)
class JointFactorization:
    D: OrderedAlgebra
    h: RigidEpimorphism
    p1: RigidEpimorphism
    p2: RigidEpimorphism
    pairs: tuple[tuple[int, int], ...]


def joint_factor(f: RigidEpimorphism, g: RigidEpimorphism) -> JointFactorization:
    """Factor two rigid epis out of a common domain through the image of their pairing."""
    if f.domain != g.domain:
        raise ValueError("maps must share their domain")
    F, A, B = f.domain, f.codomain, g.codomain
    P = product(A.algebra, B.algebra)
    paired = tuple(a * B.size + b for a, b in zip(f.table, g.table))
    image = list(dict.fromkeys(paired[x] for x in F.order))
    closed, _ = generated_elements(P, image)
    if set(closed) != set(image):
        raise AssertionError("image of a homomorphism is not closed")
    sub, inclusion = subalgebra_on(P, image)
    local = {x: i for i, x in enumerate(inclusion)}
    h_table = tuple(local[paired[x]] for x in range(F.size))
    chain = induced_order([h_table[x] for x in F.order])
    D = OrderedAlgebra(sub, chain.labels)
    h = RigidEpimorphism(F, D, h_table)
    p1 = RigidEpimorphism(D, A, tuple(inclusion[i] // B.size for i in range(D.size)))
    p2 = RigidEpimorphism(D, B, tuple(inclusion[i] % B.size for i in range(D.size)))
    return JointFactorization(D, h, p1, p2, tuple((x // B.size, x % B.size) for x in inclusion))


def exists_rigid_epi_from_free(V: Variety, n: int, A: OrderedAlgebra, exhaustive: bool = False):
    """A rigid epimorphism from the ordered free algebra on ``n`` generators onto ``A``.

    By default only the generator-block construction is tried: generators are
    sent onto ``A``'s chain by the rigid surjection ``0, 1, ..., s-1, s-1, ...``.
    With ``exhaustive`` every generator assignment is searched.
    """
    require_in_variety(V, A.algebra)
    s = A.size
    if n < s:
        return None
    candidates = [tuple(min(i, s - 1) for i in range(n))]
    if exhaustive:
        candidates = itertools.product(range(s), repeat=n)
        F = ordered_free(V, n)
        for pos in candidates:
            images = tuple(A.order[p] for p in pos)
            table = generator_extension(F, A, images)
            if is_rigid_epi(F.ordered, A, table):
                return RigidEpimorphism(F.ordered, A, table)
        return None
    images = tuple(A.order[p] for p in candidates[0])
    return factor_reflection(V, n, A, images)


def expansions(A: FiniteAlgebra) -> list[OrderedAlgebra]:
    return [OrderedAlgebra(A, p) for p in itertools.permutations(range(A.size))]


def unique_restriction(e: Homomorphism | Sequence[int], order_B: Sequence[int]) -> tuple[int, ...]:
    """The only order on the codomain making ``e`` rigid, given the order of its domain."""
    table = e.table if isinstance(e, Homomorphism) else tuple(e)
    return induced_order([table[x] for x in order_B]).labels


def check_weak_em_square(A: OrderedAlgebra, inner: Sequence[Term], outer: Sequence[Term]) -> bool:
    """The multiplication square for evaluation: flatten-then-evaluate equals
    evaluating inside and then outside, on every outer term over ``inner``.

    ``outer`` terms have integer variables indexing ``inner``; inner terms
    have variables that are chain positions of ``A``.
    """
    env = A.order
    values = [evaluate(A.algebra, t, env) for t in inner]
    for o in outer:
        flat = substitute(lambda i: inner[i], o)
        lhs = evaluate(A.algebra, flatten(flat), env)
        rhs = evaluate(A.algebra, o, values)
        if lhs != rhs:
            return False
    return True
