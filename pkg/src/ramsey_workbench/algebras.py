"""Finite algebras given by operation tables, and free algebras of the
varieties they generate.

Carriers are ``range(size)``.  An operation of arity ``a`` is an integer
numpy array of shape ``(size,) * a``; constants are 0-d arrays.  Varieties
are presented by finitely many generating algebras, so two terms are
identified in the free algebra exactly when they evaluate identically in
every generator under every assignment.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from ramsey_workbench.terms import App, Signature, Term, Var, variables


class UnboundVariableError(LookupError):
    pass


class NotAHomomorphismError(ValueError):
    pass


class VarietyMembershipError(ValueError):
    """An algebra that was required to lie in a variety does not."""


def _freeze(table) -> np.ndarray:
    arr = np.array(table, dtype=np.int64)
    arr.setflags(write=False)
    return arr


class FiniteAlgebra:
    """An algebra on ``range(size)`` with one table per signature symbol."""

    def __init__(self, signature: Signature, size: int, tables: Mapping[str, Any], name: str | None = None):
        if size < 1:
            raise ValueError("carrier must be nonempty")
        self.signature = signature
        self.size = size
        self.name = name
        frozen = {}
        for sym, arity in signature.symbols:
            if sym not in tables:
                raise ValueError(f"missing table for {sym!r}")
            arr = _freeze(tables[sym])
            if arr.shape != (size,) * arity:
                raise ValueError(f"table for {sym!r} has shape {arr.shape}, expected {(size,) * arity}")
            if arr.size and (arr.min() < 0 or arr.max() >= size):
                raise ValueError(f"table for {sym!r} leaves the carrier")
            frozen[sym] = arr
        extra = set(tables) - set(signature.names)
        if extra:
            raise ValueError(f"tables for unknown symbols {sorted(extra)}")
        self.tables = frozen

    @classmethod
    def from_functions(cls, signature: Signature, size: int, ops: Mapping[str, Callable | int], name=None):
        tables = {}
        for sym, arity in signature.symbols:
            op = ops[sym]
            if arity == 0:
                tables[sym] = op() if callable(op) else op
            else:
                tables[sym] = np.fromfunction(np.vectorize(op), (size,) * arity, dtype=np.int64)
        return cls(signature, size, tables, name=name)

    def apply(self, op: str, *args: int) -> int:
        return int(self.tables[op][args])

    def __eq__(self, other):
        if not isinstance(other, FiniteAlgebra):
            return NotImplemented
        return (
            self.signature == other.signature
            and self.size == other.size
            and all(np.array_equal(self.tables[s], other.tables[s]) for s in self.signature.names)
        )

    def __hash__(self):
        return hash((self.signature, self.size, tuple(self.tables[s].tobytes() for s in self.signature.names)))

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<FiniteAlgebra{label} size={self.size}>"

    def to_json(self) -> dict:
        data = {
            "signature": self.signature.to_json(),
            "size": self.size,
            "tables": {s: self.tables[s].tolist() for s in self.signature.names},
        }
        if self.name:
            data["name"] = self.name
        return data

    @classmethod
    def from_json(cls, data: dict) -> FiniteAlgebra:
        return cls(Signature.from_json(data["signature"]), data["size"], data["tables"], name=data.get("name"))


def _lookup(assignment) -> Callable[[Any], int]:
    if callable(assignment):
        return assignment
    if isinstance(assignment, Mapping):
        return assignment.__getitem__
    seq = tuple(assignment)
    return seq.__getitem__


def evaluate(A: FiniteAlgebra, t: Term, assignment) -> int:
    """Value of ``t`` in ``A`` with variables looked up in ``assignment``."""
    get = _lookup(assignment)

    def ev(s):
        if isinstance(s, Var):
            try:
                return int(get(s.value))
            except (KeyError, IndexError):
                raise UnboundVariableError(f"variable {s.value!r} has no value") from None
        return int(A.tables[s.op][tuple(ev(a) for a in s.args)])

    return ev(t)


def satisfies_identity(A: FiniteAlgebra, t1: Term, t2: Term) -> bool:
    vs = sorted(set(variables(t1)) | set(variables(t2)), key=repr)
    for values in itertools.product(range(A.size), repeat=len(vs)):
        env = dict(zip(vs, values))
        if evaluate(A, t1, env) != evaluate(A, t2, env):
            return False
    return True


def is_homomorphism(A: FiniteAlgebra, B: FiniteAlgebra, table: Sequence[int]) -> bool:
    if A.signature != B.signature:
        raise ValueError("algebras have different signatures")
    h = np.asarray(table, dtype=np.int64)
    if h.shape != (A.size,) or (h.size and (h.min() < 0 or h.max() >= B.size)):
        return False
    for sym, arity in A.signature.symbols:
        lhs = h[A.tables[sym]]
        rhs = B.tables[sym][np.ix_(*([h] * arity))] if arity else B.tables[sym]
        if not np.array_equal(lhs, rhs):
            return False
    return True


@dataclass(frozen=True, eq=False)
class Homomorphism:
    domain: FiniteAlgebra
    codomain: FiniteAlgebra
    table: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "table", tuple(int(x) for x in self.table))
        if not is_homomorphism(self.domain, self.codomain, self.table):
            raise NotAHomomorphismError(f"{self.table} does not commute with the operations")

    def __call__(self, x: int) -> int:
        return self.table[x]

    def __eq__(self, other):
        if not isinstance(other, Homomorphism):
            return NotImplemented
        return self.domain == other.domain and self.codomain == other.codomain and self.table == other.table

    def __hash__(self):
        return hash(self.table)

    def is_surjective(self) -> bool:
        return len(set(self.table)) == self.codomain.size

    def then(self, other: Homomorphism) -> Homomorphism:
        return Homomorphism(self.domain, other.codomain, tuple(other.table[y] for y in self.table))


# --- closure -----------------------------------------------------------------

Derivation = tuple  # ("gen", i) or (symbol, argument elements)


def _close(
    seeds: Iterable[Hashable],
    signature: Signature,
    apply: Callable[[str, tuple], Hashable],
) -> tuple[list, dict]:
    """Least set containing ``seeds`` and closed under ``apply``, in discovery order.

    Returns the element list and, per element, how it was first produced.
    """
    elements: list = []
    how: dict = {}

    def add(x, d):
        if x not in how:
            how[x] = d
            elements.append(x)

    for i, s in enumerate(seeds):
        add(s, ("gen", i))
    for c in signature.constants:
        add(apply(c, ()), (c, ()))
    functions = [(f, signature.arity(f)) for f in signature.functions]
    done = 0
    while done < len(elements):
        size = len(elements)
        for f, arity in functions:
            for idx in itertools.product(range(size), repeat=arity):
                if max(idx) < done:
                    continue
                args = tuple(elements[i] for i in idx)
                add(apply(f, args), (f, args))
        done = size
    return elements, how


def generated_elements(A: FiniteAlgebra, gens: Iterable[int]) -> tuple[list[int], dict]:
    return _close(gens, A.signature, lambda f, args: int(A.tables[f][args]))


def generating_set(A: FiniteAlgebra) -> list[int]:
    """A small (greedy, irredundant in order) generating set."""
    gens: list[int] = []
    reached, _ = generated_elements(A, gens)
    covered = set(reached)
    for x in range(A.size):
        if x not in covered:
            gens.append(x)
            reached, _ = generated_elements(A, gens)
            covered = set(reached)
    return gens


def _induced_table(derivation_order: list, how: dict, image_of_seed: Sequence[int], B: FiniteAlgebra) -> dict:
    h: dict = {}
    for x in derivation_order:
        d = how[x]
        if d[0] == "gen":
            h[x] = image_of_seed[d[1]]
        else:
            h[x] = int(B.tables[d[0]][tuple(h[a] for a in d[1])])
    return h


def hom_set(A: FiniteAlgebra, B: FiniteAlgebra, surjective: bool = False) -> list[Homomorphism]:
    """All homomorphisms ``A -> B`` (only the onto ones if ``surjective``).

    Candidates are determined by the images of a generating set of ``A``
    and then verified against every table.
    """
    if A.signature != B.signature:
        raise ValueError("algebras have different signatures")
    gens = generating_set(A)
    order, how = generated_elements(A, gens)
    found = []
    for images in itertools.product(range(B.size), repeat=len(gens)):
        h = _induced_table(order, how, images, B)
        table = tuple(h[x] for x in range(A.size))
        if surjective and len(set(table)) != B.size:
            continue
        if is_homomorphism(A, B, table):
            found.append(Homomorphism(A, B, table))
    return found


def epi_set(A: FiniteAlgebra, B: FiniteAlgebra) -> list[Homomorphism]:
    return hom_set(A, B, surjective=True)


def homomorphic_extension(A: FiniteAlgebra, B: FiniteAlgebra, gens: Sequence[int], images: Sequence[int]):
    """The homomorphism sending ``gens[i]`` to ``images[i]``, or None if there is none.

    ``gens`` must generate ``A``.
    """
    order, how = generated_elements(A, gens)
    if len(order) != A.size:
        raise ValueError("the given elements do not generate the algebra")
    # a repeated generator must be sent consistently
    for i, g in enumerate(gens):
        if images[how[g][1]] != images[i]:
            return None
    h = _induced_table(order, how, images, B)
    table = tuple(h[x] for x in range(A.size))
    return Homomorphism(A, B, table) if is_homomorphism(A, B, table) else None


# --- products and subalgebras ----------------------------------------------------


def product(A: FiniteAlgebra, B: FiniteAlgebra) -> FiniteAlgebra:
    """Direct product; the pair ``(a, b)`` is element ``a * B.size + b``."""
    if A.signature != B.signature:
        raise ValueError("algebras have different signatures")
    n = A.size * B.size
    tables = {}
    for sym, arity in A.signature.symbols:
        if arity == 0:
            tables[sym] = int(A.tables[sym]) * B.size + int(B.tables[sym])
            continue
        grid = np.indices((n,) * arity)
        left = tuple(grid[i] // B.size for i in range(arity))
        right = tuple(grid[i] % B.size for i in range(arity))
        tables[sym] = A.tables[sym][left] * B.size + B.tables[sym][right]
    return FiniteAlgebra(A.signature, n, tables)


def pair_index(a: int, b: int, B: FiniteAlgebra) -> int:
    return a * B.size + b


def generated_subalgebra(A: FiniteAlgebra, gens: Iterable[int]) -> tuple[FiniteAlgebra, tuple[int, ...]]:
    """The subalgebra generated by ``gens`` and its inclusion into ``A``.

    Subalgebra elements are numbered in discovery order.
    """
    elements, _ = generated_elements(A, list(dict.fromkeys(gens)))
    return subalgebra_on(A, elements)


def subalgebra_on(A: FiniteAlgebra, elements: Sequence[int]) -> tuple[FiniteAlgebra, tuple[int, ...]]:
    index = {x: i for i, x in enumerate(elements)}
    tables = {}
    sub = np.asarray(elements, dtype=np.int64)
    for sym, arity in A.signature.symbols:
        restricted = A.tables[sym][np.ix_(*([sub] * arity))] if arity else A.tables[sym]
        try:
            tables[sym] = np.vectorize(index.__getitem__, otypes=[np.int64])(restricted) if arity else index[int(restricted)]
        except KeyError:
            raise ValueError("the given elements are not closed under the operations") from None
    return FiniteAlgebra(A.signature, len(elements), tables), tuple(int(x) for x in elements)


# --- varieties and free algebras -------------------------------------------------


@dataclass(frozen=True)
class Variety:
    """The variety generated by finitely many finite algebras."""

    signature: Signature
    generators: tuple[FiniteAlgebra, ...]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        gens = tuple(self.generators)
        if not gens:
            raise ValueError("a variety needs at least one generating algebra")
        if any(g.signature != self.signature for g in gens):
            raise ValueError("all generators must share the variety's signature")
        object.__setattr__(self, "generators", gens)

    @classmethod
    def generated_by(cls, *algebras: FiniteAlgebra, name: str | None = None) -> Variety:
        return cls(algebras[0].signature, tuple(algebras), name=name)

    def is_nontrivial(self) -> bool:
        return any(g.size >= 2 for g in self.generators)


def is_nontrivial(V: Variety) -> bool:
    return V.is_nontrivial()


@dataclass(frozen=True, eq=False)
class FreeAlgebra:
    """The free algebra of a variety on ``n_generators`` generators.

    Element ``i`` of ``underlying`` is the tuple ``coordinates[i]`` of values
    of its terms in every generating algebra under every assignment;
    ``witness_terms[i]`` is the first term found evaluating to it.
    """

    variety: Variety
    underlying: FiniteAlgebra
    n_generators: int
    generator_elements: tuple[int, ...]
    coordinates: tuple[tuple[int, ...], ...]
    witness_terms: tuple[Term, ...]
    _coordinate_blocks: tuple = field(repr=False, default=())

    @property
    def size(self) -> int:
        return self.underlying.size

    def term_to_element(self, t: Term) -> int:
        """The natural map from terms onto the free algebra."""
        return evaluate(self.underlying, t, self.generator_elements)

    def term_coordinates(self, t: Term) -> tuple[int, ...]:
        """Values of ``t`` in every generator under every assignment (computed directly)."""
        out = []
        for A, assignments in self._coordinate_blocks:
            for a in assignments:
                out.append(evaluate(A, t, a))
        return tuple(out)

    def element_of_coordinates(self, coords: tuple[int, ...]) -> int:
        return self._coordinate_index[coords]

    @functools.cached_property
    def _coordinate_index(self) -> dict:
        return {c: i for i, c in enumerate(self.coordinates)}


@functools.lru_cache(maxsize=64)
def free_algebra(V: Variety, n: int) -> FreeAlgebra:
    """Free algebra on ``n`` generators: the subalgebra of a power of the
    generators spanned by the projection tuples."""
    if n < 1:
        raise ValueError("need at least one generator")
    blocks = []
    for A in V.generators:
        blocks.append((A, tuple(itertools.product(range(A.size), repeat=n))))
    slices = []
    start = 0
    for A, assignments in blocks:
        slices.append((A, slice(start, start + len(assignments))))
        start += len(assignments)

    def apply(sym, args):
        if not args:
            return tuple(int(A.tables[sym]) for A, assignments in blocks for _ in assignments)
        stacked = np.array(args, dtype=np.int64)
        out = np.empty(stacked.shape[1], dtype=np.int64)
        for A, sl in slices:
            out[sl] = A.tables[sym][tuple(stacked[:, sl])]
        return tuple(out.tolist())

    projections = [tuple(a[i] for A, assignments in blocks for a in assignments) for i in range(n)]
    elements, how = _close(projections, V.signature, apply)
    index = {x: i for i, x in enumerate(elements)}

    witness: dict = {}
    for x in elements:
        d = how[x]
        witness[x] = Var(d[1]) if d[0] == "gen" else App(d[0], tuple(witness[a] for a in d[1]))

    size = len(elements)
    tables = {}
    for sym, arity in V.signature.symbols:
        if arity == 0:
            tables[sym] = index[apply(sym, ())]
            continue
        table = np.empty((size,) * arity, dtype=np.int64)
        for idx in itertools.product(range(size), repeat=arity):
            table[idx] = index[apply(sym, tuple(elements[i] for i in idx))]
        tables[sym] = table
    underlying = FiniteAlgebra(V.signature, size, tables, name=f"F({V.name or 'V'},{n})")
    return FreeAlgebra(
        variety=V,
        underlying=underlying,
        n_generators=n,
        generator_elements=tuple(index[p] for p in projections),
        coordinates=tuple(elements),
        witness_terms=tuple(witness[x] for x in elements),
        _coordinate_blocks=tuple(blocks),
    )


def nu(V: Variety, n: int, t: Term) -> int:
    return free_algebra(V, n).term_to_element(t)


def theta_equiv(V: Variety, n: int, t1: Term, t2: Term) -> bool:
    F = free_algebra(V, n)
    return F.term_to_element(t1) == F.term_to_element(t2)


def in_variety(V: Variety, A: FiniteAlgebra) -> bool:
    """Whether ``A`` lies in ``V``: the assignment of all elements of ``A`` to
    the free generators must extend to a homomorphism."""
    if A.signature != V.signature:
        return False
    F = free_algebra(V, A.size)
    table = tuple(evaluate(A, t, range(A.size)) for t in F.witness_terms)
    # generators the variety identifies must stay identified in A
    if any(table[g] != i for i, g in enumerate(F.generator_elements)):
        return False
    return is_homomorphism(F.underlying, A, table)


def require_in_variety(V: Variety, A: FiniteAlgebra) -> None:
    if not in_variety(V, A):
        raise VarietyMembershipError(f"{A!r} violates an identity of the variety")
