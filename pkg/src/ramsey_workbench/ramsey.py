"""Partition arrows between finite objects and the machinery that moves them around.

``C <- (B)^A_{k,t}`` (the dual arrow) says: every ``k``-coloring of
``hom(C, A)`` admits ``w`` in ``hom(C, B)`` such that the composites
``f . w`` for ``f`` in ``hom(B, A)`` carry at most ``t`` colors.  The direct
arrow ``C -> (B)^A_{k,t}`` colors ``hom(A, C)`` and composes on the other
side.  Morphisms are plain tables (tuples of codomain indices), so
composition is table lookup in every category.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Sequence

from ramsey_workbench import search
from ramsey_workbench.algebras import (
    FiniteAlgebra,
    Variety,
    epi_set,
    evaluate,
    is_homomorphism,
    require_in_variety,
)
from ramsey_workbench.chains import (
    ChainMap,
    compose,
    enumerate_rigid_surjections,
    is_rigid_surjection,
)
from ramsey_workbench.ordered import (
    OrderedAlgebra,
    OrderedFreeAlgebra,
    RigidEpimorphism,
    expansions,
    factor_reflection,
    hat_T_V,
    is_rigid_epi,
    ordered_free,
    rigid_epi_checks,
    rigid_epi_set,
)
from ramsey_workbench.terms import App, Term, enumerate_neat, substitute

HOLDS = "HOLDS"
FAILS = "FAILS"
UNKNOWN = "UNKNOWN"

DUAL = "dual"
DIRECT = "direct"

DEFAULT_EXHAUSTIVE_LIMIT = 22
DEFAULT_BUDGET = 2_000_000
DEFAULT_FLIPS = 50_000

Table = tuple[int, ...]
Key = tuple[int, int, Table]


def morphism_key(n: int, k: int, table: Sequence[int]) -> Key:
    """Canonical encoding of a morphism: domain size, codomain size, table."""
    return (int(n), int(k), tuple(int(x) for x in table))


def then(f: Sequence[int], g: Sequence[int]) -> Table:
    """``g . f`` on tables: apply ``f`` first."""
    return tuple(g[x] for x in f)


# --- categories ---------------------------------------------------------------------


@dataclass(frozen=True)
class Category:
    """A concrete category of finite objects whose morphisms are tables."""

    name: str
    size: Callable[[Any], int]
    hom: Callable[[Any, Any], list[Table]]
    is_morphism: Callable[[Any, Any, Table], bool]
    describe: Callable[[Any], dict]

    def key(self, X, Y, table: Sequence[int]) -> Key:
        return morphism_key(self.size(X), self.size(Y), table)


def _digest(data) -> str:
    return hashlib.sha256(json.dumps(data, sort_keys=True).encode()).hexdigest()[:16]


def _describe_chain(n) -> dict:
    return {"kind": "chain", "size": int(n)}


def _describe_ordered(A: OrderedAlgebra) -> dict:
    data = A.to_json()
    return {"kind": "ordered-algebra", "name": A.algebra.name, "size": A.size, "order": list(A.order), "digest": _digest(data)}


def _describe_algebra(A: FiniteAlgebra) -> dict:
    return {"kind": "algebra", "name": A.name, "size": A.size, "digest": _digest(A.to_json())}


def _chain_hom(n, k) -> list[Table]:
    return [f.table for f in enumerate_rigid_surjections(int(n), int(k))]


def _chain_is_morphism(n, k, table) -> bool:
    return len(table) == n and all(0 <= y < k for y in table) and is_rigid_surjection(ChainMap(n, k, table))


def _re_is_morphism(A, B, table) -> bool:
    return A.signature == B.signature and len(table) == A.size and all(rigid_epi_checks(A, B, table).values())


def _epi_is_morphism(A, B, table) -> bool:
    return (
        A.signature == B.signature
        and len(table) == A.size
        and all(0 <= y < B.size for y in table)
        and set(table) == set(range(B.size))
        and is_homomorphism(A, B, table)
    )


CATEGORIES: dict[str, Category] = {
    "chains-rs": Category("chains-rs", int, _chain_hom, _chain_is_morphism, _describe_chain),
    "ordered-algebras-re": Category(
        "ordered-algebras-re",
        lambda A: A.size,
        lambda A, B: [h.table for h in rigid_epi_set(A, B)] if A.signature == B.signature else [],
        _re_is_morphism,
        _describe_ordered,
    ),
    "algebras-epi": Category(
        "algebras-epi",
        lambda A: A.size,
        lambda A, B: [h.table for h in epi_set(A, B)] if A.signature == B.signature else [],
        _epi_is_morphism,
        _describe_algebra,
    ),
}


def get_category(name: str | Category) -> Category:
    if isinstance(name, Category):
        return name
    try:
        return CATEGORIES[name]
    except KeyError:
        raise ValueError(f"unknown category {name!r}; expected one of {sorted(CATEGORIES)}") from None


# --- colorings ----------------------------------------------------------------------


@dataclass(frozen=True)
class Coloring:
    """A ``k``-coloring of an explicit finite set of morphisms, keyed canonically."""

    k: int
    keys: tuple[Key, ...]
    colors: tuple[int, ...]
    _index: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        keys = tuple(morphism_key(*key) for key in self.keys)
        colors = tuple(int(c) for c in self.colors)
        if len(keys) != len(colors):
            raise ValueError("one color per morphism is required")
        if any(not 0 <= c < self.k for c in colors):
            raise ValueError(f"colors must lie in 0..{self.k - 1}")
        if len(set(keys)) != len(keys):
            raise ValueError("coloring domain has repeated morphisms")
        object.__setattr__(self, "keys", keys)
        object.__setattr__(self, "colors", colors)
        object.__setattr__(self, "_index", {key: c for key, c in zip(keys, colors)})

    @classmethod
    def from_function(cls, keys: Iterable[Key], k: int, fn: Callable[[Key], int]) -> Coloring:
        keys = tuple(keys)
        return cls(k, keys, tuple(fn(key) for key in keys))

    @classmethod
    def random(cls, keys: Iterable[Key], k: int, rng: random.Random) -> Coloring:
        keys = tuple(keys)
        return cls(k, keys, tuple(rng.randrange(k) for _ in keys))

    @classmethod
    def constant(cls, keys: Iterable[Key], k: int, color: int = 0) -> Coloring:
        keys = tuple(keys)
        return cls(k, keys, (color,) * len(keys))

    def __call__(self, key: Key) -> int:
        return self._index[key]

    def __len__(self) -> int:
        return len(self.keys)

    def used(self) -> set[int]:
        return set(self.colors)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "entries": [{"n": n, "k": m, "table": list(t), "color": c} for (n, m, t), c in zip(self.keys, self.colors)],
        }

    @classmethod
    def from_json(cls, data: dict) -> Coloring:
        entries = data["entries"]
        return cls(data["k"], tuple((e["n"], e["k"], tuple(e["table"])) for e in entries), tuple(e["color"] for e in entries))


# --- arrow instances ----------------------------------------------------------------


@dataclass(frozen=True)
class ArrowInstance:
    """The hypergraph behind one arrow query.

    ``colored`` are the morphisms being colored, ``witnesses`` the
    candidate ``w`` and ``edges[i]`` the indices (into ``colored``) of the
    composites that ``witnesses[i]`` produces.
    """

    category: Category
    direction: str
    sizes: tuple[int, int, int]
    colored: tuple[Table, ...]
    witnesses: tuple[Table, ...]
    connecting: tuple[Table, ...]
    edges: tuple[tuple[int, ...], ...]

    @property
    def colored_keys(self) -> tuple[Key, ...]:
        c, b, a = self.sizes
        if self.direction == DUAL:
            return tuple(morphism_key(c, a, t) for t in self.colored)
        return tuple(morphism_key(a, c, t) for t in self.colored)

    def witness_key(self, table: Table) -> Key:
        c, b, a = self.sizes
        return morphism_key(c, b, table) if self.direction == DUAL else morphism_key(b, c, table)


def _compositions(direction: str, w: Table, middle: Sequence[Table]) -> list[Table]:
    if direction == DUAL:
        return [then(w, f) for f in middle]  # f . w, w: C -> B, f: B -> A
    return [then(f, w) for f in middle]  # w . f, f: A -> B, w: B -> C


def build_instance(C, B, A, category: str | Category = "chains-rs", direction: str = DUAL) -> ArrowInstance:
    cat = get_category(category)
    if direction == DUAL:
        colored, witnesses, middle = cat.hom(C, A), cat.hom(C, B), cat.hom(B, A)
    elif direction == DIRECT:
        colored, witnesses, middle = cat.hom(A, C), cat.hom(B, C), cat.hom(A, B)
    else:
        raise ValueError(f"direction must be {DUAL!r} or {DIRECT!r}")
    index = {t: i for i, t in enumerate(colored)}
    edges = []
    for w in witnesses:
        edges.append(tuple(sorted({index[t] for t in _compositions(direction, w, middle)})))
    return ArrowInstance(
        cat,
        direction,
        (cat.size(C), cat.size(B), cat.size(A)),
        tuple(colored),
        tuple(witnesses),
        tuple(middle),
        tuple(edges),
    )


# --- certificates -------------------------------------------------------------------


@dataclass
class ArrowCertificate:
    """Outcome of an arrow query.

    ``HOLDS`` carries a ``witness`` (and its ``colors``) when the query was
    about one given coloring, or when a single witness works for every
    coloring.  ``FAILS`` carries the ``refuting_coloring``.
    """

    query: dict
    verdict: str
    mode: str
    colored: tuple[Key, ...] = ()
    witness: Key | None = None
    colors: tuple[int, ...] = ()
    coloring: Coloring | None = None
    refuting_coloring: Coloring | None = None
    stats: dict = field(default_factory=dict)
    trace: list = field(default_factory=list)
    message: str = ""

    @property
    def holds(self) -> bool:
        return self.verdict == HOLDS

    def to_json(self) -> dict:
        def key_json(key):
            return None if key is None else {"n": key[0], "k": key[1], "table": list(key[2])}

        return {
            "query": self.query,
            "verdict": self.verdict,
            "mode": self.mode,
            "colored": [key_json(key) for key in self.colored],
            "witness": key_json(self.witness),
            "colors": list(self.colors),
            "coloring": None if self.coloring is None else self.coloring.to_json(),
            "refuting_coloring": None if self.refuting_coloring is None else self.refuting_coloring.to_json(),
            "stats": self.stats,
            "trace": self.trace,
            "message": self.message,
        }

    @classmethod
    def from_json(cls, data: dict) -> ArrowCertificate:
        def key_of(d):
            return None if d is None else morphism_key(d["n"], d["k"], d["table"])

        coloring = data.get("coloring")
        refuting = data.get("refuting_coloring")
        return cls(
            query=data["query"],
            verdict=data["verdict"],
            mode=data["mode"],
            colored=tuple(key_of(d) for d in data.get("colored", ())),
            witness=key_of(data.get("witness")),
            colors=tuple(data.get("colors", ())),
            coloring=None if coloring is None else Coloring.from_json(coloring),
            refuting_coloring=None if refuting is None else Coloring.from_json(refuting),
            stats=data.get("stats", {}),
            trace=data.get("trace", []),
            message=data.get("message", ""),
        )


def _query(inst: ArrowInstance, C, B, A, k: int, t: int) -> dict:
    cat = inst.category
    return {
        "C": cat.describe(C),
        "B": cat.describe(B),
        "A": cat.describe(A),
        "k": k,
        "t": t,
        "category": cat.name,
        "direction": inst.direction,
    }


def _as_color_list(inst: ArrowInstance, coloring) -> tuple[Coloring, list[int]]:
    keys = inst.colored_keys
    if isinstance(coloring, Coloring):
        return coloring, [coloring(key) for key in keys]
    if isinstance(coloring, Mapping):
        raise TypeError("pass a Coloring or a sequence aligned with the colored hom-set")
    colors = [int(c) for c in coloring]
    if len(colors) != len(keys):
        raise ValueError(f"coloring has {len(colors)} entries, hom-set has {len(keys)}")
    k = max(colors) + 1 if colors else 1
    return Coloring(k, keys, tuple(colors)), colors


def witness_colors(inst: ArrowInstance, colors: Sequence[int], i: int) -> set[int]:
    return {colors[j] for j in inst.edges[i]}


def check_arrow(
    C,
    B,
    A,
    k: int,
    t: int = 1,
    category: str | Category = "chains-rs",
    direction: str = DUAL,
    *,
    coloring=None,
    exhaustive_limit: int | None = DEFAULT_EXHAUSTIVE_LIMIT,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
    flips: int = DEFAULT_FLIPS,
) -> ArrowCertificate:
    """Decide ``C <- (B)^A_{k,t}`` (or the direct arrow), with a certificate.

    With ``coloring`` given, only that coloring is considered and the
    answer is a witness or a failure for it.  Otherwise every coloring is
    quantified over: up to ``exhaustive_limit`` colored morphisms the
    constraint search is complete; above it only a seeded randomized
    refutation (``flips`` recolorings) is attempted.
    ``exhaustive_limit=None`` removes the limit.
    """
    if k < 1 or t < 1:
        raise ValueError("need k >= 1 and t >= 1")
    inst = build_instance(C, B, A, category, direction)
    query = _query(inst, C, B, A, k, t)
    keys = inst.colored_keys
    stats = {"colored": len(inst.colored), "witnesses": len(inst.witnesses), "connecting": len(inst.connecting)}

    if coloring is not None:
        col, colors = _as_color_list(inst, coloring)
        for i, w in enumerate(inst.witnesses):
            used = witness_colors(inst, colors, i)
            if len(used) <= t:
                return ArrowCertificate(
                    query, HOLDS, "given-coloring", keys, inst.witness_key(w), tuple(sorted(used)), coloring=col, stats=stats
                )
        return ArrowCertificate(query, FAILS, "given-coloring", keys, refuting_coloring=col, stats=stats)

    small = min((len(e) for e in inst.edges), default=None)
    if small is not None and small <= t:
        i = min(range(len(inst.edges)), key=lambda j: (len(inst.edges[j]), j))
        return ArrowCertificate(
            query,
            HOLDS,
            "structural",
            keys,
            inst.witness_key(inst.witnesses[i]),
            stats=stats,
            message=f"witness has only {len(inst.edges[i])} composite(s); it works for every coloring",
        )
    if not inst.witnesses:
        col = Coloring.constant(keys, k)
        return ArrowCertificate(
            query, FAILS, "structural", keys, refuting_coloring=col, stats=stats, message="no candidate witness exists"
        )

    m = len(inst.colored)
    if exhaustive_limit is None or m <= exhaustive_limit:
        res = search.refute_exhaustive(m, inst.edges, k, t, budget=budget)
        mode = "exhaustive"
    else:
        res = search.refute_randomized(m, inst.edges, k, t, budget=flips, seed=seed)
        mode = "randomized"
    stats.update(res.stats)
    stats["seed"] = seed
    if res.status == search.FOUND:
        col = Coloring(k, keys, tuple(res.coloring))
        return ArrowCertificate(query, FAILS, mode, keys, refuting_coloring=col, stats=stats)
    if res.status == search.NONE:
        return ArrowCertificate(
            query,
            HOLDS,
            mode,
            keys,
            stats=stats,
            message="no coloring splits every composite set; find_witness gives w for any coloring",
        )
    hint = (
        f"search budget {budget} exhausted"
        if mode == "exhaustive"
        else f"|hom| = {m} exceeds the exhaustive limit {exhaustive_limit} and randomized search found no refutation"
    )
    return ArrowCertificate(
        query, UNKNOWN, mode, keys, stats=stats, message=hint + "; raise --budget or the exhaustive limit"
    )


def find_witness(C, B, A, coloring, t: int = 1, category: str | Category = "chains-rs", direction: str = DUAL) -> Table | None:
    """A witness table for one coloring, or None."""
    inst = build_instance(C, B, A, category, direction)
    _, colors = _as_color_list(inst, coloring)
    for i, w in enumerate(inst.witnesses):
        if len(witness_colors(inst, colors, i)) <= t:
            return w
    return None


# --- independent revalidation -------------------------------------------------------


def _brute_hom(cat: Category, X, Y, limit: int = 300_000) -> tuple[list[Table], str]:
    n, m = cat.size(X), cat.size(Y)
    if m**n <= limit:
        tables = [t for t in itertools.product(range(m), repeat=n) if cat.is_morphism(X, Y, t)]
        return tables, "brute-force"
    return [t for t in cat.hom(X, Y) if cat.is_morphism(X, Y, t)], "library"


def revalidate(cert: ArrowCertificate, C, B, A, naive_limit: int = 16, budget: int = DEFAULT_BUDGET) -> bool:
    """Recheck a certificate without reusing the instance that produced it.

    Hom-sets are re-enumerated by filtering all tables when that is
    feasible, and color counts are recomputed from scratch.
    """
    cat = get_category(cert.query["category"])
    direction = cert.query["direction"]
    k, t = cert.query["k"], cert.query["t"]
    if direction == DUAL:
        (colored, _), (witnesses, _), (middle, _) = _brute_hom(cat, C, A), _brute_hom(cat, C, B), _brute_hom(cat, B, A)
        ck = lambda tb: morphism_key(cat.size(C), cat.size(A), tb)  # noqa: E731
        wk = lambda tb: morphism_key(cat.size(C), cat.size(B), tb)  # noqa: E731
    else:
        (colored, _), (witnesses, _), (middle, _) = _brute_hom(cat, A, C), _brute_hom(cat, B, C), _brute_hom(cat, A, B)
        ck = lambda tb: morphism_key(cat.size(A), cat.size(C), tb)  # noqa: E731
        wk = lambda tb: morphism_key(cat.size(B), cat.size(C), tb)  # noqa: E731
    if {ck(x) for x in colored} != set(cert.colored):
        return False

    def composites(w):
        return [ck(x) for x in _compositions(direction, w, middle)]

    if cert.verdict == FAILS:
        col = cert.refuting_coloring
        if col is None or col.k > k:
            return False
        return all(len({col(x) for x in composites(w)}) > t for w in witnesses)
    if cert.verdict != HOLDS:
        return False
    if cert.witness is not None:
        w = cert.witness[2]
        if wk(w) != cert.witness or w not in set(witnesses):
            return False
        if cert.coloring is not None:
            used = {cert.coloring(x) for x in composites(w)}
            return len(used) <= t and tuple(sorted(used)) == tuple(cert.colors)
        return len(set(composites(w))) <= t
    index = {ck(x): i for i, x in enumerate(colored)}
    edges = [[index[x] for x in composites(w)] for w in witnesses]
    if len(colored) <= naive_limit:
        return search.refute_naive(len(colored), edges, k, t).status == search.NONE
    order = list(reversed(range(len(colored))))
    return search.refute_exhaustive(len(colored), edges, k, t, budget=budget, order=order).status == search.NONE


# --- Graham-Rothschild style search --------------------------------------------------


@dataclass
class GRResult:
    n: int | None
    certificate: ArrowCertificate | None
    minimal: bool
    trail: list[dict]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "minimal": self.minimal,
            "certificate": None if self.certificate is None else self.certificate.to_json(),
            "trail": self.trail,
        }


def gr_witness_search(a: int, b: int, k: int, max_n: int, t: int = 1, budget: int = DEFAULT_BUDGET) -> GRResult:
    """Smallest ``n <= max_n`` with ``n <- (b)^a_{k,t}`` among finite chains.

    Sizes are tried upward from ``b``; below ``b`` there is no rigid
    surjection onto ``b`` to serve as a witness.  An UNKNOWN on the way
    makes the answer non-minimal.
    """
    if not 1 <= a <= b:
        raise ValueError("need 1 <= a <= b")
    if k < 2:
        raise ValueError("need k >= 2")
    trail = []
    minimal = True
    for n in range(b, max_n + 1):
        cert = check_arrow(n, b, a, k, t, "chains-rs", exhaustive_limit=None, budget=budget)
        trail.append({"n": n, "verdict": cert.verdict, "mode": cert.mode, "colored": len(cert.colored)})
        if cert.verdict == HOLDS:
            return GRResult(n, cert, minimal, trail)
        if cert.verdict == UNKNOWN:
            minimal = False
    return GRResult(None, None, False, trail)


# --- going up along a morphism ------------------------------------------------------


@dataclass
class GoingUpReport:
    verdict_at_C: str
    verdict_at_D: str
    connecting: Table
    pushed: int
    consistent: bool


def going_up_report(
    C, D, B, A, k: int, t: int = 1, category: str | Category = "chains-rs", colorings: int = 20, seed: int = 0
) -> GoingUpReport:
    """Compare the arrow at ``D`` with what a morphism ``D -> C`` transfers from ``C``.

    If the arrow holds at ``C``, every coloring of ``hom(D, A)`` pulls back
    along the connecting map ``c``; a witness ``w`` at ``C`` pushes forward to
    ``w . c`` at ``D``.  Random colorings (and the refuting one, if the
    direct check at ``D`` produced any) are pushed through this way.
    """
    cat = get_category(category)
    links = cat.hom(D, C)
    if not links:
        raise ValueError("no morphism D -> C in the category")
    c = links[0]
    at_C = check_arrow(C, B, A, k, t, cat, exhaustive_limit=None)
    at_D = check_arrow(D, B, A, k, t, cat, exhaustive_limit=None)
    consistent = not (at_C.verdict == HOLDS and at_D.verdict == FAILS)
    pushed = 0
    if at_C.verdict == HOLDS:
        inst_D = build_instance(D, B, A, cat)
        middle = inst_D.connecting
        rng = random.Random(seed)
        trials = [Coloring.random(inst_D.colored_keys, k, rng) for _ in range(colorings)]
        if at_D.refuting_coloring is not None:
            trials.append(at_D.refuting_coloring)
        dA = (cat.size(D), cat.size(A))
        cA = (cat.size(C), cat.size(A))
        hom_CA = cat.hom(C, A)
        for chi in trials:
            pulled = [chi(morphism_key(*dA, then(c, g))) for g in hom_CA]
            w = find_witness(C, B, A, Coloring(k, tuple(morphism_key(*cA, g) for g in hom_CA), tuple(pulled)), t, cat)
            if w is None:
                consistent = False
                continue
            pushed_w = then(c, w)
            used = {chi(morphism_key(*dA, then(pushed_w, f))) for f in middle}
            consistent &= len(used) <= t
            pushed += 1
    return GoingUpReport(at_C.verdict, at_D.verdict, tuple(c), pushed, bool(consistent))


def going_up_check(C, D, B, A, k: int, t: int = 1, category: str | Category = "chains-rs") -> bool:
    return going_up_report(C, D, B, A, k, t, category).consistent


# --- the pre-adjunction between chains and ordered algebras --------------------------


@dataclass(frozen=True)
class PhiMap:
    """``Phi_B(u)``: a term over ``n`` variables goes to its value in ``B`` after renaming by ``u``."""

    u: ChainMap
    B: OrderedAlgebra

    def __post_init__(self):
        if self.u.k != self.B.size:
            raise ValueError("u must land in the chain of B")

    @property
    def images(self) -> tuple[int, ...]:
        return tuple(self.B.order[self.u(i)] for i in range(self.u.n))

    def __call__(self, t: Term) -> int:
        return evaluate(self.B.algebra, substitute(self.u, t), self.B.order)

    def epi(self, V: Variety) -> RigidEpimorphism:
        """The map restricted through the ordered free algebra on ``u.n`` generators."""
        return factor_reflection(V, self.u.n, self.B, self.images)


def transport_phi(u: ChainMap, B: OrderedAlgebra) -> PhiMap:
    if not is_rigid_surjection(u):
        raise ValueError(f"{u} is not a rigid surjection")
    return PhiMap(u, B)


def check_phi_homomorphism(phi: PhiMap, max_shape_length: int = 8) -> bool:
    """``phi(op(t1..tm)) == op(phi(t1)..phi(tm))`` on every term up to the given shape length."""
    alg = phi.B.algebra
    for t in enumerate_neat(alg.signature, phi.u.n, max_shape_length):
        if isinstance(t, App):
            if phi(t) != alg.apply(t.op, *(phi(a) for a in t.args)):
                return False
        elif phi(t) != phi.B.order[phi.u(t.value)]:
            return False
    return True


def check_PA_instance(u: ChainMap, f: RigidEpimorphism, max_shape_length: int = 8) -> bool:
    """``f . Phi_B(u) == Phi_A(F(f) . u)`` on every term up to the given shape length."""
    B, A = f.domain, f.codomain
    left = transport_phi(u, B)
    right = transport_phi(compose(f.chain_map, u), A)
    for t in enumerate_neat(B.signature, u.n, max_shape_length):
        if f(left(t)) != right(t):
            return False
    return True


# --- transporting arrows from chains to ordered algebras ------------------------------


def _require_holds_for(cert: ArrowCertificate, n: int | None, b: int, a: int, t: int) -> int:
    q = cert.query
    if cert.verdict != HOLDS:
        raise ValueError(f"chain certificate is {cert.verdict}, not HOLDS")
    if q["category"] != "chains-rs" or q["direction"] != DUAL:
        raise ValueError("need a dual arrow certificate among chains")
    if q["B"]["size"] != b or q["A"]["size"] != a:
        raise ValueError(f"chain certificate is for ({q['B']['size']})^{q['A']['size']}, need ({b})^{a}")
    if q["t"] > t:
        raise ValueError("chain certificate has a weaker color bound")
    return q["C"]["size"]


def random_coloring_of_epis(F: OrderedAlgebra, A: OrderedAlgebra, k: int, rng: random.Random) -> Coloring:
    keys = [morphism_key(F.size, A.size, h.table) for h in rigid_epi_set(F, A)]
    return Coloring.random(keys, k, rng)


def transport_arrow(
    chain_cert: ArrowCertificate,
    A: OrderedAlgebra,
    B: OrderedAlgebra,
    V: Variety,
    coloring: Coloring | None = None,
    seed: int = 0,
) -> ArrowCertificate:
    """Move a chain-level arrow to the ordered free algebra and witness it for one coloring.

    The coloring of rigid epis ``F(n) -> A`` is pulled back along
    ``u -> Phi_A(u)`` to rigid surjections ``n -> |A|``; the chain witness
    found for it is pushed to ``Phi_B(w)``.  The resulting witness is then
    checked directly against the rigid epis ``B -> A``.
    """
    require_in_variety(V, A.algebra)
    require_in_variety(V, B.algebra)
    k, t = chain_cert.query["k"], chain_cert.query["t"]
    n = _require_holds_for(chain_cert, None, B.size, A.size, t)
    F = ordered_free(V, n)
    FA = F.ordered
    if coloring is None:
        coloring = random_coloring_of_epis(FA, A, k, random.Random(seed))
    trace: list[dict] = []

    phi_A = {}
    for u in enumerate_rigid_surjections(n, A.size):
        phi_A[u.table] = transport_phi(u, A).epi(V).table
    pulled = Coloring(
        coloring.k,
        tuple(morphism_key(n, A.size, u) for u in phi_A),
        tuple(coloring(morphism_key(F.size, A.size, h)) for h in phi_A.values()),
    )
    trace.append({"step": "pull back", "chain_maps": len(pulled), "colors": sorted(pulled.used())})

    w = find_witness(n, B.size, A.size, pulled, t, "chains-rs")
    if w is None:
        raise AssertionError("the chain certificate holds but no witness was found for the pulled-back coloring")
    trace.append({"step": "chain witness", "w": list(w)})

    W = transport_phi(ChainMap(n, B.size, w), B).epi(V)
    trace.append({"step": "push", "table": list(W.table), "checks": dict(W.checks)})

    query = {
        "C": {"kind": "ordered-free", "generators": n, "size": F.size, "digest": _digest(FA.to_json())},
        "B": _describe_ordered(B),
        "A": _describe_ordered(A),
        "k": k,
        "t": t,
        "category": "ordered-algebras-re",
        "direction": DUAL,
    }
    used = set()
    for f in rigid_epi_set(B, A):
        used.add(coloring(morphism_key(F.size, A.size, then(W.table, f.table))))
    ok = is_rigid_epi(FA, B, W.table) and len(used) <= t
    trace.append({"step": "validate", "colors": sorted(used), "ok": ok})
    keys = tuple(morphism_key(F.size, A.size, h.table) for h in rigid_epi_set(FA, A))
    return ArrowCertificate(
        query,
        HOLDS if ok else FAILS,
        "transported",
        keys,
        morphism_key(F.size, B.size, W.table),
        tuple(sorted(used)),
        coloring=coloring,
        refuting_coloring=None if ok else coloring,
        stats={"chain_size": n, "free_size": F.size},
        trace=trace,
    )


def validate_transported(cert: ArrowCertificate, V: Variety, A: OrderedAlgebra, B: OrderedAlgebra) -> bool:
    """Check a transported witness using only the free algebra, ``A``, ``B`` and the coloring."""
    n = cert.query["C"]["generators"]
    FA = ordered_free(V, n).ordered
    w = cert.witness[2]
    if not is_rigid_epi(FA, B, w):
        return False
    used = {cert.coloring(morphism_key(FA.size, A.size, then(w, f.table))) for f in rigid_epi_set(B, A)}
    return len(used) <= cert.query["t"]


# --- degrees ------------------------------------------------------------------------


def expansion_sum_bound(A: FiniteAlgebra, degrees: Mapping[Any, int]) -> int:
    """Sum of the ordered degrees over every linear order of ``A``.

    ``degrees`` is keyed by :class:`OrderedAlgebra` or by the order tuple.
    """
    total = 0
    for E in expansions(A):
        if E in degrees:
            total += degrees[E]
        elif E.order in degrees:
            total += degrees[E.order]
        else:
            raise KeyError(f"no degree supplied for the expansion with order {list(E.order)}")
    return total


@dataclass
class DegreeBounds:
    lower: int
    upper: int | None
    catalog_lower: int
    automorphisms: int
    catalog_relative: bool = True
    evidence: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "catalog_lower": self.catalog_lower,
            "automorphisms": self.automorphisms,
            "catalog_relative": self.catalog_relative,
            "evidence": self.evidence,
        }


def automorphism_count(A, category: str | Category) -> int:
    cat = get_category(category)
    return sum(1 for t in cat.hom(A, A) if len(set(t)) == cat.size(A))


def small_degree_bounds(
    A,
    catalog: Sequence,
    k_max: int = 2,
    t_max: int = 2,
    category: str | Category = "chains-rs",
    budget: int = 200_000,
    exhaustive_limit: int | None = DEFAULT_EXHAUSTIVE_LIMIT,
) -> DegreeBounds:
    """Bounds on the dual small degree of ``A`` seen through a finite catalog.

    ``lower`` is proved for every ``C``: composite sets are closed under
    the automorphisms of ``A``, which act freely on epimorphisms, so
    coloring by automorphism forces ``min(k_max, |Aut A|)`` colors.
    ``catalog_lower`` is one more than the largest ``t`` at which some ``k``
    and ``B`` make the arrow fail at every catalog ``C``; it only describes
    the catalog, since a larger ``C`` may succeed.  ``upper`` is the least
    ``t`` at which every ``k <= k_max`` and catalog ``B`` find some catalog
    ``C`` carrying the arrow.
    """
    cat = get_category(category)
    autos = automorphism_count(A, cat)
    lower = max(1, min(k_max, autos))
    Bs = [B for B in catalog if cat.hom(B, A)]
    catalog_lower = 1
    upper = None
    evidence: list = []
    for t in range(1, t_max + 1):
        refuted = False
        covered = bool(Bs)
        for k in range(2, k_max + 1):
            for B in Bs:
                verdicts = []
                for C in catalog:
                    if not cat.hom(C, B):
                        continue
                    cert = check_arrow(C, B, A, k, t, cat, budget=budget, exhaustive_limit=exhaustive_limit)
                    verdicts.append(cert.verdict)
                    if cert.verdict == HOLDS:
                        break
                if HOLDS not in verdicts:
                    covered = False
                if verdicts and all(v == FAILS for v in verdicts):
                    refuted = True
                    evidence.append({"t": t, "k": k, "B": cat.describe(B), "fails_at_every_catalog_C": len(verdicts)})
        if refuted:
            catalog_lower = t + 1
        if covered and upper is None:
            upper = t
            evidence.append({"t": t, "covered": True})
    if upper is not None and upper < lower:
        raise AssertionError("a certified arrow contradicts the automorphism bound")
    return DegreeBounds(lower, upper, catalog_lower, autos, True, evidence)


# --- segment induction --------------------------------------------------------------


@dataclass
class SegmentInductionResult:
    verdict: str
    u: ChainMap | None
    colors_used: int | None
    bound: int
    steps: list[dict]
    failing_step: int | None = None
    claim4: bool | None = None

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "u": None if self.u is None else self.u.to_json(),
            "colors_used": self.colors_used,
            "bound": self.bound,
            "steps": self.steps,
            "failing_step": self.failing_step,
            "claim4": self.claim4,
        }


def restrict_to_generators(F: OrderedFreeAlgebra, A: OrderedAlgebra, table: Sequence[int]) -> tuple[int, ...]:
    """Positions in ``A``'s chain of the images of the generators ``x_1 .. x_n``."""
    return tuple(A.positions[table[g]] for g in F.free.generator_elements)


def _step_witness(
    gamma: Callable[[Table], int], N_i: int, target: int, i: int, budget: list[int]
) -> Table | None:
    segment = [f.table for f in enumerate_rigid_surjections(target, i)]
    for w in _chain_hom(N_i, target):
        if budget[0] <= 0:
            return None
        budget[0] -= 1
        if len({gamma(then(w, f)) for f in segment}) <= 1:
            return w
    return None


def segment_induction(
    A: OrderedAlgebra,
    V: Variety,
    N: int,
    coloring: Coloring | None = None,
    k: int = 2,
    M: int | None = None,
    budget: int = 100_000,
    seed: int = 0,
) -> SegmentInductionResult:
    """Find ``u: N -> M`` making ``chi(R . hat T(u))`` use at most ``|A|`` colors.

    ``R`` is the set of rigid epis from the ordered free algebra on ``M``
    generators onto ``A`` and ``chi`` colors the rigid epis from the one on
    ``N`` generators.  Rigid epis are identified with their restrictions to
    the generators, which are rigid surjections onto initial segments
    ``A_i`` of ``A``.  Going from ``i = s`` down to ``1``, a chain map
    ``w_i`` is searched that makes the (pulled back) coloring of segment
    ``i`` constant; ``u = w_1 . ... . w_s``.  Chain sizes shrink from ``N``
    to ``M`` along the way, trying the largest target first.
    """
    s = A.size
    M = s if M is None else M
    require_in_variety(V, A.algebra)
    if M < s:
        raise ValueError(f"M must be at least |A| = {s}")
    if N < M:
        raise ValueError("N must be at least M")
    FN = ordered_free(V, N)
    R_N = rigid_epi_set(FN.ordered, A)
    if coloring is None:
        coloring = random_coloring_of_epis(FN.ordered, A, k, random.Random(seed))

    # gamma on restrictions: pi is injective on homomorphisms out of a free algebra
    gamma_of: dict[Table, int] = {}
    for h in R_N:
        gamma_of[restrict_to_generators(FN, A, h.table)] = coloring(morphism_key(FN.size, A.size, h.table))

    def gamma_i(i: int, f: Table) -> int:
        return gamma_of.get(f, 0) if max(f, default=-1) == i - 1 else 0

    steps: list[dict] = []
    remaining = [budget]

    def descend(i: int, N_i: int, tail: tuple[Table, ...]) -> tuple[Table, ...] | None:
        # tail = (w_{i+1}, ..., w_s) composed later; tail[0] is w_{i+1}
        if i == 0:
            return tail if N_i == M else None
        later = tail

        def gamma_prime(f: Table) -> int:
            g = f
            for w in later:
                g = then(w, g)
            return gamma_i(i, g)

        targets = [M] if i == 1 else range(N_i, M - 1, -1)
        for target in targets:
            if i == 1:
                w = tuple(min(x, M - 1) for x in range(N_i)) if N_i >= M else None
                if w is None or not is_rigid_surjection(ChainMap(N_i, M, w)):
                    continue
            else:
                w = _step_witness(gamma_prime, N_i, target, i, remaining)
            if w is None:
                steps.append({"step": i, "from": N_i, "to": target, "found": False})
                if remaining[0] <= 0:
                    return None
                continue
            steps.append({"step": i, "from": N_i, "to": target, "found": True, "w": list(w)})
            got = descend(i - 1, target, (w,) + later)
            if got is not None:
                return got
            if remaining[0] <= 0:
                return None
        return None

    ws = descend(s, N, ())
    if ws is None:
        failing = next((st["step"] for st in reversed(steps) if not st["found"]), s)
        return SegmentInductionResult(UNKNOWN, None, None, s, steps, failing_step=failing)

    # ws = (w_1, ..., w_s); u = w_1 . ... . w_s applies w_s first
    u_table = tuple(range(N))
    for w in reversed(ws):
        u_table = then(u_table, w)
    u = ChainMap(N, M, u_table)

    FM = ordered_free(V, M)
    T_u = hat_T_V(u, V)
    used = set()
    claim4 = True
    for h in rigid_epi_set(FM.ordered, A):
        composite = then(T_u.table, h.table)
        used.add(coloring(morphism_key(FN.size, A.size, composite)))
        lhs = restrict_to_generators(FN, A, composite)
        rhs = then(u.table, restrict_to_generators(FM, A, h.table))
        claim4 &= lhs == rhs
    verdict = HOLDS if len(used) <= s and claim4 else FAILS
    return SegmentInductionResult(verdict, u, len(used), s, steps, claim4=claim4)
