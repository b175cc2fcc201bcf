"""The property battery behind ``verify-suite``.

Each check replays one named result at a finite size cap against an
independent oracle and reports how many instances it looked at.  The
predicates under test are looked up in an :class:`Impl` so the battery can
be pointed at a deliberately broken implementation to make sure it notices.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

from ramsey_workbench import ramsey
from ramsey_workbench.algebras import free_algebra, hom_set, in_variety
from ramsey_workbench.catalog import Catalog, load_catalog
from ramsey_workbench.chains import (
    ChainMap,
    compose,
    dual_embedding,
    enumerate_rigid_surjections,
    induced_order,
    initial_segment_criterion,
    is_rigid_surjection,
    is_strictly_increasing,
    lex_product_map,
    tuple_index,
)
from ramsey_workbench.ordered import (
    NotRigidError,
    OrderedAlgebra,
    automorphisms,
    check_eval_rigid,
    factor_reflection,
    generator_extension,
    hat_T_V,
    is_rigid_epi,
    joint_factor,
    ordered_free,
    rigid_epi_set,
)
from ramsey_workbench.terms import (
    App,
    Signature,
    Var,
    check_mu_rigid,
    check_subst_rigid,
    enumerate_neat,
    flatten,
    neat_key,
    substitute,
)

SCOPES = ("chains", "terms", "algebras", "ordered", "ramsey")


@dataclass
class Impl:
    is_rigid_surjection: Callable[[ChainMap], bool] = is_rigid_surjection


def mutant_impl() -> Impl:
    """Rigidity replaced by plain surjectivity."""
    return Impl(is_rigid_surjection=lambda f: f.is_surjective())


@dataclass
class CheckResult:
    scope: str
    name: str
    result: str
    passed: bool
    instances: int
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "scope": self.scope,
            "check": self.name,
            "result": self.result,
            "passed": self.passed,
            "instances": self.instances,
            "detail": self.detail,
        }


@dataclass
class Context:
    max_size: int = 6
    max_shape_length: int = 8
    seed: int = 0
    impl: Impl = field(default_factory=Impl)
    catalog: Catalog | None = None

    def cat(self) -> Catalog:
        if self.catalog is None:
            self.catalog = load_catalog()
        return self.catalog


# --- oracles --------------------------------------------------------------------


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    if n == k:
        return 1
    if k == 0 or k > n:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def surjections(n: int, k: int):
    for t in itertools.product(range(k), repeat=n):
        if len(set(t)) == k:
            yield ChainMap(n, k, t)


def rigid_by_minima(f: ChainMap) -> bool:
    """Rigidity straight from the definition: fibre minima increase."""
    if not f.is_surjective():
        return False
    m = f.fibre_minima()
    return all(m[b] < m[b + 1] for b in range(f.k - 1))


# --- chains -----------------------------------------------------------------------


def check_stirling(ctx: Context):
    count = 0
    for n in range(1, ctx.max_size + 1):
        for k in range(1, n + 1):
            maps = enumerate_rigid_surjections(n, k)
            if len(maps) != stirling2(n, k) or not all(ctx.impl.is_rigid_surjection(f) for f in maps):
                return False, count, f"n={n}, k={k}: {len(maps)} maps vs S(n,k)={stirling2(n, k)}"
            count += 1
    return True, count, ""


def check_initial_segments(ctx: Context):
    count = 0
    for n in range(1, ctx.max_size + 1):
        for k in range(1, n + 1):
            for f in surjections(n, k):
                count += 1
                if ctx.impl.is_rigid_surjection(f) != initial_segment_criterion(f):
                    return False, count, f"disagreement on {f}"
                if ctx.impl.is_rigid_surjection(f) != rigid_by_minima(f):
                    return False, count, f"rigidity predicate disagrees with fibre minima on {f}"
    return True, count, ""


def check_cancellation(ctx: Context):
    cap = ctx.max_size
    count = 0
    for b in range(1, cap + 1):
        into_b = [g for a in range(b, cap + 1) for g in enumerate_rigid_surjections(a, b)]
        for c in range(1, b + 1):
            for h in surjections(b, c):
                h_rigid = ctx.impl.is_rigid_surjection(h)
                for g in into_b:
                    count += 1
                    composite = ctx.impl.is_rigid_surjection(compose(h, g))
                    if composite != h_rigid:
                        return False, count, f"g={g}, h={h}: composite rigid={composite}, h rigid={h_rigid}"
    return True, count, ""


def check_dual_embedding(ctx: Context):
    count = 0
    for n in range(1, ctx.max_size + 1):
        for k in range(1, n + 1):
            for f in surjections(n, k):
                count += 1
                if ctx.impl.is_rigid_surjection(f) != is_strictly_increasing(dual_embedding(f)):
                    return False, count, f"embedding test disagrees on {f}"
                if n <= 5:
                    good = []
                    for perm in itertools.permutations(range(k)):
                        pos = {b: i for i, b in enumerate(perm)}
                        if ctx.impl.is_rigid_surjection(ChainMap(n, k, tuple(pos[y] for y in f.table))):
                            good.append(perm)
                    if good != [induced_order(f.table).labels]:
                        return False, count, f"{f}: orders making it rigid {good}"
    return True, count, ""


def check_lex_powers(ctx: Context):
    count = 0
    for a in range(1, min(ctx.max_size, 4) + 1):
        for b in range(1, a + 1):
            for f in enumerate_rigid_surjections(a, b):
                minima = f.fibre_minima()
                for n in range(1, 4):
                    g = lex_product_map(f, n)
                    count += 1
                    if not ctx.impl.is_rigid_surjection(g):
                        return False, count, f"power {n} of {f} is not rigid"
                    gm = g.fibre_minima()
                    for bs in itertools.product(range(b), repeat=n):
                        expected = tuple_index([minima[x] for x in bs], a)
                        if gm[tuple_index(bs, b)] != expected:
                            return False, count, f"minimum over {bs} wrong for {f}"
    return True, count, ""


# --- terms ------------------------------------------------------------------------


def small_signatures() -> list[Signature]:
    """Every signature with at most two symbols of arity at most two, up to renaming."""
    out = []
    seen = set()
    for r in (1, 2):
        # symbol order matters for the neat order, so (1, 2) and (2, 1) are different languages
        for arities in itertools.product(range(3), repeat=r):
            sig = Signature(tuple((f"s{i}", a) for i, a in enumerate(arities)))
            shape = tuple(a for _, a in sig.symbols)
            if shape not in seen:
                seen.add(shape)
                out.append(sig)
    return out


def brute_terms(sig: Signature, nvars: int, max_len: int) -> list:
    """Every term up to a rendered length, built bottom up and sorted by neat key."""
    by_len: dict[int, list] = {1: [Var(i) for i in range(nvars)] + [App(c) for c in sig.constants]}
    for length in range(2, max_len + 1):
        found = []
        for f in sig.functions:
            a = sig.arity(f)
            for sizes in itertools.product(range(1, length), repeat=a):
                if sum(sizes) + a + 2 != length:
                    continue
                for args in itertools.product(*(by_len.get(s, []) for s in sizes)):
                    found.append(App(f, tuple(args)))
        by_len[length] = found
    terms = [t for ts in by_len.values() for t in ts]
    return sorted(terms, key=lambda t: neat_key(t, sig))


def check_neat_enumeration(ctx: Context):
    count = 0
    for sig in small_signatures():
        for nvars in (1, 2):
            count += 1
            if enumerate_neat(sig, nvars, ctx.max_shape_length) != brute_terms(sig, nvars, ctx.max_shape_length):
                return False, count, f"neat enumeration differs for {sig.symbols} over {nvars} variables"
    return True, count, ""


def check_substitution_rigid(ctx: Context):
    count = 0
    for sig in small_signatures():
        for n in range(1, min(ctx.max_size, 4) + 1):
            for k in range(1, n + 1):
                for f in enumerate_rigid_surjections(n, k):
                    count += 1
                    if not check_subst_rigid(f, sig, ctx.max_shape_length):
                        return False, count, f"renaming along {f} over {sig.symbols}"
    return True, count, ""


def check_flatten_rigid(ctx: Context):
    count = 0
    for sig in small_signatures():
        for n in range(1, 3):
            count += 1
            if not check_mu_rigid(sig, n, ctx.max_shape_length):
                return False, count, f"flattening over {sig.symbols}, {n} variables"
    return True, count, ""


def check_monad_laws(ctx: Context):
    count = 0
    for sig in small_signatures():
        for t in enumerate_neat(sig, 2, ctx.max_shape_length):
            count += 1
            if flatten(Var(t)) != t or flatten(substitute(Var, t)) != t:
                return False, count, f"unit laws fail at {t}"
    return True, count, ""


# --- algebras ---------------------------------------------------------------------


def check_free_sizes(ctx: Context):
    cat = ctx.cat()
    expected = {
        "semilattices": lambda n: 2**n - 1,
        "exponent-2-groups": lambda n: 2**n,
        "left-zero": lambda n: n,
        "trivial": lambda n: 1,
    }
    count = 0
    for name, formula in expected.items():
        if name not in cat.varieties:
            continue
        for n in range(1, 4):
            count += 1
            size = free_algebra(cat.variety(name), n).size
            if size != formula(n):
                return False, count, f"{name}: F({n}) has {size} elements, expected {formula(n)}"
    return True, count, ""


def check_free_universal(ctx: Context):
    """Every generator assignment into a member extends to exactly one homomorphism."""
    cat = ctx.cat()
    count = 0
    for V in cat.varieties.values():
        members = [A for A in cat.algebras.values() if A.signature == V.signature and A.size <= 4 and in_variety(V, A)]
        for n in (1, 2):
            F = free_algebra(V, n)
            for A in members:
                homs = hom_set(F.underlying, A)
                for images in itertools.product(range(A.size), repeat=n):
                    count += 1
                    hits = [h for h in homs if tuple(h.table[g] for g in F.generator_elements) == images]
                    if len(hits) != 1:
                        return False, count, f"{A.name}: {len(hits)} extensions of {images}"
    return True, count, ""


# --- ordered ----------------------------------------------------------------------


def _ordered_members(cat: Catalog, V, max_size: int = 4) -> list[OrderedAlgebra]:
    return [O for O in cat.ordered.values() if O.signature == V.signature and O.size <= max_size and in_variety(V, O.algebra)]


def _nontrivial_varieties(cat: Catalog):
    return [V for V in cat.varieties.values() if V.is_nontrivial()]


def check_natural_map_rigid(ctx: Context):
    cat = ctx.cat()
    count = 0
    for V in _nontrivial_varieties(cat):
        for n in range(1, 4):
            F = ordered_free(V, n)
            count += 1
            if not ctx.impl.is_rigid_surjection(F.nu_chain_map()):
                return False, count, f"{V.name}: natural map on {n} generators"
        for O in _ordered_members(cat, V):
            count += 1
            if not check_eval_rigid(O, ctx.max_shape_length):
                return False, count, f"evaluation over {O!r}"
    return True, count, ""


def check_hat_T(ctx: Context):
    cat = ctx.cat()
    count = 0
    for V in _nontrivial_varieties(cat):
        for n in range(1, 4):
            for k in range(1, n + 1):
                for f in enumerate_rigid_surjections(n, k):
                    count += 1
                    h = hat_T_V(f, V)
                    src, dst = ordered_free(V, n), ordered_free(V, k)
                    if not ctx.impl.is_rigid_surjection(h.chain_map):
                        return False, count, f"{V.name}: induced map of {f} not rigid"
                    for t in enumerate_neat(V.signature, n, ctx.max_shape_length):
                        if h(src.nu(t)) != dst.nu(substitute(f, t)):
                            return False, count, f"{V.name}: square fails at {t} for {f}"
    return True, count, ""


def check_reflection(ctx: Context):
    cat = ctx.cat()
    count = 0
    for V in _nontrivial_varieties(cat):
        for A in _ordered_members(cat, V):
            for n in range(1, 4):
                F = ordered_free(V, n)
                homs = hom_set(F.free.underlying, A.algebra)
                for images in itertools.product(range(A.size), repeat=n):
                    count += 1
                    hits = [h for h in homs if tuple(h.table[g] for g in F.free.generator_elements) == images]
                    try:
                        r = factor_reflection(V, n, A, images)
                    except NotRigidError:
                        table = generator_extension(F, A, images)
                        if is_rigid_epi(F.ordered, A, table):
                            return False, count, f"rejected a rigid factor for {images}"
                        continue
                    if [h.table for h in hits] != [r.table]:
                        return False, count, f"factor for {images} is not the unique extension"
    return True, count, ""


def check_joint_factor(ctx: Context, instances: int = 50):
    cat = ctx.cat()
    rng = random.Random(ctx.seed)
    pool = []
    for V in _nontrivial_varieties(cat):
        members = _ordered_members(cat, V)
        for n in (2, 3):
            F = ordered_free(V, n).ordered
            epis = [e for A in members for e in rigid_epi_set(F, A)]
            pool.extend((e1, e2) for e1 in epis for e2 in epis)
    if not pool:
        return False, 0, "no instances"
    count = 0
    for f, g in (rng.choice(pool) for _ in range(instances)):
        count += 1
        J = joint_factor(f, g)
        if J.h.then(J.p1).table != f.table or J.h.then(J.p2).table != g.table:
            return False, count, "projections do not recover the maps"
        if not all(is_rigid_epi(m.domain, m.codomain, m.table) for m in (J.h, J.p1, J.p2)):
            return False, count, "factorization is not made of rigid epis"
    return True, count, ""


def check_automorphisms(ctx: Context):
    count = 0
    for O in ctx.cat().ordered.values():
        count += 1
        autos = automorphisms(O)
        if [a.table for a in autos] != [tuple(range(O.size))]:
            return False, count, f"{O!r} has {len(autos)} automorphisms"
    return True, count, ""


def check_unique_restrictions(ctx: Context):
    cat = ctx.cat()
    count = 0
    for A in cat.algebras.values():
        for B in cat.algebras.values():
            if A.signature != B.signature or A.size > 4 or B.size > A.size:
                continue
            for e in hom_set(A, B, surjective=True):
                for order_A in itertools.permutations(range(A.size)):
                    OA = OrderedAlgebra(A, order_A)
                    count += 1
                    good = [p for p in itertools.permutations(range(B.size)) if is_rigid_epi(OA, OrderedAlgebra(B, p), e.table)]
                    if len(good) != 1:
                        return False, count, f"{len(good)} orders make the epi rigid"
    return True, count, ""


# --- ramsey -----------------------------------------------------------------------


def plain_split_exists(n: int, b: int, a: int, k: int, t: int = 1) -> bool:
    """Backtracking with no propagation: is there a coloring splitting every composite set?"""
    colored = [f.table for f in enumerate_rigid_surjections(n, a)]
    index = {x: i for i, x in enumerate(colored)}
    middle = [f.table for f in enumerate_rigid_surjections(b, a)]
    closing: dict[int, list] = {}
    for w in enumerate_rigid_surjections(n, b):
        e = [index[tuple(f[x] for x in w.table)] for f in middle]
        closing.setdefault(max(e), []).append(e)
    color = [0] * len(colored)

    def go(v):
        if v == len(colored):
            return True
        for c in range(k):
            color[v] = c
            if all(len({color[j] for j in e}) > t for e in closing.get(v, ())) and go(v + 1):
                return True
        return False

    return go(0)


def check_finite_dual_ramsey(ctx: Context):
    count = 0
    for a, b in [(1, 2), (2, 2), (2, 3)]:
        r = ramsey.gr_witness_search(a, b, 2, max(ctx.max_size, 6))
        count += 1
        if r.n is None or not ramsey.revalidate(r.certificate, r.n, b, a):
            return False, count, f"({a},{b}): no revalidated witness size"
        if plain_split_exists(r.n, b, a, 2) or (r.n > b and not plain_split_exists(r.n - 1, b, a, 2)):
            return False, count, f"({a},{b}): size {r.n} is not the least"
    return True, count, ""


def check_going_up(ctx: Context):
    count = 0
    for C in range(3, min(ctx.max_size, 6) + 1):
        count += 1
        if not ramsey.going_up_check(C, C + 1, 3, 2, 2, 1):
            return False, count, f"arrow at {C} does not lift to {C + 1}"
    return True, count, ""


def check_pre_adjunction(ctx: Context, instances: int = 40):
    cat = ctx.cat()
    rng = random.Random(ctx.seed)
    pool = []
    for B in cat.ordered.values():
        for A in cat.ordered.values():
            if A.signature == B.signature and A.size <= B.size:
                pool.extend(rigid_epi_set(B, A))
    count = 0
    for _ in range(instances):
        f = rng.choice(pool)
        n = rng.randint(f.domain.size, f.domain.size + 2)
        u = rng.choice(enumerate_rigid_surjections(n, f.domain.size))
        count += 1
        if not ramsey.check_PA_instance(u, f, ctx.max_shape_length):
            return False, count, f"law fails for u={u}, f={list(f.table)}"
    return True, count, ""


def check_transport(ctx: Context):
    cat = ctx.cat()
    V = cat.variety("semilattices")
    count = 0
    for a_name, b_name in [("SL2<", "SL2<"), ("SL2>", "C3>")]:
        A, B = cat.ordered_algebra(a_name), cat.ordered_algebra(b_name)
        g = ramsey.gr_witness_search(A.size, B.size, 2, 8)
        for s in range(3):
            count += 1
            cert = ramsey.transport_arrow(g.certificate, A, B, V, seed=ctx.seed + s)
            if not (cert.holds and ramsey.validate_transported(cert, V, A, B)):
                return False, count, f"{a_name} from {b_name}, seed {s}"
    return True, count, ""


def check_segment_induction(ctx: Context):
    cat = ctx.cat()
    V = cat.variety("semilattices")
    A = cat.ordered_algebra("SL2<")
    count = 0
    for s in range(3):
        count += 1
        r = ramsey.segment_induction(A, V, 6, k=2, M=3, seed=ctx.seed + s)
        if r.verdict != ramsey.HOLDS or r.colors_used > A.size:
            return False, count, f"seed {s}: {r.verdict}"
    return True, count, ""


def check_expansion_bound(ctx: Context):
    count = 0
    for A in ctx.cat().algebras.values():
        if A.size <= 3:
            count += 1
            degrees = {p: 1 for p in itertools.permutations(range(A.size))}
            if ramsey.expansion_sum_bound(A, degrees) != math.factorial(A.size):
                return False, count, f"{A.name}"
    return True, count, ""


CHECKS: list[tuple[str, str, str, Callable]] = [
    ("chains", "rigid surjection counts", "Stirling numbers of the second kind", check_stirling),
    ("chains", "initial segments", "initial-segment criterion for rigid surjections", check_initial_segments),
    ("chains", "cancellation", "rigid cancellation lemma", check_cancellation),
    ("chains", "dual embedding", "fibre-minimum embedding and unique rigid order", check_dual_embedding),
    ("chains", "lexicographic powers", "lexicographic power lemma", check_lex_powers),
    ("terms", "neat enumeration", "neat well-ordering construction", check_neat_enumeration),
    ("terms", "substitution", "rigidity of the term functor", check_substitution_rigid),
    ("terms", "flattening", "rigidity of the monad multiplication", check_flatten_rigid),
    ("terms", "unit laws", "term monad unit laws", check_monad_laws),
    ("algebras", "free sizes", "free algebras of generated varieties", check_free_sizes),
    ("algebras", "free extension", "universal property of free algebras", check_free_universal),
    ("ordered", "natural maps", "natural epimorphism is rigid", check_natural_map_rigid),
    ("ordered", "induced maps", "ordered free functor on rigid surjections", check_hat_T),
    ("ordered", "reflection", "reflection through the natural epimorphism", check_reflection),
    ("ordered", "joint factoring", "joint factorization through the product", check_joint_factor),
    ("ordered", "automorphisms", "rigidity theorem", check_automorphisms),
    ("ordered", "unique restrictions", "expansions with unique restrictions", check_unique_restrictions),
    ("ramsey", "witness sizes", "finite dual Ramsey theorem", check_finite_dual_ramsey),
    ("ramsey", "going up", "arrows lift along morphisms", check_going_up),
    ("ramsey", "pre-adjunction", "pre-adjunction law", check_pre_adjunction),
    ("ramsey", "transport", "transport of the dual Ramsey property", check_transport),
    ("ramsey", "segment induction", "dual big degree bound by segments", check_segment_induction),
    ("ramsey", "expansion bound", "degree bound from expansions", check_expansion_bound),
]


def run_suite(scope: str = "all", ctx: Context | None = None) -> list[CheckResult]:
    ctx = ctx or Context()
    if scope != "all" and scope not in SCOPES:
        raise ValueError(f"unknown scope {scope!r}")
    out = []
    for sc, name, result, fn in CHECKS:
        if scope != "all" and sc != scope:
            continue
        try:
            passed, count, detail = fn(ctx)
        except Exception as exc:  # a crash is a failed check, reported like one
            passed, count, detail = False, 0, f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(sc, name, result, bool(passed), count, detail))
    return out
