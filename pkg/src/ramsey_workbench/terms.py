"""Terms over a ranked alphabet, their shapes, and the neat well-ordering.

Terms are immutable trees: :class:`Var` leaves carrying a variable (a chain
position, a carrier element, or a whole term when building terms over terms)
and :class:`App` nodes applying a signature symbol to its arguments.

The neat order compares terms first by the length of their shape string,
then lexicographically on shape strings over the alphabet
``xi < symbols < "(" < "," < ")"``, and finally lexicographically on the
tuple of variables read left to right.
"""

from __future__ import annotations

import enum
import functools
import itertools
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Iterator, NamedTuple, Sequence, Union

from ramsey_workbench.chains import Chain, ChainMap, is_rigid_surjection


class _Xi:
    """The distinguished shape variable."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "XI"

    def __reduce__(self):
        return (_Xi, ())


XI = _Xi()


@dataclass(frozen=True)
class Var:
    value: Any

    def __repr__(self):
        return f"Var({self.value!r})"


@dataclass(frozen=True)
class App:
    op: str
    args: tuple = ()

    def __repr__(self):
        if not self.args:
            return f"App({self.op!r})"
        return f"App({self.op!r}, {self.args!r})"


Term = Union[Var, App]


@dataclass(frozen=True)
class Signature:
    """A finite, well-ordered algebraic language.

    Constants are placed before function symbols; otherwise the given order
    is kept.  The resulting ``symbols`` order is the order used by the neat
    well-ordering.
    """

    symbols: tuple[tuple[str, int], ...]

    def __post_init__(self):
        symbols = tuple((str(name), int(arity)) for name, arity in self.symbols)
        names = [name for name, _ in symbols]
        if len(set(names)) != len(names):
            raise ValueError("symbol names must be distinct")
        if any(arity < 0 for _, arity in symbols):
            raise ValueError("arities must be non-negative")
        constants = tuple(s for s in symbols if s[1] == 0)
        functions = tuple(s for s in symbols if s[1] > 0)
        object.__setattr__(self, "symbols", constants + functions)

    @classmethod
    def of(cls, **arities: int) -> Signature:
        return cls(tuple(arities.items()))

    @functools.cached_property
    def _arity(self) -> dict[str, int]:
        return dict(self.symbols)

    @functools.cached_property
    def _rank(self) -> dict[str, int]:
        return {name: i + 1 for i, (name, _) in enumerate(self.symbols)}

    def __len__(self):
        return len(self.symbols)

    def __contains__(self, name):
        return name in self._arity

    def arity(self, name: str) -> int:
        return self._arity[name]

    def rank(self, name: str) -> int:
        """Alphabet rank of a symbol; ``xi`` has rank 0."""
        return self._rank[name]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.symbols)

    @property
    def constants(self) -> tuple[str, ...]:
        return tuple(name for name, a in self.symbols if a == 0)

    @property
    def functions(self) -> tuple[str, ...]:
        return tuple(name for name, a in self.symbols if a > 0)

    # punctuation ranks follow all symbols
    @property
    def lparen(self) -> int:
        return len(self.symbols) + 1

    @property
    def comma(self) -> int:
        return len(self.symbols) + 2

    @property
    def rparen(self) -> int:
        return len(self.symbols) + 3

    def to_json(self) -> dict:
        return {"symbols": [{"name": n, "arity": a} for n, a in self.symbols]}

    @classmethod
    def from_json(cls, data: dict) -> Signature:
        return cls(tuple((s["name"], s["arity"]) for s in data["symbols"]))


class Cmp(enum.IntEnum):
    LT = -1
    EQ = 0
    GT = 1


class NeatKey(NamedTuple):
    shape_length: int
    shape_string: tuple[int, ...]
    var_tuple: tuple


def check_term(t: Term, sig: Signature) -> None:
    if isinstance(t, Var):
        return
    if t.op not in sig:
        raise ValueError(f"unknown symbol {t.op!r}")
    if sig.arity(t.op) != len(t.args):
        raise ValueError(f"{t.op} expects {sig.arity(t.op)} arguments, got {len(t.args)}")
    for a in t.args:
        check_term(a, sig)


def map_vars(t: Term, fn: Callable[[Any], Any]) -> Term:
    if isinstance(t, Var):
        return Var(fn(t.value))
    return App(t.op, tuple(map_vars(a, fn) for a in t.args))


def variables(t: Term) -> list:
    """Variables in left-to-right occurrence order (with repetitions)."""
    out: list = []

    def walk(s):
        if isinstance(s, Var):
            out.append(s.value)
        else:
            for a in s.args:
                walk(a)

    walk(t)
    return out


def shape_of(t: Term) -> Term:
    return map_vars(t, lambda _: XI)


def is_shape(t: Term) -> bool:
    return all(v is XI for v in variables(t))


def _default_var_name(v) -> str:
    if v is XI:
        return "ξ"
    if isinstance(v, int):
        return f"x{v + 1}"
    if isinstance(v, (Var, App)):
        return f"⟨{render(v)}⟩"
    return str(v)


def render_tokens(t: Term, var_name: Callable[[Any], str] = _default_var_name) -> list[str]:
    """Rendered symbol sequence; each variable and each symbol is one token."""
    if isinstance(t, Var):
        return [var_name(t.value)]
    if not t.args:
        return [t.op]
    out = [t.op, "("]
    for i, a in enumerate(t.args):
        if i:
            out.append(",")
        out.extend(render_tokens(a, var_name))
    out.append(")")
    return out


def render(t: Term, var_name: Callable[[Any], str] = _default_var_name) -> str:
    return "".join(render_tokens(t, var_name))


def shape_length(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 1
    return 2 + len(t.args) + sum(shape_length(a) for a in t.args)


def shape_string(t: Term, sig: Signature) -> tuple[int, ...]:
    out: list[int] = []

    def walk(s):
        if isinstance(s, Var):
            out.append(0)
            return
        out.append(sig.rank(s.op))
        if s.args:
            out.append(sig.lparen)
            for i, a in enumerate(s.args):
                if i:
                    out.append(sig.comma)
                walk(a)
            out.append(sig.rparen)

    walk(t)
    return tuple(out)


def _position(v, vars: Chain | None):
    if vars is None:
        return v
    return vars.position(v)


def neat_key(t: Term, sig: Signature, var_key: Callable[[Any], Any] | Chain | None = None) -> NeatKey:
    """Sort key realizing the neat order; ``var_key`` ranks the variables."""
    if var_key is None or isinstance(var_key, Chain):
        chain = var_key
        var_key = lambda v: _position(v, chain)  # noqa: E731
    s = shape_string(t, sig)
    return NeatKey(len(s), s, tuple(var_key(v) for v in variables(t)))


def nested_key(sig: Signature, vars: Chain | None = None) -> Callable[[Any], Any]:
    """Variable key for terms whose variables are themselves terms over ``vars``."""

    def key(v):
        if isinstance(v, (Var, App)):
            return neat_key(v, sig, vars)
        return _position(v, vars)

    return key


def neat_compare(t1: Term, t2: Term, sig: Signature, vars: Chain | None = None) -> Cmp:
    if t1 == t2:
        return Cmp.EQ
    k1, k2 = neat_key(t1, sig, vars), neat_key(t2, sig, vars)
    if k1 == k2:
        raise ValueError(f"distinct terms {t1} and {t2} share a neat key")
    return Cmp.LT if k1 < k2 else Cmp.GT


@functools.lru_cache(maxsize=None)
def shapes_of_length(sig: Signature, length: int) -> tuple[Term, ...]:
    """All shapes whose rendered string has exactly ``length`` symbols, in neat order."""
    found: list[Term] = []
    if length == 1:
        found.append(Var(XI))
        found.extend(App(c) for c in sig.constants)
    for f in sig.functions:
        a = sig.arity(f)
        budget = length - a - 2
        if budget < a:
            continue
        for parts in _compositions(budget, a):
            for args in itertools.product(*(shapes_of_length(sig, p) for p in parts)):
                found.append(App(f, tuple(args)))
    found.sort(key=lambda s: shape_string(s, sig))
    return tuple(found)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def fill(shape: Term, values: Iterable) -> Term:
    """Replace the occurrences of ``xi`` in ``shape``, left to right, by ``values``."""
    it = iter(values)

    def walk(s):
        if isinstance(s, Var):
            return Var(next(it))
        return App(s.op, tuple(walk(a) for a in s.args))

    return walk(shape)


def _chain_elements(vars: Chain | int) -> tuple:
    if isinstance(vars, int):
        return tuple(range(vars))
    return vars.elements()


def terms_of_length(sig: Signature, vars: Chain | int, length: int) -> Iterator[Term]:
    elements = _chain_elements(vars)
    for shape in shapes_of_length(sig, length):
        m = len(variables(shape))
        for values in itertools.product(elements, repeat=m):
            yield fill(shape, values)


def enumerate_neat(sig: Signature, vars: Chain | int, max_shape_length: int) -> list[Term]:
    """All terms with shape length at most ``max_shape_length``, in neat order.

    The result is an initial segment of the full neat order.
    """
    out: list[Term] = []
    for length in range(1, max_shape_length + 1):
        out.extend(terms_of_length(sig, vars, length))
    return out


def iter_neat(sig: Signature, vars: Chain | int) -> Iterator[Term]:
    """The neat order as an unbounded stream (finite only if ``sig`` has no functions)."""
    length = 1
    while True:
        if length > 1 and not sig.functions:
            return
        yield from terms_of_length(sig, vars, length)
        length += 1


def unit(x) -> Term:
    return Var(x)


def substitute(f: ChainMap | Callable | Sequence, t: Term) -> Term:
    """Rename variables along ``f`` (a chain map, a callable, or a lookup table)."""
    if isinstance(f, ChainMap):
        table = f.table
        return map_vars(t, table.__getitem__)
    if callable(f):
        return map_vars(t, f)
    return map_vars(t, f.__getitem__)


def flatten(tt: Term) -> Term:
    """Substitute the term-valued variables of ``tt`` into it."""
    if isinstance(tt, Var):
        inner = tt.value
        if not isinstance(inner, (Var, App)):
            raise TypeError(f"variable {inner!r} is not a term")
        return inner
    return App(tt.op, tuple(flatten(a) for a in tt.args))


def preimages_under_flatten(t: Term) -> list[Term]:
    """Every term over terms that flattens to ``t``: cut ``t`` anywhere and wrap the pieces."""
    out: list[Term] = [Var(t)]
    if isinstance(t, App):
        for args in itertools.product(*(preimages_under_flatten(a) for a in t.args)):
            out.append(App(t.op, tuple(args)))
    return out


def substitution_map(f: ChainMap, sig: Signature, max_shape_length: int) -> ChainMap:
    """The map between truncated neat chains induced by renaming variables along ``f``."""
    dom = enumerate_neat(sig, f.n, max_shape_length)
    cod = enumerate_neat(sig, f.k, max_shape_length)
    index = {t: i for i, t in enumerate(cod)}
    return ChainMap(len(dom), len(cod), tuple(index[substitute(f, t)] for t in dom))


def check_subst_rigid(f: ChainMap, sig: Signature, max_shape_length: int) -> bool:
    if not is_rigid_surjection(f):
        raise ValueError(f"{f} is not a rigid surjection")
    return is_rigid_surjection(substitution_map(f, sig, max_shape_length))


def check_mu_rigid(sig: Signature, vars: Chain | int, max_shape_length: int) -> bool:
    """Flattening is rigid on the truncation: fibre minima are the wrappers, in order.

    Every preimage of a term ``t`` is a cut of ``t``; the minimum must be the
    single variable ``<t>`` and these minima must increase along the neat order.
    """
    chain = Chain(vars) if isinstance(vars, int) else vars
    terms = enumerate_neat(sig, chain, max_shape_length)
    outer_key = nested_key(sig, chain)
    previous = None
    for t in terms:
        fibre = preimages_under_flatten(t)
        if any(flatten(p) != t for p in fibre):
            return False
        least = min(fibre, key=lambda p: neat_key(p, sig, outer_key))
        if least != Var(t):
            return False
        key = neat_key(least, sig, outer_key)
        if previous is not None and not previous < key:
            return False
        previous = key
    return True


def term_to_json(t: Term):
    if isinstance(t, Var):
        v = t.value
        if isinstance(v, (Var, App)):
            v = term_to_json(v)
        elif v is XI:
            v = "ξ"
        return {"var": v}
    return {"op": t.op, "args": [term_to_json(a) for a in t.args]}


def term_from_json(data) -> Term:
    if "var" in data:
        v = data["var"]
        if isinstance(v, dict):
            v = term_from_json(v)
        elif v == "ξ":
            v = XI
        return Var(v)
    return App(data["op"], tuple(term_from_json(a) for a in data.get("args", [])))


def parse_term(text: str, sig: Signature) -> Term:
    """Parse ``f(g(x1,x2),c,x1)`` style strings; ``xN`` is variable ``N-1``."""
    text = text.replace(" ", "")
    pos = 0

    def name():
        nonlocal pos
        start = pos
        while pos < len(text) and text[pos] not in "(),":
            pos += 1
        return text[start:pos]

    def term():
        nonlocal pos
        tok = name()
        if not tok:
            raise ValueError(f"expected a symbol at offset {pos} in {text!r}")
        if tok in sig:
            args = []
            if pos < len(text) and text[pos] == "(":
                pos += 1
                args.append(term())
                while text[pos] == ",":
                    pos += 1
                    args.append(term())
                if text[pos] != ")":
                    raise ValueError(f"expected ')' at offset {pos} in {text!r}")
                pos += 1
            t = App(tok, tuple(args))
            check_term(t, sig)
            return t
        if tok == "ξ":
            return Var(XI)
        if tok[0] == "x" and tok[1:].isdigit():
            return Var(int(tok[1:]) - 1)
        raise ValueError(f"unknown token {tok!r}")

    t = term()
    if pos != len(text):
        raise ValueError(f"trailing input in {text!r}")
    return t
