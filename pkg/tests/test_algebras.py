import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ramsey_workbench.algebras import (
    FiniteAlgebra,
    Homomorphism,
    NotAHomomorphismError,
    UnboundVariableError,
    Variety,
    epi_set,
    evaluate,
    free_algebra,
    generated_subalgebra,
    generating_set,
    hom_set,
    homomorphic_extension,
    in_variety,
    is_homomorphism,
    nu,
    product,
    satisfies_identity,
    theta_equiv,
)
from ramsey_workbench.terms import App, Signature, Var, parse_term

G2 = Signature.of(g=2)


def brute_homs(A, B):
    return [t for t in itertools.product(range(B.size), repeat=A.size) if is_homomorphism(A, B, t)]


@st.composite
def binary_algebras(draw, max_size=3):
    n = draw(st.integers(1, max_size))
    cells = draw(st.lists(st.integers(0, n - 1), min_size=n * n, max_size=n * n))
    return FiniteAlgebra(G2, n, {"g": np.array(cells).reshape(n, n)})


class TestFiniteAlgebra:
    def test_table_validation(self):
        with pytest.raises(ValueError):
            FiniteAlgebra(G2, 2, {"g": [[0, 2], [0, 0]]})
        with pytest.raises(ValueError):
            FiniteAlgebra(G2, 2, {"g": [0, 1]})
        with pytest.raises(ValueError):
            FiniteAlgebra(G2, 2, {"g": [[0, 0], [0, 0]], "h": 0})
        with pytest.raises(ValueError):
            FiniteAlgebra(G2, 0, {"g": []})

    def test_from_functions(self, catalog):
        A = FiniteAlgebra.from_functions(G2, 2, {"g": min})
        assert A == catalog.algebra("SL2")

    def test_json(self, catalog):
        A = catalog.algebra("Z2")
        assert FiniteAlgebra.from_json(A.to_json()) == A

    def test_evaluate_unbound(self, catalog):
        with pytest.raises(UnboundVariableError):
            evaluate(catalog.algebra("SL2"), Var(3), [0, 1])

    def test_identities(self, catalog):
        comm = (parse_term("g(x1,x2)", G2), parse_term("g(x2,x1)", G2))
        assert satisfies_identity(catalog.algebra("SL2"), *comm)
        assert not satisfies_identity(catalog.algebra("LZ2"), *comm)


@given(binary_algebras(), binary_algebras())
def test_hom_set_matches_brute_force(A, B):
    assert sorted(h.table for h in hom_set(A, B)) == sorted(brute_homs(A, B))
    assert sorted(h.table for h in epi_set(A, B)) == sorted(t for t in brute_homs(A, B) if len(set(t)) == B.size)


@given(binary_algebras(max_size=4))
def test_generating_set_generates(A):
    sub, inclusion = generated_subalgebra(A, generating_set(A))
    assert sorted(inclusion) == list(range(A.size))


def test_homomorphism_rejects_bad_table(catalog):
    SL2 = catalog.algebra("SL2")
    with pytest.raises(NotAHomomorphismError):
        Homomorphism(SL2, SL2, (1, 0))


def test_homomorphic_extension(catalog):
    Z2 = catalog.algebra("Z2")
    P = product(Z2, Z2)
    h = homomorphic_extension(P, Z2, [1, 2], [1, 1])
    assert h.table == (0, 1, 1, 0)
    with pytest.raises(ValueError):
        homomorphic_extension(P, Z2, [1], [1])


def test_product_pairs(catalog):
    SL2 = catalog.algebra("SL2")
    P = product(SL2, SL2)
    for a, b, c, d in itertools.product(range(2), repeat=4):
        assert P.apply("g", 2 * a + b, 2 * c + d) == 2 * min(a, c) + min(b, d)


@pytest.mark.parametrize(
    "variety,sizes",
    [
        ("semilattices", [1, 3, 7, 15]),
        ("exponent-2-groups", [2, 4, 8, 16]),
        ("left-zero", [1, 2, 3, 4]),
        ("trivial", [1, 1, 1, 1]),
    ],
)
def test_free_algebra_sizes(catalog, variety, sizes):
    V = catalog.variety(variety)
    assert [free_algebra(V, n).size for n in range(1, 5)] == sizes


def test_free_algebra_needs_generators(semilattices):
    with pytest.raises(ValueError):
        free_algebra(semilattices, 0)


def test_homs_out_of_free_algebra_are_assignments(catalog, semilattices, groups2):
    SL2, Z2 = catalog.algebra("SL2"), catalog.algebra("Z2")
    for n in range(1, 4):
        F = free_algebra(semilattices, n).underlying
        assert len(hom_set(F, SL2)) == 2**n
        assert len(epi_set(F, SL2)) == 2**n - 2
        G = free_algebra(groups2, n).underlying
        # linear functionals on a vector space over the two-element field
        assert len(hom_set(G, Z2)) == 2**n
        assert len(epi_set(G, Z2)) == 2**n - 1


def test_free_algebra_is_free(semilattices, catalog):
    F = free_algebra(semilattices, 3)
    C3 = catalog.algebra("C3")
    for images in itertools.product(range(3), repeat=3):
        assert homomorphic_extension(F.underlying, C3, F.generator_elements, images) is not None


def test_term_coordinates_agree(semilattices):
    F = free_algebra(semilattices, 2)
    for t in F.witness_terms:
        assert F.element_of_coordinates(F.term_coordinates(t)) == F.term_to_element(t)


def test_theta(semilattices, catalog):
    a, b = parse_term("g(x1,x2)", G2), parse_term("g(x2,g(x1,x1))", G2)
    assert theta_equiv(semilattices, 2, a, b)
    assert not theta_equiv(semilattices, 2, a, Var(0))
    assert nu(semilattices, 2, a) == nu(semilattices, 2, b)
    LZ = catalog.variety("left-zero")
    assert theta_equiv(LZ, 2, a, Var(0))


@pytest.mark.parametrize(
    "variety,member,expected",
    [
        ("semilattices", "SL2", True),
        ("semilattices", "C3", True),
        ("semilattices", "V3", True),
        ("semilattices", "LZ2", False),
        ("semilattices", "T1", True),
        ("left-zero", "LZ2", True),
        ("left-zero", "SL2", False),
        ("trivial", "T1", True),
        ("trivial", "SL2", False),
        ("trivial", "LZ2", False),
        ("exponent-2-groups", "Z2", True),
        ("semilattices", "Z2", False),
    ],
)
def test_membership(catalog, variety, member, expected):
    assert in_variety(catalog.variety(variety), catalog.algebra(member)) is expected


@given(binary_algebras())
def test_membership_matches_identities(A):
    comm = (parse_term("g(x1,x2)", G2), parse_term("g(x2,x1)", G2))
    idem = (parse_term("g(x1,x1)", G2), Var(0))
    assoc = (parse_term("g(g(x1,x2),x3)", G2), parse_term("g(x1,g(x2,x3))", G2))
    V = Variety.generated_by(FiniteAlgebra.from_functions(G2, 2, {"g": min}))
    expected = all(satisfies_identity(A, *eq) for eq in (comm, idem, assoc))
    assert in_variety(V, A) is expected


def test_variety_validation(catalog):
    with pytest.raises(ValueError):
        Variety(G2, ())
    with pytest.raises(ValueError):
        Variety(G2, (catalog.algebra("Z2"),))
    assert not catalog.variety("trivial").is_nontrivial()


def test_constant_symbols(catalog):
    Z2 = catalog.algebra("Z2")
    assert evaluate(Z2, App("e"), []) == 0
