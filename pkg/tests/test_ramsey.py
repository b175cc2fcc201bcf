import itertools
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ramsey_workbench.chains import ChainMap, enumerate_rigid_surjections
from ramsey_workbench.ordered import expansions, ordered_free, rigid_epi_set
from ramsey_workbench.ramsey import (
    DIRECT,
    FAILS,
    HOLDS,
    UNKNOWN,
    ArrowCertificate,
    Coloring,
    build_instance,
    check_arrow,
    check_PA_instance,
    check_phi_homomorphism,
    expansion_sum_bound,
    find_witness,
    get_category,
    going_up_check,
    going_up_report,
    gr_witness_search,
    morphism_key,
    revalidate,
    segment_induction,
    small_degree_bounds,
    transport_arrow,
    transport_phi,
    validate_transported,
)
from ramsey_workbench.terms import enumerate_neat


def rigid_tables(n, k):
    """Rigid surjections by the fibre-minimum definition, filtered from all maps."""
    out = []
    for t in itertools.product(range(k), repeat=n):
        if set(t) == set(range(k)):
            minima = [t.index(b) for b in range(k)]
            if minima == sorted(minima):
                out.append(t)
    return out


def arrow_by_brute_force(n, b, a, k, t):
    colored = rigid_tables(n, a)
    middle = rigid_tables(b, a)
    ws = rigid_tables(n, b)
    index = {x: i for i, x in enumerate(colored)}
    sets = [{index[tuple(f[y] for y in w)] for f in middle} for w in ws]
    for colors in itertools.product(range(k), repeat=len(colored)):
        if all(len({colors[i] for i in s}) > t for s in sets):
            return False
    return True


SMALL = [
    (n, b, a)
    for n in range(1, 6)
    for b in range(1, n + 1)
    for a in range(1, b + 1)
    if len(rigid_tables(n, a)) <= 16
]


@pytest.mark.parametrize("n,b,a", SMALL)
def test_chain_arrow_matches_brute_force(n, b, a):
    cert = check_arrow(n, b, a, 2, 1)
    assert cert.verdict == (HOLDS if arrow_by_brute_force(n, b, a, 2, 1) else FAILS)
    assert revalidate(cert, n, b, a)


def test_three_colors():
    for n in range(2, 5):
        cert = check_arrow(n, 2, 1, 3, 1)
        assert cert.verdict == (HOLDS if arrow_by_brute_force(n, 2, 1, 3, 1) else FAILS)


def test_two_segments_two_colors_fails_at_three():
    cert = check_arrow(3, 3, 2, 2)
    assert cert.verdict == FAILS
    assert cert.refuting_coloring.colors == (0, 0, 1)
    assert revalidate(cert, 3, 3, 2)


def test_single_composite_holds_structurally():
    cert = check_arrow(3, 2, 2, 2)
    assert cert.verdict == HOLDS and cert.mode == "structural"


def test_no_witness_fails_structurally():
    cert = check_arrow(2, 3, 2, 2)
    assert cert.verdict == FAILS and cert.mode == "structural"


@pytest.mark.parametrize("a,b,expected", [(2, 2, 2), (1, 2, 2), (2, 3, 6)])
def test_smallest_chain_witness(a, b, expected):
    res = gr_witness_search(a, b, 2, 7)
    assert res.n == expected and res.minimal
    assert revalidate(res.certificate, res.n, b, a)
    assert [row["verdict"] for row in res.trail[:-1]] == [FAILS] * (len(res.trail) - 1)


def test_smallest_chain_witness_agrees_with_plain_backtracking():
    from ramsey_workbench.suite import plain_split_exists

    assert [plain_split_exists(n, 3, 2, 2) for n in range(3, 7)] == [True, True, True, False]


def test_gr_search_bounds():
    assert gr_witness_search(2, 3, 2, 5).n is None
    with pytest.raises(ValueError):
        gr_witness_search(3, 2, 2, 5)
    with pytest.raises(ValueError):
        gr_witness_search(1, 2, 1, 5)


def test_randomized_mode_reports_unknown_or_fails():
    cert = check_arrow(8, 3, 2, 2, exhaustive_limit=10, flips=50)
    assert cert.verdict in (UNKNOWN, FAILS)
    if cert.verdict == UNKNOWN:
        assert "budget" in cert.message


def test_exhaustive_budget_unknown():
    cert = check_arrow(7, 3, 2, 2, budget=1)
    assert cert.verdict == UNKNOWN


def test_given_coloring():
    keys = build_instance(3, 2, 1, "chains-rs").colored_keys
    col = Coloring.constant(keys, 2)
    cert = check_arrow(3, 2, 1, 2, coloring=col)
    assert cert.verdict == HOLDS and cert.mode == "given-coloring"
    assert revalidate(cert, 3, 2, 1)
    ref = check_arrow(3, 3, 2, 2, coloring=[0, 0, 1])
    assert ref.verdict == FAILS
    assert find_witness(3, 3, 2, [0, 0, 1]) is None
    assert find_witness(3, 3, 2, [0, 0, 0]) == (0, 1, 2)


def test_given_coloring_length_checked():
    with pytest.raises(ValueError):
        check_arrow(3, 3, 2, 2, coloring=[0, 1])


def test_direct_arrow_among_chains():
    # maps 3 -> 1: a single morphism, so every coloring is monochromatic on it
    cert = check_arrow(1, 2, 3, 2, direction=DIRECT)
    assert cert.verdict == HOLDS
    assert revalidate(cert, 1, 2, 3)
    # the only witness 2 -> 2 is the identity, whose composites are all three maps 3 -> 2
    cert = check_arrow(2, 2, 3, 2, direction=DIRECT)
    assert cert.verdict == FAILS
    assert len(set(cert.refuting_coloring.colors)) == 2
    assert revalidate(cert, 2, 2, 3)


def test_bad_arguments():
    with pytest.raises(ValueError):
        check_arrow(3, 2, 1, 0)
    with pytest.raises(ValueError):
        get_category("posets")
    with pytest.raises(ValueError):
        build_instance(3, 2, 1, direction="sideways")


def test_revalidate_catches_tampering():
    cert = check_arrow(3, 3, 2, 2)
    bad = Coloring(2, cert.refuting_coloring.keys, (0, 0, 0))
    tampered = ArrowCertificate(cert.query, FAILS, cert.mode, cert.colored, refuting_coloring=bad)
    assert not revalidate(tampered, 3, 3, 2)


@pytest.mark.parametrize("args", [(3, 3, 2, 2), (6, 3, 2, 2), (3, 2, 2, 2), (5, 3, 2, 2)])
def test_certificate_json_round_trip(args):
    cert = check_arrow(*args, exhaustive_limit=None)
    back = ArrowCertificate.from_json(json.loads(json.dumps(cert.to_json())))
    assert back.to_json() == cert.to_json()
    assert revalidate(back, *args[:3])


def test_coloring_validation_and_json():
    keys = [morphism_key(2, 1, (0, 0)), morphism_key(2, 2, (0, 1))]
    col = Coloring(2, keys, (1, 0))
    assert Coloring.from_json(col.to_json()) == col
    assert col.used() == {0, 1}
    with pytest.raises(ValueError):
        Coloring(2, keys, (2, 0))
    with pytest.raises(ValueError):
        Coloring(2, keys + keys[:1], (0, 0, 0))


def test_algebra_categories(catalog):
    SL2, C3 = catalog.ordered_algebra("SL2<"), catalog.ordered_algebra("C3<")
    cert = check_arrow(C3, SL2, SL2, 2, category="ordered-algebras-re")
    assert cert.verdict == HOLDS
    assert revalidate(cert, C3, SL2, SL2)
    # mismatched signatures give empty hom-sets rather than errors
    Z2 = catalog.ordered_algebra("Z2<")
    assert get_category("ordered-algebras-re").hom(Z2, SL2) == []
    assert get_category("algebras-epi").hom(catalog.algebra("Z2"), catalog.algebra("SL2")) == []


@pytest.mark.parametrize("C,D,B,A", [(6, 7, 3, 2), (3, 4, 2, 2), (3, 4, 3, 2), (2, 3, 2, 1)])
def test_going_up(C, D, B, A):
    report = going_up_report(C, D, B, A, 2)
    assert report.consistent
    if report.verdict_at_C == HOLDS:
        assert report.verdict_at_D == HOLDS and report.pushed > 0
    assert going_up_check(C, D, B, A, 2)


def test_going_up_needs_connecting_map():
    with pytest.raises(ValueError):
        going_up_report(2, 1, 1, 1, 2)


@st.composite
def pa_instances(draw, catalog):
    name_B = draw(st.sampled_from(["C3<", "C3>", "V3<", "SL2<", "SL2>"]))
    B = catalog.ordered_algebra(name_B)
    targets = [catalog.ordered_algebra(x) for x in ["SL2<", "SL2>", "C3<", "C3>", "V3<", "T1"]]
    fs = [f for A in targets if A.signature == B.signature for f in rigid_epi_set(B, A)]
    f = draw(st.sampled_from(fs))
    n = draw(st.integers(B.size, B.size + 2))
    u = draw(st.sampled_from(enumerate_rigid_surjections(n, B.size)))
    return u, f


@given(st.data())
def test_pre_adjunction_law(data):
    from ramsey_workbench.catalog import load_catalog

    u, f = data.draw(pa_instances(load_catalog()))
    assert check_PA_instance(u, f, 8)
    assert check_phi_homomorphism(transport_phi(u, f.domain), 8)


def test_phi_requires_rigid(catalog):
    with pytest.raises(ValueError):
        transport_phi(ChainMap(2, 2, (1, 0)), catalog.ordered_algebra("SL2<"))


def test_phi_restricts_to_free_algebra(catalog, semilattices):
    B = catalog.ordered_algebra("C3<")
    u = ChainMap(4, 3, (0, 1, 1, 2))
    phi = transport_phi(u, B)
    epi = phi.epi(semilattices)
    F = ordered_free(semilattices, 4)
    for t in enumerate_neat(semilattices.signature, 4, 8):
        assert epi(F.nu(t)) == phi(t)


def test_transport_trivial_instance(catalog, semilattices):
    SL2 = catalog.ordered_algebra("SL2<")
    chain = gr_witness_search(2, 2, 2, 4).certificate
    for seed in range(5):
        cert = transport_arrow(chain, SL2, SL2, semilattices, seed=seed)
        assert cert.verdict == HOLDS
        assert validate_transported(cert, semilattices, SL2, SL2)


def test_transport_nontrivial_instance(catalog, semilattices):
    A, B = catalog.ordered_algebra("SL2>"), catalog.ordered_algebra("C3>")
    chain = check_arrow(6, 3, 2, 2, exhaustive_limit=None)
    cert = transport_arrow(chain, A, B, semilattices, seed=0)
    assert cert.verdict == HOLDS and cert.stats["free_size"] == 63
    assert [s["step"] for s in cert.trace] == ["pull back", "chain witness", "push", "validate"]
    assert validate_transported(cert, semilattices, A, B)


def test_transport_rejects_wrong_certificate(catalog, semilattices):
    SL2 = catalog.ordered_algebra("SL2<")
    with pytest.raises(ValueError):
        transport_arrow(check_arrow(3, 3, 2, 2), SL2, SL2, semilattices)
    with pytest.raises(ValueError):
        transport_arrow(check_arrow(6, 3, 2, 2, exhaustive_limit=None), SL2, SL2, semilattices)


@pytest.mark.parametrize("seed", range(3))
def test_segment_induction(catalog, semilattices, seed):
    A = catalog.ordered_algebra("SL2<")
    res = segment_induction(A, semilattices, 6, M=3, seed=seed)
    assert res.verdict == HOLDS and res.colors_used <= 2 and res.claim4
    assert json.loads(json.dumps(res.to_json()))["verdict"] == HOLDS


def test_segment_induction_constant_coloring(catalog, semilattices):
    A = catalog.ordered_algebra("SL2<")
    F = ordered_free(semilattices, 6)
    keys = [morphism_key(F.size, A.size, h.table) for h in rigid_epi_set(F.ordered, A)]
    res = segment_induction(A, semilattices, 6, coloring=Coloring.constant(keys, 2), M=3)
    assert res.verdict == HOLDS and res.colors_used == 1


def test_segment_induction_single_element(catalog, semilattices):
    res = segment_induction(catalog.ordered_algebra("T1"), semilattices, 2)
    assert res.verdict == HOLDS and res.colors_used == 1


def test_segment_induction_budget(catalog, semilattices):
    res = segment_induction(catalog.ordered_algebra("C3<"), semilattices, 5, M=4, budget=20)
    assert res.verdict == UNKNOWN and res.failing_step is not None


def test_segment_induction_arguments(catalog, semilattices):
    A = catalog.ordered_algebra("C3<")
    with pytest.raises(ValueError):
        segment_induction(A, semilattices, 4, M=2)
    with pytest.raises(ValueError):
        segment_induction(A, semilattices, 3, M=4)


@pytest.mark.parametrize(
    "name,expected",
    [
        ("LZ2", (2, 2, 2, 2)),
        ("V3", (2, 2, 2, 2)),
        ("SL2", (1, 2, 2, 1)),
        ("Z2", (1, 1, 1, 1)),
        ("C3", (1, 1, 1, 1)),
        ("T1", (1, 1, 1, 1)),
    ],
)
def test_degree_bounds(catalog, name, expected):
    algebras = [catalog.algebra(x) for x in sorted(catalog.algebras)]
    d = small_degree_bounds(catalog.algebra(name), algebras, category="algebras-epi")
    assert (d.lower, d.upper, d.catalog_lower, d.automorphisms) == expected


def test_degree_lower_bound_on_chains():
    d = small_degree_bounds(2, list(range(1, 6)))
    assert d.lower == 1 and d.automorphisms == 1


@pytest.mark.parametrize("name", ["SL2", "C3", "V3", "LZ2", "Z2", "T1"])
def test_expansion_sum_bound(catalog, name):
    A = catalog.algebra(name)
    ones = {E: 1 for E in expansions(A)}
    assert expansion_sum_bound(A, ones) == len(list(itertools.permutations(range(A.size))))
    by_order = {E.order: 2 for E in expansions(A)}
    assert expansion_sum_bound(A, by_order) == 2 * len(ones)


def test_expansion_sum_bound_missing(catalog):
    with pytest.raises(KeyError):
        expansion_sum_bound(catalog.algebra("C3"), {(0, 1, 2): 1})
