import json

import pytest

from ramsey_workbench.algebras import in_variety
from ramsey_workbench.catalog import ENV_VAR, Catalog, CatalogError, load_catalog, shipped_catalog_path
from ramsey_workbench.terms import Signature


def test_shipped_contents(catalog):
    assert set(catalog.algebras) == {"SL2", "C3", "V3", "LZ2", "T1", "Z2"}
    assert set(catalog.varieties) == {"semilattices", "left-zero", "exponent-2-groups", "trivial"}
    assert len(catalog.ordered) == 8


def test_generators_belong_to_their_varieties(catalog):
    for V in catalog.varieties.values():
        for A in V.generators:
            assert in_variety(V, A)


def test_save_and_reload(tmp_path, catalog):
    catalog.save(tmp_path)
    assert load_catalog(tmp_path) == catalog


def test_json_round_trip(catalog):
    assert Catalog.from_json(json.loads(json.dumps(catalog.to_json()))) == catalog


def test_environment_override(tmp_path, monkeypatch, catalog):
    small = Catalog()
    small.add({"kind": "signature", "name": "g2", "symbols": [{"name": "g", "arity": 2}]})
    small.add({"kind": "algebra", "name": "SL2", "signature": "g2", "size": 2, "tables": {"g": [[0, 0], [0, 1]]}})
    small.save(tmp_path)
    monkeypatch.setenv(ENV_VAR, str(tmp_path))
    assert set(load_catalog().algebras) == {"SL2"}
    monkeypatch.delenv(ENV_VAR)
    assert load_catalog() == catalog


def test_inline_signature(catalog):
    assert catalog.signature("g:2,c:0") == Signature.of(c=0, g=2)
    with pytest.raises(CatalogError):
        catalog.signature("g:two")
    with pytest.raises(CatalogError):
        catalog.signature("nosuch")


def test_unknown_names_list_known_ones(catalog):
    with pytest.raises(CatalogError, match="semilattices"):
        catalog.variety("lattices")
    with pytest.raises(CatalogError):
        catalog.ordered_algebra("SL3<")


@pytest.mark.parametrize(
    "entry",
    [
        {"kind": "monoid", "name": "x"},
        {"kind": "algebra", "name": "bad", "signature": "g2", "size": 2, "tables": {"g": [[0, 3], [0, 1]]}},
        {"kind": "ordered", "name": "bad", "algebra": "SL2", "order": [0, 0]},
        {"kind": "variety", "name": "bad", "generators": ["missing"]},
    ],
)
def test_invalid_entries(catalog, entry):
    cat = Catalog.from_json(catalog.to_json())
    with pytest.raises(CatalogError):
        cat.add(entry)


def test_missing_directory(tmp_path):
    with pytest.raises(CatalogError):
        load_catalog(tmp_path / "absent")


def test_malformed_file(tmp_path):
    (tmp_path / "broken.json").write_text("{")
    with pytest.raises(CatalogError):
        load_catalog(tmp_path)


def test_shipped_path_exists():
    assert (shipped_catalog_path() / "algebras.json").is_file()
