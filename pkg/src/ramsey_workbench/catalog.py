"""Named collections of signatures, algebras, varieties and ordered algebras.

A catalog lives in a directory of ``*.json`` files.  Each file holds
``{"entries": [...]}`` where every entry has a ``kind`` (``signature``,
``algebra``, ``variety`` or ``ordered``) and a ``name``.  Algebras refer
to signatures by name or carry one inline; varieties and ordered algebras
refer to algebras by name.  Files are read in sorted order and entries are
validated as they are built.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ramsey_workbench.algebras import FiniteAlgebra, Variety
from ramsey_workbench.ordered import OrderedAlgebra
from ramsey_workbench.terms import Signature

ENV_VAR = "RAMSEY_WORKBENCH_CATALOG"
KINDS = ("signature", "algebra", "variety", "ordered")


class CatalogError(ValueError):
    pass


def shipped_catalog_path() -> Path:
    return Path(str(resources.files("ramsey_workbench") / "data" / "catalog"))


def default_catalog_path() -> Path:
    env = os.environ.get(ENV_VAR)
    return Path(env) if env else shipped_catalog_path()


@dataclass
class Catalog:
    signatures: dict[str, Signature] = field(default_factory=dict)
    algebras: dict[str, FiniteAlgebra] = field(default_factory=dict)
    varieties: dict[str, Variety] = field(default_factory=dict)
    ordered: dict[str, OrderedAlgebra] = field(default_factory=dict)

    def signature(self, spec: str) -> Signature:
        """A signature by catalog name, or written inline as ``name:arity,...``."""
        if spec in self.signatures:
            return self.signatures[spec]
        if ":" in spec:
            try:
                pairs = [part.split(":") for part in spec.split(",") if part]
                return Signature(tuple((name.strip(), int(arity)) for name, arity in pairs))
            except ValueError as exc:
                raise CatalogError(f"cannot parse signature {spec!r}: {exc}") from None
        raise CatalogError(f"unknown signature {spec!r}")

    def _get(self, table: dict, kind: str, name: str):
        try:
            return table[name]
        except KeyError:
            raise CatalogError(f"unknown {kind} {name!r}; known: {', '.join(sorted(table)) or 'none'}") from None

    def algebra(self, name: str) -> FiniteAlgebra:
        return self._get(self.algebras, "algebra", name)

    def variety(self, name: str) -> Variety:
        return self._get(self.varieties, "variety", name)

    def ordered_algebra(self, name: str) -> OrderedAlgebra:
        return self._get(self.ordered, "ordered algebra", name)

    def add(self, entry: dict) -> None:
        kind, name = entry.get("kind"), entry.get("name")
        if kind not in KINDS or not name:
            raise CatalogError(f"entry needs a kind in {KINDS} and a name: {entry!r}")
        try:
            if kind == "signature":
                self.signatures[name] = Signature.from_json(entry)
            elif kind == "algebra":
                sig = entry["signature"]
                sig = self.signature(sig) if isinstance(sig, str) else Signature.from_json(sig)
                self.algebras[name] = FiniteAlgebra(sig, entry["size"], entry["tables"], name=name)
            elif kind == "variety":
                gens = tuple(self.algebra(g) for g in entry["generators"])
                self.varieties[name] = Variety.generated_by(*gens, name=name)
            else:
                self.ordered[name] = OrderedAlgebra(self.algebra(entry["algebra"]), tuple(entry["order"]))
        except CatalogError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise CatalogError(f"invalid {kind} {name!r}: {exc}") from None

    def entries(self) -> list[dict]:
        out: list[dict] = []
        for name, sig in self.signatures.items():
            out.append({"kind": "signature", "name": name, **sig.to_json()})
        sig_names = {sig: name for name, sig in self.signatures.items()}
        for name, A in self.algebras.items():
            sig = sig_names.get(A.signature, A.signature.to_json())
            out.append({"kind": "algebra", "name": name, "signature": sig, "size": A.size, "tables": A.to_json()["tables"]})
        alg_names = {id(A): name for name, A in self.algebras.items()}
        for name, V in self.varieties.items():
            out.append({"kind": "variety", "name": name, "generators": [self._name_of(alg_names, g) for g in V.generators]})
        for name, O in self.ordered.items():
            out.append({"kind": "ordered", "name": name, "algebra": self._name_of(alg_names, O.algebra), "order": list(O.order)})
        return out

    def _name_of(self, alg_names: dict, A: FiniteAlgebra) -> str:
        if id(A) in alg_names:
            return alg_names[id(A)]
        for name, B in self.algebras.items():
            if A == B:
                return name
        raise CatalogError(f"{A!r} is not in the catalog")

    def to_json(self) -> dict:
        return {"entries": self.entries()}

    @classmethod
    def from_json(cls, data: dict) -> Catalog:
        cat = cls()
        for entry in data["entries"]:
            cat.add(entry)
        return cat

    def save(self, directory: str | Path, filename: str = "catalog.json") -> Path:
        path = Path(directory)
        path.mkdir(parents=True, exist_ok=True)
        target = path / filename
        target.write_text(json.dumps(self.to_json(), indent=2) + "\n")
        return target

    def __eq__(self, other):
        if not isinstance(other, Catalog):
            return NotImplemented
        return (
            self.signatures == other.signatures
            and self.algebras == other.algebras
            and self.varieties == other.varieties
            and self.ordered == other.ordered
        )


def load_catalog(directory: str | Path | None = None) -> Catalog:
    path = Path(directory) if directory is not None else default_catalog_path()
    if not path.is_dir():
        raise CatalogError(f"catalog directory {path} does not exist")
    files = sorted(path.glob("*.json"))
    # signatures first, then algebras, so files may be split by kind in any order
    entries = []
    for f in files:
        try:
            data = json.loads(f.read_text())
        except json.JSONDecodeError as exc:
            raise CatalogError(f"{f.name}: {exc}") from None
        entries.extend(data.get("entries", []))
    cat = Catalog()
    for kind in KINDS:
        for entry in entries:
            if entry.get("kind") == kind:
                cat.add(entry)
    unknown = [e for e in entries if e.get("kind") not in KINDS]
    if unknown:
        raise CatalogError(f"entries of unknown kind: {unknown[:3]!r}")
    return cat
