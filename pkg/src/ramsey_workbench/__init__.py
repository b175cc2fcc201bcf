"""Finite-scale workbench for dual Ramsey theory of ordered algebras.

Submodules:
    chains           finite chains and rigid surjections
    terms            signatures, terms, shapes and the neat well-ordering
    algebras         finite algebras, homomorphisms, free algebras of varieties
    ordered          ordered algebras, rigid epimorphisms, ordered free algebras
    ramsey           partition arrows, witness search and coloring transport
    catalog, cli     file formats, shipped catalog and the command line
"""

from ramsey_workbench.chains import (
    Chain,
    ChainMap,
    compose,
    dual_embedding,
    enumerate_rigid_surjections,
    induced_order,
    initial_segment_criterion,
    is_rigid_surjection,
    lex_power,
    lex_product_map,
    ordinal_sum,
)
from ramsey_workbench.terms import Signature, Term, Var, App, neat_compare, enumerate_neat
from ramsey_workbench.algebras import FiniteAlgebra, Variety, free_algebra
from ramsey_workbench.ordered import OrderedAlgebra, RigidEpimorphism, ordered_free
from ramsey_workbench.ramsey import check_arrow, gr_witness_search, segment_induction, transport_arrow
from ramsey_workbench.catalog import load_catalog

__version__ = "0.1.0"

__all__ = [
    "Chain",
    "ChainMap",
    "compose",
    "dual_embedding",
    "enumerate_rigid_surjections",
    "induced_order",
    "initial_segment_criterion",
    "is_rigid_surjection",
    "lex_power",
    "lex_product_map",
    "ordinal_sum",
    "Signature",
    "Term",
    "Var",
    "App",
    "neat_compare",
    "enumerate_neat",
    "FiniteAlgebra",
    "Variety",
    "free_algebra",
    "OrderedAlgebra",
    "RigidEpimorphism",
    "ordered_free",
    "check_arrow",
    "gr_witness_search",
    "segment_induction",
    "transport_arrow",
    "load_catalog",
]
