"""Exact ensemble-averaged replica evolution for Brownian GUE dynamics.

Graphs (Kronecker-delta wirings of ``n`` forward and ``n`` backward contours)
are grouped into categories closed under the averaged generator ``L``.  The
generator then becomes a small matrix ``M`` over categories, and the averaged
evolution ``E[U^n (x) U*^n]`` is ``exp(-iEt) sum_a f_a(t) F_a``.
"""
from .category import Basis, Category, classify_graph, discover, seed_categories, standard_basis
from .errors import ConsistencyError, DomainError, ReplicaError, ResourceError, SizeError
from .evolution import SpectrumE, assemble_U, series_check, solve_f, spectrum_MJ
from .graph import Graph, canonicalize, compose, count_graphs, enumerate_graphs, to_dense
from .liouvillian import act_L, act_on_category, build_M
from .observable import contract_graph, correlator, multi_time_correlator
from .oracle import build_dense, check_unitary_symmetry, dense_expm
from .perm import Perm

__all__ = [
    "Basis",
    "Category",
    "ConsistencyError",
    "DomainError",
    "Graph",
    "Perm",
    "ReplicaError",
    "ResourceError",
    "SizeError",
    "SpectrumE",
    "act_L",
    "act_on_category",
    "assemble_U",
    "build_M",
    "build_dense",
    "canonicalize",
    "check_unitary_symmetry",
    "classify_graph",
    "compose",
    "contract_graph",
    "correlator",
    "count_graphs",
    "dense_expm",
    "discover",
    "enumerate_graphs",
    "multi_time_correlator",
    "seed_categories",
    "series_check",
    "solve_f",
    "spectrum_MJ",
    "standard_basis",
    "to_dense",
]
