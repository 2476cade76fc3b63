"""Exact lattice models of locally covariant free fields and their BV/BRST structure."""

__version__ = "0.1.0"

from .lattice import (AdmissibleEmbedding, CauchySlab, LatticeSpacetime, diamond,  # noqa: E402
                      disjoint_union, glue_embeddings, injections, is_admissible, slab,
                      translate)
from .green import TestFunction, causal_propagate, green_operators  # noqa: E402
from .algebra import Observable, commutator, multiply, phase_space, smeared_field  # noqa: E402
from .functor import morphism_action, tensor_join, tensor_split, timeslice_reduce  # noqa: E402
from .cauchy import (BackgroundPerturbation, germ_algebra, propagate,  # noqa: E402
                     rce_automorphism, rce_derivative, stress_energy_commutator)

__all__ = [
    "__version__", "AdmissibleEmbedding", "CauchySlab", "LatticeSpacetime", "diamond",
    "disjoint_union", "glue_embeddings", "injections", "is_admissible", "slab", "translate",
    "TestFunction", "causal_propagate", "green_operators", "Observable", "commutator",
    "multiply", "phase_space", "smeared_field", "morphism_action", "tensor_join",
    "tensor_split", "timeslice_reduce", "BackgroundPerturbation", "germ_algebra", "propagate",
    "rce_automorphism", "rce_derivative", "stress_energy_commutator",
]
