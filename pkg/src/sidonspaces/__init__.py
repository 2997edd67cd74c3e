"""Sidon spaces over finite fields: towers, linearized polynomials,
constructions, semilinear equivalence and cyclic orbit codes."""

__version__ = "0.1.0"

from .errors import BudgetExceeded, InputError, PreconditionError, ReducibleError, SidonError
from .field_tower import FieldElement, FieldTower, build_tower, tower_from_dict
from .fq_linear import Ambient, FqSubspace, intersect, scale, span
from .linpoly import LinearizedPoly, graph_subspace, is_scattered, subspace_polynomial
from .sidon_core import SidonVerdict, check_pair_property, check_sidon, is_sidon_polynomial, v_subspace
from .constructions import Construction, build_coset_form
from .equivalence import EquivWitness, are_equivalent_bruteforce, are_equivalent_coset_form, classify_inequivalent
from .orbit_codes import OrbitCode, build_orbit, export_codebook, import_codebook, subspace_distance

__all__ = [
    "Ambient", "BudgetExceeded", "Construction", "EquivWitness", "FieldElement", "FieldTower", "FqSubspace",
    "InputError", "LinearizedPoly", "OrbitCode", "PreconditionError", "ReducibleError", "SidonError",
    "SidonVerdict", "are_equivalent_bruteforce", "are_equivalent_coset_form", "build_coset_form", "build_orbit",
    "build_tower", "check_pair_property", "check_sidon", "classify_inequivalent", "export_codebook",
    "graph_subspace", "import_codebook", "intersect", "is_scattered", "is_sidon_polynomial", "scale", "span",
    "subspace_distance", "subspace_polynomial", "tower_from_dict", "v_subspace",
]
