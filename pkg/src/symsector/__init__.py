"""Combinatorial and numerical shadows of sector covers of symmetric powers."""

from .boxcover import BoxParams, box_decompose, cover_witness, rho, rho_smoothed
from .catcomplex import ChainComplex, pushout_formula, semicohomology, totalize, trinion_model
from .clustering import ClusterDecomposition, finest_decomposition, greedy_cluster_decompose
from .config import (
    ClusteringRule,
    Configuration,
    InputError,
    InvariantViolation,
    make_clustering_rule,
    validate_rule,
)
from .homology import SurfaceDescriptor, derived_tensor, sym_homology_oracle, verify_gluing
from .nerve import build_cech_poset, corner_cut_pipeline, match_bar_cech
from .potentials import SmoothedPotential, eval_smoothed, phi_n, psh_check
from .regmax import reg_max

__all__ = [
    "BoxParams", "ChainComplex", "ClusterDecomposition", "ClusteringRule", "Configuration",
    "InputError", "InvariantViolation", "SmoothedPotential", "SurfaceDescriptor",
    "box_decompose", "build_cech_poset", "corner_cut_pipeline", "cover_witness",
    "derived_tensor", "eval_smoothed", "finest_decomposition", "greedy_cluster_decompose",
    "make_clustering_rule", "match_bar_cech", "phi_n", "psh_check", "pushout_formula",
    "reg_max", "rho", "rho_smoothed", "semicohomology", "sym_homology_oracle", "totalize",
    "trinion_model", "validate_rule", "verify_gluing",
]
