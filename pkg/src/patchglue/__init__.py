"""Real toric degenerations: strata, glued fibre models and combinatorial patchworking."""
from .polyhedra import LatticePolyhedron, Subdivision, validate_subdivision
from .degeneration import check_strongly_unimodular, classify_positive_count, cone_over
from .strata import chi_blowup_abstract, chi_formula, enumerate_strata
from .glue import build_glued_complex, chi_direct, surface_type, topology_report
from .patchwork import build_patchwork, curve_report, harnack_signs, numeric_oracle, regular_subdivision

__all__ = [
    "LatticePolyhedron", "Subdivision", "validate_subdivision",
    "check_strongly_unimodular", "classify_positive_count", "cone_over",
    "chi_blowup_abstract", "chi_formula", "enumerate_strata",
    "build_glued_complex", "chi_direct", "surface_type", "topology_report",
    "build_patchwork", "curve_report", "harnack_signs", "numeric_oracle", "regular_subdivision",
]
