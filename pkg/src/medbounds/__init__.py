"""Partial identification for separable and natural mediation effects."""

from .bootstrap import CiReport, bootstrap_ci
from .closed_forms import (
    BoundFamily,
    closed_bound_expr,
    family_bounds,
    frechet_nde000,
    gabriel_sde2_bounds,
    gabriel_sie2_bounds,
    intersect,
    rr_frechet_nde1,
    sde1_bounds,
    sie1_bounds,
    tchetgen_nde2,
)
from .dists import (
    CountTable,
    Estimand,
    EstimandKind,
    Interval,
    ObservedDistI,
    ObservedDistII,
    dist_from_counts,
    marginalize_L,
    mediation_point_estimate,
    random_dist1,
    random_dist2,
    read_counts_csv,
    sde,
    sie,
    te,
    total_effect,
    write_counts_csv,
)
from .exprs import BoundExpr, LinearExpr
from .oracle import (
    Scm,
    SuiteReport,
    Violation,
    containment_suite,
    figure_s1_experiment,
    figure_s1_orderings,
    observed_of,
    sample_coupling,
    sample_scm,
    sharpness_suite,
    true_effect,
    validity_suite,
    write_figure_s1_csv,
    write_records_csv,
)
from .polytope import (
    ConstraintSystem,
    build_system,
    coupling_bounds,
    evaluate,
    numeric_bounds,
    symbolic_bounds,
)

__version__ = "0.1.0"

__all__ = [
    "BoundExpr",
    "BoundFamily",
    "CiReport",
    "ConstraintSystem",
    "CountTable",
    "Estimand",
    "EstimandKind",
    "Interval",
    "LinearExpr",
    "ObservedDistI",
    "ObservedDistII",
    "Scm",
    "SuiteReport",
    "Violation",
    "bootstrap_ci",
    "build_system",
    "closed_bound_expr",
    "containment_suite",
    "coupling_bounds",
    "dist_from_counts",
    "evaluate",
    "family_bounds",
    "figure_s1_experiment",
    "figure_s1_orderings",
    "frechet_nde000",
    "gabriel_sde2_bounds",
    "gabriel_sie2_bounds",
    "intersect",
    "marginalize_L",
    "mediation_point_estimate",
    "numeric_bounds",
    "observed_of",
    "random_dist1",
    "random_dist2",
    "read_counts_csv",
    "rr_frechet_nde1",
    "sample_coupling",
    "sample_scm",
    "sde",
    "sde1_bounds",
    "sharpness_suite",
    "sie",
    "sie1_bounds",
    "symbolic_bounds",
    "tchetgen_nde2",
    "te",
    "total_effect",
    "true_effect",
    "validity_suite",
    "write_counts_csv",
    "write_figure_s1_csv",
    "write_records_csv",
]
