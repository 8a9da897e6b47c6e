"""Sparse subspace clustering with tensor-product-graph diffusion.

The pipeline: solve an l1 self-expressive program for the coefficient
matrix of a data matrix, symmetrize it into an affinity graph, diffuse
the affinity along the graph's own tensor-product structure, and
spectrally cluster the result.  An evaluation harness compares the raw
and diffused affinities on synthetic union-of-subspaces data under
column corruption.
"""

from .dataset import (
    LabeledDataset,
    SyntheticSpec,
    corrupt,
    generate_synthetic,
    load_labels,
    load_matrix,
    save_labels,
    save_matrix,
)
from .diffusion import (
    DiffusionConfig,
    accumulate_diffuse,
    diffuse_affinity,
    dssc_affinity,
    knn_sparsify,
    lcdp_diffuse,
    normalize_substochastic,
    pagerank_diffuse,
    power_diffuse,
    run_diffusion,
    tpg_closed_form,
    tpg_diffuse,
    transition_matrix,
)
from .errors import (
    DegenerateGraphError,
    DimensionError,
    DivergenceError,
    DsscError,
    MatrixFormatError,
    MatrixParseError,
    ParameterError,
)
from .evaluation import (
    RunRecord,
    SweepReport,
    clustering_error,
    run_corruption_sweep,
    write_sweep_details,
    write_sweep_summary,
)
from .graph import AffinityGraph, TransitionMatrix
from .sparse_coder import (
    CoefficientMatrix,
    SscConfig,
    affinity_from_coefficients,
    base_weight,
    self_expression_objective,
    solve_ssc,
)
from .spectral import (
    Partition,
    SpectralConfig,
    WalkDiagnostics,
    ncut,
    partition_transition_prob,
    spectral_cluster,
    stationary_distribution,
    walk_diagnostics,
)

__version__ = "0.1.0"

__all__ = [
    "AffinityGraph",
    "CoefficientMatrix",
    "DegenerateGraphError",
    "DiffusionConfig",
    "DimensionError",
    "DivergenceError",
    "DsscError",
    "LabeledDataset",
    "MatrixFormatError",
    "MatrixParseError",
    "ParameterError",
    "Partition",
    "RunRecord",
    "SpectralConfig",
    "SscConfig",
    "SweepReport",
    "SyntheticSpec",
    "TransitionMatrix",
    "WalkDiagnostics",
    "accumulate_diffuse",
    "affinity_from_coefficients",
    "base_weight",
    "clustering_error",
    "corrupt",
    "diffuse_affinity",
    "dssc_affinity",
    "generate_synthetic",
    "knn_sparsify",
    "lcdp_diffuse",
    "load_labels",
    "load_matrix",
    "ncut",
    "normalize_substochastic",
    "pagerank_diffuse",
    "partition_transition_prob",
    "power_diffuse",
    "run_diffusion",
    "save_labels",
    "save_matrix",
    "self_expression_objective",
    "solve_ssc",
    "spectral_cluster",
    "stationary_distribution",
    "tpg_closed_form",
    "tpg_diffuse",
    "transition_matrix",
    "walk_diagnostics",
    "write_sweep_details",
    "write_sweep_summary",
    "__version__",
]
