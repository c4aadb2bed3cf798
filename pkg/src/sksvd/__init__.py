"""Streaming sketched SVD: maintain a compressive linear sketch of a tall
data matrix (or a streaming graph's incidence matrix) under turnstile
updates, recover singular values and right singular vectors from the
sketch alone, and certify the estimates against relative-error envelopes
using a dense oracle."""

from .bounds import (ErrorCertificate, IndexRecord, SpectrumGaps, certify,
                     eigenvalue_envelope_check, min_over_c_denominator,
                     relative_gaps, value_envelope, vector_error_bound)
from .errors import (BudgetExceededError, CorruptStateError,
                     IncompatibleSketchError, SketchError, StreamFormatError)
from .graphs import (EdgeUpdate, GraphOracle, GraphSketch, apply_edge_update,
                     edge_row_index, graph_config, graph_spectrum,
                     iter_edge_updates, new_graph_sketch, oracle_laplacian,
                     pair_count)
from .jl import (JlFamily, SketchConfig, concentration_exponent,
                 materialize_phi, phi_column, required_measurements)
from .oracle import (OracleDecomposition, PerturbationDiagnostics, exact_svd,
                     materialize_X, perturbation_diagnostics,
                     subspace_embedding_check, weyl_check)
from .spectral import (SpectralEstimate, align_signs, eigen_estimates,
                       numerical_rank, sketched_svd)
from .turnstile import (MatrixUpdate, SketchState, apply_update, deserialize,
                        iter_updates, merge, new_sketch, serialize, snapshot)

__version__ = "0.1.0"

__all__ = [
    "JlFamily", "SketchConfig", "concentration_exponent", "required_measurements",
    "phi_column", "materialize_phi",
    "MatrixUpdate", "SketchState", "new_sketch", "apply_update", "merge",
    "snapshot", "serialize", "deserialize", "iter_updates",
    "SpectralEstimate", "sketched_svd", "numerical_rank", "align_signs",
    "eigen_estimates",
    "ErrorCertificate", "IndexRecord", "SpectrumGaps", "value_envelope",
    "min_over_c_denominator", "vector_error_bound", "eigenvalue_envelope_check",
    "certify", "relative_gaps",
    "EdgeUpdate", "GraphSketch", "GraphOracle", "edge_row_index",
    "apply_edge_update", "graph_spectrum", "oracle_laplacian", "graph_config",
    "new_graph_sketch", "pair_count", "iter_edge_updates",
    "OracleDecomposition", "PerturbationDiagnostics", "materialize_X",
    "exact_svd", "perturbation_diagnostics", "weyl_check",
    "subspace_embedding_check",
    "SketchError", "BudgetExceededError", "IncompatibleSketchError",
    "CorruptStateError", "StreamFormatError",
]
