"""Manifold adaptive multiple kernel k-means clustering."""
from .adaptive_kernel import combine, deform
from .bench import RunConfig, run_baseline, run_experiment
from .discretize import kmeans_rows
from .errors import InputError, NumericalError
from .kernel_bank import build_kernel_bank, load_kernels, normalize_kernel
from .manifold_graph import knn_graph, laplacian
from .metrics import accuracy, nmi, paired_t_test, purity
from .solver import SolverState, fit, objective, update_partition, update_weights

__all__ = [
    "InputError", "NumericalError", "RunConfig", "SolverState", "accuracy",
    "build_kernel_bank", "combine", "deform", "fit", "kmeans_rows", "knn_graph",
    "laplacian", "load_kernels", "nmi", "normalize_kernel", "objective",
    "paired_t_test", "purity", "run_baseline", "run_experiment",
    "update_partition", "update_weights",
]
