"""Clustering incomplete multi-view data with collective kernel learning and KCCA."""

from .clustering import ClusterAssignment, combine_kernels, kmeans, spectral_cluster
from .completion import CoklConfig, CoklResult, cokl_multi, cokl_two, complete_half_step
from .data import (LabeledDataset, inject_missing, latent_blobs, load_csv, load_seeds,
                   split_features)
from .errors import (CoklError, ConfigError, CoverageError, DegenerateBandwidth, InvalidData,
                     NumericalError, ParseError, RankDeficient, SchemaError, SingularBlock)
from .experiment import ExperimentConfig, load_config, run_experiment, validate_config
from .imputation import naive_impute
from .kcca import KccaConfig, KccaSolution, center_kernel, kcca, pca_reduce
from .kernels import DataView, IndexPartition, KernelSpec, compute_kernel, graph_laplacian
from .metrics import MetricRecord, nmi, purity
from .pipeline import METHODS, MethodSpec, run_method

__version__ = "0.1.0"
