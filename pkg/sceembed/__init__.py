from .sce_core import SCE, __version__
from .cachefile import CacheFileError, SmoothedFeatureCache
from .cli import _sce_cli, parse_args, run_benchmark
from .config import Aggregator, ConfigError, TrainConfig, PRESETS, resolve_config
from .cut_oracle import (
    CutIndicator,
    CutResult,
    CutSizeLimitError,
    CutVariant,
    DegenerateInputError,
    InvalidCutError,
    SparsificationReport,
    brute_force_sparsest_cut,
    edge_expansion,
    edge_expansion_prime,
    full_pair_distance_sum,
    sparsification_check,
    sparsified_pair_sum,
)
from .data import (
    Dataset,
    DatasetError,
    MatrixFormatError,
    gen_features,
    gen_sbm,
    load_dataset,
    read_matrix,
    write_matrix,
)
from .evaluation import LabeledSplit, SplitError, logistic_probe, make_splits
from .graph_core import (
    DimensionError,
    EdgeListParseError,
    Graph,
    cut_size,
    laplacian_quadratic,
    laplacian_quadratic_matrix,
    load_edge_list,
)
from .model import ModelParams, aggregate, embed, forward, init_params
from .smoothing import SmoothingOperator, smooth, smooth_all_scales
from .training import (
    DegenerateEmbeddingError,
    LossKind,
    NegativePairSet,
    TrainResult,
    adam_step,
    loss_gradient,
    sample_negatives,
    sce_loss,
    total_loss,
    train,
)
