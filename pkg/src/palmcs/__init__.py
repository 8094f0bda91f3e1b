"""Augmented-Lagrangian l1 solver and compressive-sensing experiment harness."""

from .linops import (
    Mat,
    SensingOperator,
    Vec,
    adjoint_matvec,
    dot,
    matvec,
    norm1,
    norm2,
    norm_inf,
)
from .shrinkage import shrink
from .solver import (
    KktReport,
    PalmDivergenceError,
    PalmParams,
    PalmResult,
    PalmState,
    augmented_lagrangian,
    default_params,
    gradient_g,
    kkt_report,
    solve,
    update_r,
    update_x,
    update_y,
)
from .sensing import (
    BasisPair,
    dct_matrix,
    make_gaussian_orthonormal,
    make_partial_dct,
    mutual_coherence,
    operator_from_bytes,
    operator_to_bytes,
    spectral_norm_estimate,
)
from .noise import NoiseKind, NoiseSpec, add_gaussian, add_salt_pepper, add_speckle, apply_noise
from .metrics import QualityReport, psnr_from_rmse, quality, rmse, time_block
from .pgm import (
    GrayImage,
    PgmParseError,
    blocks_to_image,
    image_to_blocks,
    read_pgm,
    read_pgm_file,
    write_pgm,
    write_pgm_file,
)
from .experiment import (
    ConfigError,
    ExperimentConfig,
    ExperimentRow,
    OperatorKind,
    derive_seed,
    noise_grid_from_lists,
    parse_config,
    reconstruct_image,
    rows_to_csv,
    run_experiment,
)
from .cli import cli_main

__version__ = "0.1.0"

__all__ = [
    "Mat",
    "Vec",
    "SensingOperator",
    "matvec",
    "adjoint_matvec",
    "dot",
    "norm1",
    "norm2",
    "norm_inf",
    "shrink",
    "PalmParams",
    "PalmState",
    "PalmResult",
    "PalmDivergenceError",
    "KktReport",
    "augmented_lagrangian",
    "default_params",
    "update_r",
    "gradient_g",
    "update_x",
    "update_y",
    "solve",
    "kkt_report",
    "BasisPair",
    "dct_matrix",
    "make_partial_dct",
    "make_gaussian_orthonormal",
    "mutual_coherence",
    "spectral_norm_estimate",
    "operator_to_bytes",
    "operator_from_bytes",
    "NoiseKind",
    "NoiseSpec",
    "add_gaussian",
    "add_salt_pepper",
    "add_speckle",
    "apply_noise",
    "QualityReport",
    "rmse",
    "psnr_from_rmse",
    "quality",
    "time_block",
    "GrayImage",
    "PgmParseError",
    "read_pgm",
    "write_pgm",
    "read_pgm_file",
    "write_pgm_file",
    "image_to_blocks",
    "blocks_to_image",
    "ExperimentConfig",
    "ExperimentRow",
    "OperatorKind",
    "ConfigError",
    "derive_seed",
    "noise_grid_from_lists",
    "parse_config",
    "reconstruct_image",
    "run_experiment",
    "rows_to_csv",
    "cli_main",
]
