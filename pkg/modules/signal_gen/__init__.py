from .dump import DUMP_FILES, dump_trial, load_metadata, trial_metadata
from .generate import (
    add_noise,
    dictionary_seed,
    gen_dictionary,
    gen_pattern,
    gen_signals,
    generate_trial,
    noise_variance_for,
    trial_seed,
)
from .types import (
    CLASS_BLOCK_LENGTHS,
    CLASS_SUPPORT_SIZE,
    SPARSITY_CLASSES,
    GroundTruth,
    SparsityPattern,
    TrialData,
)

__all__ = [
    "SparsityPattern",
    "GroundTruth",
    "TrialData",
    "SPARSITY_CLASSES",
    "CLASS_BLOCK_LENGTHS",
    "CLASS_SUPPORT_SIZE",
    "gen_dictionary",
    "gen_pattern",
    "gen_signals",
    "add_noise",
    "noise_variance_for",
    "trial_seed",
    "dictionary_seed",
    "generate_trial",
    "dump_trial",
    "load_metadata",
    "trial_metadata",
    "DUMP_FILES",
]
