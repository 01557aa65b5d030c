"""Index iteration for symplectic paths, with independent numerical oracles."""

__version__ = "0.1.0"

from .angles import Angle, SurdSum, frac_parts_sum, int_parts, parse_sqrt_expr
from .decompose import Decomposition, decompose, extract_counts
from .errors import (
    AmbiguityError,
    DegeneracyError,
    DimensionError,
    DomainError,
    InconsistencyError,
    NotACharacteristicError,
    ParityError,
    PrecisionError,
    PrecisionWarning,
    SympIndexError,
)
from .forms import D, IndexSeed, N1, N2, NormalFormCounts, R, SymplecticMatrix, diamond_sum, realize, realize_seed
from .iteration import (
    iterate_index,
    iterate_nullity,
    iteration_table,
    mean_index,
    mean_index_exact,
    viterbo_from_maslov,
)
from .oracles import CrossingOracle, build_path, crossing_index, nullity_oracle
from .r8 import R8Config, claim1_scan, enumerate_configs, lemma31_scan, r8_index

__all__ = [
    "AmbiguityError", "Angle", "CrossingOracle", "D", "Decomposition", "DegeneracyError", "DimensionError",
    "DomainError", "InconsistencyError", "IndexSeed", "N1", "N2", "NormalFormCounts", "NotACharacteristicError",
    "ParityError", "PrecisionError", "PrecisionWarning", "R", "R8Config", "SurdSum", "SympIndexError",
    "SymplecticMatrix", "build_path", "claim1_scan", "crossing_index", "decompose", "diamond_sum",
    "enumerate_configs", "extract_counts", "frac_parts_sum", "int_parts", "iterate_index", "iterate_nullity",
    "iteration_table", "lemma31_scan", "mean_index", "mean_index_exact", "nullity_oracle", "parse_sqrt_expr",
    "r8_index", "realize", "realize_seed", "viterbo_from_maslov",
]
