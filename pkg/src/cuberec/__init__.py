"""Content-based preference models as hypercube vertices.

Items and users are vertices of the boolean hypercube over an attribute
set; star ratings become exact rational target distances, and a user's
model is the vertex whose distances to the rated items track those targets
as closely as possible (binary models, or ternary models with don't-care
coordinates).  The package bundles exact and anytime solvers, an LP-format
export for external integer-programming solvers, dataset tooling with a
planted-model synthetic generator, and a cross-validation harness with
training-curve and significance-test support for cold-start benchmarking.
"""

from ._kernels import BACKEND as kernel_backend
from .core import (AttributeSpace, DRating, ItemVector, RatingRecord,
                   RatingScale, UserModel, Variant, drating_to_star, hamming,
                   model_distance, rating_to_level, star_to_drating,
                   ternary_distance)
from .data import (Dataset, DatasetSummary, PredictionRow, SyntheticConfig,
                   convert_csv_pair, dataset_from_dict, dataset_to_dict,
                   generate_synthetic, load_dataset, load_predictions,
                   summarize, to_fit_instance, write_dataset,
                   write_predictions)
from .errors import (CapacityError, CoverageError, CubeRecError,
                     DatasetFormatError, DimensionMismatchError,
                     ValidationError)
from .evaluation import (CurveReport, EvalReport, FoldPlan,
                         SignificanceResult, compare_methods, load_fold_plan,
                         make_folds, mean_absolute_error, mix_seed, predict,
                         run_cross_validation, run_training_curve,
                         write_curve_csv, write_fold_plan)
from .milp import export_milp
from .solver import (Budget, FitInstance, FitResult, SolveStatus,
                     node_lower_bound, objective, objective_binary,
                     objective_ternary, solve, solve_branch_and_bound,
                     solve_brute_force, solve_local_search)

__version__ = "0.1.0"

__all__ = [
    "AttributeSpace", "Budget", "CapacityError", "CoverageError",
    "CubeRecError", "CurveReport", "DRating", "Dataset", "DatasetFormatError",
    "DatasetSummary", "DimensionMismatchError", "EvalReport", "FitInstance",
    "FitResult", "FoldPlan", "ItemVector", "PredictionRow", "RatingRecord",
    "RatingScale", "SignificanceResult", "SolveStatus", "SyntheticConfig",
    "UserModel", "ValidationError", "Variant", "compare_methods",
    "convert_csv_pair", "dataset_from_dict", "dataset_to_dict",
    "drating_to_star", "export_milp", "generate_synthetic", "hamming",
    "kernel_backend", "load_dataset", "load_fold_plan", "load_predictions",
    "make_folds", "mean_absolute_error", "mix_seed", "model_distance",
    "node_lower_bound", "objective", "objective_binary", "objective_ternary",
    "predict", "rating_to_level", "run_cross_validation",
    "run_training_curve", "solve", "solve_branch_and_bound",
    "solve_brute_force", "solve_local_search", "star_to_drating", "summarize",
    "ternary_distance", "to_fit_instance", "write_curve_csv", "write_dataset",
    "write_fold_plan", "write_predictions",
]
