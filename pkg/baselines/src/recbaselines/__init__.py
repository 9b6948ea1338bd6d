"""scikit-learn baselines emitting the shared predictions CSV."""

from .runner import (BaselineJob, BridgeError, METHODS, default_params,
                     load_dataset, load_fold_plan, run_baseline,
                     write_predictions)

__all__ = ["BaselineJob", "BridgeError", "METHODS", "default_params",
           "load_dataset", "load_fold_plan", "run_baseline",
           "write_predictions"]
