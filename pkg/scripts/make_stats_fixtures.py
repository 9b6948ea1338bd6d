#!/usr/bin/env python3
"""Regenerate tests/fixtures/stats_reference.json.

Reference t and F p-values for five textbook-scale two-sample cases,
computed with scipy's distributions (an implementation independent of the
package's incomplete-beta evaluation).  The gating logic (two-sided F test
at alpha = 0.05 choosing pooled vs Welch t) mirrors the published contract
of compare_methods.

Run once and commit the output; the committed values are the oracle.
"""

import json
from pathlib import Path

import numpy as np
from scipy import stats

ALPHA = 0.05

CASES = {
    "unit_shift": {
        "a": [1, 2, 3, 4, 5],
        "b": [2, 3, 4, 5, 6],
    },
    "large_shift": {
        "a": [1, 2, 3, 4, 5],
        "b": [11, 12, 13, 14, 15],
    },
    "unequal_variance": {
        "a": [10.1, 10.2, 10.3, 10.0, 9.9, 10.05],
        "b": [9.0, 11.5, 8.2, 12.3, 10.1],
    },
    "fold_errors_ten": {
        "a": [0.62, 0.58, 0.61, 0.64, 0.57, 0.60, 0.63, 0.59, 0.62, 0.61],
        "b": [0.55, 0.52, 0.58, 0.56, 0.54, 0.57, 0.53, 0.55, 0.56, 0.54],
    },
    "tiny_samples": {
        "a": [2.1, 2.4],
        "b": [3.9, 4.4],
    },
}


def reference(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n1, n2 = len(a), len(b)
    v1 = a.var(ddof=1)
    v2 = b.var(ddof=1)
    f_stat = v1 / v2
    cdf = stats.f.cdf(f_stat, n1 - 1, n2 - 1)
    f_p = min(1.0, 2.0 * min(cdf, 1.0 - cdf))
    welch = f_p < ALPHA
    t_stat, t_p = stats.ttest_ind(a, b, equal_var=not welch)
    if welch:
        se1, se2 = v1 / n1, v2 / n2
        df = (se1 + se2) ** 2 / (se1 ** 2 / (n1 - 1) + se2 ** 2 / (n2 - 1))
    else:
        df = n1 + n2 - 2
    return {
        "f_statistic": float(f_stat),
        "f_p_value": float(f_p),
        "welch_used": bool(welch),
        "t_statistic": float(t_stat),
        "t_df": float(df),
        "t_p_value": float(t_p),
    }


def main():
    out = {"alpha": ALPHA, "cases": {}}
    for name, samples in CASES.items():
        out["cases"][name] = {**samples, "expected": reference(samples["a"],
                                                               samples["b"])}
    path = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / \
        "stats_reference.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(out, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
