"""Deterministic small instances for the LP export tests.

Run ``python3 tests/lpgen.py`` to (re)write the committed golden files.
Targets use denominator 4 so every coefficient has an exact decimal form.
"""

from fractions import Fraction
from pathlib import Path

import numpy as np

from cuberec import Variant

from helpers import make_instance

GOLDEN_DIR = Path(__file__).parent / "goldens" / "lp"


def lp_cases():
    cases = []
    rng = np.random.default_rng(777)
    for idx in range(20):
        variant = Variant.BINARY if idx % 2 == 0 else Variant.TERNARY
        n = int(rng.integers(2, 7))
        m = int(rng.integers(2, 7))
        rows = [tuple(int(b) for b in rng.integers(0, 2, n)) for _ in range(m)]
        deltas = [Fraction(int(rng.integers(0, 4 * n + 1)), 4) for _ in range(m)]
        cases.append((f"case{idx:02d}_{variant.value}",
                      make_instance(rows, deltas), variant))
    return cases


def main():
    from cuberec import export_milp

    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    for name, inst, variant in lp_cases():
        (GOLDEN_DIR / f"{name}.lp").write_bytes(
            export_milp(inst, variant).encode("utf-8"))
    print(f"wrote {len(lp_cases())} golden LP files to {GOLDEN_DIR}")


if __name__ == "__main__":
    main()
