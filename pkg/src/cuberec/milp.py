"""LP-format text export of the vertex-fit integer program.

The absolute deviations are linearized the standard way: one continuous
variable e_i per rated item with e_i >= (distance_i - target_i) and
e_i >= (target_i - distance_i), distance_i being linear in the model
coordinates.  Binary models use variables x_j; ternary models split each
coordinate into a like/dislike pair p_j, m_j with p_j + m_j <= 1.

Output is industry LP file syntax (Minimize / Subject To / Bounds / Binary /
End), UTF-8 with LF line endings, deterministic byte for byte.
"""

from __future__ import annotations

from fractions import Fraction

from .core import Variant
from .solver import FitInstance

_WRAP = 72
_INDENT = "      "


def _fmt_rational(q: Fraction) -> str:
    """Exact decimal when the denominator is 2^a * 5^b, float repr otherwise."""
    if q.denominator == 1:
        return str(q.numerator)
    den = q.denominator
    k2 = k5 = 0
    while den % 2 == 0:
        den //= 2
        k2 += 1
    while den % 5 == 0:
        den //= 5
        k5 += 1
    if den != 1:
        return repr(float(q))
    k = max(k2, k5)
    scaled = abs(q.numerator) * 10 ** k // q.denominator
    digits = str(scaled).rjust(k + 1, "0")
    sign = "-" if q.numerator < 0 else ""
    return f"{sign}{digits[:-k]}.{digits[-k:]}"


def _wrap_terms(prefix: str, tokens: list[str], suffix: str = "") -> list[str]:
    lines = []
    cur = prefix
    for tok in tokens:
        if len(cur) + 1 + len(tok) > _WRAP and cur.strip():
            lines.append(cur)
            cur = _INDENT + tok
        else:
            cur = f"{cur} {tok}"
    if suffix:
        cur = f"{cur} {suffix}"
    lines.append(cur)
    return lines


def export_milp(inst: FitInstance, variant: Variant) -> str:
    """Render the fit instance as an LP-format integer program."""
    n = inst.space.n
    m = inst.size
    out = [f"\\ vertex-fit export (variant={variant}, n={n}, items={m})",
           "Minimize"]
    out.extend(_wrap_terms(" obj:", ["e_%d" % i if i == 1 else "+ e_%d" % i
                                     for i in range(1, m + 1)]))
    out.append("Subject To")
    for i, (item, delta) in enumerate(zip(inst.items, inst.dratings), start=1):
        if variant is Variant.BINARY:
            ones = sum(item.bits)
            # distance_i = ones + sum_j sign_j x_j with sign_j = +1 iff bit 0,
            # so the pos row carries -sign_j and the neg row +sign_j
            pos_terms = [("+ x_%d" % j) if bit else ("- x_%d" % j)
                         for j, bit in enumerate(item.bits, start=1)]
            neg_terms = [("- x_%d" % j) if bit else ("+ x_%d" % j)
                         for j, bit in enumerate(item.bits, start=1)]
            pos_rhs = Fraction(ones) - delta
            neg_rhs = delta - Fraction(ones)
        else:
            # distance_i = sum over bit-1 coords of m_j plus bit-0 coords of p_j
            dist = [("m_%d" % j) if bit else ("p_%d" % j)
                    for j, bit in enumerate(item.bits, start=1)]
            pos_terms = ["- " + v for v in dist]
            neg_terms = ["+ " + v for v in dist]
            pos_rhs = -delta
            neg_rhs = delta
        out.extend(_wrap_terms(f" pos_{i}: e_{i}", pos_terms,
                               f">= {_fmt_rational(pos_rhs)}"))
        out.extend(_wrap_terms(f" neg_{i}: e_{i}", neg_terms,
                               f">= {_fmt_rational(neg_rhs)}"))
    if variant is Variant.TERNARY:
        for j in range(1, n + 1):
            out.append(f" pair_{j}: p_{j} + m_{j} <= 1")
    out.append("Bounds")
    for i in range(1, m + 1):
        out.append(f" e_{i} >= 0")
    out.append("Binary")
    if variant is Variant.BINARY:
        names = ["x_%d" % j for j in range(1, n + 1)]
    else:
        names = []
        for j in range(1, n + 1):
            names.extend(("p_%d" % j, "m_%d" % j))
    out.extend(_wrap_terms("", names))
    out.append("End")
    return "\n".join(out) + "\n"
