"""Independent LP-file reader and external MILP solve for cross-checking.

Parses the LP subset the exporter emits (Minimize / Subject To / Bounds /
Binary / End, +-1 or explicit numeric coefficients) and solves the model
with scipy's HiGHS-backed ``milp``.  Deliberately shares no code with the
writer: the file bytes are the interface.
"""

import math

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

_SECTIONS = ("minimize", "subject to", "bounds", "binary", "end")


def _split_sections(text):
    sections = {}
    current = None
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].rstrip()
        if not line.strip():
            continue
        low = line.strip().lower()
        if low in _SECTIONS:
            current = low
            sections.setdefault(current, [])
            continue
        if current is None:
            raise ValueError(f"content before any section: {line!r}")
        sections[current].append(line)
    return sections


def _is_number(tok):
    try:
        float(tok)
        return True
    except ValueError:
        return False


def _parse_linear(tokens):
    """Token list -> (var -> coeff, constant)."""
    coeffs = {}
    constant = 0.0
    sign = 1.0
    coef = None
    for tok in tokens:
        if tok == "+":
            continue
        if tok == "-":
            sign = -sign
            continue
        if _is_number(tok):
            value = float(tok)
            if coef is None:
                coef = sign * value
            else:
                coef *= value
            sign = 1.0
            continue
        # a variable name finishes a term
        coeffs[tok] = coeffs.get(tok, 0.0) + (coef if coef is not None else sign)
        sign = 1.0
        coef = None
    if coef is not None:
        constant += coef
    return coeffs, constant


def _logical_statements(lines):
    """Join wrapped lines: a new statement starts at a 'name:' token."""
    statements = []
    for line in lines:
        stripped = line.strip()
        starts_new = ":" in stripped.split()[0] if stripped else False
        if starts_new or not statements:
            statements.append(stripped)
        else:
            statements[-1] += " " + stripped
    return statements


class ParsedLP:
    def __init__(self, text):
        sections = _split_sections(text)
        if "minimize" not in sections or "end" not in sections:
            raise ValueError("need Minimize and End sections")
        self.variables = []
        self._index = {}

        def var_index(name):
            if name not in self._index:
                self._index[name] = len(self.variables)
                self.variables.append(name)
            return self._index[name]

        obj_tokens = " ".join(sections["minimize"]).split()
        if obj_tokens and obj_tokens[0].endswith(":"):
            obj_tokens = obj_tokens[1:]
        obj_coeffs, _ = _parse_linear(obj_tokens)
        for name in obj_coeffs:
            var_index(name)
        self.constraints = []
        for statement in _logical_statements(sections.get("subject to", [])):
            tokens = statement.split()
            name = None
            if tokens and tokens[0].endswith(":"):
                name = tokens[0][:-1]
                tokens = tokens[1:]
            op = next((t for t in tokens if t in (">=", "<=", "=")), None)
            if op is None:
                raise ValueError(f"constraint without operator: {statement!r}")
            pos = tokens.index(op)
            lhs, lhs_const = _parse_linear(tokens[:pos])
            rhs_terms, rhs_const = _parse_linear(tokens[pos + 1:])
            if rhs_terms:
                raise ValueError("variables on the right-hand side")
            for vname in lhs:
                var_index(vname)
            self.constraints.append((name, lhs, op, rhs_const - lhs_const))
        self.lower = {}
        for statement in sections.get("bounds", []):
            tokens = statement.split()
            if len(tokens) == 3 and tokens[1] == ">=":
                self.lower[tokens[0]] = float(tokens[2])
                var_index(tokens[0])
            else:
                raise ValueError(f"unsupported bound: {statement!r}")
        self.binaries = set()
        for statement in sections.get("binary", []):
            for name in statement.split():
                self.binaries.add(name)
                var_index(name)
        self.objective = obj_coeffs

    def solve(self):
        """Minimize with HiGHS; returns (optimal value, {var: value})."""
        nv = len(self.variables)
        c = np.zeros(nv)
        for name, coeff in self.objective.items():
            c[self._index[name]] = coeff
        rows, lbs, ubs = [], [], []
        for _, lhs, op, rhs in self.constraints:
            row = np.zeros(nv)
            for name, coeff in lhs.items():
                row[self._index[name]] = coeff
            rows.append(row)
            if op == ">=":
                lbs.append(rhs)
                ubs.append(math.inf)
            elif op == "<=":
                lbs.append(-math.inf)
                ubs.append(rhs)
            else:
                lbs.append(rhs)
                ubs.append(rhs)
        integrality = np.zeros(nv)
        lo = np.zeros(nv)
        hi = np.full(nv, math.inf)
        for name in self.binaries:
            idx = self._index[name]
            integrality[idx] = 1
            lo[idx], hi[idx] = 0.0, 1.0
        for name, bound in self.lower.items():
            lo[self._index[name]] = bound
        result = milp(c=c,
                      constraints=LinearConstraint(np.array(rows), lbs, ubs),
                      integrality=integrality, bounds=Bounds(lo, hi))
        if not result.success:
            raise RuntimeError(f"external solver failed: {result.message}")
        values = {name: float(result.x[self._index[name]])
                  for name in self.variables}
        return float(result.fun), values
