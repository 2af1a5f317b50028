#!/usr/bin/env python3
"""Solve an exported CPLEX-LP model with scipy's HiGHS backend.

Reads the LP subset written by the Rust exporter (Minimize / Subject To /
Bounds / Binaries / Generals / End) and reports the optimal objective.

Usage:
    solve_lp.py MODEL.lp [--json] [--time-limit SECONDS]

Exit codes: 0 optimal, 3 infeasible or unbounded, 1 parse or solver error.
"""

import argparse
import json
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import lil_matrix

SECTIONS = ("Minimize", "Subject To", "Bounds", "Binaries", "Generals", "End")


def split_sections(text):
    parts = {}
    current = None
    for line in text.splitlines():
        if line.startswith("\\"):
            continue
        stripped = line.strip()
        if line and not line[0].isspace() and stripped in SECTIONS:
            current = stripped
            parts[current] = []
            continue
        if current and stripped:
            parts[current].append(line)
    return parts


def parse_terms(tokens):
    """Turn ['2', 'x_0_1_0', '-', 'z_3_0'] into [(2.0, 'x_0_1_0'), ...]."""
    terms = []
    sign = 1.0
    coef = None
    for tok in tokens:
        if tok == "+":
            sign = 1.0
        elif tok == "-":
            sign = -1.0
        else:
            try:
                coef = float(tok)
            except ValueError:
                terms.append((sign * (1.0 if coef is None else coef), tok))
                sign, coef = 1.0, None
    return terms


def parse_rows(lines):
    rows = []
    pending = []

    def flush():
        if not pending:
            return
        text = " ".join(pending)
        name, rest = text.split(":", 1)
        tokens = rest.split()
        for op in ("<=", ">=", "="):
            if op in tokens:
                at = tokens.index(op)
                rows.append((name.strip(), parse_terms(tokens[:at]), op, float(tokens[at + 1])))
                break
        else:
            raise ValueError(f"row without operator: {text}")
        pending.clear()

    for line in lines:
        if ":" in line:
            flush()
        pending.append(line.strip())
    flush()
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("model")
    ap.add_argument("--json", action="store_true")
    ap.add_argument("--time-limit", type=float, default=None)
    args = ap.parse_args()

    with open(args.model) as fh:
        parts = split_sections(fh.read())

    obj_text = " ".join(parts.get("Minimize", []))
    if ":" in obj_text:
        obj_text = obj_text.split(":", 1)[1]
    objective = parse_terms(obj_text.split())
    rows = parse_rows(parts.get("Subject To", []))

    index = {}

    def var(name):
        if name not in index:
            index[name] = len(index)
        return index[name]

    for _, name in objective:
        var(name)
    for _, terms, _, _ in rows:
        for _, name in terms:
            var(name)
    binaries = [tok for line in parts.get("Binaries", []) for tok in line.split()]
    generals = [tok for line in parts.get("Generals", []) for tok in line.split()]
    for name in binaries + generals:
        var(name)

    n = len(index)
    c = np.zeros(n)
    for coef, name in objective:
        c[index[name]] += coef

    a = lil_matrix((len(rows), n))
    lo = np.full(len(rows), -np.inf)
    hi = np.full(len(rows), np.inf)
    for r, (_, terms, op, rhs) in enumerate(rows):
        for coef, name in terms:
            a[r, index[name]] += coef
        if op in ("<=", "="):
            hi[r] = rhs
        if op in (">=", "="):
            lo[r] = rhs

    lb = np.zeros(n)
    ub = np.full(n, np.inf)
    for line in parts.get("Bounds", []):
        tokens = line.split()
        if len(tokens) == 3 and tokens[1] == "<=":
            ub[var(tokens[0])] = float(tokens[2])
        elif len(tokens) == 3 and tokens[1] == "=":
            v = var(tokens[0])
            lb[v] = ub[v] = float(tokens[2])
        else:
            raise ValueError(f"unsupported bound: {line}")
    integrality = np.zeros(n)
    for name in binaries:
        v = index[name]
        integrality[v] = 1
        lb[v], ub[v] = 0.0, 1.0
    for name in generals:
        integrality[name and index[name]] = 1

    options = {}
    if args.time_limit is not None:
        options["time_limit"] = args.time_limit
    res = milp(
        c,
        constraints=LinearConstraint(a.tocsr(), lo, hi),
        integrality=integrality,
        bounds=Bounds(lb, ub),
        options=options,
    )

    payload = {
        "status": int(res.status),
        "message": res.message,
        "objective": None if res.fun is None else float(res.fun),
        "variables": n,
        "rows": len(rows),
    }
    if args.json:
        print(json.dumps(payload))
    else:
        print(f"status {res.status}: {res.message}")
        if res.fun is not None:
            print(f"objective {res.fun:.6f}")
    if res.status == 0:
        return 0
    if res.status in (2, 3):
        return 3
    return 1


if __name__ == "__main__":
    sys.exit(main())
