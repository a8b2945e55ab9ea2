#!/usr/bin/env python3
"""Solve a sparse SDPA file (.dat-s) with cvxpy and write a CSDP-style solution.

    sdpa_cvxpy.py problem.dat-s problem.sol [--solver CLARABEL|SCS]

Solves  max F0.X  s.t.  Fi.X = ci, X psd (diagonal blocks: X >= 0)
and writes y on the first line, then "2 blk i j value" for X.
"""
import argparse
import re
import sys

import numpy as np
import cvxpy as cp


def read_dat_s(path):
    lines = []
    with open(path) as f:
        for raw in f:
            line = raw.strip()
            if not line or line[0] in "*\"":
                continue
            lines.append(re.sub(r"[{}(),]", " ", line).split())
    m = int(lines[0][0])
    nblocks = int(lines[1][0])
    sizes = [int(s) for s in lines[2][:nblocks]]
    c = [float(v) for v in lines[3][:m]]
    entries = [(int(a), int(b), int(i), int(j), float(v)) for a, b, i, j, v in lines[4:]]
    return m, sizes, np.array(c), entries


def solve(path, solver):
    m, sizes, c, entries = read_dat_s(path)
    X = []
    cons = []
    for n in sizes:
        if n > 0:
            v = cp.Variable((n, n), symmetric=True)
            cons.append(v >> 0)
        else:
            v = cp.Variable(-n)
            cons.append(v >= 0)
        X.append(v)

    # inner products F_mat . X, accumulated per matrix
    terms = [[] for _ in range(m + 1)]
    for mat, blk, i, j, val in entries:
        b = blk - 1
        if sizes[b] > 0:
            x = X[b][i - 1, j - 1]
            terms[mat].append((val if i == j else 2 * val) * x)
        else:
            terms[mat].append(val * X[b][i - 1])
    dot = [cp.sum(cp.hstack(t)) if t else cp.Constant(0.0) for t in terms]

    eq = [dot[k] == c[k - 1] for k in range(1, m + 1)]
    prob = cp.Problem(cp.Maximize(dot[0]), cons + eq)
    prob.solve(solver=solver)
    if prob.status not in ("optimal", "optimal_inaccurate"):
        sys.exit("cvxpy status: " + prob.status)
    # cvxpy's equality multipliers already follow the CSDP sign convention
    y = np.array([float(e.dual_value) for e in eq])
    return sizes, X, y, prob.value


def write_sol(path, sizes, X, y):
    with open(path, "w") as f:
        f.write(" ".join(repr(float(v)) for v in y) + "\n")
        for b, n in enumerate(sizes):
            val = X[b].value
            if n > 0:
                for i in range(n):
                    for j in range(i, n):
                        if val[i, j] != 0:
                            f.write(f"2 {b + 1} {i + 1} {j + 1} {float(val[i, j])!r}\n")
            else:
                for i in range(-n):
                    if val[i] != 0:
                        f.write(f"2 {b + 1} {i + 1} {i + 1} {float(val[i])!r}\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("problem")
    ap.add_argument("solution")
    ap.add_argument("--solver", default="CLARABEL")
    args = ap.parse_args()
    sizes, X, y, value = solve(args.problem, args.solver)
    write_sol(args.solution, sizes, X, y)
    print(f"objective {float(value)!r}")


if __name__ == "__main__":
    main()
