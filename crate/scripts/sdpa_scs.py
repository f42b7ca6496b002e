#!/usr/bin/env python3
"""Solve a two-block sparse SDPA problem with SCS or Clarabel.

Input: block 1 is the n x n Gram matrix, block 2 a diagonal pair
(lambda+, lambda-). Output: <out>.json metadata and <out>.bin with the
row-major Gram block as little-endian float64.
"""

import argparse
import json
import math
import sys

import numpy as np
import scipy.sparse as sp


def read_sdpa(path):
    with open(path) as f:
        lines = [l.strip() for l in f]
    lines = [l for l in lines if l and l[0] not in '*"']

    def head(l):
        l = l.split("=")[0]
        for c in ",{}()":
            l = l.replace(c, " ")
        return l.split()

    m = int(head(lines[0])[0])
    nb = int(head(lines[1])[0])
    blocks = [int(t) for t in head(lines[2])]
    if nb != 2 or blocks[0] <= 0 or blocks[1] != -2:
        raise ValueError("expected blocks 'n -2'")
    rhs = np.array([float(t) for t in head(lines[3])])
    if len(rhs) != m:
        raise ValueError("rhs length mismatch")
    entries = []
    for l in lines[4:]:
        k, b, i, j, v = l.split()
        entries.append((int(k), int(b), int(i), int(j), float(v)))
    return blocks[0], rhs, entries


def svec_index(solver, n, i, j):
    """Position of P[i, j] (0-based, i <= j) in the cone's triangle order."""
    if solver == "scs":
        # lower triangle, column-major: row j, column i
        return i * n - i * (i - 1) // 2 + (j - i)
    # clarabel: upper triangle, column-major
    return j * (j + 1) // 2 + i


def build(n, rhs, entries, solver):
    m = len(rhs)
    nt = n * (n + 1) // 2
    nv = nt + 2
    lp, lm = nt, nt + 1
    rows, cols, vals = [], [], []
    c = np.zeros(nv)
    r2 = math.sqrt(2.0)
    for k, b, i, j, v in entries:
        i, j = min(i, j) - 1, max(i, j) - 1
        if k == 0:
            if b == 2:
                # maximize lambda+ - lambda-
                c[lp if i == 0 else lm] -= v
            elif v != 0.0:
                raise ValueError("unexpected objective entry in block 1")
            continue
        if b == 1:
            col = svec_index(solver, n, i, j)
            coef = v if i == j else r2 * v
        else:
            col = lp if i == 0 else lm
            coef = v
        rows.append(k - 1)
        cols.append(col)
        vals.append(coef)
    a_eq = sp.csc_matrix((vals, (rows, cols)), shape=(m, nv))
    a_nn = sp.csc_matrix(([-1.0, -1.0], ([0, 1], [lp, lm])), shape=(2, nv))
    a_psd = sp.hstack([-sp.identity(nt, format="csc"), sp.csc_matrix((nt, 2))])
    a = sp.vstack([a_eq, a_nn, a_psd], format="csc")
    b = np.concatenate([rhs, np.zeros(2 + nt)])
    return a, b, c, m, nt


def unpack(x, n, solver):
    p = np.zeros((n, n))
    r2 = math.sqrt(2.0)
    for i in range(n):
        for j in range(i, n):
            v = x[svec_index(solver, n, i, j)]
            if i != j:
                v /= r2
            p[i, j] = p[j, i] = v
    return p


def solve(n, rhs, entries, solver, tol, max_iter):
    a, b, c, m, nt = build(n, rhs, entries, solver)
    if solver == "scs":
        import scs

        data = {"A": a, "b": b, "c": c}
        cone = {"z": m, "l": 2, "s": [n]}
        res = scs.SCS(
            data, cone, eps_abs=tol, eps_rel=tol, max_iters=max_iter, verbose=False
        ).solve()
        info = res["info"]
        text = info["status"]
        status = {
            "solved": "optimal",
            "solved_inaccurate": "near_optimal",
            "infeasible": "infeasible",
            "infeasible_inaccurate": "infeasible",
        }.get(text, "failed")
        return res["x"], status, int(info["iter"]), text
    import clarabel

    cones = [
        clarabel.ZeroConeT(m),
        clarabel.NonnegativeConeT(2),
        clarabel.PSDTriangleConeT(n),
    ]
    settings = clarabel.DefaultSettings()
    settings.verbose = False
    settings.max_iter = min(max_iter, 1000)
    settings.tol_gap_abs = tol
    settings.tol_gap_rel = tol
    settings.tol_feas = tol
    nv = c.shape[0]
    sol = clarabel.DefaultSolver(sp.csc_matrix((nv, nv)), c, a, b, cones, settings).solve()
    text = str(sol.status)
    if text.endswith("AlmostSolved"):
        status = "near_optimal"
    elif text.endswith("Solved"):
        status = "optimal"
    elif "Infeasible" in text:
        status = "infeasible"
    else:
        status = "failed"
    return np.array(sol.x), status, int(sol.iterations), text


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("input")
    ap.add_argument("output")
    ap.add_argument("--solver", choices=["scs", "clarabel"], default="scs")
    ap.add_argument("--tol", type=float, default=1e-9)
    ap.add_argument("--max-iter", type=int, default=100000)
    args = ap.parse_args()
    n, rhs, entries = read_sdpa(args.input)
    x, status, iters, text = solve(n, rhs, entries, args.solver, args.tol, args.max_iter)
    nt = n * (n + 1) // 2
    ok = x is not None and np.all(np.isfinite(x))
    lam = float(x[nt] - x[nt + 1]) if ok else None
    p = unpack(x, n, args.solver) if ok else np.zeros((n, n))
    p.astype("<f8").tofile(args.output + ".bin")
    with open(args.output + ".json", "w") as f:
        json.dump(
            {"status": status, "lambda": lam, "n": n, "iterations": iters, "message": text},
            f,
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
