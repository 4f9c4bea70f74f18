"""Oracle cross-checks bundled for ``ppbf verify``."""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .code import build_code, is_logical_failure, syndrome
from .decoder import ppbf_decode
from .oracle import (
    bfs_distances,
    direct_influence,
    direct_proximity,
    exhaustive_min_weight_decode,
)
from .proximity import (
    build_template,
    compute_proximity_vector,
    shift_alpha,
    shift_and_remove,
    shift_influence,
)

EXHAUSTIVE_MAX_N = 50


def _result(cases: int, bad: list) -> dict:
    out = {"pass": not bad, "cases": cases}
    if bad:
        out["first_failures"] = bad[:5]
    return out


def run_checks(family: str, L: int, D: int | None = None, seed: int = 0, samples: int = 200) -> dict:
    code = build_code(family, L)
    D = L if D is None else D
    template = build_template(family, L, D)
    rng = np.random.default_rng(seed)
    report = {}

    bad = []
    for j in range(code.m):
        g, v = shift_influence(template, j)
        g0, v0 = direct_influence(code, j, D)
        if not (np.array_equal(g, g0) and np.array_equal(v, v0)):
            bad.append(j)
    report["shift_matches_direct_recursion"] = _result(code.m, bad)

    bad = [j for j in range(code.m)
           if not np.array_equal(shift_alpha(template, j), bfs_distances(code, j, D + 1))]
    report["alpha_matches_bfs"] = _result(code.m, bad)

    syndromes = [syndrome(code, (rng.random(code.n) < 0.1).astype(np.uint8)) for _ in range(samples)]

    bad = []
    for k, s in enumerate(syndromes[: min(samples, 25)]):
        st = compute_proximity_vector(template, s)
        g0, v0 = direct_proximity(code, s, D)
        if not (np.array_equal(st.gamma, g0) and np.array_equal(st.nu, v0)):
            bad.append(k)
    report["proximity_matches_direct_recursion"] = _result(min(samples, 25), bad)

    bad = []
    for k, s in enumerate(syndromes):
        st = shift_and_remove(compute_proximity_vector(template, s), template, np.flatnonzero(s))
        if st.nu.any() or st.gamma.any():
            bad.append(k)
    report["accumulate_remove_round_trip"] = _result(len(syndromes), bad)

    bad = []
    for q in range(code.n):
        e = np.zeros(code.n, dtype=np.uint8)
        e[q] = 1
        out = ppbf_decode(code, template, syndrome(code, e))
        if not out.converged or is_logical_failure(code, e, out.estimate):
            bad.append(q)
    report["weight_one_errors_corrected"] = _result(code.n, bad)

    bad = []
    for k in range(samples):
        e = (rng.random(code.n) < 0.1).astype(np.uint8)
        if not ppbf_decode(code, template, syndrome(code, e)).converged:
            bad.append(k)
    report["random_decodes_converge"] = _result(samples, bad)

    if code.n <= EXHAUSTIVE_MAX_N:
        bad, cases = [], 0
        for pair in combinations(range(code.n), 2):
            e = np.zeros(code.n, dtype=np.uint8)
            e[list(pair)] = 1
            s = syndrome(code, e)
            out = ppbf_decode(code, template, s)
            best = exhaustive_min_weight_decode(code, s, 2)
            cases += 1
            if not out.converged or best is None or int(out.estimate.sum()) < int(best.sum()):
                bad.append(list(pair))
        report["weight_two_not_below_minimum"] = _result(cases, bad)
    return report
