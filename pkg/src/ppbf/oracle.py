"""Brute-force references for the property suite.

Nothing here shares code with the fast paths in :mod:`ppbf.proximity` or
:mod:`ppbf.decoder`: matrices are dense, the planar reference lattice is laid
out from scratch, and distances come from a plain breadth-first search.
"""

from __future__ import annotations

from collections import deque
from itertools import combinations

import numpy as np

from .code import HORIZONTAL, CodeModel, syndrome
from .errors import TemplateOverflowError

INT63_MAX = 2**63 - 1


def dense_matrix(code: CodeModel) -> np.ndarray:
    H = np.zeros((code.m, code.n), dtype=np.int64)
    for v, checks in enumerate(code.variable_adjacency):
        for c in checks:
            H[c, v] = 1
    return H


def recursive_influence_direct(H: np.ndarray, seed: np.ndarray, D: int):
    """The influence recursion evaluated literally with dense products."""
    H = np.asarray(H, dtype=np.int64)
    gamma = np.asarray(seed, dtype=np.int64).copy()
    nu = gamma @ H
    row_max = int(H.sum(axis=1).max(initial=0))
    col_max = int(H.sum(axis=0).max(initial=0))
    for step in range(1, D + 1):
        if int(nu.max(initial=0)) * row_max * col_max > INT63_MAX:
            raise TemplateOverflowError(f"dense recursion overflows at depth {step}")
        gamma = nu @ H.T
        nu = gamma @ H
    return gamma, nu


def _padded_lattice(code: CodeModel, margin: int):
    """Dense H of an open square lattice containing the planar code with ``margin`` spare rows.

    Returns ``(H, check_index, var_index)`` where the index arrays map target
    labels to lattice rows/columns.
    """
    cp = code.check_pos
    lo = cp.min(axis=0) - margin
    hi = cp.max(axis=0) + margin
    checks = {}
    for u in range(lo[0], hi[0] + 1):
        for w in range(lo[1], hi[1] + 1):
            checks[(u, w)] = len(checks)
    edges: dict[tuple[str, int, int], int] = {}
    incid: list[tuple[int, int]] = []
    for (u, w), c in checks.items():
        for key in (("h", u, w), ("h", u + 1, w), ("v", u, w), ("v", u, w + 1)):
            if key not in edges:
                edges[key] = len(edges)
            incid.append((c, edges[key]))
    H = np.zeros((len(checks), len(edges)), dtype=np.int64)
    for c, e in incid:
        H[c, e] = 1
    check_index = np.array([checks[tuple(p)] for p in cp.tolist()])
    var_index = np.array(
        [
            edges[("h" if code.var_kind[q] == HORIZONTAL else "v", *code.var_pos[q].tolist())]
            for q in range(code.n)
        ]
    )
    return H, check_index, var_index


def direct_influence(code: CodeModel, j: int, D: int):
    """Influence of target check ``j`` computed from scratch, target-indexed.

    On the torus the recursion runs on the code's own matrix.  For the planar
    code it runs on an open lattice wide enough that its edges stay outside
    the depth-D neighbourhood of every target check.
    """
    if code.family == "toric":
        seed = np.zeros(code.m, dtype=np.int64)
        seed[j] = 1
        return recursive_influence_direct(dense_matrix(code), seed, D)
    H, ci, vi = _padded_lattice(code, D + 2)
    seed = np.zeros(H.shape[0], dtype=np.int64)
    seed[ci[j]] = 1
    gamma, nu = recursive_influence_direct(H, seed, D)
    return gamma[ci], nu[vi]


def direct_proximity(code: CodeModel, s: np.ndarray, D: int):
    """Proximity vectors by seeding the recursion with the whole syndrome."""
    if code.family == "toric":
        return recursive_influence_direct(dense_matrix(code), s, D)
    H, ci, vi = _padded_lattice(code, D + 2)
    seed = np.zeros(H.shape[0], dtype=np.int64)
    seed[ci] = s
    gamma, nu = recursive_influence_direct(H, seed, D)
    return gamma[ci], nu[vi]


def bfs_distances(code: CodeModel, j: int, cap: int) -> np.ndarray:
    """Shortest path length from check ``j`` to every qubit, counting qubits.

    The walk runs on the Tanner graph extended by the dummy boundary nodes
    (the open ends of the boundary qubits).  Entries beyond ``cap`` are 0.
    """
    adj: dict[int, list[int]] = {}
    for v, (a, b) in enumerate(code.variable_ends.tolist()):
        adj.setdefault(a, []).append(v)
        adj.setdefault(b, []).append(v)
    out = np.zeros(code.n, dtype=np.int64)
    node_dist = {j: 0}
    queue = deque([j])
    while queue:
        x = queue.popleft()
        for v in adj.get(x, ()):
            d = node_dist[x] + 1
            if out[v] == 0 or d < out[v]:
                out[v] = d
            for y in code.variable_ends[v].tolist():
                if y not in node_dist:
                    node_dist[y] = d
                    queue.append(y)
    out[out > cap] = 0
    return out


def exhaustive_min_weight_decode(code: CodeModel, s: np.ndarray, w_max: int):
    """Lexicographically least minimum-weight error with syndrome ``s``, or None."""
    s = np.asarray(s, dtype=np.uint8)
    H = dense_matrix(code)
    for w in range(w_max + 1):
        for support in combinations(range(code.n), w):
            cols = list(support)
            if np.array_equal(H[:, cols].sum(axis=1) % 2, s):
                e = np.zeros(code.n, dtype=np.uint8)
                e[cols] = 1
                assert np.array_equal(syndrome(code, e), s)
                return e
    return None
