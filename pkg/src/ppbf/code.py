"""Toric and rotated planar code models over the bit-flip channel.

Both families are stored as a Tanner graph in dual adjacency-list form plus a
small amount of lattice geometry used by the influence shifting machinery.

Geometry convention (the "shift frame"): every check sits at an integer
point ``(u, w)`` of a square lattice (``u`` = column, ``w`` = row) and every
qubit is an edge of that lattice.  A horizontal edge ``h(u, w)`` joins
``(u - 1, w)`` and ``(u, w)``; a vertical edge ``v(u, w)`` joins
``(u, w - 1)`` and ``(u, w)``.  For the torus the frame is the vertex lattice
itself.  For the rotated planar code it is the 45-degree rotated frame in
which the Z-check Tanner graph becomes a diamond-shaped patch of the square
lattice; qubits on the rough boundaries are edges whose outer end is a
*dummy* boundary node rather than a check.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import ContractError, InvalidParameterError

Family = Literal["toric", "rotated-planar"]
FAMILIES: tuple[str, ...] = ("toric", "rotated-planar")

HORIZONTAL = 1
VERTICAL = 0


@dataclass(frozen=True, eq=False)
class CodeModel:
    family: str
    L: int
    n: int
    m: int
    check_adjacency: tuple[tuple[int, ...], ...]
    variable_adjacency: tuple[tuple[int, ...], ...]
    logical_representatives: np.ndarray  # (k, n) uint8, X-type logicals
    dual_logicals: np.ndarray  # (k, n) uint8, anticommuting partners
    dual_checks: tuple[tuple[int, ...], ...]  # rows of the dual-sector matrix
    boundary_distance: np.ndarray  # (n,) float, inf on the torus
    rho_c: int
    rho_vo: int
    rho_ve: int
    check_pos: np.ndarray  # (m, 2) shift-frame (u, w)
    var_kind: np.ndarray  # (n,) HORIZONTAL / VERTICAL
    var_pos: np.ndarray  # (n, 2)
    variable_ends: np.ndarray  # (n, 2) node ids; ids >= m are dummy nodes
    dummy_pos: np.ndarray  # (n_dummy, 2)
    # padded index arrays for vectorised neighbourhood walks
    check_vars: np.ndarray = field(repr=False)  # (m, 4), pad value n
    var_checks: np.ndarray = field(repr=False)  # (n, 2), pad value m

    @property
    def k(self) -> int:
        return self.logical_representatives.shape[0]

    @property
    def has_boundary(self) -> bool:
        return self.family == "rotated-planar"

    @property
    def n_dummy(self) -> int:
        return self.dummy_pos.shape[0]

    def dense(self) -> np.ndarray:
        """Dense ``m x n`` parity-check matrix (debugging / small-L only)."""
        H = np.zeros((self.m, self.n), dtype=np.uint8)
        for i, row in enumerate(self.check_adjacency):
            H[i, list(row)] = 1
        return H

    def dense_dual(self) -> np.ndarray:
        Hd = np.zeros((len(self.dual_checks), self.n), dtype=np.uint8)
        for i, row in enumerate(self.dual_checks):
            Hd[i, list(row)] = 1
        return Hd

    def to_json(self) -> str:
        doc = {
            "family": self.family,
            "L": self.L,
            "n": self.n,
            "m": self.m,
            "checks": [list(row) for row in self.check_adjacency],
            "logicals": [np.flatnonzero(r).tolist() for r in self.logical_representatives],
            "dual_logicals": [np.flatnonzero(r).tolist() for r in self.dual_logicals],
        }
        return json.dumps(doc)


# --------------------------------------------------------------------------
# GF(2) helpers


def gf2_rank(matrix: np.ndarray) -> int:
    """Rank over GF(2) by Gaussian elimination on a dense 0/1 matrix."""
    A = (np.asarray(matrix) & 1).astype(bool)
    rows, cols = A.shape
    rank = 0
    for col in range(cols):
        if rank == rows:
            break
        pivots = np.flatnonzero(A[rank:, col])
        if pivots.size == 0:
            continue
        p = rank + pivots[0]
        if p != rank:
            A[[rank, p]] = A[[p, rank]]
        hit = np.flatnonzero(A[:, col])
        hit = hit[hit != rank]
        A[hit] ^= A[rank]
        rank += 1
    return rank


def in_row_space(vec: np.ndarray, matrix: np.ndarray) -> bool:
    base = gf2_rank(matrix)
    return gf2_rank(np.vstack([matrix, vec[None, :]])) == base


# --------------------------------------------------------------------------
# construction


def _finish(
    family: str,
    L: int,
    n: int,
    ends: np.ndarray,
    m: int,
    check_pos: np.ndarray,
    var_kind: np.ndarray,
    var_pos: np.ndarray,
    dummy_pos: np.ndarray,
    logicals: np.ndarray,
    dual_logicals: np.ndarray,
    dual_checks: list[list[int]],
    rho: tuple[int, int, int],
) -> CodeModel:
    check_lists: list[list[int]] = [[] for _ in range(m)]
    var_lists: list[list[int]] = [[] for _ in range(n)]
    for v in range(n):
        for node in ends[v]:
            if node < m:
                check_lists[node].append(v)
                var_lists[v].append(int(node))
    check_adj = tuple(tuple(sorted(r)) for r in check_lists)
    var_adj = tuple(tuple(sorted(r)) for r in var_lists)

    check_vars = np.full((m, 4), n, dtype=np.int64)
    for i, row in enumerate(check_adj):
        check_vars[i, : len(row)] = row
    var_checks = np.full((n, 2), m, dtype=np.int64)
    for v, row in enumerate(var_adj):
        var_checks[v, : len(row)] = row

    bd = _boundary_distance(n, m, ends, len(dummy_pos))

    code = CodeModel(
        family=family,
        L=L,
        n=n,
        m=m,
        check_adjacency=check_adj,
        variable_adjacency=var_adj,
        logical_representatives=logicals,
        dual_logicals=dual_logicals,
        dual_checks=tuple(tuple(sorted(r)) for r in dual_checks),
        boundary_distance=bd,
        rho_c=rho[0],
        rho_vo=rho[1],
        rho_ve=rho[2],
        check_pos=check_pos,
        var_kind=var_kind,
        var_pos=var_pos,
        variable_ends=ends,
        dummy_pos=dummy_pos,
        check_vars=check_vars,
        var_checks=var_checks,
    )
    _validate_logicals(code)
    return code


def _boundary_distance(n: int, m: int, ends: np.ndarray, n_dummy: int) -> np.ndarray:
    """Variable-inclusive path length from each qubit to the nearest dummy node."""
    bd = np.full(n, np.inf)
    if n_dummy == 0:
        return bd
    node_vars: list[list[int]] = [[] for _ in range(m + n_dummy)]
    for v in range(n):
        for node in ends[v]:
            node_vars[node].append(v)
    dist = np.full(m + n_dummy, -1, dtype=np.int64)
    queue: deque[int] = deque()
    for d in range(m, m + n_dummy):
        dist[d] = 0
        queue.append(d)
    while queue:
        x = queue.popleft()
        for v in node_vars[x]:
            for y in ends[v]:
                if dist[y] < 0:
                    dist[y] = dist[x] + 1
                    queue.append(int(y))
    for v in range(n):
        bd[v] = min(dist[ends[v][0]], dist[ends[v][1]]) + 1
    return bd


def _validate_logicals(code: CodeModel, max_n: int = 1200) -> None:
    H = code.dense()
    for r in code.logical_representatives:
        if (H.astype(np.int64) @ r % 2).any():
            raise ContractError("logical representative has non-zero syndrome")
    Hd = code.dense_dual()
    if (Hd.astype(np.int64) @ code.dual_logicals.T % 2).any():
        raise ContractError("dual logical does not commute with the dual checks")
    overlap = code.logical_representatives.astype(np.int64) @ code.dual_logicals.T.astype(np.int64) % 2
    if not np.array_equal(overlap, np.eye(code.k, dtype=np.int64)):
        raise ContractError("logical / dual-logical pairing is not symplectic")
    if code.n <= max_n:
        base = gf2_rank(Hd)
        if gf2_rank(np.vstack([Hd, code.logical_representatives])) != base + code.k:
            raise ContractError("logical representatives lie in the stabilizer row space")


def build_toric(L: int) -> CodeModel:
    """Vertex-edge incidence of the ``L x L`` torus.

    Checks are vertices labelled ``r*L + c``.  Variable rows alternate: row
    ``2r`` holds the horizontal edges ``(r, c)-(r, c+1)`` and row ``2r+1`` the
    vertical edges ``(r, c)-(r+1, c)``.
    """
    if not isinstance(L, (int, np.integer)) or L < 2:
        raise InvalidParameterError(f"toric code needs L >= 2, got {L!r}")
    L = int(L)
    n, m = 2 * L * L, L * L
    ends = np.zeros((n, 2), dtype=np.int64)
    var_kind = np.zeros(n, dtype=np.int64)
    var_pos = np.zeros((n, 2), dtype=np.int64)
    for r in range(L):
        for c in range(L):
            h = 2 * r * L + c
            ends[h] = (r * L + c, r * L + (c + 1) % L)
            var_kind[h] = HORIZONTAL
            var_pos[h] = ((c + 1) % L, r)
            v = (2 * r + 1) * L + c
            ends[v] = (r * L + c, ((r + 1) % L) * L + c)
            var_kind[v] = VERTICAL
            var_pos[v] = (c, (r + 1) % L)
    check_pos = np.array([(i % L, i // L) for i in range(m)], dtype=np.int64)

    logicals = np.zeros((2, n), dtype=np.uint8)
    logicals[0, [c for c in range(L)]] = 1  # horizontal cycle through row 0
    logicals[1, [(2 * r + 1) * L for r in range(L)]] = 1  # vertical cycle through column 0
    dual = np.zeros((2, n), dtype=np.uint8)
    dual[0, [2 * r * L for r in range(L)]] = 1  # horizontal edges cut by a vertical line
    dual[1, [L + c for c in range(L)]] = 1  # vertical edges cut by a horizontal line
    plaquettes = []
    for r in range(L):
        for c in range(L):
            plaquettes.append(
                [
                    2 * r * L + c,
                    2 * ((r + 1) % L) * L + c,
                    (2 * r + 1) * L + c,
                    (2 * r + 1) * L + (c + 1) % L,
                ]
            )
    return _finish(
        "toric", L, n, ends, m, check_pos, var_kind, var_pos,
        np.zeros((0, 2), dtype=np.int64), logicals, dual, plaquettes, (L, L, L),
    )


def _rotated_faces(L: int, parity: int) -> list[tuple[int, int]]:
    """Faces ``(r, c)`` (top-left qubit corner) carrying checks of one type."""
    faces = []
    if parity == 0:
        # Z type: interior checkerboard plus weight-2 faces on top/bottom
        for r in range(-1, L):
            for c in range(0, L - 1):
                if (r + c) % 2 == 0:
                    faces.append((r, c))
    else:
        for r in range(0, L - 1):
            for c in range(-1, L):
                if (r + c) % 2 == 1:
                    faces.append((r, c))
    return faces


def _face_qubits(L: int, r: int, c: int) -> list[int]:
    out = []
    for a, b in ((r, c), (r, c + 1), (r + 1, c), (r + 1, c + 1)):
        if 0 <= a < L and 0 <= b < L:
            out.append(a * L + b)
    return out


def build_rotated_planar(L: int) -> CodeModel:
    """Rotated planar code, Z-check sector, qubits labelled ``a*L + b``.

    Checks are labelled row-wise over face rows ``r = -1 .. L-1``.  Qubits in
    columns 0 and L-1 touch a single check; X-type logicals run along rows.
    """
    if not isinstance(L, (int, np.integer)) or L < 3 or L % 2 == 0:
        raise InvalidParameterError(f"rotated planar code needs odd L >= 3, got {L!r}")
    L = int(L)
    n = L * L
    faces = _rotated_faces(L, 0)
    m = len(faces)
    pos_to_check = {}
    check_pos = np.zeros((m, 2), dtype=np.int64)
    for i, (r, c) in enumerate(faces):
        uw = ((r + c) // 2, (r - c) // 2)
        check_pos[i] = uw
        pos_to_check[uw] = i

    var_kind = np.zeros(n, dtype=np.int64)
    var_pos = np.zeros((n, 2), dtype=np.int64)
    ends = np.zeros((n, 2), dtype=np.int64)
    dummies: dict[tuple[int, int], int] = {}
    for a in range(L):
        for b in range(L):
            q = a * L + b
            if (a + b) % 2 == 0:
                u, w = (a + b) // 2, (a - b) // 2
                var_kind[q] = HORIZONTAL
                p0, p1 = (u - 1, w), (u, w)
            else:
                u, w = (a + b - 1) // 2, (a - b + 1) // 2
                var_kind[q] = VERTICAL
                p0, p1 = (u, w - 1), (u, w)
            var_pos[q] = (u, w)
            for slot, p in enumerate((p0, p1)):
                if p in pos_to_check:
                    ends[q, slot] = pos_to_check[p]
                else:
                    if p not in dummies:
                        dummies[p] = len(dummies)
                    ends[q, slot] = -1 - dummies[p]
    ends = np.where(ends < 0, m - 1 - ends, ends)  # dummy j -> id m + j
    dummy_pos = np.zeros((len(dummies), 2), dtype=np.int64)
    for p, j in dummies.items():
        dummy_pos[j] = p

    logicals = np.zeros((1, n), dtype=np.uint8)
    logicals[0, [b for b in range(L)]] = 1  # row 0, left to right boundary
    dual = np.zeros((1, n), dtype=np.uint8)
    dual[0, [a * L for a in range(L)]] = 1  # column 0, top to bottom
    dual_checks = [_face_qubits(L, r, c) for r, c in _rotated_faces(L, 1)]
    return _finish(
        "rotated-planar", L, n, ends, m, check_pos, var_kind, var_pos,
        dummy_pos, logicals, dual, dual_checks, ((L - 1) // 2, L, L),
    )


def build_code(family: str, L: int) -> CodeModel:
    if family == "toric":
        return build_toric(L)
    if family == "rotated-planar":
        return build_rotated_planar(L)
    raise InvalidParameterError(f"unknown code family {family!r}")


# --------------------------------------------------------------------------
# GF(2) primitives


def syndrome(code: CodeModel, e: np.ndarray) -> np.ndarray:
    e = np.asarray(e)
    if e.shape != (code.n,):
        raise InvalidParameterError(f"error vector must have length {code.n}, got shape {e.shape}")
    flipped = code.var_checks[e.astype(bool)].ravel()
    counts = np.bincount(flipped, minlength=code.m + 1)[: code.m]
    return (counts & 1).astype(np.uint8)


def is_logical_failure(code: CodeModel, e: np.ndarray, e_hat: np.ndarray) -> bool:
    """True iff ``e + e_hat`` anticommutes with some dual logical operator."""
    e = np.asarray(e, dtype=np.uint8)
    e_hat = np.asarray(e_hat, dtype=np.uint8)
    if __debug__ and not np.array_equal(syndrome(code, e), syndrome(code, e_hat)):
        raise ContractError("estimate does not reproduce the syndrome of the error")
    residual = (e ^ e_hat).astype(np.int64)
    return bool((code.dual_logicals.astype(np.int64) @ residual % 2).any())
