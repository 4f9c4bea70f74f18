"""Proximity influences: offline templates, label shifts and online updates.

A template holds the influence of a single reference check, computed once on
an embedding lattice.  The influence of any other check is obtained by a
coordinate shift of that template (linear label maps on the planar embedding,
cyclic maps on the torus), so the decoder never re-runs the recursion.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from pathlib import Path

import numpy as np

from .code import HORIZONTAL, CodeModel, build_code
from .errors import ContractError, InvalidParameterError, TemplateOverflowError

INT63_MAX = 2**63 - 1

CACHE_ENV = "PPBF_CACHE_DIR"


@dataclass(frozen=True, eq=False)
class InfluenceTemplate:
    family: str
    L: int
    D: int
    embed_rows: int
    embed_cols: int
    gamma_ref: np.ndarray  # over embedding checks
    nu_ref: np.ndarray  # over embedding variables
    alpha_ref: np.ndarray  # over embedding variables
    ref_check: int  # embedding label
    ref_target: int  # target label of ref_check
    phi_c: np.ndarray  # target check -> embedding check
    phi_v: np.ndarray  # target variable -> embedding variable
    rho_c: int
    rho_vo: int
    rho_ve: int
    m: int = field(repr=False)
    n: int = field(repr=False)

    @property
    def vars_per_row_pair(self) -> int:
        return self.rho_vo + self.rho_ve

    @cached_property
    def inv_phi_c(self) -> np.ndarray:
        inv = np.full(self.gamma_ref.shape[0], -1, dtype=np.int64)
        inv[self.phi_c] = np.arange(self.m)
        return inv

    @cached_property
    def tables(self) -> "ShiftTables":
        """Every shifted influence, one row per target check (built on demand)."""
        gamma = np.zeros((self.m, self.m), dtype=np.int64)
        nu = np.zeros((self.m, self.n), dtype=np.int64)
        alpha = np.zeros((self.m, self.n), dtype=np.int64)
        for j in range(self.m):
            gamma[j], nu[j] = shift_influence(self, j)
            alpha[j] = shift_alpha(self, j)
        for a in (gamma, nu, alpha):
            a.setflags(write=False)
        return ShiftTables(gamma, nu, alpha)


@dataclass(frozen=True)
class ShiftTables:
    gamma: np.ndarray  # (m, m)
    nu: np.ndarray  # (m, n)
    alpha: np.ndarray  # (m, n)


@dataclass
class ProximityState:
    nu: np.ndarray
    gamma: np.ndarray

    def copy(self) -> "ProximityState":
        return ProximityState(self.nu.copy(), self.gamma.copy())


# --------------------------------------------------------------------------
# lattice plumbing


@dataclass(frozen=True)
class _Graph:
    """Padded adjacency of a Tanner graph (pad index = count of the other side)."""

    check_vars: np.ndarray
    var_checks: np.ndarray

    @property
    def m(self) -> int:
        return self.check_vars.shape[0]

    @property
    def n(self) -> int:
        return self.var_checks.shape[0]


def _code_graph(code: CodeModel) -> _Graph:
    return _Graph(code.check_vars, code.var_checks)


def _grid_labels(S: int):
    """Label helpers for an ``S x S`` planar embedding with open edges.

    Row pair ``W`` holds the vertical edges above check row ``W`` (``S``
    labels) followed by the horizontal edges of check row ``W`` (``S + 1``
    labels); a final vertical row closes the grid.
    """
    pair = 2 * S + 1

    def check(u, w):
        return w * S + u

    def vertical(u, w):
        return w * pair + u

    def horizontal(u, w):
        return w * pair + S + u

    n_vars = S * pair + S
    return check, vertical, horizontal, n_vars


def _grid_graph(S: int) -> _Graph:
    check, vertical, horizontal, n_vars = _grid_labels(S)
    m = S * S
    check_vars = np.zeros((m, 4), dtype=np.int64)
    var_checks = np.full((n_vars, 2), m, dtype=np.int64)
    fill = np.zeros(n_vars, dtype=np.int64)
    for w in range(S):
        for u in range(S):
            c = check(u, w)
            vs = (vertical(u, w), vertical(u, w + 1), horizontal(u, w), horizontal(u + 1, w))
            check_vars[c] = vs
            for v in vs:
                var_checks[v, fill[v]] = c
                fill[v] += 1
    return _Graph(check_vars, var_checks)


def propagate(graph: _Graph, seed: np.ndarray, depth: int, limit: int = INT63_MAX):
    """Run the influence recursion ``depth`` steps from check vector ``seed``.

    Returns ``(gamma, nu)`` after ``depth`` steps; ``depth = 0`` gives the
    seed and its variable image.  Raises :class:`TemplateOverflowError` when a
    step could leave the signed 63-bit range.
    """
    gamma = np.asarray(seed, dtype=np.int64)
    nu_pad = np.append(gamma, 0)
    nu = nu_pad[graph.var_checks].sum(axis=1)
    deg_c = graph.check_vars.shape[1]
    deg_v = graph.var_checks.shape[1]
    for step in range(1, depth + 1):
        top = int(nu.max(initial=0))
        if top * deg_c * deg_v > limit:
            raise TemplateOverflowError(f"influence recursion overflows int63 at depth {step}")
        gamma = np.append(nu, 0)[graph.check_vars].sum(axis=1)
        nu = np.append(gamma, 0)[graph.var_checks].sum(axis=1)
    return gamma, nu


def _bfs_alpha(graph: _Graph, start: int, cap: int) -> np.ndarray:
    """Variable-inclusive shortest path length from check ``start``; 0 past ``cap``."""
    alpha = np.zeros(graph.n, dtype=np.int64)
    seen = np.zeros(graph.m + 1, dtype=bool)
    seen[graph.m] = True
    seen[start] = True
    frontier = [start]
    d = 0
    while frontier and d < cap:
        d += 1
        nxt = []
        for c in frontier:
            for v in graph.check_vars[c]:
                if v == graph.n or alpha[v]:
                    continue
                alpha[v] = d
                for c2 in graph.var_checks[v]:
                    if not seen[c2]:
                        seen[c2] = True
                        nxt.append(int(c2))
        frontier = nxt
    return alpha


# --------------------------------------------------------------------------
# template construction


def _rotated_embedding(code: CodeModel, D: int):
    """Place the rotated code inside an S x S grid, reference check at the centre."""
    cp = code.check_pos
    # variable coordinates in the same index space as the grid's edge rows
    vp = code.var_pos
    spans = []
    for pts in (cp, vp):
        for axis in (0, 1):
            spans.append(int(pts[:, axis].max() - cp[:, axis].min()))
            spans.append(int(cp[:, axis].max() - pts[:, axis].min()))
    reach = max(D, max(spans))
    S = max(2 * reach + 1, code.L + D + 1)
    if S % 2 == 0:
        S += 1
    centre = S // 2

    # reference: target check closest to the centroid of the patch
    mid = cp.mean(axis=0)
    ref_target = int(np.argmin(np.abs(cp - mid).sum(axis=1)))
    off = centre - cp[ref_target]

    check, vertical, horizontal, n_vars = _grid_labels(S)
    phi_c = np.array([check(*(p + off)) for p in cp], dtype=np.int64)
    phi_v = np.empty(code.n, dtype=np.int64)
    for q in range(code.n):
        u, w = vp[q] + off
        phi_v[q] = horizontal(u, w) if code.var_kind[q] == HORIZONTAL else vertical(u, w)
    if not (0 <= (cp + off).min() and (cp + off).max() < S):
        raise ContractError("target code does not fit inside its embedding")
    return S, phi_c, phi_v, ref_target, int(phi_c[ref_target])


def build_template(family: str, L: int, D: int | None = None) -> InfluenceTemplate:
    """Precompute the reference influence for ``family`` at size ``L``, depth ``D``."""
    if D is None:
        D = L
    if not isinstance(D, (int, np.integer)) or D < 1:
        raise InvalidParameterError(f"influence depth must be >= 1, got {D!r}")
    D = int(D)
    code = build_code(family, L)
    if family == "toric":
        graph = _code_graph(code)
        S = code.L
        ref = (L // 2) * L + L // 2
        ref_target = ref
        phi_c = np.arange(code.m, dtype=np.int64)
        phi_v = np.arange(code.n, dtype=np.int64)
        rho = (L, L, L)
    else:
        S, phi_c, phi_v, ref_target, ref = _rotated_embedding(code, D)
        if not S > L + D:
            raise InvalidParameterError(f"embedding {S}x{S} too small for L={L}, D={D}")
        graph = _grid_graph(S)
        rho = (S, S, S + 1)

    seed = np.zeros(graph.m, dtype=np.int64)
    seed[ref] = 1
    gamma, nu = propagate(graph, seed, D)
    peak = max(int(gamma.max()), int(nu.max()))
    if peak * code.m > INT63_MAX:
        raise TemplateOverflowError(
            f"depth {D}: template peak {peak} times {code.m} checks exceeds int63"
        )
    alpha = _bfs_alpha(graph, ref, D + 1)
    for a in (gamma, nu, alpha):
        a.setflags(write=False)
    return InfluenceTemplate(
        family=family, L=L, D=D, embed_rows=S, embed_cols=S,
        gamma_ref=gamma, nu_ref=nu, alpha_ref=alpha,
        ref_check=ref, ref_target=ref_target, phi_c=phi_c, phi_v=phi_v,
        rho_c=rho[0], rho_vo=rho[1], rho_ve=rho[2], m=code.m, n=code.n,
    )


# --------------------------------------------------------------------------
# shifts


def shift_offsets(src: int, dst: int, rho_c: int) -> tuple[int, int]:
    """Horizontal and vertical shift ``(sigma_x, sigma_y)`` between two check labels."""
    sigma_y = dst // rho_c - src // rho_c
    sigma_x = dst % rho_c - src % rho_c
    return sigma_x, sigma_y


def canonical_wrap(delta: int, L: int) -> int:
    """Representative of ``delta mod L`` in ``(-L/2, L/2]``."""
    d = delta % L
    return d - L if 2 * d > L else d


def _check_target(template: InfluenceTemplate, j: int) -> None:
    if not 0 <= j < template.m:
        raise InvalidParameterError(f"check label {j} outside [0, {template.m})")


def _planar_shift(values: np.ndarray, sigma: int, read: np.ndarray) -> np.ndarray:
    """Move every label ``k`` to ``k + sigma`` and read back at ``read``; drops spill-over."""
    size = values.shape[0]
    k = np.arange(size)
    k_new = k + sigma
    keep = (k_new >= 0) & (k_new < size)
    moved = np.zeros(size, dtype=values.dtype)
    moved[k_new[keep]] = values[keep]
    return moved[read]


def _planar_shift_to(template: InfluenceTemplate, emb_check: int):
    sx, sy = shift_offsets(template.ref_check, emb_check, template.rho_c)
    return sx + sy * template.rho_c, sx + sy * template.vars_per_row_pair


def shift_influence(template: InfluenceTemplate, j: int) -> tuple[np.ndarray, np.ndarray]:
    """Influence ``(gamma_j, nu_j)`` of target check ``j`` from the stored template."""
    _check_target(template, j)
    if template.family == "toric":
        return shift_influence_toric(template, j)
    dc, dv = _planar_shift_to(template, int(template.phi_c[j]))
    return (
        _planar_shift(template.gamma_ref, dc, template.phi_c),
        _planar_shift(template.nu_ref, dv, template.phi_v),
    )


def _toric_maps(L: int, sigma_x: int, sigma_y: int) -> tuple[np.ndarray, np.ndarray]:
    kc = np.arange(L * L)
    kc_new = ((kc + sigma_x) % L + L * (kc // L) + sigma_y * L) % (L * L)
    kv = np.arange(2 * L * L)
    kv_new = ((kv + sigma_x) % L + L * (kv // L) + 2 * sigma_y * L) % (2 * L * L)
    return kc_new, kv_new


def _toric_sigma(template: InfluenceTemplate, j: int) -> tuple[int, int]:
    L = template.L
    sx, sy = shift_offsets(template.ref_check, j, template.rho_c)
    return canonical_wrap(sx, L), canonical_wrap(sy, L)


def shift_influence_toric(template: InfluenceTemplate, j: int) -> tuple[np.ndarray, np.ndarray]:
    if template.family != "toric":
        raise InvalidParameterError("cyclic shift maps apply to the toric family only")
    _check_target(template, j)
    kc_new, kv_new = _toric_maps(template.L, *_toric_sigma(template, j))
    gamma = np.empty_like(template.gamma_ref)
    gamma[kc_new] = template.gamma_ref
    nu = np.empty_like(template.nu_ref)
    nu[kv_new] = template.nu_ref
    return gamma, nu


def shift_alpha(template: InfluenceTemplate, j: int) -> np.ndarray:
    """Shortest-path lengths from target check ``j`` (0 beyond depth D + 1)."""
    _check_target(template, j)
    if template.family == "toric":
        _, kv_new = _toric_maps(template.L, *_toric_sigma(template, j))
        alpha = np.empty_like(template.alpha_ref)
        alpha[kv_new] = template.alpha_ref
        return alpha
    return alpha_at_embedding(template, int(template.phi_c[j]))


def alpha_at_embedding(template: InfluenceTemplate, emb_check: int) -> np.ndarray:
    """Shifted alpha for an arbitrary embedding check, e.g. a boundary corner."""
    _, dv = _planar_shift_to(template, emb_check)
    return _planar_shift(template.alpha_ref, dv, template.phi_v)


# --------------------------------------------------------------------------
# proximity vectors


def compute_proximity_vector(template: InfluenceTemplate, s: np.ndarray) -> ProximityState:
    s = np.asarray(s)
    if s.shape != (template.m,):
        raise InvalidParameterError(f"syndrome must have length {template.m}")
    idx = np.flatnonzero(s)
    t = template.tables
    return ProximityState(nu=t.nu[idx].sum(axis=0), gamma=t.gamma[idx].sum(axis=0))


def shift_and_remove(
    state: ProximityState, template: InfluenceTemplate, satisfied
) -> ProximityState:
    """Subtract the influences of newly satisfied checks from ``state``."""
    idx = np.asarray(list(satisfied), dtype=np.int64)
    t = template.tables
    nu = state.nu - t.nu[idx].sum(axis=0)
    gamma = state.gamma - t.gamma[idx].sum(axis=0)
    if nu.min(initial=0) < 0 or gamma.min(initial=0) < 0:
        raise ContractError("removed a check that was not contributing to the proximity state")
    return ProximityState(nu=nu, gamma=gamma)


# --------------------------------------------------------------------------
# on-disk cache


def cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV, Path.home() / ".cache" / "ppbf"))


def template_path(family: str, L: int, D: int, directory: Path | None = None) -> Path:
    return (directory or cache_dir()) / f"template-{family}-L{L}-D{D}.npz"


def save_template(template: InfluenceTemplate, directory: Path | None = None) -> Path:
    path = template_path(template.family, template.L, template.D, directory)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savez_compressed(
        path,
        family=np.array(template.family),
        ints=np.array(
            [template.L, template.D, template.embed_rows, template.embed_cols,
             template.ref_check, template.ref_target, template.rho_c,
             template.rho_vo, template.rho_ve, template.m, template.n]
        ),
        gamma_ref=template.gamma_ref,
        nu_ref=template.nu_ref,
        alpha_ref=template.alpha_ref,
        phi_c=template.phi_c,
        phi_v=template.phi_v,
    )
    return path


def load_template(path: Path) -> InfluenceTemplate:
    with np.load(path) as z:
        L, D, rows, cols, ref, ref_t, rc, rvo, rve, m, n = (int(x) for x in z["ints"])
        arrays = {k: z[k] for k in ("gamma_ref", "nu_ref", "alpha_ref", "phi_c", "phi_v")}
        family = str(z["family"])
    for a in arrays.values():
        a.setflags(write=False)
    return InfluenceTemplate(
        family=family, L=L, D=D, embed_rows=rows, embed_cols=cols,
        ref_check=ref, ref_target=ref_t, rho_c=rc, rho_vo=rvo, rho_ve=rve,
        m=m, n=n, **arrays,
    )


@lru_cache(maxsize=32)
def get_template(family: str, L: int, D: int | None = None, use_cache: bool = True) -> InfluenceTemplate:
    """Template from the on-disk cache when present, else built (not written)."""
    D = L if D is None else D
    if use_cache:
        path = template_path(family, L, D)
        if path.exists():
            t = load_template(path)
            if (t.family, t.L, t.D) == (family, L, D):
                return t
    return build_template(family, L, D)
