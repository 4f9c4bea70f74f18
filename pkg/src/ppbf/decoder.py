"""Progressive-proximity bit flipping, plus the parallel-flip BF baseline.

Decoding runs in two phases.  Preliminary BF serially flips qubits whose two
checks are both unsatisfied, most isolated qubit first.  Iterative matching
then pairs the remaining unsatisfied checks (or sends one to a boundary)
along shortest paths read off the auxiliary distance influences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .code import CodeModel, syndrome
from .errors import ContractError, DecoderConfigurationError, InvalidParameterError
from .proximity import (
    InfluenceTemplate,
    ProximityState,
    alpha_at_embedding,
    canonical_wrap,
    compute_proximity_vector,
    shift_offsets,
)

_FAR = np.iinfo(np.int64).max // 4


@dataclass
class Step:
    """One syndrome-reducing action, recorded when tracing is enabled."""

    phase: str  # "bf", "match", "corner" or "boundary"
    weight_before: int
    weight_after: int
    pivot: int
    target: int  # -1 for a boundary match
    flipped: tuple[int, ...]


@dataclass
class DecodeOutcome:
    estimate: np.ndarray
    residual_syndrome: np.ndarray
    bf_flips: int
    matching_rounds: int
    converged: bool
    iterations: int = 0
    boundary_matches: int = 0
    trace: list[Step] | None = field(default=None, repr=False)


class BFResult(NamedTuple):
    estimate: np.ndarray
    residual: np.ndarray
    state: ProximityState
    flips: int


class MatchResult(NamedTuple):
    estimate: np.ndarray
    rounds: int
    boundary_matches: int


@lru_cache(maxsize=64)
def _boundary_int(code: CodeModel) -> np.ndarray:
    bd = code.boundary_distance
    return np.where(np.isfinite(bd), bd, _FAR).astype(np.int64)


def _check_pair(code: CodeModel, template: InfluenceTemplate) -> None:
    if (code.family, code.L, code.m, code.n) != (template.family, template.L, template.m, template.n):
        raise InvalidParameterError("template was built for a different code")


def _toggle(s: np.ndarray, code: CodeModel, flips: np.ndarray) -> None:
    hits = np.bincount(code.var_checks[flips].ravel(), minlength=code.m + 1)[: code.m]
    s ^= (hits & 1).astype(s.dtype)


# --------------------------------------------------------------------------
# preliminary BF


def preliminary_bf(
    code: CodeModel,
    template: InfluenceTemplate,
    s: np.ndarray,
    state: ProximityState | None = None,
    trace: list[Step] | None = None,
) -> BFResult:
    _check_pair(code, template)
    n, m = code.n, code.m
    s_pad = np.append(np.asarray(s, dtype=np.uint8), np.uint8(0))
    state = compute_proximity_vector(template, s_pad[:m]) if state is None else state.copy()
    tab = template.tables
    e = np.zeros(n, dtype=np.uint8)
    # one spare slot absorbs the padding index of degree<4 checks
    u = np.zeros(n + 1, dtype=np.int64)
    u[:n] = s_pad[code.var_checks].sum(axis=1)
    weight = int(s_pad.sum())
    flips = 0
    while True:
        cand = np.flatnonzero(u[:n] == 2)
        if cand.size == 0:
            break
        k = int(cand[np.argmin(state.nu[cand])])
        c1, c2 = (int(c) for c in code.var_checks[k])
        e[k] ^= 1
        s_pad[c1] = 0
        s_pad[c2] = 0
        np.subtract.at(u, code.check_vars[[c1, c2]].ravel(), 1)
        state.nu -= tab.nu[c1] + tab.nu[c2]
        state.gamma -= tab.gamma[c1] + tab.gamma[c2]
        flips += 1
        if trace is not None:
            trace.append(Step("bf", weight, weight - 2, c1, c2, (k,)))
        weight -= 2
    return BFResult(e, s_pad[:m].copy(), state, flips)


# --------------------------------------------------------------------------
# iterative matching


def _leg(alpha_a: np.ndarray, alpha_b: np.ndarray, length: int) -> np.ndarray:
    if length == 0:
        return np.zeros(0, dtype=np.int64)
    on = (alpha_a > 0) & (alpha_b > 0) & (alpha_a + alpha_b == length + 1)
    return np.flatnonzero(on)


def _toric_chain(L: int, start: int, axis: int, steps: int) -> np.ndarray:
    """Straight chain leaving ``start`` in the positive ``axis`` direction."""
    u, w = start % L, start // L
    out = []
    for _ in range(steps):
        if axis == 0:
            out.append(2 * w * L + u)
            u = (u + 1) % L
        else:
            out.append((2 * w + 1) * L + u)
            w = (w + 1) % L
    return np.array(out, dtype=np.int64)


def _corner_path(
    code: CodeModel, template: InfluenceTemplate, i: int, j: int, delta: int
) -> np.ndarray:
    """Pick one of the degenerate shortest paths via an intermediate corner check."""
    tab = template.tables
    if code.family == "toric":
        L = code.L
        sx, sy = shift_offsets(i, j, L)
        sx, sy = canonical_wrap(sx, L), canonical_wrap(sy, L)
        ui, wi = i % L, i // L
        uj, wj = j % L, j // L
        corners = [(wi * L + uj, True), (wj * L + ui, False)]

        def alpha_of(z):
            return tab.alpha[z]
    else:
        S = template.rho_c
        pi, pj = int(template.phi_c[i]), int(template.phi_c[j])
        sx, sy = shift_offsets(pi, pj, S)
        corners = [((pi // S) * S + pj % S, True), ((pj // S) * S + pi % S, False)]
        inv = template.inv_phi_c

        def alpha_of(z):
            t = inv[z]
            return tab.alpha[t] if t >= 0 else alpha_at_embedding(template, z)

    ax, ay = abs(sx), abs(sy)
    if ax + ay != delta:
        raise ContractError(f"shift ({sx}, {sy}) inconsistent with distance {delta}")
    a_i, a_j = tab.alpha[i], tab.alpha[j]
    for z, row_first in corners:
        a_z = alpha_of(z)
        # row_first: pivot -> corner along the row, corner -> target along the column
        legs = [(a_i, a_z, ax if row_first else ay), (a_z, a_j, ay if row_first else ax)]
        parts = []
        for k, (a, b, length) in enumerate(legs):
            seg = _leg(a, b, length)
            if code.family == "toric" and seg.size == 2 * length and 2 * length == code.L:
                # antipodal on an even torus: both arcs tie, keep the positive one
                start = i if k == 0 else z
                horizontal = row_first == (k == 0)
                sign = sx if horizontal else sy
                if sign < 0:
                    raise ContractError("canonical wrap shift should be positive when antipodal")
                seg = _toric_chain(code.L, start, 0 if horizontal else 1, length)
            parts.append(seg)
        flips = np.concatenate(parts)
        if flips.size != delta or np.unique(flips).size != delta:
            continue
        s_path = np.zeros(code.m, dtype=np.uint8)
        _toggle(s_path, code, flips)
        if np.flatnonzero(s_path).tolist() == sorted((i, j)):
            return flips
    raise ContractError(f"no corner path between checks {i} and {j}")


def _boundary_chain(code: CodeModel, i: int, delta_b: int) -> np.ndarray:
    """Shortest chain from check ``i`` off the nearest open boundary."""
    bd = _boundary_int(code)
    path = []
    x = i
    for remaining in range(delta_b, 0, -1):
        step = next((v for v in code.check_adjacency[x] if bd[v] == remaining), None)
        if step is None:
            raise ContractError(f"boundary walk from check {i} lost the gradient")
        path.append(step)
        if remaining > 1:
            a, b = (int(c) for c in code.variable_ends[step])
            x = b if a == x else a
    return np.array(path, dtype=np.int64)


def iterative_matching(
    code: CodeModel,
    template: InfluenceTemplate,
    e_partial: np.ndarray,
    s_residual: np.ndarray,
    state: ProximityState,
    trace: list[Step] | None = None,
) -> MatchResult:
    _check_pair(code, template)
    tab = template.tables
    bd = _boundary_int(code)
    e = np.array(e_partial, dtype=np.uint8)
    s = np.array(s_residual, dtype=np.uint8)
    gamma = state.gamma.copy()
    rounds = 0
    to_boundary = 0
    while s.any():
        unsat = np.flatnonzero(s)
        i = int(unsat[np.argmin(gamma[unsat])])
        a_i = tab.alpha[i]
        others = unsat[unsat != i]

        j, delta = -1, _FAR
        if others.size:
            reach = np.append(a_i, 0)[code.check_vars[others]]
            reach = np.where(reach == 0, _FAR, reach).min(axis=1)
            order = np.lexsort((others, gamma[others], reach))
            if reach[order[0]] < _FAR:
                j, delta = int(others[order[0]]), int(reach[order[0]])

        delta_b = _FAR
        if code.has_boundary:
            near = a_i > 0
            delta_b = int((bd[near] + a_i[near] - 1).min())

        weight = int(s.sum())
        if delta_b < delta:
            flips = _boundary_chain(code, i, delta_b)
            cleared = [i]
            phase = "boundary"
            to_boundary += 1
        elif j >= 0:
            on = _leg(a_i, tab.alpha[j], delta)
            if on.size == delta:
                flips, phase = on, "match"
            else:
                flips, phase = _corner_path(code, template, i, j, delta), "corner"
            cleared = [i, j]
        else:
            raise DecoderConfigurationError(
                f"no target within depth D={template.D} of check {i}; increase the depth"
            )

        e[flips] ^= 1
        before = s.copy()
        _toggle(s, code, flips)
        changed = np.flatnonzero(before != s).tolist()
        if changed != sorted(cleared) or s[cleared].any():
            raise ContractError(f"matching round toggled checks {changed}, expected {cleared}")
        gamma -= tab.gamma[cleared].sum(axis=0)
        rounds += 1
        if trace is not None:
            trace.append(Step(phase, weight, weight - len(cleared), i, j if len(cleared) == 2 else -1,
                              tuple(int(f) for f in flips)))
    return MatchResult(e, rounds, to_boundary)


# --------------------------------------------------------------------------
# full decoders


def ppbf_decode(
    code: CodeModel, template: InfluenceTemplate, s: np.ndarray, trace: bool = False
) -> DecodeOutcome:
    s = np.asarray(s, dtype=np.uint8)
    if s.shape != (code.m,):
        raise InvalidParameterError(f"syndrome must have length {code.m}")
    steps: list[Step] | None = [] if trace else None
    bf = preliminary_bf(code, template, s, trace=steps)
    match = iterative_matching(code, template, bf.estimate, bf.residual, bf.state, trace=steps)
    residual = syndrome(code, match.estimate) ^ s
    return DecodeOutcome(
        estimate=match.estimate,
        residual_syndrome=residual,
        bf_flips=bf.flips,
        matching_rounds=match.rounds,
        converged=not residual.any(),
        boundary_matches=match.boundary_matches,
        trace=steps,
    )


def classical_bf_decode(code: CodeModel, s: np.ndarray, max_iters: int = 100) -> DecodeOutcome:
    """Flip every qubit with two unsatisfied checks, in parallel, until stuck."""
    if max_iters < 1:
        raise InvalidParameterError("max_iters must be positive")
    s_pad = np.append(np.asarray(s, dtype=np.uint8), np.uint8(0))
    if s_pad.shape != (code.m + 1,):
        raise InvalidParameterError(f"syndrome must have length {code.m}")
    e = np.zeros(code.n, dtype=np.uint8)
    flips = iterations = 0
    while s_pad.any() and iterations < max_iters:
        cand = np.flatnonzero(s_pad[code.var_checks].sum(axis=1) == 2)
        if cand.size == 0:
            break
        e[cand] ^= 1
        _toggle(s_pad[: code.m], code, cand)
        flips += cand.size
        iterations += 1
    residual = s_pad[: code.m].copy()
    return DecodeOutcome(
        estimate=e,
        residual_syndrome=residual,
        bf_flips=flips,
        matching_rounds=0,
        converged=not residual.any(),
        iterations=iterations,
    )
