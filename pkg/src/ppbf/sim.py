"""Monte Carlo estimation of logical error rates over the bit-flip channel.

Every trial draws its error from a Philox stream keyed by the point seed and
indexed by the trial number, so results do not depend on how trials are
split across workers.  Trials are consumed in index order and a point stops
at the trial that produces the ``target_failures``-th failure.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from itertools import groupby
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.stats import binomtest

from . import __version__
from .code import CodeModel, build_code, is_logical_failure, syndrome
from .decoder import classical_bf_decode, ppbf_decode
from .errors import ContractError, InvalidParameterError, PPBFError
from .proximity import InfluenceTemplate, get_template

DECODERS = ("ppbf", "classical-bf")
CSV_COLUMNS = ("family", "L", "D", "p", "decoder", "trials", "failures",
               "rate", "ci_low", "ci_high", "seed", "seconds")
CHUNK = 256


@dataclass(frozen=True)
class TrialConfig:
    family: str
    L: int
    p: float
    D: int | None = None  # None means D = L
    seed: int = 0
    max_trials: int = 100_000
    target_failures: int = 100
    decoder: str = "ppbf"

    def __post_init__(self):
        if not 0 <= self.p <= 0.5:
            raise InvalidParameterError(f"p must lie in [0, 0.5], got {self.p}")
        if self.D is not None and self.D < 1:
            raise InvalidParameterError("D must be positive")
        if not 0 <= self.seed < 2**64:
            raise InvalidParameterError("seed must be a 64-bit unsigned integer")
        if self.max_trials < 1 or self.target_failures < 1:
            raise InvalidParameterError("max_trials and target_failures must be positive")
        if self.decoder not in DECODERS:
            raise InvalidParameterError(f"decoder must be one of {DECODERS}")

    @property
    def depth(self) -> int:
        return self.L if self.D is None else self.D


@dataclass
class ErrorRatePoint:
    config: TrialConfig
    trials: int
    failures: int
    ci_low: float
    ci_high: float
    seconds: float
    error: str | None = None

    @property
    def rate(self) -> float:
        return self.failures / self.trials if self.trials else float("nan")

    def row(self, timing: bool = False) -> dict:
        c = self.config
        return {
            "family": c.family, "L": c.L, "D": c.depth, "p": c.p, "decoder": c.decoder,
            "trials": self.trials, "failures": self.failures, "rate": self.rate,
            "ci_low": self.ci_low, "ci_high": self.ci_high, "seed": c.seed,
            "seconds": round(self.seconds, 3) if timing else None,
        }


def wilson_interval(failures: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if trials == 0:
        return (0.0, 1.0)
    ci = binomtest(failures, trials).proportion_ci(confidence_level=confidence, method="wilson")
    return (float(ci.low), float(ci.high))


# --------------------------------------------------------------------------
# sampling


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, trial]))


def sample_bsc(n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    if not 0 <= p <= 1:
        raise InvalidParameterError(f"p must lie in [0, 1], got {p}")
    return (rng.random(n) < p).astype(np.uint8)


def derive_seed(base_seed: int, index: int) -> int:
    return int(np.random.SeedSequence([base_seed, index]).generate_state(1, np.uint64)[0])


# --------------------------------------------------------------------------
# trial loop


@lru_cache(maxsize=16)
def _code(family: str, L: int) -> CodeModel:
    return build_code(family, L)


def _template(family: str, L: int, D: int) -> InfluenceTemplate:
    t = get_template(family, L, D)
    t.tables  # materialise shift tables once per process
    return t


def _chunk_failures(config: TrialConfig, start: int, stop: int) -> list[int]:
    """Indices of failing trials in ``[start, stop)``."""
    code = _code(config.family, config.L)
    template = _template(config.family, config.L, config.depth) if config.decoder == "ppbf" else None
    failed = []
    for trial in range(start, stop):
        e = sample_bsc(code.n, config.p, trial_rng(config.seed, trial))
        s = syndrome(code, e)
        if config.decoder == "ppbf":
            out = ppbf_decode(code, template, s)
            if not out.converged:
                raise ContractError(f"PPBF left a residual syndrome at trial {trial}")
            bad = is_logical_failure(code, e, out.estimate)
        else:
            out = classical_bf_decode(code, s)
            bad = not out.converged or is_logical_failure(code, e, out.estimate)
        if bad:
            failed.append(trial)
    return failed


def _chunks(max_trials: int, size: int = CHUNK) -> Iterator[tuple[int, int]]:
    for start in range(0, max_trials, size):
        yield start, min(start + size, max_trials)


def _consume(config: TrialConfig, results: Iterable[list[int]]) -> tuple[int, int]:
    """Apply the stopping rule to in-order chunk results."""
    failures = 0
    for (start, stop), failed in zip(_chunks(config.max_trials), results):
        if failures + len(failed) >= config.target_failures:
            last = failed[config.target_failures - failures - 1]
            return last + 1, config.target_failures
        failures += len(failed)
    return config.max_trials, failures


def _ordered(pool: ProcessPoolExecutor | None, config: TrialConfig, window: int) -> Iterator[list[int]]:
    if pool is None:
        for start, stop in _chunks(config.max_trials):
            yield _chunk_failures(config, start, stop)
        return
    pending = []
    chunks = _chunks(config.max_trials)
    try:
        for start, stop in chunks:
            pending.append(pool.submit(_chunk_failures, config, start, stop))
            if len(pending) >= window:
                yield pending.pop(0).result()
        while pending:
            yield pending.pop(0).result()
    finally:
        for fut in pending:
            fut.cancel()


def _point(config: TrialConfig, pool: ProcessPoolExecutor | None, jobs: int) -> ErrorRatePoint:
    t0 = time.perf_counter()
    if config.p == 0:
        trials, failures = config.max_trials, 0
    else:
        results = _ordered(pool, config, 2 * jobs)
        try:
            trials, failures = _consume(config, results)
        finally:
            results.close()
    lo, hi = wilson_interval(failures, trials)
    return ErrorRatePoint(config, trials, failures, lo, hi, time.perf_counter() - t0)


def _pool(jobs: int) -> ProcessPoolExecutor | None:
    if jobs < 1:
        raise InvalidParameterError("jobs must be positive")
    return ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None


def run_point(config: TrialConfig, jobs: int = 1) -> ErrorRatePoint:
    pool = _pool(jobs)
    try:
        return _point(config, pool, jobs)
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)


def iter_sweep(
    family: str,
    Ls: Sequence[int],
    ps: Sequence[float],
    base_seed: int,
    *,
    D: int | None = None,
    decoder: str = "ppbf",
    max_trials: int = 100_000,
    target_failures: int = 100,
    jobs: int = 1,
) -> Iterator[ErrorRatePoint]:
    """Yield the points of the ``Ls x ps`` grid in row-major order.

    A point whose decode raises is yielded with ``error`` set and zero trials
    instead of aborting the rest of the grid.
    """
    if not Ls or not ps:
        raise InvalidParameterError("sweep needs at least one L and one p")
    pool = _pool(jobs)
    try:
        for idx, (L, p) in enumerate((L, p) for L in Ls for p in ps):
            config = TrialConfig(family, L, p, D, derive_seed(base_seed, idx),
                                 max_trials, target_failures, decoder)
            try:
                yield _point(config, pool, jobs)
            except PPBFError as exc:
                yield ErrorRatePoint(config, 0, 0, 0.0, 1.0, 0.0, error=f"{type(exc).__name__}: {exc}")
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)


def run_sweep(family, Ls, ps, base_seed, **kwargs) -> list[ErrorRatePoint]:
    return list(iter_sweep(family, Ls, ps, base_seed, **kwargs))


# --------------------------------------------------------------------------
# threshold


@dataclass(frozen=True)
class ThresholdEstimate:
    low: float | None
    high: float | None
    crossings: tuple[tuple[int, int, float], ...] = ()
    missing: tuple[tuple[int, int], ...] = field(default=())

    @property
    def found(self) -> bool:
        return self.low is not None

    def describe(self) -> str:
        if not self.found:
            return "# threshold: no crossing in range"
        return f"# threshold: [{self.low:.4f}, {self.high:.4f}]"


def _log_rate(point: ErrorRatePoint) -> float:
    # zero-failure points get half a count so the log stays finite
    return math.log(max(point.failures, 0.5) / point.trials)


def _crossing(ps: list[float], diff: list[float]) -> float | None:
    for k in range(len(ps) - 1):
        a, b = diff[k], diff[k + 1]
        if a == 0 and (k == 0 or diff[k - 1] < 0):
            return ps[k]
        if a < 0 < b or (a < 0 and b == 0):
            return ps[k] + (ps[k + 1] - ps[k]) * (-a) / (b - a)
    return None


def estimate_threshold(points: Iterable[ErrorRatePoint]) -> ThresholdEstimate:
    """Hull of the crossings of log-rate curves for consecutive lattice sizes.

    A crossing is where the larger lattice stops being better, i.e. where
    ``log rate(L_big) - log rate(L_small)`` first moves from negative to
    non-negative under piecewise-linear interpolation in ``p``.
    """
    usable = sorted((pt for pt in points if pt.trials > 0 and pt.error is None),
                    key=lambda pt: (pt.config.L, pt.config.p))
    curves = {L: {pt.config.p: _log_rate(pt) for pt in grp}
              for L, grp in groupby(usable, key=lambda pt: pt.config.L)}
    Ls = sorted(curves)
    if len(Ls) < 2:
        raise InvalidParameterError("threshold estimation needs at least two lattice sizes")
    crossings, missing = [], []
    for small, big in zip(Ls, Ls[1:]):
        ps = sorted(set(curves[small]) & set(curves[big]))
        diff = [curves[big][p] - curves[small][p] for p in ps]
        x = _crossing(ps, diff) if len(ps) >= 2 else None
        if x is None:
            missing.append((small, big))
        else:
            crossings.append((small, big, x))
    if not crossings:
        return ThresholdEstimate(None, None, (), tuple(missing))
    xs = [c[2] for c in crossings]
    return ThresholdEstimate(min(xs), max(xs), tuple(crossings), tuple(missing))


# --------------------------------------------------------------------------
# output


def csv_header() -> str:
    return f"# ppbf {__version__}\n" + ",".join(CSV_COLUMNS)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def csv_line(point: ErrorRatePoint, timing: bool = False) -> str:
    row = point.row(timing)
    return ",".join(_fmt(row[c]) for c in CSV_COLUMNS)


def jsonl_line(point: ErrorRatePoint, timing: bool = False) -> str:
    row = point.row(timing)
    if point.error:
        row["error"] = point.error
    return json.dumps(row, sort_keys=False)


def config_dict(config: TrialConfig) -> dict:
    d = asdict(config)
    d["D"] = config.depth
    return d


def grid(start: float, stop: float, step: float) -> list[float]:
    """Inclusive arithmetic grid, rounded to suppress float drift."""
    if step <= 0 or stop < start:
        raise InvalidParameterError("range needs start <= stop and step > 0")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 10) for k in range(count)]


__all__ = [
    "DECODERS", "ErrorRatePoint", "ThresholdEstimate", "TrialConfig",
    "csv_header", "csv_line", "derive_seed", "estimate_threshold", "grid", "iter_sweep",
    "jsonl_line", "run_point", "run_sweep", "sample_bsc", "trial_rng", "wilson_interval",
]
