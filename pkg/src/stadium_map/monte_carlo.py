"""Walk-on-circles estimate of the end harmonic measure.

Each walker starts at ``cfg.start`` and repeatedly jumps to a uniform point
on the largest circle centred at its position that fits in the domain,
until it is within ``h`` of the boundary. Walkers absorbed next to arcs 1
or 3 count as hits.

Random numbers come from a counter-based SplitMix64 stream: the uniform
used by trial ``i`` at step ``s`` is a pure function of ``(seed, i, s)``.
Results are therefore identical for any batch size or evaluation order.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConvergenceError, DomainError
from .geometry import DomainGeometry

MAX_STEPS_PER_TRIAL = 10**6
DEFAULT_BATCH = 1 << 18

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def _mix64(x):
    # SplitMix64 finaliser; uint64 wraparound is intended
    with np.errstate(over="ignore"):
        x = (x ^ (x >> np.uint64(30))) * _M1
        x = (x ^ (x >> np.uint64(27))) * _M2
    return x ^ (x >> np.uint64(31))


def trial_keys(seed: int, trials) -> np.ndarray:
    """Per-trial stream keys for trial indices ``trials``."""
    base = _mix64(np.uint64(seed & _MASK64))
    idx = np.asarray(trials, dtype=np.uint64)
    with np.errstate(over="ignore"):
        mixed = base + (idx + np.uint64(1)) * _GOLDEN
    return _mix64(mixed)


def uniforms(keys: np.ndarray, steps: np.ndarray) -> np.ndarray:
    """Uniform doubles in ``[0, 1)`` for stream positions ``(key, step)``."""
    with np.errstate(over="ignore"):
        bits = _mix64(keys + (steps + np.uint64(1)) * _GOLDEN)
    return (bits >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


@dataclass(frozen=True)
class McConfig:
    N: int
    h: float = 1e-3
    seed: int = 0
    start: complex = 0j

    def __post_init__(self):
        if isinstance(self.N, bool) or int(self.N) != self.N or self.N < 1:
            raise DomainError(f"N must be a positive integer, got {self.N!r}")
        if not (0.0 < self.h < 0.1):
            raise DomainError(f"absorption threshold h must lie in (0, 0.1), got {self.h!r}")
        if int(self.seed) != self.seed:
            raise DomainError("seed must be an integer")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "start", complex(self.start))


@dataclass(frozen=True)
class McResult:
    hits_domes: int
    trials: int
    config: McConfig
    hits_right: int
    hits_left: int
    total_steps: int

    @property
    def p_hat(self) -> float:
        return self.hits_domes / self.trials

    @property
    def std_error(self) -> float:
        p = self.p_hat
        return math.sqrt(p * (1.0 - p) / self.trials)

    def to_dict(self, geometry: DomainGeometry | None = None) -> dict:
        out = {
            "N": self.trials,
            "h": self.config.h,
            "seed": self.config.seed,
            "hits": self.hits_domes,
            "p_hat": self.p_hat,
            "std_error": self.std_error,
        }
        if geometry is not None:
            out["shape"] = geometry.kind.value
            out["L"] = geometry.L
        return out


def _run_batch(geom: DomainGeometry, cfg: McConfig, first: int, count: int):
    keys = trial_keys(cfg.seed, np.arange(first, first + count, dtype=np.uint64))
    x = np.full(count, cfg.start.real)
    y = np.full(count, cfg.start.imag)
    steps = np.zeros(count, dtype=np.uint64)
    right = left = total = 0
    while x.size:
        d = geom.distance_to_boundary(x, y)
        absorbed = d <= cfg.h
        if absorbed.any():
            xa, ya = x[absorbed], y[absorbed]
            ends = geom.end_mask(xa, ya)
            right += int(np.count_nonzero(ends & (xa > 0)))
            left += int(np.count_nonzero(ends & (xa < 0)))
            total += int(steps[absorbed].sum())
            keep = ~absorbed
            x, y, d, keys, steps = x[keep], y[keep], d[keep], keys[keep], steps[keep]
            if not x.size:
                break
        if int(steps.max()) >= MAX_STEPS_PER_TRIAL:
            raise ConvergenceError(f"a walker exceeded {MAX_STEPS_PER_TRIAL} steps")
        angle = 2.0 * math.pi * uniforms(keys, steps)
        x = x + d * np.cos(angle)
        y = y + d * np.sin(angle)
        steps += np.uint64(1)
    return right, left, total


def run(geom: DomainGeometry, cfg: McConfig, batch_size: int = DEFAULT_BATCH) -> McResult:
    """Estimate the harmonic measure of arcs 1 and 3 seen from ``cfg.start``."""
    start = cfg.start
    if not (math.isfinite(start.real) and math.isfinite(start.imag)) or not geom.contains(start):
        raise DomainError(f"start point {start} is not strictly inside the domain")
    right = left = total = 0
    for first in range(0, cfg.N, batch_size):
        r, l, s = _run_batch(geom, cfg, first, min(batch_size, cfg.N - first))
        right += r
        left += l
        total += s
    return McResult(right + left, cfg.N, cfg, right, left, total)


def config_dict(cfg: McConfig) -> dict:
    d = asdict(cfg)
    d["start"] = [cfg.start.real, cfg.start.imag]
    return d
