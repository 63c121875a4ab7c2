"""Lazy simple random walk killed at zero, via the reflection principle.

The walk moves +1 or -1 with probability q/2 each and holds with
probability 1 - q.  Starting from m >= 1, the survival probability
P[no visit to 0 during the first ``steps`` steps] equals the probability
that the same walk started at 0 and run *without* killing sits inside
the window [-m+1, m] at time ``steps``: reflecting a killed path at its
first zero visit pairs it with a free path that exits the window, and
the lazy steps make the correspondence exact at every finite time.

The free-walk window mass is computed by exact convolution of the
three-point step distribution; an independent absorbing-boundary dynamic
program over the positive half-line provides the cross-check, and a
Gaussian evaluator covers the diffusive limit where m ~ alpha * s and
steps ~ beta * s^2 / q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Brute-force dynamic program is quadratic in steps; keep it honest.
_BRUTEFORCE_STEP_CAP = 10_000

#: Per-step probability mass allowed to fall off the clipped convolution
#: window.  Total loss over any run stays far below every tolerance used.
_CLIP_LOSS_CAP = 1e-14

#: Tail mass threshold used when trimming the convolution support.
_TRIM_TAIL = 1e-16


@dataclass(frozen=True)
class WalkParams:
    """Lazy walk: move probability q in (0, 1], start position >= 1."""

    q: float
    start: int

    def __post_init__(self) -> None:
        if not 0.0 < self.q <= 1.0:
            raise ValueError(f"move probability must lie in (0, 1], got {self.q}")
        if self.start < 1:
            raise ValueError(f"start must be at least 1, got {self.start}")


def _validate(m: int, steps: int, q: float) -> None:
    if m < 1:
        raise ValueError(f"start must be at least 1, got {m}")
    if steps < 0:
        raise ValueError(f"steps must be nonnegative, got {steps}")
    if not 0.0 < q <= 1.0:
        raise ValueError(f"move probability must lie in (0, 1], got {q}")


def survival_exact(m: int, steps: int, q: float) -> float:
    """P[walk from m stays positive for ``steps`` steps], by reflection.

    Evolves the free-walk law from 0 by convolving the step distribution
    (q/2, 1-q, q/2) and returns the mass inside [-m+1, m].  The support
    is trimmed once its tails drop below numerical relevance; the trimmed
    mass is tracked and must stay below 1e-14 per step, keeping the
    result exact to well under any tolerance in use.
    """
    _validate(m, steps, q)
    if steps == 0:
        return 1.0
    stencil = np.array([q / 2.0, 1.0 - q, q / 2.0])
    pmf = np.array([1.0])
    origin = 0  # index of lattice site 0 within pmf
    lost = 0.0
    trim_period = 64
    for step_idx in range(steps):
        pmf = np.convolve(pmf, stencil)
        origin += 1
        if step_idx % trim_period == trim_period - 1 and pmf.size > 512:
            head = np.cumsum(pmf)
            tail = np.cumsum(pmf[::-1])
            lo = int(np.searchsorted(head, _TRIM_TAIL))
            hi = int(np.searchsorted(tail, _TRIM_TAIL))
            if lo or hi:
                dropped = float(head[lo - 1] if lo else 0.0) + float(tail[hi - 1] if hi else 0.0)
                if dropped > _CLIP_LOSS_CAP * trim_period:
                    lo = hi = 0
                    dropped = 0.0
                if lo or hi:
                    lost += dropped
                    pmf = pmf[lo : pmf.size - hi]
                    origin -= lo
    lo_idx = max(origin - m + 1, 0)
    hi_idx = min(origin + m, pmf.size - 1)
    if lo_idx > hi_idx:
        return 0.0
    return float(pmf[lo_idx : hi_idx + 1].sum())


def survival_bruteforce(m: int, steps: int, q: float) -> float:
    """Same survival probability by direct absorbing-boundary evolution.

    Dynamic program over positions 1..m+steps with an absorbing wall at
    0; shares no code path with :func:`survival_exact`.  Quadratic in
    ``steps`` and capped accordingly.
    """
    _validate(m, steps, q)
    if steps > _BRUTEFORCE_STEP_CAP:
        raise ValueError(f"steps={steps} beyond the brute-force cap {_BRUTEFORCE_STEP_CAP}")
    width = m + steps + 1  # index = position, 0 is the absorbing wall
    p = np.zeros(width)
    p[m] = 1.0
    for _ in range(steps):
        new = (1.0 - q) * p
        new[:-1] += (q / 2.0) * p[1:]
        new[2:] += (q / 2.0) * p[1:-1]
        # mass moving from position 1 down to 0 is absorbed (dropped)
        new[0] = 0.0
        p = new
    return float(p[1:].sum())


def hitting_time_samples(
    params: WalkParams,
    t_cap: int,
    replicas: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Zero-hitting times for a replica batch, capped at t_cap.

    Simulates the embedded jump chain (fair +1/-1 moves) with geometric
    holding times of mean 1/q, which reproduces the lazy walk's law
    without stepping through individual hold steps.  Returns (times,
    hit); times carry the sentinel t_cap + 1 where the cap was reached.
    """
    if t_cap < 0:
        raise ValueError("t_cap must be nonnegative")
    if replicas < 1:
        raise ValueError("replicas must be positive")
    times = np.full(replicas, t_cap + 1, dtype=np.int64)
    hit = np.zeros(replicas, dtype=bool)
    gid = np.arange(replicas)
    pos = np.full(replicas, params.start, dtype=np.int64)
    clock = np.zeros(replicas, dtype=np.int64)
    while gid.size:
        clock += rng.geometric(params.q, size=gid.size)
        pos += np.where(rng.random(gid.size) < 0.5, 1, -1)
        reached = pos == 0
        resolved = reached & (clock <= t_cap)
        times[gid[resolved]] = clock[resolved]
        hit[gid[resolved]] = True
        keep = ~(reached | (clock > t_cap))
        gid, pos, clock = gid[keep], pos[keep], clock[keep]
    return times, hit


def simulate_hitting(params: WalkParams, t_cap: int, rng: np.random.Generator) -> int | None:
    """First time the walk reaches 0, or None when t_cap passes first."""
    times, hit = hitting_time_samples(params, t_cap, 1, rng)
    return int(times[0]) if hit[0] else None


def gaussian_limit(alpha: float, beta: float) -> float:
    """Diffusive limit of the survival probability: P[|N(0,1)| <= alpha/sqrt(beta)].

    This is the limit of :func:`survival_exact` with start ~ alpha * s and
    steps ~ beta * s^2/q as the scale s grows.  The value never exceeds
    the convenient majorant alpha/sqrt(beta) (density of N at most
    1/sqrt(2 pi) < 1/2).
    """
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    value = math.erf(alpha / math.sqrt(2.0 * beta))
    majorant = diffusion_majorant(alpha, beta)
    if value > majorant + 1e-12:
        raise AssertionError("gaussian limit exceeded its closed-form majorant")
    return value


def diffusion_majorant(alpha: float, beta: float) -> float:
    """The elementary cap alpha/sqrt(beta) on :func:`gaussian_limit`."""
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    return alpha / math.sqrt(beta)
