"""Exact analysis of the block-occupancy birth-and-death chain.

Projecting the complete-graph swap dynamics onto W = number of particles
among the first k sites gives a Markov chain on {0, ..., k} with the
tridiagonal kernel

    up(i)   = 2 (k - i)^2 / n^2
    down(i) = 2 i (n - 2k + i) / n^2
    stay(i) = 1 - up(i) - down(i)

and hypergeometric stationary law.  The holding probability never drops
below 1/2, so the chain is lazy.  Everything in this module is exact
double-precision linear algebra on vectors of length k + 1; the only
approximation anywhere is float rounding.

Two closed forms drive the moment machinery: the conditional mean of a
step is affine in W, so E[W_t] relaxes geometrically with factor 1 - 2/n
toward k^2/n, and the second moment obeys a linear recursion with factor
(1 - 2/n)^2 whose coefficients follow from the kernel above.  Both are
checked against direct distribution evolution in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .exclusion import ModelParams

#: n beyond which n^2 (and the integer numerators of the kernel) would no
#: longer be exactly representable in double precision.
_N_EXACT_CAP = 10_000_000

#: Distribution vectors are renormalized whenever their mass drifts by
#: more than this; a drift beyond _MASS_HARD is treated as corruption.
_MASS_DRIFT = 1e-12
_MASS_HARD = 1e-10


@dataclass(frozen=True)
class BirthDeathKernel:
    """Tridiagonal transition kernel of the block-occupancy chain."""

    params: ModelParams
    up: np.ndarray
    down: np.ndarray
    stay: np.ndarray

    @property
    def size(self) -> int:
        return self.params.k + 1


@dataclass(frozen=True)
class MixingProfile:
    """Sampled distance-to-stationarity curve d(t) from the W = k start."""

    params: ModelParams
    times: np.ndarray
    tv: np.ndarray
    stride: int = 1

    def __post_init__(self) -> None:
        if self.times.shape != self.tv.shape:
            raise ValueError("times and tv must have equal length")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if self.tv.size and (self.tv.min() < -1e-12 or self.tv.max() > 1 + 1e-12):
            raise ValueError("tv values must lie in [0, 1]")
        if np.any(np.diff(self.tv) > 1e-12):
            raise ValueError("tv values must be nonincreasing along the curve")


def build_kernel(params: ModelParams) -> BirthDeathKernel:
    """Construct the exact kernel; all entries are validated to lie in [0, 1]."""
    n, k = params.n, params.k
    if n > _N_EXACT_CAP:
        raise ValueError(f"n={n} exceeds the exact double-precision range (n <= {_N_EXACT_CAP})")
    i = np.arange(k + 1, dtype=float)
    nsq = float(n) * float(n)
    up = 2.0 * (k - i) ** 2 / nsq
    down = 2.0 * i * (n - 2 * k + i) / nsq
    stay = 1.0 - up - down
    for name, arr in (("up", up), ("down", down), ("stay", stay)):
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError(f"kernel entry out of [0, 1] in {name}")
    for arr in (up, down, stay):
        arr.setflags(write=False)
    return BirthDeathKernel(params, up, down, stay)


def _log_comb(a: np.ndarray | float, b: np.ndarray | float) -> np.ndarray:
    return gammaln(np.asarray(a) + 1) - gammaln(np.asarray(b) + 1) - gammaln(np.asarray(a) - np.asarray(b) + 1)


def equilibrium(params: ModelParams) -> np.ndarray:
    """Stationary law of W: hypergeometric(n, k, k), computed in log space.

    Log-space binomials keep the computation finite for n up to millions;
    the final vector is renormalized so it sums to one exactly up to float
    addition.
    """
    n, k = params.n, params.k
    m = np.arange(k + 1, dtype=float)
    logp = _log_comb(float(k), m) + _log_comb(float(n - k), float(k) - m) - _log_comb(float(n), float(k))
    p = np.exp(logp)
    p /= p.sum()
    p.setflags(write=False)
    return p


def check_distribution(dist: np.ndarray) -> None:
    """Reject vectors that are not probability distributions."""
    dist = np.asarray(dist)
    if dist.ndim != 1:
        raise ValueError("distribution must be one-dimensional")
    if dist.size == 0:
        raise ValueError("distribution must be nonempty")
    if dist.min() < 0:
        raise ValueError("distribution has a negative entry")
    if abs(float(dist.sum()) - 1.0) > _MASS_HARD:
        raise ValueError("distribution mass deviates from 1 beyond tolerance")


def delta_at(index: int, size: int) -> np.ndarray:
    """Point mass at ``index`` on {0, ..., size-1}."""
    if not 0 <= index < size:
        raise ValueError("index out of range")
    d = np.zeros(size)
    d[index] = 1.0
    return d


def evolve(dist: np.ndarray, kernel: BirthDeathKernel, steps: int) -> np.ndarray:
    """Push a distribution forward ``steps`` steps, O(k) work per step.

    Mass is renormalized whenever float drift exceeds 1e-12, so long
    evolutions cannot accumulate leakage.
    """
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    p = np.array(dist, dtype=float)
    if p.shape != (kernel.size,):
        raise ValueError(f"distribution has length {p.size}, kernel needs {kernel.size}")
    check_distribution(p)
    up, down, stay = kernel.up, kernel.down, kernel.stay
    for _ in range(steps):
        new = p * stay
        new[1:] += p[:-1] * up[:-1]
        new[:-1] += p[1:] * down[1:]
        mass = new.sum()
        if abs(mass - 1.0) > _MASS_DRIFT:
            new /= mass
        p = new
    return p


def tv_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Total variation distance, half the L1 difference."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("distributions must have equal length")
    return float(0.5 * np.abs(a - b).sum())


def dist_mean(dist: np.ndarray) -> float:
    dist = np.asarray(dist, dtype=float)
    return float(dist @ np.arange(dist.size))


def dist_second_moment(dist: np.ndarray) -> float:
    dist = np.asarray(dist, dtype=float)
    values = np.arange(dist.size, dtype=float)
    return float(dist @ (values * values))


def dist_variance(dist: np.ndarray) -> float:
    m = dist_mean(dist)
    return dist_second_moment(dist) - m * m


def mean_w_closed_form(params: ModelParams, w0: int, t: int) -> float:
    """E[W_t] from W_0 = w0: geometric relaxation toward k^2/n."""
    n, k = params.n, params.k
    if not 0 <= w0 <= k:
        raise ValueError("w0 out of range")
    if t < 0:
        raise ValueError("t must be nonnegative")
    fixed = k * k / n
    return (w0 - fixed) * (1.0 - 2.0 / n) ** t + fixed


def second_moment_closed_form(params: ModelParams, t: int, w0: int | None = None) -> float:
    """E[W_t^2] from W_0 = w0 (default k), by the exact linear recursion.

    One step of the chain satisfies

        E[W_{t+1}^2] = (1 - 2/n)^2 E[W_t^2]
                       + (4k^2/n^2 - 8k/n^2 + 2/n) E[W_t] + 2k^2/n^2,

    which follows from the kernel's conditional increment moments
    E[dW | W=i] = 2k^2/n^2 - 2i/n and E[dW^2 | W=i] = up(i) + down(i).
    """
    n, k = params.n, params.k
    if w0 is None:
        w0 = k
    if not 0 <= w0 <= k:
        raise ValueError("w0 out of range")
    if t < 0:
        raise ValueError("t must be nonnegative")
    nf = float(n)
    factor = (1.0 - 2.0 / nf) ** 2
    lin = 4.0 * k * k / nf**2 - 8.0 * k / nf**2 + 2.0 / nf
    const = 2.0 * k * k / nf**2
    m2 = float(w0 * w0)
    m1 = float(w0)
    decay = 1.0 - 2.0 / nf
    fixed = k * k / nf
    for _ in range(t):
        m2 = factor * m2 + lin * m1 + const
        m1 = decay * (m1 - fixed) + fixed
    return m2


@dataclass(frozen=True)
class VarianceBoundReport:
    """Outcome of one variance-bound evaluation; see :func:`variance_bound_check`."""

    params: ModelParams
    gamma: float
    t: int
    variance: float
    bound: float
    satisfied: bool


def variance_bound_check(
    params: ModelParams,
    gamma: float,
    *,
    c_const: float = 10.0,
    regime_coeff: float = 1.0,
) -> VarianceBoundReport:
    """Check Var(W_t) <= C k^2/n + e^gamma k/sqrt(n) at t = floor(n log n / 4 - gamma n / 2).

    The inequality is a concentration statement for block counts of order
    sqrt(n) and larger, so instances with k < regime_coeff * sqrt(n) are
    rejected rather than silently reported; pass ``regime_coeff=0`` to
    evaluate anyway.  The variance is computed from the exactly evolved
    distribution started at W = k, not from simulation.
    """
    n, k = params.n, params.k
    if regime_coeff > 0 and k < regime_coeff * math.sqrt(n):
        raise ValueError(
            f"k={k} is below {regime_coeff}*sqrt(n)={regime_coeff * math.sqrt(n):.2f}; "
            "outside the bound's regime (pass regime_coeff=0 to override)"
        )
    t = math.floor(0.25 * n * math.log(n) - 0.5 * gamma * n)
    if t < 0:
        raise ValueError(f"gamma={gamma} puts the evaluation time below zero (t={t})")
    kernel = build_kernel(params)
    dist = evolve(delta_at(k, k + 1), kernel, t)
    variance = dist_variance(dist)
    bound = c_const * k * k / n + math.exp(gamma) * k / math.sqrt(n)
    return VarianceBoundReport(params, gamma, t, variance, bound, variance <= bound)


def tv_lower_bound_second_moment(mu: np.ndarray, pi: np.ndarray) -> float:
    """Mean-separation lower bound on total variation.

    If two laws on {0..k} have means gap apart, any coupling (X, Y) of
    them has P[X != Y] >= gap^2 / (gap^2 + 2 Var_mu + 2 Var_pi) by
    Cauchy-Schwarz applied to E[X - Y]; the minimum over couplings is the
    TV distance.  Returns 0 when the means coincide.
    """
    mu = np.asarray(mu, dtype=float)
    pi = np.asarray(pi, dtype=float)
    if mu.shape != pi.shape:
        raise ValueError("distributions must have equal length")
    check_distribution(mu)
    check_distribution(pi)
    gap = dist_mean(mu) - dist_mean(pi)
    if gap == 0.0:
        return 0.0
    denom = gap * gap + 2.0 * (dist_variance(mu) + dist_variance(pi))
    return min(1.0, gap * gap / denom)


def eigenfunction_check(kernel: BirthDeathKernel) -> float:
    """Max residual of P f - (1 - 2/n) f for f(i) = i - k^2/n.

    The centered identity is an exact eigenvector relation of the kernel;
    the residual measures only float rounding and should sit at machine
    scale for every instance.  The eigenvector is normalized to unit sup
    norm first, since any fixed tolerance is meaningless for a vector
    whose entries grow with n.
    """
    n, k = kernel.params.n, kernel.params.k
    f = np.arange(k + 1, dtype=float) - k * k / float(n)
    f /= np.abs(f).max()
    pf = kernel.stay * f
    pf[:-1] += kernel.up[:-1] * f[1:]
    pf[1:] += kernel.down[1:] * f[:-1]
    return float(np.abs(pf - (1.0 - 2.0 / n) * f).max())


def d_curve(params: ModelParams, t_max: int, stride: int = 1) -> MixingProfile:
    """Exact distance curve d(t) = TV(law of W_t from W_0 = k, stationary).

    Samples t = 0, stride, 2*stride, ... up to t_max.
    """
    if t_max < 0:
        raise ValueError("t_max must be nonnegative")
    if stride < 1:
        raise ValueError("stride must be positive")
    kernel = build_kernel(params)
    pi = equilibrium(params)
    p = delta_at(params.k, params.k + 1)
    times = np.arange(0, t_max + 1, stride)
    tv = np.empty(times.size)
    tv[0] = tv_distance(p, pi)
    for idx in range(1, times.size):
        p = evolve(p, kernel, stride)
        tv[idx] = tv_distance(p, pi)
    # guard against 1e-16-scale float wobble in the tail of the curve
    np.minimum.accumulate(tv, out=tv)
    times.setflags(write=False)
    tv.setflags(write=False)
    return MixingProfile(params, times, tv, stride)


def t_mix(profile: MixingProfile, eps: float) -> int | None:
    """Smallest sampled t with d(t) <= eps, or None when never reached.

    Exact when the profile was sampled with stride 1; with stride s the
    true threshold lies in (t - s, t] for the returned t.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    hits = np.nonzero(profile.tv <= eps)[0]
    if hits.size == 0:
        return None
    return int(profile.times[hits[0]])


def default_horizon(params: ModelParams, eps_min: float) -> int:
    """Generous upper bound on any threshold time this package evaluates."""
    n, k = params.n, params.k
    spread = max(1.0, math.log(1.0 / eps_min))
    return int(0.25 * n * math.log(n) + 0.5 * n * math.log(max(k, 2)) + 8.0 * n * spread) + 200


def mixing_times(
    params: ModelParams,
    eps_values: tuple[float, ...] | list[float],
    t_limit: int | None = None,
) -> dict[float, int]:
    """Exact threshold times inf{t : d(t) <= eps} for each requested eps.

    A single stride-1 evolution serves all thresholds.  Raises if any
    threshold is not reached by the (generous) horizon.
    """
    eps_list = sorted(set(float(e) for e in eps_values), reverse=True)
    if not eps_list:
        raise ValueError("need at least one eps")
    if not all(0 < e < 1 for e in eps_list):
        raise ValueError("every eps must lie in (0, 1)")
    horizon = t_limit if t_limit is not None else default_horizon(params, eps_list[-1])
    kernel = build_kernel(params)
    pi = equilibrium(params)
    p = delta_at(params.k, params.k + 1)
    out: dict[float, int] = {}
    pending = list(eps_list)
    t = 0
    tv = tv_distance(p, pi)
    while True:
        while pending and tv <= pending[0]:
            out[pending.pop(0)] = t
        if not pending:
            return out
        if t >= horizon:
            raise RuntimeError(
                f"d(t) did not reach eps={pending[0]} within the horizon {horizon}"
            )
        p = evolve(p, kernel, 1)
        tv = tv_distance(p, pi)
        t += 1
