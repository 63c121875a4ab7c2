"""Monotone couplings of two block-occupancy chains.

Two replicas W1 >= W2 of the birth-and-death chain from
:mod:`mixlab.lumped` are run jointly so that at most one replica moves
per step.  Off the diagonal the joint kernel assigns

    (i, j) -> (i+1, j)  with probability up(i)
    (i, j) -> (i, j-1)  with probability down(j)
    (i, j) -> (i-1, j)  with probability down(i)
    (i, j) -> (i, j+1)  with probability up(j)
    (i, j) -> (i, j)    with the remaining stay(i) + stay(j) - 1 >= 0,

so each coordinate alone moves exactly by the marginal kernel, the order
W1 >= W2 is preserved, and once the replicas meet they move together
forever.  The meeting time tau therefore dominates the distance to
stationarity: TV(law from x at time t, law from y) <= P[tau > t].

For analysis the difference D = W1 - W2 is compared against a dominating
lazy simple random walk.  Viewed at its jump times, D moves up with
conditional probability at most 1/2 while its jump clock runs at rate
q(i, j) >= k^2/n^2.  Coupling the jump directions through one shared
uniform per jump and both holding times through another (inverse-CDF
geometric, where the smaller success probability always yields the
longer holding time) produces, pathwise, a reflecting-free walk whose
zero-hitting time tau' is never smaller than tau.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exclusion import ModelParams
from .lumped import BirthDeathKernel, build_kernel

#: Largest number of transient pair states the exact linear-system solver
#: will handle (dense solve).
_PAIR_STATE_CAP = 2_000


@dataclass(frozen=True)
class CoupledKernel:
    """Joint kernel of the ordered pair (W1, W2); see the module docstring."""

    base: BirthDeathKernel

    @property
    def params(self) -> ModelParams:
        return self.base.params

    def transition_row(self, i: int, j: int) -> list[tuple[tuple[int, int], float]]:
        """Explicit outcome list from pair state (i, j), zero entries dropped."""
        k = self.params.k
        if not (0 <= j <= i <= k):
            raise ValueError(f"pair state must satisfy 0 <= j <= i <= k, got ({i}, {j})")
        up, down, stay = self.base.up, self.base.down, self.base.stay
        if i == j:
            row = [
                ((i + 1, j + 1), float(up[i])),
                ((i - 1, j - 1), float(down[i])),
                ((i, j), float(stay[i])),
            ]
        else:
            row = [
                ((i + 1, j), float(up[i])),
                ((i, j - 1), float(down[j])),
                ((i - 1, j), float(down[i])),
                ((i, j + 1), float(up[j])),
                ((i, j), float(stay[i]) + float(stay[j]) - 1.0),
            ]
        return [(state, p) for state, p in row if p != 0.0]

    def move_thresholds(
        self, i: np.ndarray, j: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Cumulative probabilities (c1..c4) splitting one uniform into the
        four off-diagonal moves: W1 up, W2 down, W1 down, W2 up; a draw
        beyond c4 holds."""
        up, down = self.base.up, self.base.down
        c1 = up[i]
        c2 = c1 + down[j]
        c3 = c2 + down[i]
        c4 = c3 + up[j]
        return c1, c2, c3, c4

    def skeleton_thresholds(
        self, i: np.ndarray, j: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Jump-chain splitting (a, b, c, q) for off-diagonal pair states.

        q is the total move probability; a, b, c are the cumulative move
        fractions in the same order as :meth:`move_thresholds`.  D = W1 - W2
        increases exactly on the first two intervals, so b <= 1/2 always.
        """
        c1, c2, c3, c4 = self.move_thresholds(i, j)
        q = c4
        return c1 / q, c2 / q, c3 / q, q


def build_coupled_kernel(params: ModelParams) -> CoupledKernel:
    """Build and validate the joint kernel for an instance.

    Aborts when any joint probability would be negative; since the hold
    probability of pair (i, j) is stay(i) + stay(j) - 1 and every stay is
    at least 1/2, validation amounts to checking the worst diagonal pair.
    """
    base = build_kernel(params)
    worst_hold = 2.0 * float(base.stay.min()) - 1.0
    if worst_hold < -1e-12:
        raise ValueError("joint kernel would have a negative hold probability")
    return CoupledKernel(base)


def check_skeleton_invariants(kernel: CoupledKernel) -> tuple[float, float]:
    """Exhaustively scan all off-diagonal pair states.

    Returns (max b, min q * n^2/k^2); validity requires the first to be
    at most 1/2 and the second at least 1.
    """
    k = kernel.params.k
    n = kernel.params.n
    ii, jj = np.tril_indices(k + 1, k=-1)  # i > j
    _, b, _, q = kernel.skeleton_thresholds(ii, jj)
    q_floor = (float(k) / float(n)) ** 2
    return float(b.max()), float(q.min() / q_floor)


@dataclass
class MergeSamples:
    """Replica batch of joint-chain runs up to a time cap.

    ``tau[r]`` is the meeting time when ``merged[r]`` is True, otherwise
    the sentinel t_cap + 1.  ``w1``/``w2`` hold the pair state at the
    meeting time (equal values) or at t_cap for unmerged replicas.
    """

    t_cap: int
    tau: np.ndarray
    merged: np.ndarray
    w1: np.ndarray
    w2: np.ndarray


def merge_time_samples(
    kernel: CoupledKernel,
    x: int,
    y: int,
    t_cap: int,
    replicas: int,
    rng: np.random.Generator,
) -> MergeSamples:
    """Vectorized joint-chain simulation from pair state (x, y)."""
    k = kernel.params.k
    if not (0 <= y <= x <= k):
        raise ValueError(f"start must satisfy 0 <= y <= x <= k, got ({x}, {y})")
    if t_cap < 0:
        raise ValueError("t_cap must be nonnegative")
    if replicas < 1:
        raise ValueError("replicas must be positive")
    tau = np.full(replicas, t_cap + 1, dtype=np.int64)
    merged = np.zeros(replicas, dtype=bool)
    w1 = np.full(replicas, x, dtype=np.int64)
    w2 = np.full(replicas, y, dtype=np.int64)
    if x == y:
        tau[:] = 0
        merged[:] = True
        return MergeSamples(t_cap, tau, merged, w1, w2)
    gid = np.arange(replicas)
    ii = np.full(replicas, x, dtype=np.int64)
    jj = np.full(replicas, y, dtype=np.int64)
    for t in range(1, t_cap + 1):
        if gid.size == 0:
            break
        u = rng.random(gid.size)
        c1, c2, c3, c4 = kernel.move_thresholds(ii, jj)
        ii = ii + (u < c1).astype(np.int64) - ((u >= c2) & (u < c3))
        jj = jj + ((u >= c3) & (u < c4)).astype(np.int64) - ((u >= c1) & (u < c2))
        met = ii == jj
        if met.any():
            hit = gid[met]
            tau[hit] = t
            merged[hit] = True
            w1[hit] = ii[met]
            w2[hit] = jj[met]
            keep = ~met
            gid, ii, jj = gid[keep], ii[keep], jj[keep]
    w1[gid] = ii
    w2[gid] = jj
    return MergeSamples(t_cap, tau, merged, w1, w2)


def simulate_merge(
    kernel: CoupledKernel,
    x: int,
    y: int,
    t_cap: int,
    rng: np.random.Generator,
) -> int | None:
    """Meeting time of one joint-chain path, or None when t_cap is hit."""
    samples = merge_time_samples(kernel, x, y, t_cap, 1, rng)
    return int(samples.tau[0]) if samples.merged[0] else None


def expected_merge_time_exact(kernel: CoupledKernel, x: int, y: int) -> float:
    """Exact E[meeting time] from (x, y) by solving the hitting-time system.

    Independent of any sampling: sets up (I - Q) h = 1 over the transient
    pair states i > j and solves densely, so it is limited to small k.
    """
    k = kernel.params.k
    if not (0 <= y <= x <= k):
        raise ValueError(f"start must satisfy 0 <= y <= x <= k, got ({x}, {y})")
    if x == y:
        return 0.0
    transient = [(i, j) for i in range(k + 1) for j in range(i)]
    if len(transient) > _PAIR_STATE_CAP:
        raise ValueError("pair state space too large for the dense hitting-time solve")
    index = {s: idx for idx, s in enumerate(transient)}
    size = len(transient)
    system = np.eye(size)
    for (i, j), row_idx in index.items():
        for (i2, j2), p in kernel.transition_row(i, j):
            if i2 != j2:
                system[row_idx, index[(i2, j2)]] -= p
    hitting = np.linalg.solve(system, np.ones(size))
    return float(hitting[index[(x, y)]])


@dataclass
class CouplingBound:
    """Monte Carlo upper bound on distance to stationarity at one time."""

    params: ModelParams
    t: int
    replicas: int
    estimate: float
    stderr: float


def coupling_tv_upper_bound(
    params: ModelParams,
    t: int,
    replicas: int,
    rng: np.random.Generator,
    x: int | None = None,
    y: int = 0,
) -> CouplingBound:
    """Estimate P[meeting time > t] from the worst pair (default (k, 0)).

    The meeting-time tail bounds TV(time-t law from x, time-t law from y)
    from above, and with y at stationarity-reachable 0 and x = k it bounds
    the distance curve d(t).  The estimate comes with its binomial
    standard error.
    """
    kernel = build_coupled_kernel(params)
    if x is None:
        x = params.k
    samples = merge_time_samples(kernel, x, y, t, replicas, rng)
    survive = float(np.mean(~samples.merged))
    stderr = math.sqrt(max(survive * (1.0 - survive), 0.0) / replicas)
    return CouplingBound(params, t, replicas, survive, stderr)


@dataclass
class DominatedPairSamples:
    """Replica batch of the joint chain with its dominating free walk.

    tau / merged describe the pair meeting time as in MergeSamples;
    tau_walk / walk_hit describe the zero-hitting time of the dominating
    walk driven by the same uniforms.  Whenever both events resolve under
    the cap, tau_walk >= tau holds pathwise by construction.
    d_up_moves / pair_moves tally how often the pair difference increased
    over all jump-chain moves (the fraction stays below 1/2).
    """

    t_cap: int
    tau: np.ndarray
    merged: np.ndarray
    tau_walk: np.ndarray
    walk_hit: np.ndarray
    d_up_moves: int
    pair_moves: int


def _geometric_from_uniform(u: np.ndarray, log1m_q: np.ndarray | float) -> np.ndarray:
    """Inverse-CDF geometric on {1, 2, ...}: floor(log(1-u)/log(1-q)) + 1.

    Monotone in the success probability for a fixed uniform: a smaller q
    (flatter log) gives a pathwise larger value, which is what makes the
    shared-uniform clock comparison work.
    """
    return np.floor(np.log1p(-u) / log1m_q).astype(np.int64) + 1


def dominated_pair_samples(
    kernel: CoupledKernel,
    x: int,
    y: int,
    t_cap: int,
    replicas: int,
    rng: np.random.Generator,
) -> DominatedPairSamples:
    """Joint chain and dominating walk from shared uniforms, vectorized.

    Both processes are simulated through their jump chains: one uniform
    per jump index picks the move for whichever process is still running,
    and a second uniform stretches into each process's geometric holding
    time (success probability q(i, j) for the pair, k^2/n^2 for the
    walk).  Because q(i, j) >= k^2/n^2 everywhere and a D-increasing move
    forces a walk-increasing move (b <= 1/2), the walk's zero-hitting
    clock time can never precede the pair's meeting time.
    """
    k = kernel.params.k
    n = kernel.params.n
    if not (0 <= y <= x <= k):
        raise ValueError(f"start must satisfy 0 <= y <= x <= k, got ({x}, {y})")
    if t_cap < 0:
        raise ValueError("t_cap must be nonnegative")
    if replicas < 1:
        raise ValueError("replicas must be positive")
    tau = np.full(replicas, t_cap + 1, dtype=np.int64)
    merged = np.zeros(replicas, dtype=bool)
    tau_walk = np.full(replicas, t_cap + 1, dtype=np.int64)
    walk_hit = np.zeros(replicas, dtype=bool)
    if x == y:
        tau[:] = 0
        merged[:] = True
        tau_walk[:] = 0
        walk_hit[:] = True
        return DominatedPairSamples(t_cap, tau, merged, tau_walk, walk_hit, 0, 0)

    q_walk = (float(k) / float(n)) ** 2
    log1m_q_walk = math.log1p(-q_walk)
    gid = np.arange(replicas)
    ii = np.full(replicas, x, dtype=np.int64)
    jj = np.full(replicas, y, dtype=np.int64)
    xx = np.full(replicas, x - y, dtype=np.int64)
    clock_pair = np.zeros(replicas, dtype=np.int64)
    clock_walk = np.zeros(replicas, dtype=np.int64)
    pair_live = np.ones(replicas, dtype=bool)
    walk_live = np.ones(replicas, dtype=bool)
    d_up_moves = 0
    pair_moves = 0

    while gid.size:
        size = gid.size
        u_move = rng.random(size)
        u_clock = rng.random(size)

        live = pair_live[gid]
        if live.any():
            il, jl = ii[live], jj[live]
            a, b, c, q = kernel.skeleton_thresholds(il, jl)
            um = u_move[live]
            with np.errstate(divide="ignore"):
                log1m_q = np.log1p(-q)  # -inf when q == 1 (single forced move)
            hold = _geometric_from_uniform(u_clock[live], log1m_q)
            clock_pair[gid[live]] += hold
            il = il + (um < a).astype(np.int64) - ((um >= b) & (um < c))
            jl = jl + (um >= c).astype(np.int64) - ((um >= a) & (um < b))
            ii[live] = il
            jj[live] = jl
            d_up_moves += int((um < b).sum())
            pair_moves += int(live.sum())
            met = il == jl
            lid = gid[live]
            done_time = clock_pair[lid]
            ok = met & (done_time <= t_cap)
            tau[lid[ok]] = done_time[ok]
            merged[lid[ok]] = True
            pair_live[lid[met | (done_time > t_cap)]] = False

        wlive = walk_live[gid]
        if wlive.any():
            hold = _geometric_from_uniform(u_clock[wlive], log1m_q_walk)
            wid = gid[wlive]
            clock_walk[wid] += hold
            xw = xx[wlive] + np.where(u_move[wlive] < 0.5, 1, -1)
            xx[wlive] = xw
            hit = xw == 0
            done_time = clock_walk[wid]
            ok = hit & (done_time <= t_cap)
            tau_walk[wid[ok]] = done_time[ok]
            walk_hit[wid[ok]] = True
            walk_live[wid[hit | (done_time > t_cap)]] = False

        keep = pair_live[gid] | walk_live[gid]
        if not keep.all():
            gid = gid[keep]
            ii = ii[keep]
            jj = jj[keep]
            xx = xx[keep]

    return DominatedPairSamples(t_cap, tau, merged, tau_walk, walk_hit, d_up_moves, pair_moves)


def simulate_dominated_pair(
    kernel: CoupledKernel,
    x: int,
    y: int,
    t_cap: int,
    rng: np.random.Generator,
) -> tuple[int | None, int | None]:
    """One path of (meeting time, dominating walk hitting time); None = capped."""
    s = dominated_pair_samples(kernel, x, y, t_cap, 1, rng)
    tau = int(s.tau[0]) if s.merged[0] else None
    tau_walk = int(s.tau_walk[0]) if s.walk_hit[0] else None
    return tau, tau_walk
