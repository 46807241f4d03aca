"""Exact discrete-agent simulation of the generalized two-choice herding chain.

N agents each hold one of two choices; X counts the first choice. Moves
happen by spontaneous switching (rates sigma1, sigma2) and by pairwise
imitation (intensity h). A state-dependent event-rate factor
s = min(y**alpha, rate_cap), y = X/(N-X), speeds the chain up when the
first group dominates; alpha = 0 recovers the classic constant-rate chain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DomainError, StepTooLarge

DEFAULT_RATE_CAP = 1e6
# fixed-step default keeps the worst-case move probability at or below this
MAX_MOVE_PROBABILITY = 0.1


@dataclass(frozen=True)
class AbmParams:
    """Parameters of the agent chain."""

    n_agents: int
    sigma1: float
    sigma2: float
    h: float
    alpha: float = 0.0
    rate_cap: float = DEFAULT_RATE_CAP

    def __post_init__(self):
        if self.n_agents < 2:
            raise DomainError(f"n_agents must be >= 2, got {self.n_agents}")
        if self.h <= 0:
            raise DomainError(f"h must be > 0, got {self.h}")
        if self.sigma1 < 0 or self.sigma2 < 0:
            raise DomainError("sigma1 and sigma2 must be >= 0")
        if self.alpha < 0:
            raise DomainError(f"alpha must be >= 0, got {self.alpha}")
        if not self.rate_cap > 0:
            raise DomainError(f"rate_cap must be > 0, got {self.rate_cap}")

    @property
    def default_x0(self) -> int:
        return round(self.n_agents / 2)


@dataclass
class DiscreteTrajectory:
    """Time-stamped integer states; fixed-step grids or event times."""

    times: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.states = np.asarray(self.states, dtype=np.int64)
        if self.times.shape != self.states.shape:
            raise DomainError("times and states must have equal length")

    def __len__(self) -> int:
        return len(self.times)

    def fractions(self, n_agents: int) -> np.ndarray:
        return self.states / n_agents


def _check_state(p: AbmParams, x_count: int) -> int:
    x_count = int(x_count)
    if x_count < 0 or x_count > p.n_agents:
        raise DomainError(
            f"state {x_count} outside [0, {p.n_agents}]")
    return x_count


def event_rates(p: AbmParams, x_count: int) -> tuple[float, float]:
    """dt-free jump rates (up, down) at the given occupancy."""
    x_count = _check_state(p, x_count)
    return _kernels.abm_rates(p.n_agents, x_count, p.sigma1, p.sigma2,
                              p.h, p.alpha, p.rate_cap)


def transition_probabilities(p: AbmParams, x_count: int,
                             dt: float) -> tuple[float, float]:
    """One-step move probabilities (up, down) for a step of length dt.

    Raises StepTooLarge instead of clamping when the two probabilities sum
    past one; the caller must shrink dt.
    """
    if dt <= 0:
        raise DomainError(f"dt must be > 0, got {dt}")
    r_up, r_down = event_rates(p, x_count)
    p_up = r_up * dt
    p_down = r_down * dt
    if p_up + p_down > 1.0:
        raise StepTooLarge(
            f"p_up + p_down = {p_up + p_down:.3g} > 1 at X={x_count}; "
            "shrink dt")
    return p_up, p_down


def max_total_rate(p: AbmParams) -> float:
    """Largest total jump rate over all occupancies."""
    best = 0.0
    for x_count in range(p.n_agents + 1):
        r_up, r_down = _kernels.abm_rates(p.n_agents, x_count, p.sigma1,
                                          p.sigma2, p.h, p.alpha, p.rate_cap)
        total = r_up + r_down
        if total > best:
            best = total
    return best


def default_dt(p: AbmParams) -> float:
    """Step keeping the worst-case move probability at MAX_MOVE_PROBABILITY."""
    rate = max_total_rate(p)
    if rate == 0.0:
        return 1.0
    return MAX_MOVE_PROBABILITY / rate


def simulate_fixed_step(p: AbmParams, x0: int | None = None,
                        n_steps: int = 10_000, dt: float | None = None,
                        seed: int = 0, record_every: int = 1) -> DiscreteTrajectory:
    """Bernoulli realization of the chain: up/down/stay each step.

    The step is validated up front against the worst occupancy; an
    over-large dt raises StepTooLarge before any work is done. With
    record_every > 1 only every k-th state is kept (consecutive recorded
    states may then differ by more than one).
    """
    x0 = p.default_x0 if x0 is None else _check_state(p, x0)
    if dt is None:
        dt = default_dt(p)
    if dt <= 0:
        raise DomainError(f"dt must be > 0, got {dt}")
    if n_steps < 0:
        raise DomainError("n_steps must be >= 0")
    if record_every < 1:
        raise DomainError("record_every must be >= 1")
    worst = max_total_rate(p) * dt
    if worst > 1.0:
        raise StepTooLarge(
            f"worst-case p_up + p_down = {worst:.3g} > 1; shrink dt")
    states = _kernels.abm_fixed_step(p.n_agents, x0, n_steps, dt, p.sigma1,
                                     p.sigma2, p.h, p.alpha, p.rate_cap,
                                     record_every, _as_seed(seed))
    times = np.arange(len(states)) * (record_every * dt)
    return DiscreteTrajectory(times=times, states=states)


def simulate_event_driven(p: AbmParams, x0: int | None = None,
                          t_end: float = 100.0, seed: int = 0) -> DiscreteTrajectory:
    """Exact jump-process sample: exponential waits, one record per jump.

    Terminates at the first event time past t_end. A chain whose total rate
    hits zero is frozen; the trajectory then ends with one sample at t_end
    (for a chain frozen from the start that is the only sample).
    """
    x0 = p.default_x0 if x0 is None else _check_state(p, x0)
    if t_end <= 0:
        raise DomainError(f"t_end must be > 0, got {t_end}")
    times, states, frozen = _kernels.abm_event_jumps(
        p.n_agents, x0, t_end, p.sigma1, p.sigma2, p.h, p.alpha,
        p.rate_cap, _as_seed(seed))
    if frozen:
        last = states[-1] if len(states) else x0
        times = np.append(times, t_end)
        states = np.append(states, last)
    return DiscreteTrajectory(times=times, states=states)


def simulate_event_sampled(p: AbmParams, x0: int | None = None,
                           t_end: float = 100.0, dt_sample: float = 0.01,
                           seed: int = 0) -> DiscreteTrajectory:
    """Jump process recorded on a uniform grid (k*dt_sample, k = 0..M-1).

    Same law as simulate_event_driven but O(grid) memory, so long runs can
    be recorded without storing every microscopic event.
    """
    x0 = p.default_x0 if x0 is None else _check_state(p, x0)
    if t_end <= 0 or dt_sample <= 0:
        raise DomainError("t_end and dt_sample must be > 0")
    n_out = int(round(t_end / dt_sample))
    if n_out < 1:
        raise DomainError("t_end/dt_sample must round to at least one sample")
    states = _kernels.abm_event_sampled(p.n_agents, x0, dt_sample, n_out,
                                        p.sigma1, p.sigma2, p.h, p.alpha,
                                        p.rate_cap, _as_seed(seed))
    times = np.arange(n_out) * dt_sample
    return DiscreteTrajectory(times=times, states=states)


def time_weighted_state_distribution(traj: DiscreteTrajectory, n_agents: int,
                                     t_end: float | None = None) -> np.ndarray:
    """Occupancy probabilities over 0..N, weighting each state by holding time.

    Sample i is treated as holding during [times[i], times[i+1]); the last
    state holds until t_end (default: the last recorded time).
    """
    if len(traj) == 0:
        raise DomainError("empty trajectory")
    t_stop = traj.times[-1] if t_end is None else float(t_end)
    bounds = np.append(traj.times, t_stop)
    weights = np.diff(bounds)
    if np.any(weights < 0):
        raise DomainError("t_end earlier than last sample")
    probs = np.bincount(traj.states, weights=weights, minlength=n_agents + 1)
    total = probs.sum()
    if total == 0:
        # single-sample (frozen) trajectory: all mass on that state
        probs[traj.states[-1]] = 1.0
        return probs
    return probs / total


def stationary_distribution_exact(p: AbmParams, dt: float | None = None) -> np.ndarray:
    """Stationary law from the principal eigenvector of the step matrix.

    Builds the (N+1)x(N+1) tridiagonal one-step matrix and extracts the
    left eigenvector of eigenvalue one. Intended as a desk-scale oracle;
    cost grows as N^3.
    """
    if p.n_agents > 2000:
        raise DomainError("exact oracle limited to n_agents <= 2000")
    if dt is None:
        dt = default_dt(p)
    n = p.n_agents
    mat = np.zeros((n + 1, n + 1))
    for x_count in range(n + 1):
        p_up, p_down = transition_probabilities(p, x_count, dt)
        if x_count < n:
            mat[x_count, x_count + 1] = p_up
        if x_count > 0:
            mat[x_count, x_count - 1] = p_down
        mat[x_count, x_count] = 1.0 - p_up - p_down
    vals, vecs = np.linalg.eig(mat.T)
    idx = int(np.argmin(np.abs(vals - 1.0)))
    pi = np.real(vecs[:, idx])
    pi = np.abs(pi)
    return pi / pi.sum()


def _as_seed(seed: int) -> int:
    seed = int(seed)
    if seed < 0:
        raise DomainError("seed must be >= 0")
    return seed % (2 ** 32)
