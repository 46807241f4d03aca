"""Mapping from population state to market observables.

Two agent types share the market: long-horizon traders anchored to a fixed
fundamental price and crowd-followers whose aggregate demand carries a
+/-1 mood. Clearing the two demands gives the price, log-returns over a
window, and the mood-modulated "absolute return" y = x/(1-x) which acts
as the volatility measure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class MarketParams:
    r0: float = 1.0
    p_fund: float = 1.0
    window: float = 1.0
    mood_flip_rate: float = 1.0

    def __post_init__(self):
        if self.r0 <= 0:
            raise DomainError(f"r0 must be > 0, got {self.r0}")
        if self.p_fund <= 0:
            raise DomainError(f"p_fund must be > 0, got {self.p_fund}")
        if self.window <= 0:
            raise DomainError(f"window must be > 0, got {self.window}")
        if self.mood_flip_rate < 0:
            raise DomainError("mood_flip_rate must be >= 0")


@dataclass
class MoodSeries:
    """+/-1 crowd mood on a trajectory's grid."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int8)
        if len(self.values) and not np.all(np.abs(self.values) == 1):
            raise DomainError("mood values must be +1 or -1")

    def __len__(self) -> int:
        return len(self.values)


def _check_fraction(x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(x >= 1):
        raise DomainError("population fraction must lie in [0, 1)")
    return x


def x_to_y(x):
    """Group-size ratio y = x/(1-x); strictly increasing on [0, 1)."""
    x = _check_fraction(x)
    y = x / (1.0 - x)
    return float(y) if y.ndim == 0 else y


def y_to_x(y):
    """Inverse map x = y/(1+y)."""
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise DomainError("y must be >= 0")
    x = y / (1.0 + y)
    return float(x) if x.ndim == 0 else x


def price(mp: MarketParams, x, xi):
    """Clearing price P = p_fund * exp(r0 * y(x) * xi)."""
    y = x_to_y(x)
    out = mp.p_fund * np.exp(mp.r0 * y * np.asarray(xi, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def log_return(mp: MarketParams, x_now, xi_now, x_prev, xi_prev):
    """Window log-return; identical to ln(price_now / price_prev)."""
    y_now = x_to_y(x_now)
    y_prev = x_to_y(x_prev)
    r = mp.r0 * (y_now * np.asarray(xi_now, dtype=float)
                 - y_prev * np.asarray(xi_prev, dtype=float))
    return float(r) if np.ndim(r) == 0 else r


def adiabatic_return(mp: MarketParams, y, zeta):
    """Return r = r0 * y * zeta for a mood that moves faster than x.

    zeta is the mood difference across the window, so |r| is proportional
    to y: the ratio y carries all the volatility.
    """
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise DomainError("y must be >= 0")
    r = mp.r0 * y * np.asarray(zeta, dtype=float)
    return float(r) if np.ndim(r) == 0 else r


def return_series(mp: MarketParams, x_values: np.ndarray, mood: MoodSeries,
                  window_steps: int = 1) -> np.ndarray:
    """Log-returns over a window of grid steps from sampled (x, mood) pairs.

    The window defaults to one sampling interval; entry k of the result is
    the return between grid points k - window_steps and k.
    """
    x_values = _check_fraction(x_values)
    if window_steps < 1:
        raise DomainError("window_steps must be >= 1")
    if len(mood.values) != len(x_values):
        raise DomainError("mood series and state series lengths differ")
    if len(x_values) <= window_steps:
        raise DomainError("series shorter than the return window")
    signed = (x_values / (1.0 - x_values)) * mood.values
    return mp.r0 * (signed[window_steps:] - signed[:-window_steps])


def sample_mood(mp: MarketParams, grid: np.ndarray, seed: int = 0) -> MoodSeries:
    """Two-state telegraph mood on the given time grid.

    Starts +1/-1 with equal probability; across a grid gap of length d the
    sign flips with probability 1 - exp(-mood_flip_rate * d).
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) == 0:
        raise DomainError("grid must be a non-empty 1-d array of times")
    deltas = np.diff(grid)
    if np.any(deltas < 0):
        raise DomainError("grid times must be non-decreasing")
    rng = np.random.default_rng(seed)
    start = 1 if rng.random() < 0.5 else -1
    if len(grid) == 1:
        return MoodSeries(values=np.array([start], dtype=np.int8))
    p_flip = 1.0 - np.exp(-mp.mood_flip_rate * deltas)
    flips = rng.random(len(deltas)) < p_flip
    steps = np.where(flips, -1, 1)
    values = start * np.cumprod(np.concatenate(([1], steps)))
    return MoodSeries(values=values)
