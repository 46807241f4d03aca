"""Coefficient definitions and adaptive-step integration for the SDE family.

Four related diffusions, all with a state-dependent event-rate factor
1/tau(y) = y**alpha:

* POPULATION_X - population fraction x of the herding chain in the large-N
  limit (alpha = 0 gives the classic constant-rate form),
* RETURN_Y     - absolute return y = x/(1-x) of the same dynamics,
* POWERLAW     - the reference class dy = (eta - lambda/2) y^(2 eta - 1) dt
                 + y^eta dW whose stationary density and spectrum are pure
                 power laws,
* CEV          - the linear-drift special case dy = a y dt + b y^eta dW.

Trajectories live between two reflecting boundaries; without the
restriction the heavy-tailed members are not stationary.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import DomainError, DegenerateExponent, NonFinite, StepFloorWarning

DEFAULT_Y_BOUNDS = (1.0, 1e3)
DEFAULT_X_BOUNDS = (1e-6, 1.0 - 1e-6)


class SdeKind(enum.Enum):
    POPULATION_X = "population_x"
    RETURN_Y = "return_y"
    POWERLAW = "powerlaw"
    CEV = "cev"


_KIND_CODE = {
    SdeKind.POPULATION_X: _kernels.KIND_POPULATION_X,
    SdeKind.RETURN_Y: _kernels.KIND_RETURN_Y,
    SdeKind.POWERLAW: _kernels.KIND_POWERLAW,
    SdeKind.CEV: _kernels.KIND_CEV,
}


@dataclass(frozen=True)
class SdeSpec:
    """A named member of the family: equation choice, parameters, boundaries.

    noise_scale multiplies the Wiener increment during integration only
    (set 0 to integrate the drift ODE alone); coefficients() is unaffected.
    """

    kind: SdeKind
    eps1: float = 0.0
    eps2: float = 0.0
    alpha: float = 0.0
    eta: float = 1.5
    lam: float = 3.0
    a_lin: float = 0.0
    b_amp: float = 1.0
    y_min: float | None = None
    y_max: float | None = None
    noise_scale: float = 1.0

    def __post_init__(self):
        if not isinstance(self.kind, SdeKind):
            object.__setattr__(self, "kind", SdeKind(self.kind))
        lo, hi = (DEFAULT_X_BOUNDS if self.kind is SdeKind.POPULATION_X
                  else DEFAULT_Y_BOUNDS)
        if self.y_min is None:
            object.__setattr__(self, "y_min", lo)
        if self.y_max is None:
            object.__setattr__(self, "y_max", hi)
        if self.eps1 < 0 or self.eps2 < 0:
            raise DomainError("eps1 and eps2 must be >= 0")
        if self.alpha < 0:
            raise DomainError(f"alpha must be >= 0, got {self.alpha}")
        if self.b_amp <= 0:
            raise DomainError(f"b_amp must be > 0, got {self.b_amp}")
        if not self.y_min < self.y_max:
            raise DomainError(
                f"need y_min < y_max, got ({self.y_min}, {self.y_max})")
        if self.y_min <= 0:
            raise DomainError("boundaries must be positive")
        if self.kind is SdeKind.POPULATION_X and self.y_max >= 1.0:
            raise DomainError(
                "population boundaries must lie strictly inside (0, 1)")
        if self.noise_scale < 0:
            raise DomainError("noise_scale must be >= 0")

    @property
    def y0_default(self) -> float:
        return math.sqrt(self.y_min * self.y_max)


@dataclass(frozen=True)
class StepControl:
    """Adaptive-step policy: relative scale, hard step bounds."""

    kappa: float = 0.1
    dt_max: float = 1e-2
    dt_min: float = 1e-12
    floor_warn_fraction: float = 0.05

    def __post_init__(self):
        if not 0 < self.kappa <= 1:
            raise DomainError(f"kappa must be in (0, 1], got {self.kappa}")
        if not 0 < self.dt_min <= self.dt_max:
            raise DomainError("need 0 < dt_min <= dt_max")
        if not 0 < self.floor_warn_fraction <= 1:
            raise DomainError("floor_warn_fraction must be in (0, 1]")


@dataclass
class Trajectory:
    """Uniform-grid sample path: values[k] is the state at t0 + k*dt_sample."""

    t0: float
    dt_sample: float
    values: np.ndarray
    step_floor_fraction: float = 0.0
    step_floor: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(len(self.values)) * self.dt_sample


class Exponents(NamedTuple):
    eta: float
    lam: float
    beta: float


def coefficients(spec: SdeSpec, state: float) -> tuple[float, float]:
    """Drift and diffusion (dW coefficient) at the given state."""
    state = float(state)
    if not spec.y_min <= state <= spec.y_max:
        raise DomainError(
            f"state {state} outside [{spec.y_min}, {spec.y_max}]")
    drift, diff = _kernels.sde_coeffs(
        _KIND_CODE[spec.kind], spec.eps1, spec.eps2, spec.alpha, spec.eta,
        spec.lam, spec.a_lin, spec.b_amp, state)
    if not (math.isfinite(drift) and math.isfinite(diff)):
        raise NonFinite(f"coefficients overflowed at state {state}")
    return drift, diff


def predict_exponents(spec: SdeSpec) -> Exponents:
    """Tail exponent lambda and spectral exponent beta implied by the spec.

    RETURN_Y maps onto the power-law class in the large-y limit:
    eta = (3+alpha)/2, lambda = eps2 + alpha + 1,
    beta = 1 + (eps2 + alpha - 2)/(1 + alpha). POWERLAW echoes its own
    (eta, lambda) with beta = 1 + (lambda-3)/(2(eta-1)). CEV follows the
    linear-drift branch: lambda = 3 + alpha, beta = 1 + alpha/(1+alpha).
    """
    if spec.kind is SdeKind.RETURN_Y:
        eta = (3.0 + spec.alpha) / 2.0
        lam = spec.eps2 + spec.alpha + 1.0
        beta = 1.0 + (spec.eps2 + spec.alpha - 2.0) / (1.0 + spec.alpha)
        return Exponents(eta, lam, beta)
    if spec.kind is SdeKind.POWERLAW:
        if spec.eta == 1.0:
            raise DegenerateExponent(
                "beta undefined at eta = 1 (additive-noise point)")
        beta = 1.0 + (spec.lam - 3.0) / (2.0 * (spec.eta - 1.0))
        return Exponents(spec.eta, spec.lam, beta)
    if spec.kind is SdeKind.CEV:
        eta = (3.0 + spec.alpha) / 2.0
        lam = 3.0 + spec.alpha
        beta = 1.0 + spec.alpha / (1.0 + spec.alpha)
        return Exponents(eta, lam, beta)
    raise DomainError(
        "no power-law prediction for POPULATION_X (bounded state)")


def integrate(spec: SdeSpec, t_end: float, dt_sample: float, seed: int = 0,
              y0: float | None = None,
              ctrl: StepControl | None = None) -> Trajectory:
    """Integrate the spec from t=0 to t_end, sampling every dt_sample.

    Euler-Maruyama with the StepControl policy; after every internal step
    the state is mirror-reflected back into [y_min, y_max]. Deterministic
    given the seed. Raises NonFinite if the state or the coefficients
    overflow; a run that spends more than floor_warn_fraction of its steps
    at dt_min is returned flagged (and warns) instead of failing.
    """
    ctrl = ctrl or StepControl()
    y0 = spec.y0_default if y0 is None else float(y0)
    if not spec.y_min <= y0 <= spec.y_max:
        raise DomainError(f"y0 {y0} outside [{spec.y_min}, {spec.y_max}]")
    if t_end <= 0:
        raise DomainError(f"t_end must be > 0, got {t_end}")
    if dt_sample < ctrl.dt_min:
        raise DomainError("dt_sample must be >= dt_min")
    n_out = int(round(t_end / dt_sample))
    if n_out < 1:
        raise DomainError("t_end/dt_sample must round to at least one sample")
    values, status, floor_frac = _kernels.sde_integrate(
        _KIND_CODE[spec.kind], spec.eps1, spec.eps2, spec.alpha, spec.eta,
        spec.lam, spec.a_lin, spec.b_amp, spec.y_min, spec.y_max,
        spec.noise_scale, ctrl.kappa, ctrl.dt_min, ctrl.dt_max,
        y0, dt_sample, n_out, _as_seed(seed))
    if status == _kernels.NON_FINITE:
        raise NonFinite(
            "integration diverged despite boundaries; check y_min/y_max")
    flagged = floor_frac > ctrl.floor_warn_fraction
    if flagged:
        warnings.warn(
            f"dt_min hit on {floor_frac:.1%} of steps (stiff run)",
            StepFloorWarning, stacklevel=2)
    return Trajectory(t0=0.0, dt_sample=dt_sample, values=values,
                      step_floor_fraction=floor_frac, step_floor=flagged)


def _as_seed(seed: int) -> int:
    seed = int(seed)
    if seed < 0:
        raise DomainError("seed must be >= 0")
    return seed % (2 ** 32)
