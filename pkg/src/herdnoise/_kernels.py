"""Compiled inner loops.

Every kernel seeds numba's thread-local RNG on entry, so one call is one
deterministic realization keyed only on the seed argument. Kernels release
the GIL; ensembles may run them from worker threads.
"""

import numpy as np
from numba import njit

# SDE family codes (kept in sync with sde.SdeKind)
KIND_POPULATION_X = 0
KIND_RETURN_Y = 1
KIND_POWERLAW = 2
KIND_CEV = 3

OK = 0
NON_FINITE = 1


@njit(cache=True, nogil=True)
def abm_rates(n_agents, x_count, sigma1, sigma2, h, alpha, rate_cap):
    """dt-free jump rates of the generalized two-choice chain.

    The event-rate factor s = min(y**alpha, rate_cap) with y = X/(N-X)
    multiplies both herding terms and the sigma2 term; sigma1 is not scaled
    (spontaneous entries are rate-independent of the crowd state).
    """
    if alpha == 0.0:
        s = 1.0 if rate_cap >= 1.0 else rate_cap
    elif x_count == n_agents:
        s = rate_cap
    else:
        s = (x_count / (n_agents - x_count)) ** alpha
        if s > rate_cap:
            s = rate_cap
    r_up = (n_agents - x_count) * (sigma1 + h * x_count * s)
    r_down = x_count * (sigma2 * s + h * (n_agents - x_count) * s)
    return r_up, r_down


@njit(cache=True, nogil=True)
def abm_fixed_step(n_agents, x0, n_steps, dt, sigma1, sigma2, h, alpha,
                   rate_cap, record_every, seed):
    """Bernoulli chain: one up/down/stay draw per step; thinned recording."""
    np.random.seed(seed)
    n_rec = n_steps // record_every + 1
    states = np.empty(n_rec, dtype=np.int64)
    states[0] = x0
    x = x0
    k = 1
    for step in range(1, n_steps + 1):
        r_up, r_down = abm_rates(n_agents, x, sigma1, sigma2, h, alpha, rate_cap)
        p_up = r_up * dt
        p_down = r_down * dt
        u = np.random.random()
        if u < p_up:
            x += 1
        elif u < p_up + p_down:
            x -= 1
        if step % record_every == 0:
            states[k] = x
            k += 1
    return states[:k]


@njit(cache=True, nogil=True)
def abm_event_jumps(n_agents, x0, t_end, sigma1, sigma2, h, alpha, rate_cap, seed):
    """Exact jump-process sample; records (time, state) after each jump.

    Stops at the first event time beyond t_end, or when the total rate
    vanishes (frozen chain; flagged so the caller can close the trajectory).
    """
    np.random.seed(seed)
    cap = 1024
    times = np.empty(cap)
    states = np.empty(cap, dtype=np.int64)
    n = 0
    x = x0
    t = 0.0
    frozen = False
    while True:
        r_up, r_down = abm_rates(n_agents, x, sigma1, sigma2, h, alpha, rate_cap)
        total = r_up + r_down
        if total == 0.0:
            frozen = True
            break
        t = t + np.random.exponential(1.0) / total
        if t > t_end:
            break
        if np.random.random() * total < r_up:
            x += 1
        else:
            x -= 1
        if n == cap:
            cap *= 2
            new_t = np.empty(cap)
            new_t[:n] = times[:n]
            times = new_t
            new_s = np.empty(cap, dtype=np.int64)
            new_s[:n] = states[:n]
            states = new_s
        times[n] = t
        states[n] = x
        n += 1
    return times[:n].copy(), states[:n].copy(), frozen


@njit(cache=True, nogil=True)
def abm_event_sampled(n_agents, x0, dt_sample, n_out, sigma1, sigma2, h,
                      alpha, rate_cap, seed):
    """Jump process recorded on a uniform grid (last state at or before k*dt)."""
    np.random.seed(seed)
    out = np.empty(n_out, dtype=np.int64)
    x = x0
    t = 0.0
    k = 0
    while k < n_out:
        r_up, r_down = abm_rates(n_agents, x, sigma1, sigma2, h, alpha, rate_cap)
        total = r_up + r_down
        if total == 0.0:
            while k < n_out:
                out[k] = x
                k += 1
            break
        t_next = t + np.random.exponential(1.0) / total
        while k < n_out and k * dt_sample < t_next:
            out[k] = x
            k += 1
        if k >= n_out:
            break
        if np.random.random() * total < r_up:
            x += 1
        else:
            x -= 1
        t = t_next
    return out


@njit(cache=True, nogil=True)
def sde_coeffs(kind, eps1, eps2, alpha, eta, lam, a_lin, b_amp, y):
    """Drift and diffusion (the dW coefficient, not its square) at state y."""
    if kind == KIND_POPULATION_X:
        x = y
        if alpha == 0.0:
            inv_tau = 1.0
        else:
            inv_tau = (x / (1.0 - x)) ** alpha
        drift = eps1 * (1.0 - x) - eps2 * x * inv_tau
        diff = np.sqrt(2.0 * x * (1.0 - x) * inv_tau)
    elif kind == KIND_RETURN_Y:
        if alpha == 0.0:
            inv_tau = 1.0
        else:
            inv_tau = y ** alpha
        drift = (eps1 + y * (2.0 - eps2) * inv_tau) * (1.0 + y)
        diff = np.sqrt(2.0 * y * inv_tau) * (1.0 + y)
    elif kind == KIND_POWERLAW:
        drift = (eta - 0.5 * lam) * y ** (2.0 * eta - 1.0)
        diff = y ** eta
    else:
        drift = a_lin * y
        diff = b_amp * y ** eta
    return drift, diff


@njit(cache=True, nogil=True)
def sde_integrate(kind, eps1, eps2, alpha, eta, lam, a_lin, b_amp,
                  y_min, y_max, noise_scale, kappa, dt_min, dt_max,
                  y0, dt_sample, n_out, seed):
    """Euler-Maruyama with state-scaled adaptive step and mirror reflection.

    Step: dt = clamp(kappa^2 * min(y^2/diff^2, y/|drift|), dt_min, dt_max),
    which keeps the per-step relative fluctuation near kappa. Output is the
    last internal state at or before each grid time k*dt_sample.

    Returns (samples, status, floor_fraction): status NON_FINITE flags an
    overflow, floor_fraction is the share of steps clamped at dt_min.
    """
    np.random.seed(seed)
    out = np.empty(n_out)
    y = y0
    t = 0.0
    k2 = kappa * kappa
    n_steps = 0
    n_floor = 0
    idx = 0
    while idx < n_out:
        drift, diff = sde_coeffs(kind, eps1, eps2, alpha, eta, lam,
                                 a_lin, b_amp, y)
        if not (np.isfinite(drift) and np.isfinite(diff)):
            return out, NON_FINITE, 0.0
        dt = dt_max
        if diff > 0.0:
            dt_d = k2 * y * y / (diff * diff)
            if dt_d < dt:
                dt = dt_d
        ad = abs(drift)
        if ad > 0.0:
            dt_a = k2 * y / ad
            if dt_a < dt:
                dt = dt_a
        if dt < dt_min:
            dt = dt_min
            n_floor += 1
        g = idx * dt_sample
        while idx < n_out and g < t + dt:
            out[idx] = y
            idx += 1
            g = idx * dt_sample
        if idx >= n_out:
            break
        y = y + drift * dt + noise_scale * diff * np.sqrt(dt) * np.random.normal()
        if not np.isfinite(y):
            return out, NON_FINITE, 0.0
        while y < y_min or y > y_max:
            if y < y_min:
                y = 2.0 * y_min - y
            else:
                y = 2.0 * y_max - y
        t += dt
        n_steps += 1
    floor_frac = n_floor / n_steps if n_steps > 0 else 0.0
    return out, OK, floor_frac
