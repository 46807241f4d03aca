"""Estimators and fitters for heavy-tailed, long-memory series.

Log-binned densities, segment-averaged spectra, straight-line fits in
log-log coordinates, and q-th order structure functions with their Hurst
spectrum. All estimators are pure functions of immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as _signal

from .errors import DomainError, EmptyRange, InsufficientPoints, TooShort

PSD_SEGMENT = 2 ** 14
PSD_OVERLAP = 0.5
Q_DEFAULT = (1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 16.0)


@dataclass
class PdfEstimate:
    """Probability density per unit value on geometric bins."""

    bin_centers: np.ndarray
    density: np.ndarray
    counts: np.ndarray
    bin_edges: np.ndarray

    @property
    def bin_widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)

    def normalization(self) -> float:
        return float(np.sum(self.density * self.bin_widths))


@dataclass
class SpectrumEstimate:
    """One-sided power spectral density at positive frequencies."""

    frequencies: np.ndarray
    power: np.ndarray
    n_segments: int


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    stderr: float
    fit_range: tuple[float, float]
    r_squared: float
    n_points: int
    amplitude: float  # prefactor c in y ~ c * x**exponent


@dataclass
class MultifractalResult:
    """Structure functions F_q(lag) and, once fitted, the Hurst spectrum."""

    q_values: np.ndarray
    lags: np.ndarray  # in time units
    F: np.ndarray  # shape (len(q_values), len(lags))
    H: np.ndarray | None = None
    H_stderr: np.ndarray | None = None


def pdf_from_counts(bin_edges: np.ndarray, counts: np.ndarray) -> PdfEstimate:
    """Build a PdfEstimate from precomputed histogram counts.

    Lets callers pool counts from several sample batches over shared edges;
    the density normalizes over the covered range.
    """
    bin_edges = np.asarray(bin_edges, dtype=float)
    counts = np.asarray(counts)
    if len(bin_edges) != len(counts) + 1:
        raise DomainError("need len(bin_edges) == len(counts) + 1")
    total = counts.sum()
    if total == 0:
        raise EmptyRange("no samples in range")
    widths = np.diff(bin_edges)
    density = counts / (total * widths)
    centers = np.sqrt(bin_edges[:-1] * bin_edges[1:])
    return PdfEstimate(bin_centers=centers, density=density,
                       counts=counts.astype(np.int64), bin_edges=bin_edges)


def geometric_edges(value_range: tuple[float, float],
                    bins_per_decade: int) -> np.ndarray:
    lo, hi = float(value_range[0]), float(value_range[1])
    if not 0 < lo < hi:
        raise DomainError(f"need 0 < lo < hi, got ({lo}, {hi})")
    if bins_per_decade < 1:
        raise DomainError("bins_per_decade must be >= 1")
    n_bins = max(1, int(round(np.log10(hi / lo) * bins_per_decade)))
    return np.geomspace(lo, hi, n_bins + 1)


def log_binned_pdf(samples: np.ndarray, bins_per_decade: int,
                   value_range: tuple[float, float] | None = None) -> PdfEstimate:
    """Histogram positive samples on geometric bins, normalized in range."""
    samples = np.asarray(samples, dtype=float)
    if len(samples) == 0:
        raise EmptyRange("no samples")
    if np.any(samples <= 0):
        raise DomainError("samples must be strictly positive")
    if value_range is None:
        value_range = (float(samples.min()), float(samples.max()))
        if value_range[0] == value_range[1]:
            # degenerate sample: one narrow bin around the common value
            value_range = (value_range[0] * 0.999, value_range[1] * 1.001)
    edges = geometric_edges(value_range, bins_per_decade)
    counts, _ = np.histogram(samples, bins=edges)
    return pdf_from_counts(edges, counts)


def fit_powerlaw(x: np.ndarray, y: np.ndarray,
                 fit_range: tuple[float, float]) -> PowerLawFit:
    """Least-squares line through (log x, log y) for x inside fit_range."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    lo, hi = float(fit_range[0]), float(fit_range[1])
    if not lo < hi:
        raise DomainError(f"need lo < hi, got ({lo}, {hi})")
    mask = (x >= lo) & (x <= hi) & (y > 0) & np.isfinite(x) & np.isfinite(y)
    n = int(mask.sum())
    if n < 8:
        raise InsufficientPoints(
            f"{n} usable points in [{lo}, {hi}]; need at least 8")
    lx = np.log(x[mask])
    ly = np.log(y[mask])
    lx_c = lx - lx.mean()
    sxx = float(np.dot(lx_c, lx_c))
    if sxx == 0.0:
        raise InsufficientPoints("all points share one x value")
    slope = float(np.dot(lx_c, ly) / sxx)
    intercept = float(ly.mean() - slope * lx.mean())
    resid = ly - (intercept + slope * lx)
    ssr = float(np.dot(resid, resid))
    sst = float(np.dot(ly - ly.mean(), ly - ly.mean()))
    stderr = float(np.sqrt(max(ssr, 0.0) / (n - 2) / sxx)) if n > 2 else 0.0
    # a residual floor keeps degenerate (constant / exact) inputs at r^2 = 1
    if sst <= 1e-20 or ssr <= 1e-20 * max(1.0, sst):
        r_squared = 1.0
    else:
        r_squared = max(0.0, 1.0 - ssr / sst)
    return PowerLawFit(exponent=slope, stderr=stderr, fit_range=(lo, hi),
                       r_squared=r_squared, n_points=n,
                       amplitude=float(np.exp(intercept)))


def psd(traj, segment_length: int = PSD_SEGMENT,
        overlap: float = PSD_OVERLAP) -> SpectrumEstimate:
    """Segment-averaged, cosine-tapered, mean-removed periodogram.

    One-sided density at f_k = k/(segment_length*dt_sample), k >= 1;
    Parseval holds within the taper correction.
    """
    values = np.asarray(traj.values, dtype=float)
    n = len(values)
    if not 0 <= overlap < 1:
        raise DomainError(f"overlap must be in [0, 1), got {overlap}")
    if segment_length < 4:
        raise DomainError("segment_length must be >= 4")
    if n < 2 * segment_length:
        raise TooShort(
            f"series of {n} samples shorter than 2*segment_length")
    noverlap = int(round(overlap * segment_length))
    freqs, power = _signal.welch(
        values, fs=1.0 / traj.dt_sample, window="hann",
        nperseg=segment_length, noverlap=noverlap, detrend="constant",
        scaling="density", return_onesided=True)
    n_segments = (n - noverlap) // (segment_length - noverlap)
    return SpectrumEstimate(frequencies=freqs[1:], power=power[1:],
                            n_segments=int(n_segments))


def log_rebin(x: np.ndarray, y: np.ndarray,
              bins_per_decade: int = 10) -> tuple[np.ndarray, np.ndarray]:
    """Average (x, y) points into geometric x-bins; drops empty bins.

    Used to turn a linearly spaced spectrum into log-uniform points before
    slope fitting, so each decade carries equal weight.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (x > 0) & np.isfinite(x) & np.isfinite(y)
    x, y = x[keep], y[keep]
    if len(x) == 0:
        raise EmptyRange("no positive points to rebin")
    edges = geometric_edges((x.min(), x.max() * (1 + 1e-12)), bins_per_decade)
    idx = np.digitize(x, edges) - 1
    idx = np.clip(idx, 0, len(edges) - 2)
    n_bins = len(edges) - 1
    counts = np.bincount(idx, minlength=n_bins)
    sum_logx = np.bincount(idx, weights=np.log(x), minlength=n_bins)
    sum_y = np.bincount(idx, weights=y, minlength=n_bins)
    filled = counts > 0
    xc = np.exp(sum_logx[filled] / counts[filled])
    yc = sum_y[filled] / counts[filled]
    return xc, yc


def hh_correlation(traj, q_values=None, lags=None) -> MultifractalResult:
    """q-th order structure functions F_q(lag) = <|y(t+lag)-y(t)|^q>^(1/q).

    lags are sample counts (converted to times in the result) and must stay
    at or below a tenth of the series length.
    """
    values = np.asarray(traj.values, dtype=float)
    n = len(values)
    if n < 20:
        raise TooShort("need at least 20 samples")
    q_values = np.asarray(Q_DEFAULT if q_values is None else q_values,
                          dtype=float)
    if np.any(q_values <= 0):
        raise DomainError("q values must be positive")
    max_lag = n // 10
    if lags is None:
        n_lags = max(2, int(np.log10(max(max_lag, 2)) * 8) + 1)
        lags = np.unique(np.round(np.geomspace(1, max_lag, n_lags)).astype(int))
    else:
        lags = np.asarray(lags, dtype=int)
        if np.any(lags < 1) or np.any(lags > max_lag):
            raise DomainError(
                f"lags must lie in [1, n//10] = [1, {max_lag}]")
        lags = np.unique(lags)
    F = np.empty((len(q_values), len(lags)))
    for j, lag in enumerate(lags):
        diffs = np.abs(values[lag:] - values[:-lag])
        for i, q in enumerate(q_values):
            F[i, j] = np.mean(diffs ** q) ** (1.0 / q)
    return MultifractalResult(q_values=q_values,
                              lags=lags * traj.dt_sample, F=F)


def hurst_spectrum(mf: MultifractalResult,
                   fit_range: tuple[float, float]) -> MultifractalResult:
    """Fit H(q) = d log F_q / d log lag over the given lag-time range."""
    H = np.empty(len(mf.q_values))
    H_err = np.empty(len(mf.q_values))
    for i in range(len(mf.q_values)):
        fit = fit_powerlaw(mf.lags, mf.F[i], fit_range)
        H[i] = fit.exponent
        H_err[i] = fit.stderr
    return MultifractalResult(q_values=mf.q_values, lags=mf.lags, F=mf.F,
                              H=H, H_stderr=H_err)
