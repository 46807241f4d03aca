"""Herding-model simulators and power-law statistics toolkit."""

__version__ = "0.1.0"

from .abm import (AbmParams, DiscreteTrajectory, simulate_event_driven,
                  simulate_event_sampled, simulate_fixed_step,
                  stationary_distribution_exact, transition_probabilities)
from .config import ExperimentConfig
from .errors import (ConfigError, DegenerateExponent, DomainError, EmptyRange,
                     HerdnoiseError, InsufficientPoints, NonFinite,
                     StepFloorWarning, StepTooLarge, TooShort)
from .market import (MarketParams, MoodSeries, adiabatic_return, log_return,
                     price, return_series, sample_mood, x_to_y, y_to_x)
from .sde import (Exponents, SdeKind, SdeSpec, StepControl, Trajectory,
                  coefficients, integrate, predict_exponents)
from .stats import (MultifractalResult, PdfEstimate, PowerLawFit,
                    SpectrumEstimate, fit_powerlaw, hh_correlation,
                    hurst_spectrum, log_binned_pdf, log_rebin, psd)

__all__ = [
    "AbmParams", "DiscreteTrajectory", "simulate_event_driven",
    "simulate_event_sampled", "simulate_fixed_step",
    "stationary_distribution_exact", "transition_probabilities",
    "ExperimentConfig",
    "ConfigError", "DegenerateExponent", "DomainError", "EmptyRange",
    "HerdnoiseError", "InsufficientPoints", "NonFinite", "StepFloorWarning",
    "StepTooLarge", "TooShort",
    "MarketParams", "MoodSeries", "adiabatic_return", "log_return", "price",
    "return_series", "sample_mood", "x_to_y", "y_to_x",
    "Exponents", "SdeKind", "SdeSpec", "StepControl", "Trajectory",
    "coefficients", "integrate", "predict_exponents",
    "MultifractalResult", "PdfEstimate", "PowerLawFit", "SpectrumEstimate",
    "fit_powerlaw", "hh_correlation", "hurst_spectrum", "log_binned_pdf",
    "log_rebin", "psd",
    "__version__",
]
