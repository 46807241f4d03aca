"""Flat key = value experiment configuration.

One line per setting, dotted section keys (model.alpha = 1), # comments.
Every key can be overridden by a CLI flag of the same dotted name. Unknown
keys and malformed values raise ConfigError naming the field.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .abm import AbmParams
from .errors import ConfigError, DomainError
from .sde import SdeKind, SdeSpec, StepControl
from .stats import Q_DEFAULT

_MODEL_KINDS = ("population_x", "return_y", "powerlaw", "cev", "abm")

# key -> (type tag, default); None defaults are resolved at use time
_SCHEMA: dict[str, tuple[str, object]] = {
    "model.kind": ("str", "return_y"),
    "model.eps1": ("float", 0.0),
    "model.eps2": ("float", 0.0),
    "model.alpha": ("float", 0.0),
    "model.eta": ("float", 1.5),
    "model.lam": ("float", 3.0),
    "model.a_lin": ("float", 0.0),
    "model.b_amp": ("float", 1.0),
    "model.y_min": ("float", None),
    "model.y_max": ("float", None),
    "model.y0": ("float", None),
    "model.n_agents": ("int", 1000),
    "model.sigma1": ("float", 1.0),
    "model.sigma2": ("float", 1.0),
    "model.h": ("float", 1.0),
    "model.rate_cap": ("float", 1e6),
    "model.x0": ("int", None),
    "control.kappa": ("float", 0.1),
    "control.dt_max": ("float", 1e-2),
    "control.dt_min": ("float", 1e-12),
    "run.t_end": ("float", 100.0),
    "run.dt_sample": ("float", 1e-3),
    "run.n_trajectories": ("int", 1),
    "run.master_seed": ("int", 1),
    "run.burn_in_fraction": ("float", 0.1),
    "run.workers": ("int", 1),
    "run.write_series": ("bool", True),
    "analysis.bins_per_decade": ("int", 20),
    "analysis.psd_segment": ("int", 16384),
    "analysis.psd_overlap": ("float", 0.5),
    "analysis.psd_rebin_per_decade": ("int", 10),
    "analysis.q_values": ("floats", list(Q_DEFAULT)),
    "analysis.pdf_range": ("pair", None),
    "analysis.pdf_fit": ("pair", None),
    "analysis.psd_fit": ("pair", None),
    "analysis.hurst_fit": ("pair", None),
    "analysis.compute_pdf": ("bool", True),
    "analysis.compute_psd": ("bool", True),
    "analysis.compute_fq": ("bool", False),
    "output.dir": ("str", None),
}


def _parse_value(key: str, raw: str):
    kind = _SCHEMA[key][0]
    raw = raw.strip()
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            return int(raw)
        if kind == "bool":
            low = raw.lower()
            if low in ("true", "1", "yes"):
                return True
            if low in ("false", "0", "no"):
                return False
            raise ValueError(raw)
        if kind == "floats":
            return [float(tok) for tok in raw.split(",") if tok.strip()]
        if kind == "pair":
            parts = [float(tok) for tok in raw.split(",") if tok.strip()]
            if len(parts) != 2:
                raise ValueError("expected two comma-separated numbers")
            return (parts[0], parts[1])
        return raw
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {kind} ({exc})") from None


def _format_value(key: str, value) -> str:
    kind = _SCHEMA[key][0]
    if kind == "floats":
        return ",".join(repr(v) for v in value)
    if kind == "pair":
        return f"{value[0]!r},{value[1]!r}"
    if kind == "bool":
        return "true" if value else "false"
    return repr(value) if isinstance(value, float) else str(value)


@dataclass(frozen=True)
class ExperimentConfig:
    """Typed view over the flat key = value settings."""

    values: dict

    # -- construction ------------------------------------------------------

    @classmethod
    def defaults(cls) -> "ExperimentConfig":
        return cls(values={k: v for k, (_, v) in _SCHEMA.items()})

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        cfg = cls.defaults()
        overrides = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if "=" not in body:
                raise ConfigError(f"line {lineno}: expected 'key = value'")
            key, raw = (part.strip() for part in body.split("=", 1))
            overrides[key] = raw
        return cfg.override(overrides)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        return cls.from_text(path.read_text())

    def override(self, raw_values: dict) -> "ExperimentConfig":
        new = dict(self.values)
        for key, raw in raw_values.items():
            if key not in _SCHEMA:
                raise ConfigError(f"unknown configuration key: {key}")
            new[key] = raw if not isinstance(raw, str) else _parse_value(key, raw)
        return ExperimentConfig(values=new)

    def to_text(self) -> str:
        lines = []
        for key in _SCHEMA:
            value = self.values[key]
            if value is None:
                continue
            lines.append(f"{key} = {_format_value(key, value)}")
        return "\n".join(lines) + "\n"

    # -- accessors ---------------------------------------------------------

    def __getitem__(self, key: str):
        return self.values[key]

    @property
    def is_abm(self) -> bool:
        return self.values["model.kind"] == "abm"

    # -- validation and builders -------------------------------------------

    def validate(self) -> "ExperimentConfig":
        v = self.values
        if v["model.kind"] not in _MODEL_KINDS:
            raise ConfigError(
                f"model.kind: {v['model.kind']!r} not one of {_MODEL_KINDS}")
        if v["run.t_end"] <= 0:
            raise ConfigError("run.t_end: must be > 0")
        if v["run.dt_sample"] <= 0:
            raise ConfigError("run.dt_sample: must be > 0")
        if v["run.n_trajectories"] < 1:
            raise ConfigError("run.n_trajectories: must be >= 1")
        if not 0 <= v["run.burn_in_fraction"] <= 0.5:
            raise ConfigError("run.burn_in_fraction: must lie in [0, 0.5]")
        if v["run.master_seed"] < 0:
            raise ConfigError("run.master_seed: must be >= 0")
        if v["run.workers"] < 1:
            raise ConfigError("run.workers: must be >= 1")
        if not 0 <= v["analysis.psd_overlap"] < 1:
            raise ConfigError("analysis.psd_overlap: must lie in [0, 1)")
        if v["analysis.bins_per_decade"] < 1:
            raise ConfigError("analysis.bins_per_decade: must be >= 1")
        if v["analysis.psd_segment"] < 4:
            raise ConfigError("analysis.psd_segment: must be >= 4")
        for key in ("analysis.pdf_fit", "analysis.psd_fit",
                    "analysis.hurst_fit", "analysis.pdf_range"):
            pair = v[key]
            if pair is not None and not 0 < pair[0] < pair[1]:
                raise ConfigError(f"{key}: need 0 < lo < hi")
        if any(q <= 0 for q in v["analysis.q_values"]):
            raise ConfigError("analysis.q_values: must be positive")
        # building the model objects runs their own invariants
        try:
            if self.is_abm:
                self.build_abm_params()
            else:
                self.build_sde_spec()
            self.build_step_control()
        except DomainError as exc:
            raise ConfigError(f"model: {exc}") from exc
        return self

    def build_sde_spec(self) -> SdeSpec:
        v = self.values
        if self.is_abm:
            raise ConfigError("model.kind: abm config has no SDE spec")
        return SdeSpec(kind=SdeKind(v["model.kind"]), eps1=v["model.eps1"],
                       eps2=v["model.eps2"], alpha=v["model.alpha"],
                       eta=v["model.eta"], lam=v["model.lam"],
                       a_lin=v["model.a_lin"], b_amp=v["model.b_amp"],
                       y_min=v["model.y_min"], y_max=v["model.y_max"])

    def build_abm_params(self) -> AbmParams:
        v = self.values
        return AbmParams(n_agents=v["model.n_agents"], sigma1=v["model.sigma1"],
                         sigma2=v["model.sigma2"], h=v["model.h"],
                         alpha=v["model.alpha"], rate_cap=v["model.rate_cap"])

    def build_step_control(self) -> StepControl:
        v = self.values
        return StepControl(kappa=v["control.kappa"], dt_max=v["control.dt_max"],
                           dt_min=v["control.dt_min"])

    # -- resolved analysis ranges -------------------------------------------

    def pdf_range(self) -> tuple[float, float]:
        if self.values["analysis.pdf_range"] is not None:
            return self.values["analysis.pdf_range"]
        if self.is_abm:
            return (0.5 / self.values["model.n_agents"], 1.0)
        spec = self.build_sde_spec()
        return (spec.y_min, spec.y_max)

    def pdf_fit_range(self) -> tuple[float, float]:
        if self.values["analysis.pdf_fit"] is not None:
            return self.values["analysis.pdf_fit"]
        lo, hi = self.pdf_range()
        # one decade inside each cutoff
        return (lo * 10.0, hi / 10.0)

    def psd_fit_range(self) -> tuple[float, float]:
        if self.values["analysis.psd_fit"] is not None:
            return self.values["analysis.psd_fit"]
        dt = self.values["run.dt_sample"]
        f1 = 1.0 / (self.values["analysis.psd_segment"] * dt)
        return (3.0 * f1, 1.0 / (10.0 * dt))

    def hurst_fit_range(self, n_samples: int) -> tuple[float, float]:
        if self.values["analysis.hurst_fit"] is not None:
            return self.values["analysis.hurst_fit"]
        dt = self.values["run.dt_sample"]
        return (10.0 * dt, 0.01 * n_samples * dt)
