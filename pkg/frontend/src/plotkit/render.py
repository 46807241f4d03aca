"""Render log-log benchmark figures from run-directory CSV artifacts.

Reads only the runner's CSV contract (pdf.csv, psd.csv, fq.csv, hurst.csv,
summary.csv) and never recomputes statistics: measured points are drawn as
markers, predicted power laws from summary.csv as overlay lines.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

# stable SVG element ids, so identical inputs give identical bytes
matplotlib.rcParams["svg.hashsalt"] = "plotkit"


class SchemaError(Exception):
    """An input CSV is missing, malformed, or lacks a required column."""


FIGURES = ("fig1", "fig2", "fig3")

_COLUMNS = {
    "pdf.csv": ("bin_center", "density", "count"),
    "psd.csv": ("frequency", "power"),
    "fq.csv": ("q", "lag", "F"),
    "hurst.csv": ("q", "H", "stderr"),
    "summary.csv": ("quantity", "measured", "predicted", "abs_error",
                    "tolerance", "pass"),
}

_STYLES = ({"color": "red", "marker": "s"},
           {"color": "blue", "marker": "o"},
           {"color": "magenta", "marker": "^"})


@dataclass
class FigureSpec:
    figure: str
    run_dirs: list
    out_path: Path
    xlabel_left: str = ""
    ylabel_left: str = ""
    xlabel_right: str = ""
    ylabel_right: str = ""

    def __post_init__(self):
        if self.figure not in FIGURES:
            raise SchemaError(
                f"figure must be one of {FIGURES}, got {self.figure!r}")
        self.run_dirs = [Path(d) for d in self.run_dirs]
        self.out_path = Path(self.out_path)
        if self.out_path.suffix.lower() not in (".png", ".svg"):
            raise SchemaError(
                f"{self.out_path}: output must be .png or .svg")


def load_table(run_dir: Path, name: str) -> pd.DataFrame:
    path = Path(run_dir) / name
    if not path.is_file():
        raise SchemaError(f"{path}: file not found")
    try:
        frame = pd.read_csv(path)
    except Exception as exc:
        raise SchemaError(f"{path}: unreadable CSV ({exc})") from exc
    for column in _COLUMNS[name]:
        if column not in frame.columns:
            raise SchemaError(f"{path}: missing column {column!r}")
    return frame


def predicted_exponent(run_dir: Path, quantity: str) -> float:
    summary = load_table(run_dir, "summary.csv")
    rows = summary[summary["quantity"] == quantity]
    if rows.empty:
        raise SchemaError(
            f"{Path(run_dir) / 'summary.csv'}: no row with quantity "
            f"{quantity!r}")
    value = pd.to_numeric(rows["predicted"], errors="coerce").iloc[0]
    if not np.isfinite(value):
        raise SchemaError(
            f"{Path(run_dir) / 'summary.csv'}: missing column 'predicted' "
            f"value for {quantity!r}")
    return float(value)


def overlay_line(x, y, slope):
    """Power-law guide line through the data's central point.

    Anchored so an exactly power-law data set is collinear with its line.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (x > 0) & (y > 0)
    if not keep.any():
        raise SchemaError("no positive points to anchor an overlay line")
    x, y = x[keep], y[keep]
    lx = np.log(x)
    anchor = int(np.argmin(np.abs(lx - lx.mean())))
    amplitude = y[anchor] / x[anchor] ** slope
    return x, amplitude * x ** slope


def _scatter_with_overlay(ax, x, y, slope, style, label):
    keep = np.asarray(y) > 0
    ax.plot(np.asarray(x)[keep], np.asarray(y)[keep], linestyle="none",
            markersize=4, fillstyle="none", label=label, **style)
    line_x, line_y = overlay_line(x, y, slope)
    ax.plot(line_x, line_y, color="black", linewidth=1.0, alpha=0.8)


def _render_density_spectrum(spec: FigureSpec) -> None:
    fig, (ax_pdf, ax_psd) = plt.subplots(1, 2, figsize=(11.0, 4.4))
    for run_dir, style in zip(spec.run_dirs, _STYLES):
        label = Path(run_dir).name
        pdf = load_table(run_dir, "pdf.csv")
        lam = predicted_exponent(run_dir, "lambda")
        _scatter_with_overlay(ax_pdf, pdf["bin_center"], pdf["density"],
                              -lam, style, label)
        psd = load_table(run_dir, "psd.csv")
        beta = predicted_exponent(run_dir, "beta")
        freq = psd["frequency"].to_numpy()
        power = psd["power"].to_numpy()
        # thin the spectrum to log-uniform markers for readability
        keep = np.unique(np.geomspace(1, len(freq), 120).astype(int)) - 1
        _scatter_with_overlay(ax_psd, freq[keep], power[keep], -beta, style,
                              label)
    ax_pdf.set_xscale("log")
    ax_pdf.set_yscale("log")
    ax_pdf.set_xlabel(spec.xlabel_left or "y")
    ax_pdf.set_ylabel(spec.ylabel_left or "p(y)")
    ax_pdf.set_title("(a)")
    ax_pdf.legend(fontsize=8)
    ax_psd.set_xscale("log")
    ax_psd.set_yscale("log")
    ax_psd.set_xlabel(spec.xlabel_right or "f")
    ax_psd.set_ylabel(spec.ylabel_right or "S(f)")
    ax_psd.set_title("(b)")
    ax_psd.legend(fontsize=8)
    _save(fig, spec.out_path)


def _render_structure_functions(spec: FigureSpec) -> None:
    fig, axes = plt.subplots(2, 2, figsize=(10.0, 8.0))
    flat = axes.ravel()
    panel_names = "abcd"
    for k, (run_dir, style) in enumerate(zip(spec.run_dirs, _STYLES)):
        ax = flat[k]
        fq = load_table(run_dir, "fq.csv")
        for q_value, chunk in fq.groupby("q"):
            keep = chunk["F"] > 0
            ax.plot(chunk["lag"][keep], chunk["F"][keep], linewidth=0.9,
                    label=f"q={q_value:g}")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel(spec.xlabel_left or "lag")
        ax.set_ylabel(spec.ylabel_left or "F_q")
        ax.set_title(f"({panel_names[k]}) {Path(run_dir).name}")
        ax.legend(fontsize=6, ncol=2)
    ax_h = flat[3]
    for run_dir, style in zip(spec.run_dirs, _STYLES):
        hurst = load_table(run_dir, "hurst.csv")
        ax_h.errorbar(hurst["q"], hurst["H"], yerr=hurst["stderr"],
                      label=Path(run_dir).name, markersize=4,
                      fillstyle="none", **style)
    ax_h.axhline(0.5, color="gray", linewidth=0.8, linestyle="--")
    ax_h.set_xlabel(spec.xlabel_right or "q")
    ax_h.set_ylabel(spec.ylabel_right or "H(q)")
    ax_h.set_title("(d)")
    ax_h.legend(fontsize=8)
    _save(fig, spec.out_path)


def _save(fig, out_path: Path) -> None:
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    if out_path.suffix.lower() == ".svg":
        # drop the creation date so identical inputs give identical bytes
        fig.savefig(out_path, format="svg", metadata={"Date": None})
    else:
        fig.savefig(out_path, format="png", dpi=150)
    plt.close(fig)


def render(spec: FigureSpec) -> Path:
    """Render the requested figure; returns the written path."""
    if not spec.run_dirs:
        raise SchemaError("at least one run directory is required")
    if spec.figure == "fig3":
        _render_structure_functions(spec)
    else:
        _render_density_spectrum(spec)
    return spec.out_path
