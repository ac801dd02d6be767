"""Batch figure rendering from diagnostics and snapshot CSVs.

Three figure kinds:

  norms_grid:    2x2 panels of rho/theta L2 norms and their x-derivative
                 norms against time
  loglog_fit:    log-log plot of the phase L2 norm with a least-squares line
                 over the trailing quarter of samples, slope annotated
  snapshot_strip: per-time panels overlaying Re(u) with the carrier-relative
                 phase; also measures the phase-support width per panel

Rendering is deterministic for fixed inputs: fixed style, fixed PNG metadata.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .schema import SchemaMismatch, read_diagnostics, read_metadata, read_snapshot

_SAVE_OPTS = {"dpi": 130, "metadata": {"Software": "kgfigures"}}
_FIT_WINDOW = 0.25
_PHASE_SUPPORT_LEVEL = 0.01


@dataclass(frozen=True)
class FigureSpec:
    kind: str  # norms_grid | loglog_fit | snapshot_strip
    inputs: tuple[str, ...]
    output: str
    times: tuple[float, ...] = field(default=())
    meta: str | None = None

    def __post_init__(self):
        if self.kind not in ("norms_grid", "loglog_fit", "snapshot_strip"):
            raise ValueError(f"unknown figure kind {self.kind!r}")
        if not self.inputs:
            raise ValueError("figure needs at least one input file")


def trailing_loglog_slope(t, values, window_fraction=_FIT_WINDOW):
    """OLS slope/intercept on (log t, log v) over the trailing samples."""
    n_win = max(1, int(round(window_fraction * len(t))))
    t = np.asarray(t)[-n_win:]
    values = np.asarray(values)[-n_win:]
    keep = (t > 0) & (values > 0)
    if keep.sum() < 2:
        raise SchemaMismatch("not enough positive samples for a log-log fit")
    slope, intercept = np.polyfit(np.log(t[keep]), np.log(values[keep]), 1)
    return float(slope), float(intercept)


def _render_norms_grid(spec: FigureSpec) -> dict:
    cols = read_diagnostics(spec.inputs[0])
    t = cols["t"]
    panels = [("rho_l2", "L2 norm of rho"),
              ("theta_l2", "L2 norm of theta"),
              ("rho_x_l2", "L2 norm of rho_x"),
              ("theta_x_l2", "L2 norm of theta_x")]
    fig, axes = plt.subplots(2, 2, figsize=(9.0, 6.0), sharex=True)
    for ax, (name, label) in zip(axes.flat, panels):
        ax.plot(t, cols[name], lw=1.2)
        ax.set_ylabel(label)
        ax.grid(alpha=0.3)
    for ax in axes[1]:
        ax.set_xlabel("t")
    fig.tight_layout()
    fig.savefig(spec.output, **_SAVE_OPTS)
    plt.close(fig)
    return {"output": spec.output}


def _render_loglog_fit(spec: FigureSpec) -> dict:
    cols = read_diagnostics(spec.inputs[0])
    t, v = cols["t"], cols["theta_l2"]
    keep = (t > 0) & (v > 0)
    slope, intercept = trailing_loglog_slope(t, v)
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.loglog(t[keep], v[keep], lw=1.2, label="theta L2 norm")
    n_win = max(1, int(round(_FIT_WINDOW * len(t))))
    t_fit = t[-n_win:]
    t_fit = t_fit[t_fit > 0]
    ax.loglog(t_fit, np.exp(intercept) * t_fit**slope, "r--", lw=1.4,
              label=f"fit, slope = {slope:.3f}")
    ax.set_xlabel("t")
    ax.set_ylabel("L2 norm of theta")
    ax.grid(alpha=0.3, which="both")
    ax.legend()
    fig.tight_layout()
    fig.savefig(spec.output, **_SAVE_OPTS)
    plt.close(fig)
    return {"output": spec.output, "slope": slope}


def _time_from_name(path: str) -> float | None:
    match = re.fullmatch(r"snapshot_t(.+)\.csv", Path(path).name)
    if match is None:
        return None
    try:
        return float(match.group(1))
    except ValueError:
        return None


def phase_support_width(x, theta, level=_PHASE_SUPPORT_LEVEL) -> float:
    """Extent of {x : |theta| > level} (0 when the phase never exceeds it)."""
    idx = np.where(np.abs(theta) > level)[0]
    if idx.size == 0:
        return 0.0
    return float(x[idx[-1]] - x[idx[0]])


def _render_snapshot_strip(spec: FigureSpec) -> dict:
    if spec.meta is None:
        raise SchemaMismatch("snapshot_strip needs --meta for the wave parameters")
    meta = read_metadata(spec.meta)
    wave = meta["wave"]
    a, k, omega = wave["a"], wave["k"], wave["omega"]
    times = list(spec.times)
    if not times:
        times = [_time_from_name(p) for p in spec.inputs]
        if any(t is None for t in times):
            raise SchemaMismatch(
                "snapshot times not recognizable from filenames; pass --times"
            )
    if len(times) != len(spec.inputs):
        raise SchemaMismatch("need one time per snapshot input")

    panels = len(spec.inputs)
    fig, axes = plt.subplots(panels, 1, figsize=(9.0, 2.4 * panels),
                             sharex=True, squeeze=False)
    widths = []
    for ax, path, t in zip(axes[:, 0], spec.inputs, times):
        cols = read_snapshot(path)
        x = cols["x"]
        u = cols["re_u"] + 1j * cols["im_u"]
        theta = np.unwrap(np.angle(u * np.exp(-1j * (k * x + omega * t))))
        widths.append(phase_support_width(x, theta))
        ax.plot(x, u.real, lw=0.9, label="Re u")
        ax2 = ax.twinx()
        ax2.plot(x, theta, color="tab:orange", lw=1.4, label="theta")
        ax.set_ylabel(f"t = {t:g}")
        ax.set_ylim(-1.6 * a, 1.6 * a)
        ax.grid(alpha=0.3)
        if ax is axes[0, 0]:
            lines = ax.get_lines() + ax2.get_lines()
            ax.legend(lines, [ln.get_label() for ln in lines], loc="upper right")
    axes[-1, 0].set_xlabel("x")
    fig.tight_layout()
    fig.savefig(spec.output, **_SAVE_OPTS)
    plt.close(fig)
    return {"output": spec.output,
            "times": times,
            "phase_support_widths": widths}


def render(spec: FigureSpec) -> dict:
    """Render one figure; returns the output path plus kind-specific values
    (fit slope, phase support widths)."""
    if spec.kind == "norms_grid":
        return _render_norms_grid(spec)
    if spec.kind == "loglog_fit":
        return _render_loglog_fit(spec)
    return _render_snapshot_strip(spec)
