"""Figure rendering for sweep results, written next to the CSV output."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .experiments import SweepResult


def render_sweep(result: SweepResult, path, xlabel: str, title: str = "") -> None:
    xs = [r.sweep_value for r in result.rows]
    ys = [r.psnr_synth_db for r in result.rows]
    yn = [r.psnr_nosynth_db for r in result.rows]
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    ax.plot(xs, ys, "o-", label="network synthesis")
    ax.plot(xs, yn, "s--", label="camera views only")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("PSNR (dB)")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_gain(result: SweepResult, path, xlabel: str, title: str = "") -> None:
    xs = [r.sweep_value for r in result.rows]
    gs = [r.psnr_synth_db - r.psnr_nosynth_db for r in result.rows]
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    ax.plot(xs, gs, "o-")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("PSNR gain (dB)")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_threshold(rows, path, title: str = "") -> None:
    xs = [ur for ur, _ in rows]
    ys = [float("nan") if c is None else c for _, c in rows]
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    ax.step(xs, ys, "o-", where="mid")
    ax.set_xlabel("window right edge (view index)")
    ax.set_ylabel("threshold capacity")
    if title:
        ax.set_title(title)
    finite = [y for y in ys if not math.isnan(y)]
    if finite:
        ax.set_ylim(0, max(finite) + 1)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
