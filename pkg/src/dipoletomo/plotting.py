"""Matplotlib renderings of the pipeline outputs, written next to the data."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_trajectories(times, tracks, labels, path, title="Dipole trajectories"):
    """Plot planar tracks; ``tracks`` is a list of (n, 2) arrays."""
    fig, ax = plt.subplots(figsize=(6, 6))
    for track, label in zip(tracks, labels):
        style = ":" if "center" in label else "-"
        ax.plot(track[:, 0], track[:, 1], style, label=label)
    ax.set_aspect("equal")
    ax.set_xlabel("x1")
    ax.set_ylabel("x2")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_scattering(table, path):
    """Component-wise scattering relation against alpha (theta = 0 row)."""
    fig, ax = plt.subplots(figsize=(7, 5))
    al = table.alphas
    for comp, label in ((table.S_x[0, :, 0], "S_x1"), (table.S_x[0, :, 1], "S_x2"),
                        (table.S_xi[0, :, 0], "S_xi1"), (table.S_xi[0, :, 1], "S_xi2")):
        ax.plot(al, comp, label=label)
    ax.set_xlabel("alpha")
    ax.set_title("Scattering relation")
    ax.legend()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_s0(s0, path):
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(s0.alphas, s0.values[0])
    ax.set_xlabel("alpha")
    ax.set_ylabel("S0")
    ax.set_title("Scattering function S0(alpha)")
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_reconstructions(r, exact_over_eps, curves, path, title):
    """Normalized reconstructions Q/eps for a strength ladder.

    ``curves`` is a list of (eps, values) pairs; ``exact_over_eps`` is the
    shared normalized exact profile.
    """
    fig, ax = plt.subplots(figsize=(7, 5))
    ax.plot(r, exact_over_eps, "k-", label="exact")
    for eps, vals in curves:
        ax.plot(r, np.asarray(vals) / eps, "--", label=f"eps={eps:g}")
    ax.set_xlabel("r")
    ax.set_ylabel("Q/eps")
    ax.set_title(title)
    ax.legend(fontsize=8)
    fig.savefig(path, dpi=150)
    plt.close(fig)
