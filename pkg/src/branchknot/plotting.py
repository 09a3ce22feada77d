"""Figures: the base-plane picture and a schematic braid diagram.

Rendering is headless (Agg) and writes SVG 1.1 files.  The disk view shows
the crossing locus per sheet pairing, the projected double points, any
triple coincidences, and the loop with its detours; the braid view shows
the strand exchanges in traversal order with the under-strand broken at
each crossing.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .locus import sample_locus
from .loop import ArcSegment, BaseLoop
from .trace import TracedBraid

TWO_PI = 2 * math.pi


def plot_disk(model, params, dps=None, loop: BaseLoop | None = None,
              solver=None, resolution: int = 160):
    """Locus, double points and loop in the base plane; returns the figure."""
    n = model.branch_order
    fig, ax = plt.subplots(figsize=(6.4, 6.4))
    domain = model.r0**n
    boundary = np.exp(1j * np.linspace(0, TWO_PI, 256)) * domain
    ax.plot(boundary.real, boundary.imag, color="0.6", lw=0.8, ls="--",
            label="image boundary")

    triples = []
    for k in range(1, n // 2 + 1):
        sample = sample_locus(model, params, k, resolution=resolution, cfg=solver)
        color = f"C{k - 1}"
        labelled = False
        for line in sample.polylines:
            pts = np.asarray(line)
            ax.plot(pts.real, pts.imag, color=color, lw=1.0,
                    label=None if labelled else f"crossing locus k={k}")
            labelled = True
        for z in sample.singular_candidates:
            ax.plot(z.real, z.imag, marker="s", mfc="none", mec=color, ms=7, ls="")

    if dps:
        xs = [complex(dp.image.z1) for dp in dps]
        ax.plot([z.real for z in xs], [z.imag for z in xs], "x", color="crimson",
                ms=9, mew=2, ls="", label="double points")

    if loop is not None:
        labelled = {"base": False, "detour": False, "tube": False}
        for seg in loop.segments:
            ts = np.linspace(0.0, 1.0, 96)
            pts = np.asarray([seg.point(t) for t in ts])
            if isinstance(seg, ArcSegment) and seg.kind == "base":
                key, color, lw = "base", "black", 1.6
            elif isinstance(seg, ArcSegment):
                key, color, lw = "detour", "darkorange", 1.4
            else:
                key, color, lw = "tube", "seagreen", 1.2
            ax.plot(pts.real, pts.imag, color=color, lw=lw,
                    label=None if labelled[key] else f"loop {key}")
            labelled[key] = True
        start = loop.start_point
        direction = loop.segments[0].unit_tangent(0.0)
        ax.annotate(
            "", xy=(start.real + 0.08 * loop.rho * direction.real,
                    start.imag + 0.08 * loop.rho * direction.imag),
            xytext=(start.real, start.imag),
            arrowprops=dict(arrowstyle="-|>", color="black"),
        )

    ax.plot([0], [0], marker="+", color="0.3", ms=10, ls="")
    ax.set_aspect("equal")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.legend(loc="upper right", fontsize=8, framealpha=0.9)
    ax.set_title("base plane")
    fig.tight_layout()
    return fig


def plot_braid(traced: TracedBraid):
    """Strand diagram of the traced word, one slot per crossing."""
    n = traced.strand_count
    events = traced.events
    slots = max(1, len(events))
    fig, ax = plt.subplots(figsize=(max(4.0, 1.1 * slots + 1.5), 0.9 * n + 1.2))

    # positions[j] = current position (1-based) of strand j.
    positions = [0] * n
    for pos, strand in enumerate(traced.start_order, start=1):
        positions[strand] = pos
    paths = {j: [(0.0, positions[j])] for j in range(n)}
    for i, ev in enumerate(events):
        x = i + 1.0
        a, b = ev.strand_low, ev.strand_high
        for j in range(n):
            paths[j].append((x - 0.35, positions[j]))
        positions[a], positions[b] = positions[b], positions[a]
        for j in range(n):
            paths[j].append((x + 0.35, positions[j]))
    x_end = slots + 1.0
    for j in range(n):
        paths[j].append((x_end, positions[j]))

    cmap = plt.get_cmap("tab10")
    for j in range(n):
        pts = paths[j]
        ax.plot([p[0] for p in pts], [p[1] for p in pts],
                color=cmap(j % 10), lw=2.0, solid_capstyle="round", zorder=2)
    # Break the under strand by laying a white pad below the over strand.
    positions = [0] * n
    for pos, strand in enumerate(traced.start_order, start=1):
        positions[strand] = pos
    for i, ev in enumerate(events):
        x = i + 1.0
        a, b = ev.strand_low, ev.strand_high
        ya, yb = positions[a], positions[b]
        over = a if ev.sign > 0 else b
        y_from = ya if over == a else yb
        y_to = yb if over == a else ya
        ax.plot([x - 0.35, x + 0.35], [y_from, y_to],
                color="white", lw=7.0, zorder=3)
        ax.plot([x - 0.35, x + 0.35], [y_from, y_to],
                color=cmap(over % 10), lw=2.0, zorder=4)
        label = f"$\\sigma_{{{ev.k}}}$" if ev.sign > 0 else f"$\\sigma_{{{ev.k}}}^{{-1}}$"
        ax.annotate(label, (x, n + 0.45), ha="center", fontsize=9,
                    annotation_clip=False)
        positions[a], positions[b] = positions[b], positions[a]

    ax.set_xlim(-0.3, x_end + 0.3)
    ax.set_ylim(0.3, n + 0.9)
    ax.invert_yaxis()
    ax.set_yticks(range(1, n + 1))
    ax.set_ylabel("position")
    ax.set_xticks([])
    ax.set_title(f"{n}-strand braid, {len(events)} crossings")
    fig.tight_layout()
    return fig


def save_svg(fig, path) -> None:
    fig.savefig(path, format="svg")
    plt.close(fig)
