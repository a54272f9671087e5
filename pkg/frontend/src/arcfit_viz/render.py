"""Render an arcfit plot-data bundle to an image file.

Consumes only the versioned `arcfit/plot-v1` JSON emitted by the solver
CLI; no mathematics is recomputed here. The figure shows the solution
modulus as a continuous line over the whole circle, the measured |f|
overlay as dots on the data arcs, the constraint arcs as a shaded band,
and the bound rho as a horizontal marker over the constraint arcs.
"""

from __future__ import annotations

import json

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

PLOT_SCHEMA = "arcfit/plot-v1"
TWO_PI = 2.0 * np.pi

REQUIRED_KEYS = ("schema", "theta", "modulus", "overlay_theta", "overlay_modulus", "arcs_i", "rho")


class BundleError(ValueError):
    """The input file is not a valid plot-v1 bundle."""


def load_bundle(path) -> dict:
    """Read and validate a plot-data JSON bundle."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise BundleError(f"cannot read bundle {path}: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("schema") != PLOT_SCHEMA:
        raise BundleError(
            f"schema mismatch: expected {PLOT_SCHEMA}, got {doc.get('schema')!r}"
            if isinstance(doc, dict)
            else "bundle is not a JSON object"
        )
    for key in REQUIRED_KEYS:
        if key not in doc:
            raise BundleError(f"bundle missing key {key!r}")
    if len(doc["theta"]) != len(doc["modulus"]):
        raise BundleError("theta and modulus arrays differ in length")
    if len(doc["overlay_theta"]) != len(doc["overlay_modulus"]):
        raise BundleError("overlay arrays differ in length")
    if len(doc["theta"]) == 0:
        raise BundleError("empty theta grid")
    if any(m < 0 for m in doc["modulus"]) or any(m < 0 for m in doc["overlay_modulus"]):
        raise BundleError("moduli must be nonnegative")
    return doc


def constraint_intervals(arcs_i) -> list[tuple[float, float]]:
    """Complement of the data arcs on [0, 2*pi), split at the seam."""
    arcs = sorted((float(a) % TWO_PI, float(a) % TWO_PI + (float(b) - float(a))) for a, b in arcs_i)
    gaps = []
    for i, (_, b) in enumerate(arcs):
        a_next = arcs[(i + 1) % len(arcs)][0]
        length = (a_next - b) % TWO_PI
        if length <= 1e-12:
            continue
        start = b % TWO_PI
        if start + length <= TWO_PI:
            gaps.append((start, start + length))
        else:  # crosses the seam: split for drawing
            gaps.append((start, TWO_PI))
            gaps.append((0.0, start + length - TWO_PI))
    return sorted(gaps)


def render(bundle: dict, out_path) -> None:
    """Draw the overlay figure and write it to out_path (PNG or SVG)."""
    theta = np.asarray(bundle["theta"], dtype=float)
    modulus = np.asarray(bundle["modulus"], dtype=float)
    order = np.argsort(theta)
    gaps = constraint_intervals(bundle["arcs_i"])
    rho = bundle["rho"]
    rho_values = [float(r) for r in rho] if isinstance(rho, list) else [float(rho)] * len(gaps)

    fig, ax = plt.subplots(figsize=(9, 4.5))
    ax.plot(theta[order], modulus[order], color="tab:blue", lw=1.2, label="|g| (solution)")
    if len(bundle["overlay_theta"]):
        ax.plot(
            np.asarray(bundle["overlay_theta"], dtype=float) % TWO_PI,
            bundle["overlay_modulus"],
            ".",
            color="tab:red",
            ms=2.5,
            label="|f| (data)",
        )
    for k, (a, b) in enumerate(gaps):
        ax.axvspan(a, b, color="0.9", zorder=0, label="constraint arcs" if k == 0 else None)
        level = rho_values[min(k, len(rho_values) - 1)]
        ax.hlines(level, a, b, color="tab:green", lw=1.5, linestyle="--",
                  label="bound rho" if k == 0 else None)
    ax.set_xlim(0.0, TWO_PI)
    ax.set_ylim(bottom=0.0)
    ax.set_xlabel(r"$\theta$ (rad)")
    ax.set_ylabel("modulus")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)


def render_file(bundle_path, out_path) -> None:
    render(load_bundle(bundle_path), out_path)
