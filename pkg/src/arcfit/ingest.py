"""Measurement-file ingestion and synthetic test-case generation.

Measurement files are plain CSV with a `# arcfit-measurements v1`
header line and columns freq_hz, re, im and an optional weight column;
round-tripping through save/load is exact at 17 significant digits.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .arcs import ArcSystem, FrequencyMap, map_frequencies
from .moments import SampledBoundaryData

HEADER = "# arcfit-measurements v1"


@dataclass(frozen=True)
class SyntheticCase:
    """Declarative synthetic boundary-data definition."""

    kind: str  # polynomial_trace | constant | blaschke_like | filterlike | custom
    params: dict = field(default_factory=dict)

    KINDS = ("polynomial_trace", "constant", "blaschke_like", "filterlike", "custom")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown synthetic case kind {self.kind!r}")


def load_measurements(
    path, fmap: FrequencyMap, default_weight: float = 1.0
) -> SampledBoundaryData:
    """Read a measurement CSV and map frequencies onto circle angles."""
    freqs: list[float] = []
    values: list[complex] = []
    weights: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    if not lines or lines[0].strip() != HEADER:
        raise ValueError(f"{path}: missing header line {HEADER!r}")
    for lineno, line in enumerate(lines[1:], start=2):
        line = line.strip()
        if not line or line.startswith("#") or line.startswith("freq_hz"):
            continue
        parts = line.split(",")
        if len(parts) not in (3, 4):
            raise ValueError(f"{path}:{lineno}: expected 3 or 4 columns, got {len(parts)}")
        try:
            row = [float(p) for p in parts]
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: malformed row: {exc}") from exc
        if not all(np.isfinite(row)):
            raise ValueError(f"{path}:{lineno}: non-finite value")
        freqs.append(row[0])
        values.append(complex(row[1], row[2]))
        weights.append(row[3] if len(row) == 4 else default_weight)
    if len(freqs) < 2:
        raise ValueError(f"{path}: need at least 2 measurement rows")
    f = np.asarray(freqs)
    if np.any(np.diff(f) <= 0):
        k = int(np.nonzero(np.diff(f) <= 0)[0][0])
        raise ValueError(f"{path}: frequencies not strictly increasing at row {k + 2}")
    angles = map_frequencies(f, fmap)
    return SampledBoundaryData(
        angles=angles, values=np.asarray(values), weights=np.asarray(weights)
    )


def save_measurements(path, freqs, data: SampledBoundaryData) -> None:
    """Write the canonical CSV; exact decimal round-trip at 17 digits."""
    freqs = np.asarray(freqs, dtype=float)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(HEADER + "\n")
        fh.write("freq_hz,re,im,weight\n")
        for f, v, w in zip(freqs, data.values, data.weights):
            fh.write(f"{f:.17g},{v.real:.17g},{v.imag:.17g},{w:.17g}\n")


def _blaschke(z: complex, zeros) -> complex:
    out = 1.0 + 0.0j
    for a in zeros:
        out *= (z - a) / (1.0 - np.conj(a) * z)
    return out


def _case_function(case: SyntheticCase):
    p = case.params
    if case.kind == "constant":
        value = complex(p.get("value", 1.0))
        return lambda theta: np.full_like(theta, value, dtype=complex)
    if case.kind == "polynomial_trace":
        coeffs = np.asarray(p["coefficients"], dtype=complex)
        return lambda theta: np.polyval(coeffs[::-1], np.exp(1j * theta))
    if case.kind == "blaschke_like":
        zeros = [complex(z) for z in p.get("zeros", [0.5])]
        scale = float(p.get("scale", 0.95))
        if any(abs(z) >= 1 for z in zeros):
            raise ValueError("blaschke_like zeros must lie inside the unit disk")
        return lambda theta: scale * np.array(
            [_blaschke(cmath.exp(1j * t), zeros) for t in np.atleast_1d(theta)]
        )
    if case.kind == "filterlike":
        return _filterlike_function(p)
    if case.kind == "custom":
        expression = p["expression"]

        def f(theta):
            z = np.exp(1j * theta)
            namespace = {"z": z, "theta": theta, "np": np, "exp": np.exp, "abs": np.abs}
            return np.asarray(eval(expression, {"__builtins__": {}}, namespace), dtype=complex)

        return f
    raise AssertionError(case.kind)


def _filterlike_function(p: dict):
    """Synthetic reflection coefficient of a bandpass-filter-like device.

    Modulus near `stop_level` outside the passband, dipping inside it
    (|S11|^2 = 1 - |S21|^2 with a smooth transmission bump), with a
    linear-phase delay term. Stands in for proprietary measured data.
    """
    center = float(p.get("center", np.pi / 2))
    width = float(p.get("width", np.pi / 4))
    order = int(p.get("order", 6))
    delay = float(p.get("delay", 12.0))
    stop_level = float(p.get("stop_level", 0.95))

    def f(theta):
        theta = np.asarray(theta, dtype=float)
        detune = (theta - center) / (width / 2.0)
        transmission = 1.0 / (1.0 + detune ** (2 * order))
        modulus = stop_level * np.sqrt(np.maximum(1.0 - transmission, 0.0) + 1e-4)
        return modulus * np.exp(-1j * delay * theta)

    return f


def generate_synthetic(
    case: SyntheticCase, arcs: ArcSystem, density: float
) -> SampledBoundaryData:
    """Deterministic samples of a synthetic case on uniform per-arc grids.

    `density` is in samples per radian; every arc gets at least two
    samples, endpoints included.
    """
    if density <= 0:
        raise ValueError("density must be positive")
    func = _case_function(case)
    angles = []
    for a, b in arcs.arcs_i:
        count = max(2, int(np.ceil(density * (b - a))) + 1)
        angles.append(np.linspace(a, b, count))
    theta = np.concatenate(angles)
    return SampledBoundaryData(angles=theta, values=func(theta))
