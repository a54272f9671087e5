"""Quadratic data of the inner problem over the data region I.

The Gram matrix of monomials over I has elementary closed-form entries
and is Hermitian Toeplitz positive definite; the moment vector of the
measured data against monomials is assembled by composite trapezoid
quadrature on the (possibly nonuniform) sample grid, one I-arc at a
time. Weights fold into the quadrature; when they are not identically 1
the Gram matrix itself is assembled by the same quadrature rule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

from .arcs import MEMBERSHIP_TOL, TWO_PI, ArcSystem, wrap_angle

# Monomials on a short arc are nearly dependent; fail loudly instead of
# returning noise when the factorization degenerates.
PIVOT_GUARD = 1e-13


class GramConditioningError(np.linalg.LinAlgError):
    """Raised when the Gram factorization is numerically singular."""


@dataclass(frozen=True)
class SampledBoundaryData:
    """Samples (theta_s, f_s, w_s) of the boundary data on I."""

    angles: np.ndarray
    values: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=float)
        values = np.asarray(self.values, dtype=complex)
        if self.weights is None:
            weights = np.ones_like(angles)
        else:
            weights = np.asarray(self.weights, dtype=float)
        if angles.ndim != 1 or values.shape != angles.shape or weights.shape != angles.shape:
            raise ValueError("angles, values and weights must be 1-d arrays of equal length")
        if not np.all(np.isfinite(angles)):
            raise ValueError("sample angles must be finite")
        if not np.all(np.isfinite(values.real)) or not np.all(np.isfinite(values.imag)):
            raise ValueError("sample values must be finite")
        if not np.all(weights > 0):
            raise ValueError("sample weights must be strictly positive")
        for name, arr in (("angles", angles), ("values", values), ("weights", weights)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return self.angles.shape[0]

    @property
    def has_unit_weights(self) -> bool:
        return bool(np.all(self.weights == 1.0))


def _split_by_arc(data: SampledBoundaryData, arcs: ArcSystem):
    """Group samples by I-arc, validating membership and ordering."""
    local = np.full(len(data), np.nan)
    owner = np.full(len(data), -1)
    t = wrap_angle(data.angles)
    for i, (a, b) in enumerate(arcs.arcs_i):
        x = (t - a) % TWO_PI
        x = np.where(x >= TWO_PI - MEMBERSHIP_TOL, 0.0, x)
        mask = (owner < 0) & (x <= (b - a) + MEMBERSHIP_TOL)
        owner[mask] = i
        local[mask] = np.minimum(x[mask], b - a)
    stray = np.nonzero(owner < 0)[0]
    if stray.size:
        raise ValueError(
            f"sample at index {stray[0]} (angle {data.angles[stray[0]]!r}) lies outside I"
        )
    groups = []
    for i in range(len(arcs.arcs_i)):
        idx = np.nonzero(owner == i)[0]
        if idx.size < 2:
            raise ValueError(f"arc {i} of I has fewer than 2 samples")
        idx = idx[np.argsort(local[idx], kind="stable")]
        x = local[idx]
        if np.any(np.diff(x) <= 0):
            raise ValueError(f"sample angles within arc {i} must be strictly increasing")
        groups.append((idx, x))
    return groups


def _trapezoid_weights(x: np.ndarray) -> np.ndarray:
    w = np.empty_like(x)
    w[0] = 0.5 * (x[1] - x[0])
    w[-1] = 0.5 * (x[-1] - x[-2])
    if x.size > 2:
        w[1:-1] = 0.5 * (x[2:] - x[:-2])
    return w


def _quadrature_weights(data: SampledBoundaryData, arcs: ArcSystem) -> np.ndarray:
    """Combined trapezoid-times-data weights, in sample order."""
    w = np.zeros(len(data))
    for idx, x in _split_by_arc(data, arcs):
        w[idx] = _trapezoid_weights(x) * data.weights[idx]
    return w


def gram_closed_form(arcs: ArcSystem, n: int) -> np.ndarray:
    """Gram matrix G[j, k] = <z^k, z^j>_I of monomials up to degree n.

    Off-diagonal entries are elementary integrals of e^{i d theta} over
    the arcs of I with d = k - j; the d = 0 branch is the removable
    singularity handled separately.
    """
    if n < 0:
        raise ValueError("degree n must be >= 0")
    d = np.arange(1, n + 1)
    g = np.zeros(n + 1, dtype=complex)
    g[0] = arcs.measure / TWO_PI
    for a, b in arcs.arcs_i:
        g[1:] += (np.exp(1j * d * b) - np.exp(1j * d * a)) / (TWO_PI * 1j * d)
    # G[j, k] = g[k - j]: first row g, first column conj(g)
    return toeplitz(np.conj(g), g)


def gram_from_samples(data: SampledBoundaryData, arcs: ArcSystem, n: int) -> np.ndarray:
    """Weighted Gram matrix by trapezoid quadrature on the sample grid."""
    if n < 0:
        raise ValueError("degree n must be >= 0")
    w = _quadrature_weights(data, arcs)
    d = np.arange(0, n + 1)
    g = np.exp(1j * np.outer(d, data.angles)) @ w / TWO_PI
    return toeplitz(np.conj(g), g)


@dataclass(frozen=True)
class MomentVector:
    """Moments b[j] = <f, z^j>_I of the data plus its squared L2(I) norm."""

    b: np.ndarray
    norm_f_sq: float

    def __post_init__(self):
        b = np.asarray(self.b, dtype=complex)
        b.setflags(write=False)
        object.__setattr__(self, "b", b)
        if self.norm_f_sq < 0:
            raise ValueError("norm_f_sq must be nonnegative")


def moments_from_samples(
    data: SampledBoundaryData, arcs: ArcSystem, n: int
) -> MomentVector:
    """Moment vector of the sampled data against monomials up to degree n.

    Both b and the squared norm are composite-trapezoid approximations
    on the sample grid, per I-arc, with the data weights folded in.
    """
    if n < 0:
        raise ValueError("degree n must be >= 0")
    w = _quadrature_weights(data, arcs)
    j = np.arange(0, n + 1)
    b = np.exp(-1j * np.outer(j, data.angles)) @ (w * data.values) / TWO_PI
    norm_f_sq = float(np.sum(w * np.abs(data.values) ** 2) / TWO_PI)
    return MomentVector(b=b, norm_f_sq=norm_f_sq)


def exact_polynomial_moments(coeffs, G: np.ndarray) -> MomentVector:
    """Moments of f = trace of a polynomial, exact in the closed-form Gram.

    For f = p|_I we have b = G p and ||f||^2 = p^* G p; useful for
    quadrature-free synthetic instances.
    """
    p = np.zeros(G.shape[0], dtype=complex)
    c = np.asarray(coeffs, dtype=complex)
    if c.size > p.size:
        raise ValueError("polynomial degree exceeds the Gram matrix degree")
    p[: c.size] = c
    b = G @ p
    return MomentVector(b=b, norm_f_sq=float(np.real(np.vdot(p, b))))


def factor_gram(G: np.ndarray) -> np.ndarray:
    """Cholesky factor of the Gram matrix with a conditioning guard.

    Raises GramConditioningError when the factorization fails or the
    relative pivot drops below 1e-13, which signals that the monomial
    basis is numerically dependent on I; lowering the degree n is the
    usual remedy.
    """
    try:
        L = np.linalg.cholesky(G)
    except np.linalg.LinAlgError as exc:
        raise GramConditioningError(
            "Gram matrix factorization failed; monomials are numerically "
            "dependent on I -- try a lower degree n"
        ) from exc
    pivots = np.diag(L).real ** 2
    if pivots.min() < PIVOT_GUARD * pivots.max():
        raise GramConditioningError(
            f"Gram matrix nearly singular (relative pivot "
            f"{pivots.min() / pivots.max():.2e} < {PIVOT_GUARD}); try a lower degree n"
        )
    return L
