"""Machine-checkable optimality certificate for a candidate solution.

Three checks: stationarity of the Lagrangian in moment coordinates,
a certified bound for |g| on all of J (not just at grid points) via a
Bernstein derivative estimate, and the multiplier-sum sanity bound.
The verdict is `certified` only when all three pass; a solution that is
feasible on the grid but whose inter-grid bound exceeds rho downgrades
to `grid_feasible_only`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .arcs import ConstraintGrid, ArcSystem
from .dual import SolveResult, monomial_matrix, as_rho_sq
from .moments import MomentVector

MULTIPLIER_SLACK = 1e-9


@dataclass(frozen=True)
class Certificate:
    stationarity_residual: float
    feasibility_margin: float
    multiplier_sum: float
    multiplier_bound_ok: bool
    extremal_points: tuple[tuple[float, float, float], ...]
    verdict: str  # certified | grid_feasible_only | failed

    def to_dict(self) -> dict:
        return {
            "stationarity_residual": self.stationarity_residual,
            "feasibility_margin": self.feasibility_margin,
            "multiplier_sum": self.multiplier_sum,
            "multiplier_bound_ok": self.multiplier_bound_ok,
            "extremal_points": [list(p) for p in self.extremal_points],
            "verdict": self.verdict,
        }


def check_stationarity(c, lam, G, mom: MomentVector, grid: ConstraintGrid) -> float:
    """Residual of the critical point equation in moment coordinates.

    Returns max_j |(G c - b + sum_k lambda_k g(x_k) v_k)_j| scaled by
    max(1, ||f||_{L2(I)}).
    """
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0):
        raise ValueError("multipliers must be nonnegative")
    c = np.asarray(c, dtype=complex)
    G = np.asarray(G, dtype=complex)
    E = monomial_matrix(grid.points, G.shape[0] - 1)
    residual = G @ c - mom.b + E.conj().T @ (lam * (E @ c))
    return float(np.max(np.abs(residual)) / max(1.0, np.sqrt(mom.norm_f_sq)))


def certify_sup_norm(c, grid: ConstraintGrid, rho) -> float:
    """Certified margin of |g| over all of J against the bound rho.

    Uses sup_J |g| <= max_k |g(x_k)| + n B h / 2 per component, where
    h is the component grid spacing and B = sum |c_j| bounds the sup
    norm of g on the whole circle, so that by Bernstein's inequality
    n B bounds the derivative. A negative return value certifies
    continuum feasibility on J.
    """
    c = np.asarray(c, dtype=complex)
    n = c.size - 1
    coeff_bound = float(np.sum(np.abs(c)))
    rho_vals = np.sqrt(as_rho_sq(rho, len(grid)))
    E = monomial_matrix(grid.points, n)
    moduli = np.abs(E @ c)
    margin = -np.inf
    offset = 0
    for (a, bnd), size in zip(grid.components, grid.sizes):
        sl = slice(offset, offset + size)
        h = (bnd - a) / (size - 1) if size > 1 else (bnd - a)
        certified = float(np.max(moduli[sl])) + n * coeff_bound * h / 2.0
        margin = max(margin, certified - float(np.min(rho_vals[sl])))
        offset += size
    return margin


def check_multiplier_bound(lam, rho, norm_f_sq: float) -> bool:
    """Discrete analog of the bound sum lambda_k rho_k^2 <= 2 ||f||^2."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0):
        raise ValueError("multipliers must be nonnegative")
    total = float(np.dot(lam, as_rho_sq(rho, lam.size)))
    return total <= 2.0 * norm_f_sq * (1.0 + MULTIPLIER_SLACK)


def extract_extremal_points(c, lam, grid: ConstraintGrid, rho, tol: float | None = None):
    """Grid points carrying active multipliers, annotated with |g|.

    The count can exceed the 2n+2 cardinality bound of the continuum
    characterization because the discrete dual may spread multipliers
    over clustered grid points; callers report it as a diagnostic.
    """
    lam = np.asarray(lam, dtype=float)
    c = np.asarray(c, dtype=complex)
    if tol is None:
        tol = 1e-10 * max(1.0, float(np.sum(lam)))
    E = monomial_matrix(grid.points, c.size - 1)
    moduli = np.abs(E @ c)
    return tuple(
        (float(grid.points[k]), float(moduli[k]), float(lam[k]))
        for k in np.nonzero(lam > tol)[0]
    )


def certify(
    c,
    lam,
    G,
    mom: MomentVector,
    grid: ConstraintGrid,
    rho,
    tol: float = 1e-7,
) -> Certificate:
    """Assemble the full certificate for a candidate (c, lambda) pair."""
    stationarity = check_stationarity(c, lam, G, mom, grid)
    margin = certify_sup_norm(c, grid, rho)
    lam = np.asarray(lam, dtype=float)
    multiplier_sum = float(np.dot(lam, as_rho_sq(rho, lam.size)))
    bound_ok = check_multiplier_bound(lam, rho, mom.norm_f_sq)

    scale = max(1.0, mom.norm_f_sq)
    E = monomial_matrix(grid.points, np.asarray(c).size - 1)
    slack = as_rho_sq(rho, len(grid)) - np.abs(E @ np.asarray(c, dtype=complex)) ** 2
    grid_feasible = bool(np.min(slack) >= -tol * scale)

    if stationarity <= tol and bound_ok and margin <= 0:
        verdict = "certified"
    elif stationarity <= tol and bound_ok and grid_feasible:
        verdict = "grid_feasible_only"
    else:
        verdict = "failed"
    return Certificate(
        stationarity_residual=stationarity,
        feasibility_margin=margin,
        multiplier_sum=multiplier_sum,
        multiplier_bound_ok=bound_ok,
        extremal_points=extract_extremal_points(c, lam, grid, rho),
        verdict=verdict,
    )


def certify_result(
    result: SolveResult, G, mom: MomentVector, grid: ConstraintGrid, rho, tol: float = 1e-7
) -> Certificate:
    return certify(result.coefficients, result.multipliers, G, mom, grid, rho, tol=tol)


def multiplier_density(lam, grid: ConstraintGrid) -> np.ndarray:
    """Discrete multipliers normalized by local grid spacing.

    Qualitative stand-in for the continuum multiplier density on J; no
    accuracy claim is attached.
    """
    lam = np.asarray(lam, dtype=float)
    spacing = np.empty(len(grid))
    offset = 0
    for (a, bnd), size in zip(grid.components, grid.sizes):
        h = (bnd - a) / (size - 1) if size > 1 else (bnd - a)
        spacing[offset : offset + size] = h
        offset += size
    return lam / spacing
