"""Scikit-learn style front end for the constrained approximation solver."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .arcs import ArcSystem, build_constraint_grid
from .certify import certify_result
from .dual import SolveOptions, maximize_dual, monomial_matrix
from .moments import (
    SampledBoundaryData,
    gram_closed_form,
    gram_from_samples,
    moments_from_samples,
)


def _column_to_angles(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 2 and X.shape[1] == 1:
        X = X[:, 0]
    if X.ndim != 1:
        raise ValueError(f"expected angles of shape (n,) or (n, 1), got {X.shape}")
    return X


class BoundedPolynomialApproximator(BaseEstimator):
    """Best L2 fit on the data arcs by a modulus-constrained polynomial.

    Fits a degree-`degree` polynomial g to complex samples y at angles X
    inside the arcs of I, minimizing the weighted L2(I) misfit subject
    to |g| <= bound on a grid over the complementary arcs J.

    Parameters
    ----------
    degree : polynomial degree n.
    grid_size : constraint grid resolution m; None couples it as 2n.
    bound : constraint level rho on J (scalar).
    arcs : (a, b) angle pairs, in radians, defining I.
    tol : KKT tolerance of the dual ascent (relative).
    max_iter : dual ascent iteration cap.

    Attributes
    ----------
    coefficients_ : complex monomial coefficients of the fit.
    multipliers_ : nonnegative multipliers on the constraint grid.
    result_ : full SolveResult.
    certificate_ : optimality/feasibility certificate.
    """

    def __init__(
        self,
        degree: int = 8,
        grid_size: int | None = None,
        bound: float = 1.0,
        arcs=((0.0, np.pi),),
        tol: float = 1e-8,
        max_iter: int = 500,
    ):
        self.degree = degree
        self.grid_size = grid_size
        self.bound = bound
        self.arcs = arcs
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y, sample_weight=None):
        angles = _column_to_angles(X)
        y = np.asarray(y, dtype=complex)
        if y.shape != angles.shape:
            raise ValueError("y must have one complex value per angle")
        arc_system = ArcSystem(tuple(tuple(a) for a in self.arcs))
        data = SampledBoundaryData(angles=angles, values=y, weights=sample_weight)

        n = int(self.degree)
        m = int(self.grid_size) if self.grid_size is not None else max(1, 2 * n)
        if data.has_unit_weights:
            G = gram_closed_form(arc_system, n)
        else:
            G = gram_from_samples(data, arc_system, n)
        mom = moments_from_samples(data, arc_system, n)
        grid = build_constraint_grid(arc_system, m)
        result = maximize_dual(
            G, mom, grid, self.bound,
            SolveOptions(tol=self.tol, max_iter=self.max_iter),
        )
        self.arc_system_ = arc_system
        self.grid_ = grid
        self.result_ = result
        self.coefficients_ = result.coefficients
        self.multipliers_ = result.multipliers
        self.misfit_ = result.misfit
        self.certificate_ = certify_result(result, G, mom, grid, self.bound)
        return self

    def predict(self, X) -> np.ndarray:
        """Evaluate the fitted polynomial at angles anywhere on the circle."""
        if not hasattr(self, "coefficients_"):
            raise NotFittedError("call fit before predict")
        angles = _column_to_angles(X)
        return monomial_matrix(angles, self.coefficients_.size - 1) @ self.coefficients_
