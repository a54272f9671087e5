"""Shared fixtures and independent oracles for the test suite.

The primal oracle solves the constrained least-squares problem directly
with SLSQP on the real/imaginary coefficient parts, independently of the
dual ascent, so the two implementations cross-check each other.
"""

from __future__ import annotations

import numpy as np
import pytest
from scipy.optimize import minimize

from arcfit import (
    ArcSystem,
    MomentVector,
    build_constraint_grid,
    monomial_matrix,
)

TWO_PI = 2.0 * np.pi


@pytest.fixture
def half_circle() -> ArcSystem:
    return ArcSystem(((0.0, np.pi),))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


def random_arc_system(rng: np.random.Generator, max_arcs: int = 2) -> ArcSystem:
    """A random valid arc system with 1 or 2 data arcs."""
    k = int(rng.integers(1, max_arcs + 1))
    cuts = np.sort(rng.uniform(0.0, TWO_PI, size=2 * k))
    arcs = []
    for i in range(k):
        a, b = cuts[2 * i], cuts[2 * i + 1]
        if b - a < 0.2:
            b = min(a + 0.2, a + 1.0)
        arcs.append((a, b))
    try:
        return ArcSystem(tuple(arcs))
    except ValueError:
        return ArcSystem(((0.3, 2.5),))


def quadrature_gram(arcs: ArcSystem, n: int, nodes_per_arc: int) -> np.ndarray:
    """Brute-force trapezoid Gram matrix, independent of the closed form."""
    G = np.zeros((n + 1, n + 1), dtype=complex)
    for a, b in arcs.arcs_i:
        theta = np.linspace(a, b, nodes_per_arc)
        w = np.full(nodes_per_arc, (b - a) / (nodes_per_arc - 1))
        w[0] *= 0.5
        w[-1] *= 0.5
        E = np.exp(1j * np.outer(theta, np.arange(n + 1)))
        G += (E.conj().T * w) @ E / TWO_PI
    return G


def primal_oracle(
    G: np.ndarray,
    mom: MomentVector,
    grid_points: np.ndarray,
    rho: float,
    starts: int = 4,
    seed: int = 0,
) -> np.ndarray:
    """Constrained least squares solved directly in coefficient space.

    Minimizes ||f||^2 - 2 Re(b* c) + c* G c subject to |g(x_k)| <= rho,
    parametrized by the stacked real and imaginary parts of c. The
    problem is convex, so SLSQP from the unconstrained minimizer (plus a
    few random restarts for safety) finds the global solution.
    """
    dim = G.shape[0]
    E = monomial_matrix(grid_points, dim - 1)

    def split(x):
        return x[:dim] + 1j * x[dim:]

    def objective(x):
        c = split(x)
        r = G @ c - mom.b
        val = mom.norm_f_sq - 2.0 * np.real(np.vdot(mom.b, c)) + np.real(np.vdot(c, G @ c))
        grad_c = 2.0 * r
        return val, np.concatenate([grad_c.real, grad_c.imag])

    def constraint(x):
        c = split(x)
        return rho**2 - np.abs(E @ c) ** 2

    def constraint_jac(x):
        c = split(x)
        gE = np.conj(E @ c)[:, None] * E  # conj(g_k) E_kj
        return np.hstack([-2.0 * gE.real, 2.0 * gE.imag])

    gen = np.random.default_rng(seed)
    x0s = [np.concatenate([np.linalg.solve(G, mom.b).real, np.linalg.solve(G, mom.b).imag])]
    for _ in range(starts - 1):
        x0s.append(gen.normal(scale=0.5, size=2 * dim))
    best = None
    for x0 in x0s:
        res = minimize(
            objective,
            x0,
            jac=True,
            method="SLSQP",
            constraints=[{"type": "ineq", "fun": constraint, "jac": constraint_jac}],
            options={"maxiter": 500, "ftol": 1e-14},
        )
        if best is None or (res.success and res.fun < best.fun - 1e-14):
            best = res
    return split(best.x)


def feasible_random_polynomial(
    rng: np.random.Generator, n: int, grid_points: np.ndarray, rho: float
) -> np.ndarray:
    """Random coefficients scaled strictly inside the constraint set."""
    c = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
    sup = float(np.sum(np.abs(c)))  # sup norm bound on the whole circle
    return c * (0.8 * rho / sup)


def make_grid(arcs: ArcSystem, m: int):
    return build_constraint_grid(arcs, m)
