"""Lagrangian dual solver for the discretized constrained approximation.

The primal problem minimizes the squared L2(I) misfit over polynomials
of degree n subject to |g(x_k)| <= rho_k at the constraint grid points.
Dualizing the squared constraints gives a concave function of the
multipliers lambda >= 0 whose inner minimization is the linear system
A(lambda) c = b with A(lambda) = G + sum_k lambda_k v_k v_k^*, where
v_k is the conjugated monomial evaluation vector at grid point k. The
dual is maximized by projected Newton ascent on the free variables with
an Armijo line search and a projected-gradient fallback.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .arcs import ConstraintGrid
from .moments import MomentVector

ARMIJO_SIGMA = 1e-4
MAX_BACKTRACKS = 60
# the dual Hessian has rank at most n + 1, usually far below the number
# of free multipliers, so raw Newton systems are singular; a Levenberg
# damping proportional to the mean curvature keeps the step useful, and
# the damping parameter is adapted across iterations
NEWTON_ATTEMPTS = 8
DAMPING_INCREASE = 10.0
DAMPING_DECREASE = 3.0
DAMPING_FLOOR = 1e-14


@dataclass
class SolveOptions:
    """Knobs of the dual ascent."""

    tol: float = 1e-8
    max_iter: int = 500
    lambda0: np.ndarray | None = None


@dataclass
class DualState:
    """One dual iterate: multipliers, inner minimizer and derivatives."""

    lam: np.ndarray
    coefficients: np.ndarray
    dual_value: float
    gradient: np.ndarray

    @property
    def active_set(self) -> np.ndarray:
        return np.nonzero(self.lam > 0)[0]


@dataclass
class SolveResult:
    """Outcome of one dual solve."""

    coefficients: np.ndarray
    multipliers: np.ndarray
    misfit: float
    dual_value: float
    duality_gap: float
    iterations: int
    status: str  # converged | max_iter | infeasible_input
    norm_f_sq: float
    grid_moduli: np.ndarray
    dual_values: list[float] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.status == "converged"


def monomial_matrix(points, n: int) -> np.ndarray:
    """E[k, j] = x_k^j so that (E @ c)[k] = g(x_k)."""
    return np.exp(1j * np.outer(np.asarray(points, dtype=float), np.arange(n + 1)))


def as_rho_sq(rho, count: int) -> np.ndarray:
    """Broadcast the bound (scalar or per-point) and square it."""
    r = np.broadcast_to(np.asarray(rho, dtype=float), (count,)).copy()
    if not np.all(r > 0):
        raise ValueError("constraint bound rho must be strictly positive")
    return r**2


def _factor_hpd(A: np.ndarray):
    """Cholesky with escalating diagonal jitter.

    A(lambda) is Hermitian positive definite in exact arithmetic, but
    the monomial Gram matrix at large degree can be singular to working
    precision; a tiny jitter keeps the ascent going until active
    constraints regularize the system.
    """
    scale = max(np.mean(np.diag(A).real), np.finfo(float).tiny)
    jitter = 0.0
    for _ in range(8):
        try:
            return cho_factor(A + jitter * np.eye(A.shape[0]), lower=True), jitter
        except np.linalg.LinAlgError:
            jitter = scale * 1e-14 if jitter == 0.0 else jitter * 100.0
    raise np.linalg.LinAlgError(
        "inner system factorization failed even with jitter; "
        f"matrix size {A.shape[0]}, diagonal scale {scale:.3e}"
    )


def _evaluate(lam, G, mom: MomentVector, E, rho_sq):
    """Inner minimization at fixed multipliers.

    Returns the dual state, the Cholesky factorization of A(lambda) for
    reuse in the Hessian, and the jitter the factorization needed.
    """
    hot = lam > 0
    if hot.any():
        Eh = E[hot]
        A = G + (Eh.conj().T * lam[hot]) @ Eh
    else:
        A = G
    fac, jitter = _factor_hpd(A)
    c = cho_solve(fac, mom.b)
    g_vals = E @ c
    dual = (
        mom.norm_f_sq
        - float(np.real(np.vdot(mom.b, c)))
        - float(np.dot(lam, rho_sq))
    )
    gradient = np.abs(g_vals) ** 2 - rho_sq
    state = DualState(lam=lam, coefficients=c, dual_value=dual, gradient=gradient)
    return state, fac, jitter


def inner_minimize(lam, G, mom: MomentVector, grid: ConstraintGrid, rho):
    """Closed-form inner minimizer at fixed lambda >= 0.

    Returns (coefficients, dual_value, gradient) with
    dual_value = ||f||^2 - Re(b* c) - sum_k lambda_k rho_k^2 and
    gradient_k = |g(x_k)|^2 - rho_k^2.
    """
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0):
        raise ValueError("multipliers must be componentwise nonnegative")
    G = np.asarray(G, dtype=complex)
    E = monomial_matrix(grid.points, G.shape[0] - 1)
    rho_sq = as_rho_sq(rho, len(grid))
    state, _, _ = _evaluate(lam, G, mom, E, rho_sq)
    return state.coefficients, state.dual_value, state.gradient


def primal_value(c, G, mom: MomentVector) -> float:
    """Squared misfit ||f - g||^2_{L2(I)} of the polynomial with coefficients c."""
    c = np.asarray(c, dtype=complex)
    return float(
        mom.norm_f_sq
        - 2.0 * np.real(np.vdot(mom.b, c))
        + np.real(np.vdot(c, G @ c))
    )


def dual_hessian(state: DualState, E: np.ndarray, fac, idx) -> np.ndarray:
    """Hessian block of the dual on the given grid indices.

    H_kl = -2 Re[(v_k^* A^-1 v_l)(v_l^* c)(c^* v_k)]; negative
    semidefinite since it is -2 Re of a congruence of a PSD matrix.
    """
    Ew = E[idx]
    g = Ew @ state.coefficients
    S = Ew @ cho_solve(fac, Ew.conj().T)
    return -2.0 * np.real(np.conj(g)[:, None] * S * g[None, :])


def _newton_direction(gradient_free: np.ndarray, B: np.ndarray, nu: float):
    """Levenberg-damped Newton ascent direction on the free multipliers.

    Solves (B + nu * diag(B)) d = gradient with B = -H. Scaling the
    damping by the diagonal (Marquardt style) rather than a uniform
    multiple of the identity matters here: the diagonal curvature spans
    many orders of magnitude when the iterate is far from feasible, and
    a uniform damping washes out the small-curvature components. Returns
    None when the system fails or d is not an ascent direction at the
    given damping.
    """
    diag = np.clip(np.diag(B), np.finfo(float).tiny, None)
    try:
        step = cho_solve(
            cho_factor(B + nu * np.diag(diag), lower=True),
            gradient_free,
        )
    except np.linalg.LinAlgError:
        return None
    if not np.isfinite(step).all() or np.dot(step, gradient_free) <= 0:
        return None
    return step


def _bb_step_length(state: DualState, prev: DualState | None) -> float:
    """Barzilai-Borwein step length for the projected gradient.

    Matches the secant curvature of the last move; clipped to a wide
    positive range and safeguarded by the Armijo backtracking outside.
    """
    if prev is None:
        return 1.0 / max(1.0, float(np.max(np.abs(state.gradient), initial=0.0)))
    s = state.lam - prev.lam
    y = state.gradient - prev.gradient
    sy = -float(np.dot(s, y))  # > 0 for a concave dual
    if sy <= 0:
        return 1.0
    return float(np.clip(np.dot(s, s) / sy, 1e-12, 1e12))


def maximize_dual(
    G,
    mom: MomentVector,
    grid: ConstraintGrid,
    rho,
    opts: SolveOptions | None = None,
) -> SolveResult:
    """Projected Newton ascent of the concave dual over lambda >= 0.

    Convergence requires, scaled by max(1, ||f||^2): grid feasibility
    gradient_k <= tol and complementary slackness
    lambda_k |gradient_k| <= tol. Newton steps act on the free set
    (lambda_k > 0 or gradient_k > 0) with adaptive Levenberg damping;
    when no damping level passes the Armijo test the iteration falls
    back to a projected gradient step with a spectral step length.
    """
    opts = opts or SolveOptions()
    G = np.asarray(G, dtype=complex)
    n = G.shape[0] - 1
    E = monomial_matrix(grid.points, n)
    rho_sq = as_rho_sq(rho, len(grid))

    if opts.lambda0 is not None:
        lam = np.asarray(opts.lambda0, dtype=float).copy()
        if lam.shape != (len(grid),) or np.any(lam < 0):
            raise ValueError("lambda0 must be a nonnegative vector matching the grid")
    else:
        lam = np.zeros(len(grid))

    scale = max(1.0, mom.norm_f_sq)
    state, fac, jitter = _evaluate(lam, G, mom, E, rho_sq)
    if jitter > 0 and opts.lambda0 is None:
        # G alone is singular to working precision (monomials nearly
        # dependent on I at this degree). Restart from spacing-weighted
        # multipliers: A then approximates the full-circle Gram, which
        # is well conditioned, and the ascent can proceed reliably.
        lam = np.full(len(grid), grid.spacing / (2.0 * np.pi))
        state, fac, _ = _evaluate(lam, G, mom, E, rho_sq)
    history = [state.dual_value]
    previous: DualState | None = None
    nu = 1.0

    def kkt_satisfied(s: DualState) -> bool:
        feas = float(np.max(s.gradient))
        comp = float(np.max(s.lam * np.abs(s.gradient)))
        return feas <= opts.tol * scale and comp <= opts.tol * scale

    status = "max_iter"
    iterations = 0
    for iterations in range(opts.max_iter + 1):
        if np.any(~np.isfinite(state.gradient)) or not np.isfinite(state.dual_value):
            raise FloatingPointError("dual ascent produced non-finite values")
        if kkt_satisfied(state):
            status = "converged"
            break
        if iterations == opts.max_iter:
            break

        free = np.nonzero((state.lam > 0) | (state.gradient > 0))[0]
        if len(free) == 0:
            break
        accepted = None

        # Newton phase: full steps at increasing damping until one
        # passes the Armijo test; success relaxes the damping again
        B = -dual_hessian(state, E, fac, free)
        for _ in range(NEWTON_ATTEMPTS):
            step = _newton_direction(state.gradient[free], B, nu)
            if step is not None:
                d = np.zeros(len(grid))
                d[free] = step
                lam_new = np.maximum(state.lam + d, 0.0)
                if not np.array_equal(lam_new, state.lam):
                    trial, trial_fac, _ = _evaluate(lam_new, G, mom, E, rho_sq)
                    gain = ARMIJO_SIGMA * float(
                        np.dot(state.gradient, lam_new - state.lam)
                    )
                    if (
                        np.isfinite(trial.dual_value)
                        and trial.dual_value >= state.dual_value + gain
                    ):
                        accepted = (trial, trial_fac)
                        nu = max(nu / DAMPING_DECREASE, DAMPING_FLOOR)
                        break
            nu *= DAMPING_INCREASE

        # fallback: projected gradient with a spectral step length
        if accepted is None and np.any(state.gradient[free] != 0.0):
            d = np.zeros(len(grid))
            d[free] = state.gradient[free]
            alpha = _bb_step_length(state, previous)
            for _ in range(MAX_BACKTRACKS):
                lam_new = np.maximum(state.lam + alpha * d, 0.0)
                if np.array_equal(lam_new, state.lam):
                    alpha *= 0.5
                    continue
                trial, trial_fac, _ = _evaluate(lam_new, G, mom, E, rho_sq)
                gain = ARMIJO_SIGMA * float(np.dot(state.gradient, lam_new - state.lam))
                if np.isfinite(trial.dual_value) and trial.dual_value >= state.dual_value + gain:
                    accepted = (trial, trial_fac)
                    break
                alpha *= 0.5
        if accepted is None:
            # no direction makes progress at this scale: stop with the
            # best iterate and let the final KKT test decide the status
            break
        previous = state
        state, fac = accepted
        history.append(state.dual_value)

    if kkt_satisfied(state):
        status = "converged"

    misfit = max(primal_value(state.coefficients, G, mom), 0.0)
    return SolveResult(
        coefficients=state.coefficients,
        multipliers=state.lam,
        misfit=misfit,
        dual_value=state.dual_value,
        duality_gap=misfit - state.dual_value,
        iterations=iterations,
        status=status,
        norm_f_sq=mom.norm_f_sq,
        grid_moduli=np.abs(E @ state.coefficients),
        dual_values=history,
    )
