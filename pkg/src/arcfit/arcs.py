"""Arc systems on the unit circle and constraint grids on the complement.

The approximation region I is a finite union of open arcs with total
measure strictly less than 2*pi; the constraint region J is its closed
complement. All angles are canonicalized to [0, 2*pi) and compared
modulo 2*pi with a fixed tolerance, so grid endpoints sitting exactly
on the boundary of J are classified consistently.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * np.pi

# Endpoints of constraint grids land exactly on the boundary of J.
MEMBERSHIP_TOL = 1e-12


def wrap_angle(theta):
    """Canonicalize an angle (scalar or array) into [0, 2*pi)."""
    t = np.asarray(theta, dtype=float) % TWO_PI
    # floating-point % can return 2*pi itself for tiny negative inputs
    t = np.where(t >= TWO_PI, t - TWO_PI, t)
    if np.isscalar(theta):
        return float(t)
    return t


@dataclass(frozen=True)
class ArcSystem:
    """Ordered, pairwise-disjoint open arcs forming the data region I.

    Each arc is an (a, b) angle pair with b > a; b - a must be less than
    2*pi. Arcs whose closures touch are merged. The constraint region J
    is the closed complement and must have nonempty interior.
    """

    arcs_i: tuple[tuple[float, float], ...]

    def __post_init__(self):
        arcs = []
        for a, b in self.arcs_i:
            a = float(a)
            b = float(b)
            if not (np.isfinite(a) and np.isfinite(b)):
                raise ValueError("arc endpoints must be finite")
            length = b - a
            if length <= MEMBERSHIP_TOL:
                raise ValueError(f"arc ({a}, {b}) has nonpositive length")
            if length >= TWO_PI - MEMBERSHIP_TOL:
                raise ValueError(f"arc ({a}, {b}) covers the whole circle")
            arcs.append((wrap_angle(a), wrap_angle(a) + length))
        arcs.sort()
        # merge arcs whose closures touch (within tolerance), including
        # across the 0/2*pi seam; genuine overlaps are an input error
        merged = [list(arcs[0])]
        for a, b in arcs[1:]:
            if a < merged[-1][1] - MEMBERSHIP_TOL:
                raise ValueError("arcs overlap modulo 2*pi")
            if a - merged[-1][1] <= MEMBERSHIP_TOL:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        if len(merged) > 1:
            gap = merged[0][0] + TWO_PI - merged[-1][1]
            if gap < -MEMBERSHIP_TOL:
                raise ValueError("arcs overlap modulo 2*pi")
            if gap <= MEMBERSHIP_TOL:
                first = merged.pop(0)
                merged[-1][1] = max(merged[-1][1], first[1] + TWO_PI)
        total = sum(b - a for a, b in merged)
        if total >= TWO_PI - MEMBERSHIP_TOL:
            raise ValueError("total measure of I must be strictly less than 2*pi")
        object.__setattr__(self, "arcs_i", tuple((a, b) for a, b in merged))

    @property
    def measure(self) -> float:
        """Total angular measure of I."""
        return sum(b - a for a, b in self.arcs_i)

    def components_j(self) -> tuple[tuple[float, float], ...]:
        """Connected components of J as (start, end) with end > start.

        The component crossing the 0/2*pi seam, if any, is reported with
        end > 2*pi.
        """
        arcs = self.arcs_i
        comps = []
        for i, (_, b) in enumerate(arcs):
            a_next = arcs[(i + 1) % len(arcs)][0]
            length = (a_next - b) % TWO_PI
            if length <= MEMBERSHIP_TOL:
                continue
            comps.append((b % TWO_PI, b % TWO_PI + length))
        comps.sort()
        return tuple(comps)

    def contains_i(self, theta, tol: float = MEMBERSHIP_TOL):
        """Membership test for the closure of I (scalar or array)."""
        t = np.atleast_1d(wrap_angle(theta))
        inside = np.zeros(t.shape, dtype=bool)
        for a, b in self.arcs_i:
            local = (t - a) % TWO_PI
            inside |= (local <= (b - a) + tol) | (local >= TWO_PI - tol)
        if np.isscalar(theta):
            return bool(inside[0])
        return inside

    def contains_j(self, theta, tol: float = MEMBERSHIP_TOL):
        """Membership test for the closure of J (scalar or array)."""
        t = np.atleast_1d(wrap_angle(theta))
        inside = np.zeros(t.shape, dtype=bool)
        for a, b in self.components_j():
            local = (t - a) % TWO_PI
            inside |= (local <= (b - a) + tol) | (local >= TWO_PI - tol)
        if np.isscalar(theta):
            return bool(inside[0])
        return inside


@dataclass(frozen=True)
class ConstraintGrid:
    """Discretization J_m of the constraint region.

    points are canonical angles lying in the closure of J, ordered by
    component; spacing is the largest gap between consecutive points
    within any component.
    """

    points: np.ndarray
    m: int
    spacing: float
    components: tuple[tuple[float, float], ...]
    sizes: tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "points", np.asarray(self.points, dtype=float))
        self.points.setflags(write=False)

    def __len__(self) -> int:
        return self.points.shape[0]


def build_constraint_grid(arcs: ArcSystem, m: int) -> ConstraintGrid:
    """Uniform grid on each component of J, endpoints always included.

    Subinterval counts are allocated per component proportionally to arc
    length (at least one per component), so the total point count is
    approximately m + 1 and exactly m + 1 for a single-component J.
    """
    if m < 1:
        raise ValueError(f"grid resolution m must be >= 1, got {m}")
    comps = arcs.components_j()
    total = sum(b - a for a, b in comps)
    if not comps or total <= MEMBERSHIP_TOL:
        raise ValueError("constraint region J has empty interior")
    points = []
    sizes = []
    spacing = 0.0
    for a, b in comps:
        length = b - a
        n_sub = max(1, int(round(m * length / total)))
        pts = np.linspace(a, b, n_sub + 1)
        points.append(wrap_angle(pts))
        sizes.append(n_sub + 1)
        spacing = max(spacing, length / n_sub)
    return ConstraintGrid(
        points=np.concatenate(points),
        m=m,
        spacing=spacing,
        components=comps,
        sizes=tuple(sizes),
    )


@dataclass(frozen=True)
class FrequencyMap:
    """Affine map from a physical frequency band to a target arc."""

    f_lo: float
    f_hi: float
    theta_lo: float
    theta_hi: float

    def __post_init__(self):
        if not self.f_hi > self.f_lo:
            raise ValueError("frequency band requires f_hi > f_lo")
        if self.theta_hi == self.theta_lo:
            raise ValueError("degenerate angle range")


def map_frequencies(freqs, fmap: FrequencyMap) -> np.ndarray:
    """Affine image of frequencies under the band-to-arc map.

    Frequencies outside [f_lo, f_hi] are rejected with the offending
    index. Order is preserved.
    """
    f = np.asarray(freqs, dtype=float)
    lo, hi = fmap.f_lo, fmap.f_hi
    slack = 1e-12 * max(abs(lo), abs(hi), 1.0)
    bad = np.nonzero((f < lo - slack) | (f > hi + slack))[0]
    if bad.size:
        raise ValueError(
            f"frequency {f[bad[0]]!r} at index {bad[0]} outside band [{lo}, {hi}]"
        )
    return fmap.theta_lo + (f - lo) * (fmap.theta_hi - fmap.theta_lo) / (hi - lo)
