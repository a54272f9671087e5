"""Convergence sweeps over the degree n and the grid resolution m.

Empirical diagnostics only: the m-sweep records Cauchy-style coefficient
distances between consecutive grid resolutions; the n-sweep tracks the
misfit (nonincreasing in n) and the fraction of near-saturated grid
points. Cells are independent solves and can run in parallel.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .arcs import ArcSystem, build_constraint_grid
from .dual import SolveOptions, SolveResult, maximize_dual
from .moments import (
    MomentVector,
    SampledBoundaryData,
    gram_closed_form,
    gram_from_samples,
    moments_from_samples,
)

SATURATION_LEVEL = 0.9


@dataclass(frozen=True)
class ProblemSetup:
    """One approximation problem: arc system, boundary data, bound."""

    arcs: ArcSystem
    data: SampledBoundaryData
    rho: float | tuple = 1.0

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.data.angles).tobytes())
        h.update(np.ascontiguousarray(self.data.values).tobytes())
        h.update(np.ascontiguousarray(self.data.weights).tobytes())
        return h.hexdigest()[:16]

    def quadratic_data(self, n: int) -> tuple[np.ndarray, MomentVector]:
        if self.data.has_unit_weights:
            G = gram_closed_form(self.arcs, n)
        else:
            G = gram_from_samples(self.data, self.arcs, n)
        return G, moments_from_samples(self.data, self.arcs, n)


@dataclass
class SweepCell:
    n: int
    m: int
    misfit: float
    max_grid_modulus: float
    saturation_fraction: float
    coef_distance_next: float | None
    status: str
    iterations: int
    runtime: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "misfit": self.misfit,
            "max_grid_modulus": self.max_grid_modulus,
            "saturation_fraction": self.saturation_fraction,
            "coef_distance_next": self.coef_distance_next,
            "status": self.status,
            "iterations": self.iterations,
            "runtime": self.runtime,
        }


@dataclass
class SweepReport:
    mode: str  # "m" | "n"
    cells: list[SweepCell]
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema": "arcfit/sweep-v1",
            "mode": self.mode,
            "metadata": self.metadata,
            "cells": [c.to_dict() for c in self.cells],
        }

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def write_csv(self, path) -> None:
        fields = [
            "n", "m", "misfit", "max_grid_modulus", "saturation_fraction",
            "coef_distance_next", "status", "iterations", "runtime",
        ]
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=fields)
            writer.writeheader()
            for cell in self.cells:
                writer.writerow(cell.to_dict())


def _solve_cell(args) -> tuple[SolveResult, SweepCell]:
    problem, n, m, opts = args
    start = time.perf_counter()
    G, mom = problem.quadratic_data(n)
    grid = build_constraint_grid(problem.arcs, m)
    try:
        result = maximize_dual(G, mom, grid, problem.rho, opts)
        rho_vals = np.broadcast_to(np.asarray(problem.rho, dtype=float), (len(grid),))
        saturated = float(np.mean(result.grid_moduli >= SATURATION_LEVEL * rho_vals))
        cell = SweepCell(
            n=n,
            m=m,
            misfit=result.misfit,
            max_grid_modulus=float(np.max(result.grid_moduli)),
            saturation_fraction=saturated,
            coef_distance_next=None,
            status=result.status,
            iterations=result.iterations,
            runtime=time.perf_counter() - start,
        )
        return result, cell
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        cell = SweepCell(
            n=n, m=m, misfit=float("nan"), max_grid_modulus=float("nan"),
            saturation_fraction=float("nan"), coef_distance_next=None,
            status=f"error: {exc}", iterations=0,
            runtime=time.perf_counter() - start,
        )
        return None, cell


def _run_cells(tasks, jobs: int):
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_solve_cell, tasks))
    return [_solve_cell(t) for t in tasks]


def _metadata(problem: ProblemSetup) -> dict:
    return {
        "arcs_i": [list(a) for a in problem.arcs.arcs_i],
        "rho": problem.rho if np.isscalar(problem.rho) else list(problem.rho),
        "data_digest": problem.digest(),
        "saturation_level": SATURATION_LEVEL,
    }


def sweep_m(
    problem: ProblemSetup,
    n: int,
    m_values,
    opts: SolveOptions | None = None,
    jobs: int = 1,
) -> SweepReport:
    """Fixed degree, increasing grid resolution.

    Each cell records the coefficient distance to the next-finer-m
    solution; the sequence going to zero exhibits the grid-refinement
    consistency of the discretized problem.
    """
    m_values = list(m_values)
    if any(b <= a for a, b in zip(m_values, m_values[1:])):
        raise ValueError("m values must be strictly increasing")
    opts = opts or SolveOptions()
    outcomes = _run_cells([(problem, n, m, opts) for m in m_values], jobs)
    cells = [cell for _, cell in outcomes]
    for i in range(len(outcomes) - 1):
        res, nxt = outcomes[i][0], outcomes[i + 1][0]
        if res is not None and nxt is not None:
            cells[i].coef_distance_next = float(
                np.linalg.norm(res.coefficients - nxt.coefficients)
            )
    meta = _metadata(problem)
    meta.update({"n": n, "m_values": m_values})
    return SweepReport(mode="m", cells=cells, metadata=meta)


def sweep_n(
    problem: ProblemSetup,
    n_values,
    m_rule=lambda n: 2 * n,
    opts: SolveOptions | None = None,
    jobs: int = 1,
) -> SweepReport:
    """Increasing degree with a grid-coupling rule (default m = 2n).

    Tracks the misfit, which must be nonincreasing in n whenever the
    constraint grids are fixed or each cell is feasibility-certified,
    and the saturation fraction, expected nondecreasing for data that is
    not the trace of a feasible polynomial.
    """
    n_values = list(n_values)
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise ValueError("n values must be strictly increasing")
    opts = opts or SolveOptions()
    tasks = [(problem, n, max(1, int(m_rule(n))), opts) for n in n_values]
    outcomes = _run_cells(tasks, jobs)
    cells = [cell for _, cell in outcomes]
    meta = _metadata(problem)
    meta.update({"n_values": n_values, "m_values": [t[2] for t in tasks]})
    return SweepReport(mode="n", cells=cells, metadata=meta)
