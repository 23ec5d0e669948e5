"""Condenser capacities ``cap_p(B(R1); B(R2))`` of concentric balls.

Three routes: the closed form through ``int f^{-q}``, the cutoff-function
upper bound, and direct minimization of the discrete radial energy
``n omega_n int |v'|^p f^{n-1} dr`` over piecewise-linear ``v`` with
``v(R1) = 1`` and ``v(R2) = 0``.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import quadrature
from ._kernels import KERNELS
from .errors import BadAnnulus, IndeterminateError, NonConvergence
from .geometry import _check_annulus, annulus_volume
from .functions import RadialFunction, log_grid

CLOSED_FORM = "closed_form"
CUTOFF_BOUND = "cutoff_bound"
NUMERICAL = "numerical"


@dataclass(frozen=True)
class CapacityEstimate:
    value: float
    method: str
    error_estimate: float
    R1: float
    R2: float
    minimizer: Optional[RadialFunction] = None
    classification: Optional[str] = None
    info: dict = field(default_factory=dict)

    def as_dict(self):
        out = {
            "value": self.value,
            "method": self.method,
            "error_estimate": self.error_estimate,
            "R1": self.R1,
            "R2": self.R2,
        }
        if self.classification is not None:
            out["classification"] = self.classification
        if self.info:
            out["info"] = dict(self.info)
        return out


def capacity_integral(space, R1, R2):
    """``int_{R1}^{R2} f^{-q}`` as ``(value, error)``."""
    value, err, _ = quadrature.quad(space.capacity_density, float(R1), float(R2))
    return value, err


def capacity_from_integral(space, integral):
    """``n omega_n I^{-(p-1)}``; an infinite integral gives zero capacity."""
    if math.isinf(integral):
        return 0.0
    return space.sphere_area * integral ** (1.0 - space.p)


def annulus_capacity_closed_form(space, R1, R2):
    _check_annulus(R1, R2)
    if not math.isfinite(R2):
        raise BadAnnulus("use global_capacity for an unbounded outer radius")
    integral, err = capacity_integral(space, R1, R2)
    value = capacity_from_integral(space, integral)
    # d(cap)/cap = (p-1) dI/I
    rel = err / integral if integral > 0 else np.inf
    return CapacityEstimate(value, CLOSED_FORM, (space.p - 1.0) * value * rel, float(R1), float(R2))


def cutoff_upper_bound(space, R1, R2):
    """Energy of the radial Lipschitz cutoff: ``(2/(R2-R1))^p Vol(annulus)``."""
    _check_annulus(R1, R2)
    vol = annulus_volume(space, R1, R2, full_output=True)
    factor = (2.0 / (R2 - R1)) ** space.p
    return CapacityEstimate(
        factor * vol.value, CUTOFF_BOUND, factor * vol.error_estimate, float(R1), float(R2)
    )


def global_capacity(space, R1, opts=None):
    """``Cap_p(B(R1)) = lim_{R2 -> inf} cap_p(R1, R2)``.

    Zero (classification ``"zero"``) when ``int_{R1}^inf f^{-q}`` diverges,
    positive otherwise. An undecided integral raises
    :class:`IndeterminateError`.
    """
    if not R1 > 0:
        raise BadAnnulus(f"inner radius must be positive, got {R1!r}")
    res = quadrature.improper_integral(space.capacity_density, float(R1), opts)
    info = {"integral": res.as_dict()}
    if res.classification == quadrature.DIVERGED:
        return CapacityEstimate(0.0, CLOSED_FORM, 0.0, float(R1), math.inf, classification="zero", info=info)
    if res.classification == quadrature.INDETERMINATE:
        raise IndeterminateError(
            f"cannot decide convergence of int f^-q from {R1!r} for {space.label()}", res
        )
    value = capacity_from_integral(space, res.value)
    err = (space.p - 1.0) * value * res.error_estimate / res.value
    return CapacityEstimate(value, CLOSED_FORM, err, float(R1), math.inf, classification="positive", info=info)


# --------------------------------------------------------------------------
# direct minimization
# --------------------------------------------------------------------------
@dataclass(frozen=True)
class MeshOptions:
    N: int = 2000
    eps: float = 1e-10
    max_iter: int = 500
    energy_rtol: float = 1e-12
    step_tol: float = 1e-10


def discrete_problem(space, R1, R2, N):
    """Grid, cell widths, cell integrals of ``f^{n-1}`` and their error estimates."""
    grid = log_grid(float(R1), float(R2), N)
    k, err = quadrature.gauss_kronrod_cells(lambda r: space.profile.power(r, space.n - 1), grid)
    return grid, np.diff(grid), k, err


def exact_discrete_minimizer(h, w, p):
    """Minimizer of ``sum w_i |s_i|^p`` subject to ``sum s_i h_i = -1``.

    Stationarity gives ``|s_i| proportional to (h_i / w_i)^(1/(p-1))``; used
    as an independent check of the iterative solver.
    """
    mag = (h / w) ** (1.0 / (p - 1.0))
    s = -mag / np.sum(mag * h)
    v = np.concatenate([[1.0], 1.0 + np.cumsum(s * h)])
    v[-1] = 0.0
    return v, float(np.sum(w * np.abs(s) ** p))


def _minimize(v, h, w, p, eps, opts, kernels):
    energy = kernels.energy(v, h, w, p, eps)
    residual = np.inf
    for it in range(1, opts.max_iter + 1):
        grad, diag, off = kernels.gradient_hessian(v, h, w, p, eps)
        residual = float(np.max(np.abs(grad)))
        step = -kernels.solve_tridiagonal(diag, off, grad)
        slope = float(grad @ step)
        if not (np.all(np.isfinite(step)) and slope < 0):
            step = -grad / diag
            slope = float(grad @ step)
        t = 1.0
        trial = v.copy()
        while True:
            trial[1:-1] = v[1:-1] + t * step
            e_new = kernels.energy(trial, h, w, p, eps)
            if e_new <= energy + 1e-4 * t * slope:
                break
            t *= 0.5
            if t < 1e-12:
                break
        if not e_new <= energy:
            # Newton direction failed to decrease: preconditioned gradient step
            step = -grad / diag
            slope = float(grad @ step)
            t = 1.0
            while t >= 1e-12:
                trial[1:-1] = v[1:-1] + t * step
                e_new = kernels.energy(trial, h, w, p, eps)
                if e_new <= energy + 1e-4 * t * slope:
                    break
                t *= 0.5
            if not e_new <= energy:
                # no descent possible at working precision
                return v, energy, it, residual
        update = t * float(np.max(np.abs(step)))
        decrease = energy - e_new
        v, energy = trial, e_new
        if decrease <= opts.energy_rtol * abs(energy) and update <= opts.step_tol:
            return v, energy, it, residual
    raise NonConvergence(
        f"energy minimization did not converge in {opts.max_iter} iterations",
        residual=residual, iterations=opts.max_iter,
    )


def numerical_capacity(space, R1, R2, mesh_opts=None, kernels=None):
    """Minimize the discrete p-Dirichlet energy on a log-spaced grid.

    Damped Newton on ``sum w_i (eps^2 + s_i^2)^(p/2)`` with Armijo
    backtracking; for p < 2 ``eps`` is lowered by continuation. The reported
    value is the unregularized energy of the final iterate, i.e. the exact
    energy of an admissible piecewise-linear function (up to the cell
    quadrature error reported in ``error_estimate``).
    """
    opts = mesh_opts or MeshOptions()
    kernels = kernels or KERNELS
    _check_annulus(R1, R2)
    if not math.isfinite(R2):
        raise BadAnnulus("numerical minimization needs a bounded annulus")
    if opts.N < 16:
        raise ValueError("mesh size N must be at least 16")
    p = space.p
    grid, h, w, w_err = discrete_problem(space, R1, R2, opts.N)
    scale = w.sum()
    w_n = w / scale
    v = (grid[-1] - grid) / (grid[-1] - grid[0])

    typical = 1.0 / (grid[-1] - grid[0])
    if p < 2:
        eps_path = [typical * 10.0 ** -k for k in range(1, 12, 2)] + [opts.eps]
        eps_path = [e for e in eps_path if e > opts.eps] + [opts.eps]
    else:
        eps_path = [opts.eps]
    iterations = 0
    for eps in eps_path:
        v, _, it, residual = _minimize(v, h, w_n, p, eps, opts, kernels)
        iterations += it
    v[0], v[-1] = 1.0, 0.0

    slopes = np.diff(v) / h
    energy = float(np.sum(w * np.abs(slopes) ** p))
    value = space.sphere_area * energy
    err = space.sphere_area * float(np.sum(np.abs(slopes) ** p * w_err)) + 4 * np.finfo(float).eps * value
    derivs = np.concatenate([slopes, slopes[-1:]])
    minimizer = RadialFunction(
        grid, v, derivs,
        {"construction": "numerical_capacity", "R1": float(R1), "R2": float(R2), "N": opts.N},
    )
    return CapacityEstimate(
        value, NUMERICAL, err, float(R1), float(R2), minimizer=minimizer,
        info={"iterations": iterations, "residual": residual, "backend": kernels.name},
    )
