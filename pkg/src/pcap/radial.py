"""Radial A-harmonic functions, equilibrium profiles and comparison experiments.

A radial ``u`` solves ``div(A(|Du|) Du/|Du|) = 0`` outside a ball iff the
flux ``f^{n-1}(r) A(|u'(r)|)`` is constant, so a decreasing solution with
flux ``C`` has ``u' = -A^{-1}(C f^{1-n})``. For ``A(s) = s^{p-1}`` this is the
first integral of ``(p-1) u'' + (n-1) (f'/f) u' = 0``.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from . import quadrature
from .aoperator import a_inverse
from .capacity import annulus_capacity_closed_form
from .errors import (
    BadSequence,
    BoundaryOrder,
    GridMismatch,
    IndeterminateError,
    InvalidOperator,
    ParabolicProfile,
    PNotEqualN,
)
from .functions import RadialFunction, constant, log_grid
from .geometry import _check_annulus, annulus_volume
from .sequences import AnnulusSequence, dyadic_within, running_sup, stabilizes, tends_to_zero

HOLDS = "holds"
VIOLATED = "violated"
COMPARISON_TOL = 1e-7


def _check_mesh(N, minimum):
    if isinstance(N, bool) or int(N) != N or N < minimum:
        raise ValueError(f"mesh size must be an integer >= {minimum}, got {N!r}")
    return int(N)


def flux(space, A, u):
    """``f^{n-1}(r) A(|u'(r)|)`` at the nodes of ``u`` (overflow-safe)."""
    Au = A(np.abs(u.derivs))
    out = np.zeros_like(Au)
    pos = Au > 0
    out[pos] = np.exp((space.n - 1) * space.profile.log(u.grid[pos]) + np.log(Au[pos]))
    return out


def flux_residual(space, A, u, C):
    """Relative deviation of the nodal flux from ``C`` (absolute when ``C == 0``).

    Compared as ``A(|u'|)`` against ``C f^{1-n}`` so that nodes where the
    target underflows (below the smallest normal float) count as exact when
    ``A(|u'|)`` underflows there too.
    """
    Au = A(np.abs(u.derivs))
    if C == 0:
        return np.abs(flux(space, A, u))
    target = C * space.profile.power(u.grid, 1.0 - space.n)
    res = np.zeros_like(Au)
    tiny = np.finfo(float).tiny
    live = target >= tiny
    res[live] = np.abs(Au[live] - target[live]) / target[live]
    res[~live] = np.where(Au[~live] < tiny, 0.0, np.inf)
    return res


def radial_a_harmonic(space, A, a, C, r_max=1e3, N=1000):
    """Decreasing radial A-harmonic function with ``u(a) = 0`` and flux ``C``.

    Values come from per-cell 15-point Kronrod integration of ``u'``; the
    meta entry ``tail_bound`` bounds ``|u(inf) - u(r_max)|`` through
    ``A(s) >= D1 s^(p-1)`` (infinite when the bound diverges).
    """
    N = _check_mesh(N, 64)
    if not a > 0:
        raise ValueError("inner radius a must be positive")
    if not C >= 0:
        raise ValueError("flux constant C must be nonnegative")
    if not r_max > a:
        raise ValueError("r_max must exceed a")
    if A.p != space.p:
        raise InvalidOperator(f"operator exponent {A.p!r} differs from the space exponent {space.p!r}")
    grid = log_grid(float(a), float(r_max), N)
    meta = {
        "construction": "radial_a_harmonic",
        "a": float(a),
        "C": float(C),
        "operator": A.kind,
        "p": A.p,
    }
    if C == 0:
        meta.update(tail_bound=0.0, quadrature_error=0.0)
        return RadialFunction(grid, np.zeros_like(grid), np.zeros_like(grid), meta)

    def speed(r):
        return a_inverse(A, C * space.profile.power(r, 1.0 - space.n))

    cum, err = quadrature.cumulative(speed, grid)
    tail = quadrature.improper_integral(space.capacity_density, float(r_max))
    if tail.classification == quadrature.CONVERGED:
        tail_bound = (C / A.claimed.D1) ** (1.0 / (A.p - 1.0)) * tail.value
    else:
        tail_bound = math.inf
    meta.update(tail_bound=tail_bound, quadrature_error=err)
    return RadialFunction(grid, -cum, -speed(grid), meta)


def solution_is_bounded(space, A, a, C):
    """Whether the flux-``C`` solution stays bounded on ``[a, inf)``.

    Decided by :func:`quadrature.improper_integral` on ``A^{-1}(C f^{1-n})``;
    returns None when the integral is indeterminate.
    """
    if C == 0:
        return True
    res = quadrature.improper_integral(
        lambda r: a_inverse(A, C * space.profile.power(r, 1.0 - space.n)), float(a)
    )
    if res.classification == quadrature.INDETERMINATE:
        return None
    return res.classification == quadrature.CONVERGED


def eta_annulus(space, R1, R2, N=1000):
    """Capacity potential of the annulus: ``int_r^{R2} f^{-q} / int_{R1}^{R2} f^{-q}``."""
    _check_annulus(R1, R2)
    if not math.isfinite(R2):
        raise GridMismatch("eta_annulus needs a finite outer radius; see eta_exterior")
    N = _check_mesh(N, 2)
    grid = log_grid(float(R1), float(R2), N)
    k, err = quadrature.gauss_kronrod_cells(space.capacity_density, grid)
    from_right = np.concatenate([np.cumsum(k[::-1])[::-1], [0.0]])
    total = from_right[0]
    values = from_right / total
    values[0], values[-1] = 1.0, 0.0
    derivs = -space.capacity_density(grid) / total
    meta = {
        "construction": "eta_annulus",
        "R1": float(R1),
        "R2": float(R2),
        "integral": float(total),
        "quadrature_error": float(err.sum()),
    }
    return RadialFunction(grid, values, derivs, meta)


def eta_exterior(space, a, r_max=1e3, N=1000):
    """``int_r^inf f^{-q} / int_a^inf f^{-q}`` sampled on ``[a, r_max]``.

    Exists only when the integral converges; otherwise the end is parabolic
    and :class:`ParabolicProfile` is raised.
    """
    N = _check_mesh(N, 2)
    if not (a > 0 and r_max > a):
        raise ValueError("need 0 < a < r_max")
    tail = quadrature.improper_integral(space.capacity_density, float(r_max))
    if tail.classification == quadrature.DIVERGED:
        raise ParabolicProfile(f"int f^-q diverges for {space.label()}: no exterior potential")
    if tail.classification == quadrature.INDETERMINATE:
        raise IndeterminateError("cannot decide convergence of the exterior potential", tail)
    grid = log_grid(float(a), float(r_max), N)
    k, err = quadrature.gauss_kronrod_cells(space.capacity_density, grid)
    from_right = tail.value + np.concatenate([np.cumsum(k[::-1])[::-1], [0.0]])
    total = from_right[0]
    values = from_right / total
    values[0] = 1.0
    derivs = -space.capacity_density(grid) / total
    meta = {
        "construction": "eta_exterior",
        "a": float(a),
        "r_max": float(r_max),
        "integral": float(total),
        "tail_at_r_max": float(tail.value),
        "quadrature_error": float(err.sum()) + tail.error_estimate,
    }
    return RadialFunction(grid, values, derivs, meta)


def lp_gradient_norm(space, u, a, R):
    """``n omega_n int_a^R |u'|^p f^{n-1} dr`` from the nodal derivatives.

    The integrand is splined in ``log r``; ``[a, R]`` must lie in the grid.
    """
    if a < u.start * (1 - 1e-12) or R > u.end * (1 + 1e-12) or not R >= a:
        raise GridMismatch(f"[{a!r}, {R!r}] is not inside [{u.start!r}, {u.end!r}]")
    if R == a or not np.any(u.derivs):
        return 0.0
    t = np.log(u.grid)
    # in logs: |u'|^p underflows where f^(n-1) overflows on fast-growing ends
    du = np.abs(u.derivs)
    g = np.zeros_like(du)
    nz = du > 0
    g[nz] = np.exp(space.p * np.log(du[nz]) + (space.n - 1) * space.profile.log(u.grid[nz]) + np.log(u.grid[nz]))
    spline = CubicSpline(t, g)
    lo, hi = math.log(max(a, u.start)), math.log(min(R, u.end))
    return max(0.0, float(space.sphere_area * spline.integrate(lo, hi)))


def log_growth_check(space, u, E1, E2, r_min, full_output=False):
    """Check ``|u| <= E2 (ln r)^((n-1)/n)`` and ``f(r) <= E1 r`` at nodes ``r >= r_min``."""
    if space.p != space.n:
        raise PNotEqualN(f"log-growth comparison needs p = n, got p={space.p!r}, n={space.n}")
    if not r_min > 1:
        raise ValueError("r_min must exceed 1 so that ln r > 0")
    mask = u.grid >= r_min
    r = u.grid[mask]
    if r.size == 0:
        raise GridMismatch(f"no grid nodes beyond r_min={r_min!r}")
    bound = E2 * np.log(r) ** ((space.n - 1) / space.n)
    growth_ok = np.abs(u.values[mask]) <= bound * (1 + 1e-12)
    profile_ok = space.profile(r) <= E1 * r * (1 + 1e-12)
    ok = bool(growth_ok.all() and profile_ok.all())
    if not full_output:
        return ok
    return {
        "holds": ok,
        "growth_bound": bool(growth_ok.all()),
        "profile_bound": bool(profile_ok.all()),
        "first_growth_failure": float(r[~growth_ok][0]) if not growth_ok.all() else None,
        "first_profile_failure": float(r[~profile_ok][0]) if not profile_ok.all() else None,
    }


def _as_sequences(sequences):
    if isinstance(sequences, AnnulusSequence):
        return [sequences]
    seqs = list(sequences)
    if not seqs or not all(isinstance(s, AnnulusSequence) for s in seqs):
        raise BadSequence("expected one or more AnnulusSequence objects")
    return seqs


def _summary(values, bounded=True):
    values = np.asarray(values, dtype=float)
    out = {"values": values.tolist(), "sup": float(running_sup(values)[-1])}
    if bounded:
        out["bounded"] = stabilizes(values)
    return out


def growth_condition_check(space, u, v, sequences):
    """Growth functionals of ``u`` and ``v`` along annulus sequences.

    Per annulus ``A_k = A(R1^k, R2^k)`` and function ``w``:

    * ``volume``: ``max_{A_k} |w|^p Vol(A_k) / (R2^k - R1^k)^p``
    * ``capacity_max``: ``(max_{A_k} |w|)^p cap_p(R1^k, R2^k)``
    * ``capacity_osc``: ``(osc_{A_k} w)^p cap_p(R1^k, R2^k)``

    plus ``difference``: ``max_{A_k} |v - u|^p cap_p``. Boundedness flags use
    :func:`sequences.stabilizes`; the difference gets a decay flag.
    """
    p = space.p
    report = {}
    for seq in _as_sequences(sequences):
        lo, hi = float(seq.inner[0]), float(seq.outer[-1])
        for w in (u, v):
            if lo < w.start * (1 - 1e-12) or hi > w.end * (1 + 1e-12):
                raise GridMismatch(
                    f"sequence {seq.name!r} spans [{lo!r}, {hi!r}] beyond [{w.start!r}, {w.end!r}]"
                )
        vol_ratio, caps = [], []
        funcs = {"u": {"volume": [], "capacity_max": [], "capacity_osc": []},
                 "v": {"volume": [], "capacity_max": [], "capacity_osc": []}}
        diff = []
        for R1, R2 in seq:
            ratio = annulus_volume(space, R1, R2) / (R2 - R1) ** p
            cap = annulus_capacity_closed_form(space, R1, R2).value
            vol_ratio.append(ratio)
            caps.append(cap)
            for name, w in (("u", u), ("v", v)):
                m = w.max_abs_on(R1, R2)
                funcs[name]["volume"].append(m ** p * ratio)
                funcs[name]["capacity_max"].append(m ** p * cap)
                funcs[name]["capacity_osc"].append(w.oscillation_on(R1, R2) ** p * cap)
            pts = np.unique(np.concatenate([u.restrict(R1, R2)[0], v.restrict(R1, R2)[0], [R1, R2]]))
            diff.append(float(np.max(np.abs(v(pts) - u(pts)))) ** p * cap)
        entry = {
            "inner": seq.inner.tolist(),
            "outer": seq.outer.tolist(),
            "volume_ratio": _summary(vol_ratio),
            "capacity": _summary(caps),
        }
        for name in ("u", "v"):
            entry[name] = {key: _summary(vals) for key, vals in funcs[name].items()}
        entry["difference"] = dict(_summary(diff, bounded=False), tends_to_zero=tends_to_zero(diff))
        entry["bounded"] = all(
            entry[name][key]["bounded"] for name in ("u", "v") for key in ("volume",)
        )
        report[seq.name] = entry
    return report


@dataclass(frozen=True)
class ComparisonReport:
    outcome: str
    margin: float
    violation: Optional[dict]
    tol: float
    domain: tuple
    growth_flags: Optional[dict] = None
    flux_spread: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "outcome": self.outcome,
            "margin": self.margin,
            "violation": self.violation,
            "tol": self.tol,
            "domain": list(self.domain),
            "flux_spread": dict(self.flux_spread),
            "growth_flags": self.growth_flags,
        }


def _flux_spread(space, A, w):
    """Largest relative deviation of the flux of ``w`` from its value at the first node."""
    F0 = flux(space, A, w)[0]
    return float(np.max(flux_residual(space, A, w, F0)))


def comparison_experiment(space, A, a, u, v, tol=COMPARISON_TOL, sequences=None):
    """Check ``u <= v`` on the common domain of two radial functions starting at ``a``.

    Grids that differ are both resampled (PCHIP) onto the finer one. The
    report also carries the relative flux spread of each function under
    ``A`` (zero for exact radial A-harmonic functions) and, when the domain
    holds enough dyadic annuli or ``sequences`` is given, the growth flags
    of :func:`growth_condition_check`.
    """
    for name, w in (("u", u), ("v", v)):
        if abs(w.start - a) > 1e-12 * max(1.0, abs(a)):
            raise GridMismatch(f"{name} starts at {w.start!r}, expected a={a!r}")
    if not u.values[0] <= v.values[0] + tol:
        raise BoundaryOrder(f"boundary data not ordered: u(a)={u.values[0]!r} > v(a)={v.values[0]!r}")
    end = min(u.end, v.end)
    same = u.grid.shape == v.grid.shape and np.allclose(u.grid, v.grid, rtol=1e-14, atol=0)
    if same:
        uu, vv = u, v
    else:
        fine = u if u.grid.size >= v.grid.size else v
        g = fine.grid[fine.grid <= end]
        if g[-1] < end:
            g = np.append(g, end)
        uu, vv = u.resample(g), v.resample(g)
    gap = vv.values - uu.values
    margin = float(gap.min())
    bad = np.nonzero(gap < -tol)[0]
    if bad.size:
        i = int(bad[0])
        outcome = VIOLATED
        violation = {"radius": float(uu.grid[i]), "gap": float(-gap[i])}
    else:
        outcome, violation = HOLDS, None
    if sequences is None:
        sequences = dyadic_within(a, end, min_terms=9)
    growth = growth_condition_check(space, u, v, sequences) if sequences is not None else None
    spread = {} if A is None else {"u": _flux_spread(space, A, u), "v": _flux_spread(space, A, v)}
    return ComparisonReport(outcome, margin, violation, float(tol), (float(a), float(end)), growth, spread)


def exterior_counterexample(space, a=1.0, r_max=1e3, N=1000):
    """The pair ``u = 1``, ``v = eta_exterior``: equal on the sphere ``r = a``, ``v < u`` outside."""
    v = eta_exterior(space, a, r_max, N)
    return constant(v.grid, 1.0), v
