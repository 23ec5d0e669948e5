"""Adaptive quadrature and improper-integral classification.

Integrands are vectorized callables: they receive a 1-d float array and
return an array of the same shape.
"""

from dataclasses import dataclass

import numpy as np

from .errors import EvaluationFailure

# 15-point Gauss-Kronrod rule (QUADPACK qk15); the 7-point Gauss rule uses the
# odd-indexed abscissae.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# abscissae on [-1, 1] in increasing order, with matching weights
KRONROD_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[1:7:2] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]
GAUSS_WEIGHTS[9:15:2] = _WG[2::-1]

DEFAULT_ATOL = 1e-10
DEFAULT_RTOL = 1e-10


def _evaluate(func, x):
    try:
        y = np.asarray(func(x), dtype=float)
    except EvaluationFailure:
        raise
    except (ValueError, ArithmeticError) as exc:
        raise EvaluationFailure(f"integrand evaluation failed: {exc}") from exc
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape).astype(float)
    if np.isnan(y).any():
        raise EvaluationFailure("integrand returned NaN")
    return y


def gauss_kronrod_cells(func, edges):
    """Apply the 15-point Kronrod rule on every cell ``[edges[i], edges[i+1]]``.

    Returns ``(kronrod, abs(kronrod - gauss))`` per cell. One vectorized
    integrand call covers all cells.
    """
    edges = np.asarray(edges, dtype=float)
    return _cells(func, edges[:-1], edges[1:])


def geometric_breakpoints(a, b, ratio=2.0):
    """Breakpoints ``a, a*ratio, a*ratio**2, ..., b`` for ``0 < a < b``."""
    n = max(1, int(np.ceil(np.log(b / a) / np.log(ratio) - 1e-12)))
    pts = a * ratio ** np.arange(n + 1, dtype=float)
    pts[-1] = b
    return pts


def quad(func, a, b, atol=DEFAULT_ATOL, rtol=DEFAULT_RTOL, max_nodes=2_000_000):
    """Globally adaptive quadrature of ``func`` over ``[a, b]``.

    Long intervals on the positive half-line are first split geometrically so
    that each piece spans at most a factor two. Each round bisects the cells
    with the largest error estimates until the summed estimate meets
    ``max(atol, rtol |value|)``. Returns ``(value, error_estimate, nodes_used)``.
    """
    if not b > a:
        if b == a:
            return 0.0, 0.0, 0
        raise ValueError("quad requires a < b")
    if a > 0 and b / a > 2.0:
        edges = geometric_breakpoints(a, b)
    else:
        edges = np.array([a, b], dtype=float)

    lo, hi = edges[:-1], edges[1:]
    k, err = _cells(func, lo, hi)
    nodes = 15 * lo.size
    while True:
        if not np.all(np.isfinite(k)):
            return np.inf, np.inf, nodes
        total = float(k.sum())
        tol = max(atol, rtol * abs(total))
        err_sum = float(err.sum())
        if err_sum <= tol:
            return total, err_sum, nodes
        splittable = (hi - lo) > 64 * np.finfo(float).eps * np.maximum(np.abs(lo), np.abs(hi))
        cand = np.nonzero(splittable)[0]
        if cand.size == 0:
            return total, err_sum, nodes
        order = cand[np.argsort(err[cand])[::-1]]
        # smallest set of worst cells whose removal leaves at most tol/2
        excess = err_sum - 0.5 * tol
        take = int(np.searchsorted(np.cumsum(err[order]), excess)) + 1
        pick = order[: min(take, order.size)]
        if nodes + 30 * pick.size > max_nodes:
            return total, err_sum, nodes
        mid = 0.5 * (lo[pick] + hi[pick])
        new_lo = np.concatenate([lo[pick], mid])
        new_hi = np.concatenate([mid, hi[pick]])
        nk, nerr = _cells(func, new_lo, new_hi)
        nodes += 15 * new_lo.size
        keep = np.ones(lo.size, dtype=bool)
        keep[pick] = False
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        k = np.concatenate([k[keep], nk])
        err = np.concatenate([err[keep], nerr])


def _cells(func, lo, hi):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * KRONROD_NODES[None, :]
    y = _evaluate(func, x.ravel()).reshape(x.shape)
    with np.errstate(invalid="ignore", over="ignore"):
        k = half * (y @ KRONROD_WEIGHTS)
        g = half * (y @ GAUSS_WEIGHTS)
        err = np.abs(k - g)
    err[~np.isfinite(k)] = np.inf
    return k, err


def cumulative(func, grid):
    """Cumulative integral of ``func`` from ``grid[0]`` to every grid node.

    Uses the fixed 15-point Kronrod rule per cell; returns ``(values, error)``
    with ``values[0] == 0``.
    """
    k, err = gauss_kronrod_cells(func, grid)
    out = np.zeros(len(grid))
    np.cumsum(k, out=out[1:])
    return out, float(err.sum())


CONVERGED = "converged"
DIVERGED = "diverged"
INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class ImproperOptions:
    """Thresholds for the doubling-cutoff divergence test."""

    j_max: int = 60
    divergence_threshold: float = 1e12
    stall_factor: float = 1.05
    stall_count: int = 5
    atol: float = DEFAULT_ATOL
    rtol: float = DEFAULT_RTOL


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    classification: str
    nodes_used: int
    cutoff: float = np.inf

    @property
    def lower_bound(self):
        """True when ``value`` is only a partial integral (divergent case)."""
        return self.classification != CONVERGED

    def as_dict(self):
        return {
            "value": self.value,
            "error_estimate": self.error_estimate,
            "classification": self.classification,
            "nodes_used": self.nodes_used,
            "cutoff": self.cutoff,
        }


def improper_integral(integrand, a, opts=None):
    """Classify and evaluate ``int_a^inf integrand`` for a positive integrand.

    Partial integrals are taken over doubling cutoffs ``a * 2**j``. The
    Kronrod increments over ``[a 2**j, a 2**(j+1)]`` decide the outcome:

    * converged -- increments contract by at least ``stall_factor`` per
      doubling and the geometric tail extrapolation stabilizes (or the
      increments vanish);
    * diverged -- the partial integral passes ``divergence_threshold``, or
      increments fail to contract for ``stall_count`` consecutive doublings;
    * indeterminate -- neither within ``j_max`` doublings.
    """
    opts = opts or ImproperOptions()
    if not a > 0:
        raise ValueError("improper_integral needs a > 0")
    partial = 0.0
    err = 0.0
    nodes = 0
    prev_inc = None
    prev_estimate = None
    stall = 0
    contracting = 0
    cutoff = a
    for j in range(opts.j_max):
        lo, hi = a * 2.0 ** j, a * 2.0 ** (j + 1)
        inc, inc_err, used = quad(integrand, lo, hi, atol=0.0, rtol=opts.rtol)
        nodes += used
        cutoff = hi
        if not np.isfinite(inc):
            return QuadratureResult(np.inf, np.inf, DIVERGED, nodes, cutoff)
        partial += inc
        err += inc_err
        if partial > opts.divergence_threshold:
            return QuadratureResult(partial, err, DIVERGED, nodes, cutoff)
        tol = max(opts.atol, opts.rtol * abs(partial))
        if inc <= 0.25 * tol * np.finfo(float).eps or inc == 0.0:
            return QuadratureResult(partial, err, CONVERGED, nodes, cutoff)
        if prev_inc is not None:
            rho = inc / prev_inc
            if rho < 1.0 / opts.stall_factor:
                stall = 0
                contracting += 1
                tail = inc * rho / (1.0 - rho)
                estimate = partial + tail
                tol = max(opts.atol, opts.rtol * abs(estimate))
                if tail <= 1e-3 * tol or (
                    contracting >= 2
                    and prev_estimate is not None
                    and abs(estimate - prev_estimate) <= tol
                ):
                    spread = abs(estimate - prev_estimate) if prev_estimate is not None else tail
                    return QuadratureResult(
                        estimate, err + min(spread, tail), CONVERGED, nodes, np.inf
                    )
                prev_estimate = estimate
            else:
                contracting = 0
                prev_estimate = None
                stall += 1
                if stall >= opts.stall_count:
                    return QuadratureResult(partial, err, DIVERGED, nodes, cutoff)
        prev_inc = inc
    return QuadratureResult(partial, err, INDETERMINATE, nodes, cutoff)
