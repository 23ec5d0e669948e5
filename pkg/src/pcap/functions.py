"""Grid-sampled radial functions."""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator

from .errors import GridMismatch


@dataclass(frozen=True, eq=False)
class RadialFunction:
    """Values ``u(r_i)`` and derivatives ``u'(r_i)`` on a strictly increasing grid."""

    grid: np.ndarray
    values: np.ndarray
    derivs: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        derivs = np.asarray(self.derivs, dtype=float)
        if grid.ndim != 1 or grid.size < 2 or values.shape != grid.shape or derivs.shape != grid.shape:
            raise GridMismatch("grid, values and derivs must be 1-d arrays of equal length >= 2")
        if np.any(np.diff(grid) <= 0):
            raise GridMismatch("grid must be strictly increasing")
        if not (np.all(np.isfinite(values)) and np.all(np.isfinite(derivs))):
            raise GridMismatch("values and derivatives must be finite")
        for name, arr in (("grid", grid), ("values", values), ("derivs", derivs)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def start(self):
        return float(self.grid[0])

    @property
    def end(self):
        return float(self.grid[-1])

    def __call__(self, r):
        """Cubic Hermite interpolation through values and derivatives."""
        r = np.asarray(r, dtype=float)
        if np.any(r < self.start * (1 - 1e-14)) or np.any(r > self.end * (1 + 1e-14)):
            raise GridMismatch(f"evaluation outside [{self.start!r}, {self.end!r}]")
        spline = CubicHermiteSpline(self.grid, self.values, self.derivs)
        return spline(np.clip(r, self.start, self.end))

    def _hermite_is_monotone(self):
        """Fritsch-Carlson test: the Hermite cubic through the stored derivatives is monotone."""
        delta = np.diff(self.values) / np.diff(self.grid)
        d0, d1 = self.derivs[:-1], self.derivs[1:]
        flat = delta == 0
        if np.any(flat & ((d0 != 0) | (d1 != 0))):
            return False
        safe = np.where(flat, 1.0, delta)
        a, b = d0 / safe, d1 / safe
        return bool(np.all(flat | ((a >= 0) & (b >= 0) & (a * a + b * b <= 9.0))))

    def resample(self, grid):
        """Shape-preserving resampling onto ``grid``.

        Uses the cubic Hermite interpolant of the stored derivatives when it
        is certified monotone on every interval, PCHIP otherwise.
        """
        grid = np.asarray(grid, dtype=float)
        if grid[0] < self.start * (1 - 1e-12) or grid[-1] > self.end * (1 + 1e-12):
            raise GridMismatch("resampling grid leaves the function's domain")
        g = np.clip(grid, self.start, self.end)
        if self._hermite_is_monotone():
            interp, method = CubicHermiteSpline(self.grid, self.values, self.derivs), "hermite"
        else:
            interp, method = PchipInterpolator(self.grid, self.values), "pchip"
        return RadialFunction(g, interp(g), interp.derivative()(g), dict(self.meta, resampled=method))

    def affine(self, scale=1.0, offset=0.0):
        """``scale * u + offset``."""
        meta = dict(self.meta)
        meta["affine"] = {"scale": float(scale), "offset": float(offset)}
        return RadialFunction(self.grid, scale * self.values + offset, scale * self.derivs, meta)

    def __neg__(self):
        return self.affine(-1.0)

    def restrict(self, lo, hi):
        """Nodes within ``[lo, hi]``."""
        mask = (self.grid >= lo) & (self.grid <= hi)
        return self.grid[mask], self.values[mask], self.derivs[mask]

    def max_abs_on(self, lo, hi):
        """``max |u|`` over ``[lo, hi]`` from interior nodes and interpolated endpoints."""
        _, vals, _ = self.restrict(lo, hi)
        ends = self(np.array([lo, hi]))
        return float(np.max(np.abs(np.concatenate([vals, ends]))))

    def oscillation_on(self, lo, hi):
        _, vals, _ = self.restrict(lo, hi)
        allv = np.concatenate([vals, self(np.array([lo, hi]))])
        return float(allv.max() - allv.min())

    def columns(self):
        return {"r": self.grid, "u": self.values, "du": self.derivs}


def constant(grid, value, meta=None):
    grid = np.asarray(grid, dtype=float)
    return RadialFunction(
        grid, np.full(grid.shape, float(value)), np.zeros(grid.shape),
        dict(meta or {}, construction="constant", value=float(value)),
    )


def log_grid(a, b, N):
    """``N + 1`` geometrically spaced nodes from ``a`` to ``b`` (endpoints exact)."""
    grid = a * (b / a) ** (np.arange(N + 1) / N)
    grid[0], grid[-1] = a, b
    return grid
