"""Warping profiles, model spaces and their volumes.

A model space is ``(0, inf) x S^{n-1}`` with metric ``dr^2 + f(r)^2 dw^2``;
its volume element is ``n * omega_n * f(r)**(n-1) dr``.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import quadrature
from .errors import (
    BadAnnulus,
    DivergentAtOrigin,
    IndeterminateError,
    InvalidProfile,
    InvalidSpace,
    OutOfTableRange,
)

PROFILE_KINDS = ("euclidean", "hyperbolic", "power", "exponential", "table")

_REQUIRED_PARAMS = {
    "euclidean": (),
    "hyperbolic": (),
    "power": ("b",),
    "exponential": ("rate",),
    "table": (),
}


@dataclass(frozen=True)
class WarpProfile:
    """Positive warping function ``f`` on ``(0, inf)``.

    Build instances with :func:`make_profile`. Calls are vectorized; the
    ``log`` and ``power`` methods stay finite where ``f`` itself would
    overflow (``sinh`` and ``exp`` tails).
    """

    kind: str
    params: dict = field(default_factory=dict)
    table_r: tuple = ()
    table_f: tuple = ()

    def __post_init__(self):
        if self.kind == "table":
            object.__setattr__(
                self, "_interp", PchipInterpolator(np.array(self.table_r), np.array(self.table_f))
            )

    def _check(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(~(r > 0)):
            raise InvalidProfile("warping profiles are only defined for r > 0")
        if self.kind == "table":
            lo, hi = self.table_r[0], self.table_r[-1]
            if np.any(r < lo) or np.any(r > hi):
                raise OutOfTableRange(
                    f"r outside tabulated range [{lo!r}, {hi!r}]; extrapolation is disabled"
                )
        return r

    def __call__(self, r):
        r = self._check(r)
        k = self.kind
        if k == "euclidean":
            return r.copy()
        if k == "hyperbolic":
            return np.sinh(r)
        if k == "power":
            return r ** self.params["b"]
        if k == "exponential":
            return np.expm1(self.params["rate"] * r)
        return self._interp(r)

    def derivative(self, r):
        """``f'(r)``; for tables the interpolant is C^1 so knots need no special case."""
        r = self._check(r)
        k = self.kind
        if k == "euclidean":
            return np.ones_like(r)
        if k == "hyperbolic":
            return np.cosh(r)
        if k == "power":
            b = self.params["b"]
            return b * r ** (b - 1.0)
        if k == "exponential":
            lam = self.params["rate"]
            return lam * np.exp(lam * r)
        return self._interp.derivative()(r)

    def log(self, r):
        r = self._check(r)
        k = self.kind
        if k == "euclidean":
            return np.log(r)
        if k == "hyperbolic":
            # log sinh r = r + log(1 - e^{-2r}) - log 2
            return np.where(
                r > 1.0,
                r + np.log1p(-np.exp(-2.0 * r)) - math.log(2.0),
                np.log(np.sinh(np.minimum(r, 1.0))),
            )
        if k == "power":
            return self.params["b"] * np.log(r)
        if k == "exponential":
            x = self.params["rate"] * r
            return np.where(x > 1.0, x + np.log1p(-np.exp(-x)), np.log(np.expm1(np.minimum(x, 1.0))))
        return np.log(self._interp(r))

    def power(self, r, e):
        """``f(r)**e`` evaluated through logarithms."""
        with np.errstate(over="ignore", under="ignore"):
            return np.exp(e * self.log(r))

    def as_dict(self):
        out = {"kind": self.kind, "params": dict(self.params)}
        if self.kind == "table":
            out["table"] = {"r": list(self.table_r), "f": list(self.table_f)}
        return out


def make_profile(kind, params=None, table=None):
    """Validated constructor for :class:`WarpProfile`.

    ``params`` holds ``b`` for the power kind (``f = r**b``) and ``rate`` for
    the exponential kind (``f = exp(rate*r) - 1``). The table kind takes
    ``table = (radii, values)`` or a mapping with keys ``r`` and ``f``.
    """
    if kind not in PROFILE_KINDS:
        raise InvalidProfile(f"unknown profile kind {kind!r}")
    params = dict(params or {})
    required = _REQUIRED_PARAMS[kind]
    if set(params) != set(required):
        raise InvalidProfile(f"{kind} profile takes params {list(required)}, got {sorted(params)}")
    for name in required:
        value = params[name]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InvalidProfile(f"parameter {name!r} must be a number")
        if not (math.isfinite(value) and value > 0):
            raise InvalidProfile(f"parameter {name!r} must be positive, got {value!r}")
        params[name] = float(value)
    if kind != "table":
        if table is not None:
            raise InvalidProfile("only the table kind accepts a table")
        return WarpProfile(kind, params)

    if table is None:
        raise InvalidProfile("table profile needs a table")
    if isinstance(table, dict):
        radii, values = table.get("r"), table.get("f")
    else:
        radii, values = table
    radii = np.asarray(radii, dtype=float)
    values = np.asarray(values, dtype=float)
    if radii.ndim != 1 or radii.shape != values.shape or radii.size < 2:
        raise InvalidProfile("table needs matching 1-d arrays r and f with at least two entries")
    if not (np.all(np.isfinite(radii)) and np.all(np.isfinite(values))):
        raise InvalidProfile("table entries must be finite")
    if radii[0] <= 0 or np.any(np.diff(radii) <= 0):
        raise InvalidProfile("table radii must be positive and strictly increasing")
    if np.any(values <= 0):
        raise InvalidProfile("table values must be strictly positive")
    return WarpProfile(kind, params, tuple(radii.tolist()), tuple(values.tolist()))


def euclidean():
    return make_profile("euclidean")


def hyperbolic():
    return make_profile("hyperbolic")


@dataclass(frozen=True)
class ModelSpace:
    profile: WarpProfile
    n: int
    p: float

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 2:
            raise InvalidSpace(f"dimension n must be an integer >= 2, got {self.n!r}")
        if not (math.isfinite(self.p) and self.p > 1):
            raise InvalidSpace(f"exponent p must be > 1, got {self.p!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "p", float(self.p))

    @property
    def omega_n(self):
        """Volume of the unit Euclidean n-ball."""
        return math.pi ** (self.n / 2) / math.gamma(self.n / 2 + 1)

    @property
    def sphere_area(self):
        return self.n * self.omega_n

    @property
    def q(self):
        """Capacity exponent ``(n-1)/(p-1)``."""
        return (self.n - 1) / (self.p - 1)

    def area_density(self, r):
        """``n omega_n f(r)**(n-1)``: area of the geodesic sphere of radius r."""
        return self.sphere_area * self.profile.power(r, self.n - 1)

    def capacity_density(self, r):
        """``f(r)**(-q)``, the integrand of the closed-form capacity."""
        return self.profile.power(r, -self.q)

    def label(self):
        prof = self.profile
        extra = ",".join(f"{k}={v:g}" for k, v in sorted(prof.params.items()))
        return f"{prof.kind}({extra}) n={self.n} p={self.p:g}"

    def as_dict(self):
        return {"profile": self.profile.as_dict(), "n": self.n, "p": self.p}


def _check_annulus(R1, R2):
    if not (R1 > 0 and math.isfinite(R1)):
        raise BadAnnulus(f"inner radius must be positive, got {R1!r}")
    if not R2 > R1:
        raise BadAnnulus(f"need R1 < R2, got ({R1!r}, {R2!r})")


def ball_volume(space, R, opts=None, full_output=False):
    """``n omega_n int_0^R f^{n-1}``.

    Integrability at the pole is decided on dyadic shells
    ``[R 2^{-j-1}, R 2^{-j}]``: the substitution ``s = R^2 / x`` turns them
    into the doubling cutoffs of :func:`quadrature.improper_integral`.
    """
    if not (R > 0 and math.isfinite(R)):
        raise BadAnnulus(f"ball radius must be positive and finite, got {R!r}")
    R = float(R)

    # scale by the outermost shell so the divergence threshold is relative
    scale, _, _ = quadrature.quad(space.area_density, 0.5 * R, R)
    if not (scale > 0 and math.isfinite(scale)):
        scale = 1.0

    def pulled_back(x):
        s = R * R / x
        return space.area_density(s) * (R / x) ** 2 / scale

    res = quadrature.improper_integral(pulled_back, R, opts)
    res = quadrature.QuadratureResult(
        res.value * scale, res.error_estimate * scale, res.classification, res.nodes_used, res.cutoff
    )
    if res.classification == quadrature.DIVERGED:
        raise DivergentAtOrigin(f"f^(n-1) is not integrable at the pole for {space.label()}")
    if res.classification == quadrature.INDETERMINATE:
        raise IndeterminateError("integrability of f^(n-1) at the pole is undecided", res)
    return res if full_output else res.value


def annulus_volume(space, R1, R2, full_output=False):
    """Volume of ``B(R2) minus B(R1)``, integrated directly over ``[R1, R2]``."""
    _check_annulus(R1, R2)
    if not math.isfinite(R2):
        raise BadAnnulus("annulus_volume needs a finite outer radius")
    value, err, nodes = quadrature.quad(space.area_density, float(R1), float(R2))
    if full_output:
        return quadrature.QuadratureResult(value, err, quadrature.CONVERGED, nodes, R2)
    return value
