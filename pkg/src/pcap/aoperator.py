"""Scalar nonlinearities ``A`` of quasilinear operators ``div(A(|Du|) Du/|Du|)``.

An operator carries claimed structure constants (alpha, beta, D1, D2) in the
sense

    A(0) = 0, A(s) > 0 for s > 0,
    alpha A(s) <= s A'(s) <= beta A(s),
    D1 s^(p-1) <= A(s) <= D2 s^(p-1),

with ``alpha`` in (0, 1] and ``beta >= 1``. The checks here sample these on
grids; they certify the artifact, they do not prove the inequalities.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import BracketFailure, ConditionViolated, InvalidOperator, NonMonotone

OPERATOR_KINDS = ("p_power", "scaled_p_power", "blended", "custom")


@dataclass(frozen=True)
class Constants:
    alpha: float
    beta: float
    D1: float
    D2: float

    def as_dict(self):
        return {"alpha": self.alpha, "beta": self.beta, "D1": self.D1, "D2": self.D2}


@dataclass(frozen=True)
class AOperator:
    kind: str
    p: float
    claimed: Constants
    params: dict = field(default_factory=dict)
    func: Optional[Callable] = None
    dfunc: Optional[Callable] = None

    def __post_init__(self):
        if self.kind not in OPERATOR_KINDS:
            raise InvalidOperator(f"unknown operator kind {self.kind!r}")
        if not (math.isfinite(self.p) and self.p > 1):
            raise InvalidOperator(f"p must exceed 1, got {self.p!r}")
        c = self.claimed
        if not 0 < c.alpha <= 1:
            raise InvalidOperator(f"alpha must lie in (0, 1], got {c.alpha!r}")
        if not c.beta >= 1:
            raise InvalidOperator(f"beta must be >= 1, got {c.beta!r}")
        if not (c.D1 > 0 and c.D2 >= c.D1):
            raise InvalidOperator(f"need 0 < D1 <= D2, got D1={c.D1!r}, D2={c.D2!r}")
        if self.kind == "custom" and self.func is None:
            raise InvalidOperator("custom operators need an evaluation function")

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        k, pm1 = self.kind, self.p - 1.0
        if k == "p_power":
            return s ** pm1
        if k == "scaled_p_power":
            return self.params["kappa"] * s ** pm1
        if k == "blended":
            th = self.params["theta"]
            return s ** pm1 * (1.0 + th * s / (1.0 + s))
        return np.asarray(self.func(s), dtype=float)

    def derivative(self, s):
        s = np.asarray(s, dtype=float)
        k, pm1 = self.kind, self.p - 1.0
        if k == "p_power":
            return pm1 * s ** (pm1 - 1.0)
        if k == "scaled_p_power":
            return self.params["kappa"] * pm1 * s ** (pm1 - 1.0)
        if k == "blended":
            th = self.params["theta"]
            g = 1.0 + th * s / (1.0 + s)
            return pm1 * s ** (pm1 - 1.0) * g + s ** pm1 * th / (1.0 + s) ** 2
        if self.dfunc is not None:
            return np.asarray(self.dfunc(s), dtype=float)
        h = s * 1e-6
        return (self.func(s + h) - self.func(s - h)) / (2.0 * h)

    def field(self, v):
        """The induced vector map ``v -> A(|v|) v / |v|`` (rows of ``v``), zero at 0."""
        v = np.asarray(v, dtype=float)
        norm = np.linalg.norm(v, axis=-1, keepdims=True)
        safe = np.where(norm > 0, norm, 1.0)
        return np.where(norm > 0, self(safe) / safe * v, 0.0)

    def as_dict(self):
        return {
            "kind": self.kind,
            "p": self.p,
            "params": dict(self.params),
            "claimed_constants": self.claimed.as_dict(),
        }


def p_power(p):
    return AOperator("p_power", p, Constants(min(1.0, p - 1), max(1.0, p - 1), 1.0, 1.0))


def scaled_p_power(p, kappa):
    if not kappa > 0:
        raise InvalidOperator("kappa must be positive")
    return AOperator(
        "scaled_p_power", p, Constants(min(1.0, p - 1), max(1.0, p - 1), kappa, kappa),
        {"kappa": float(kappa)},
    )


def blended(p, theta):
    """``A(s) = s^(p-1) (1 + theta s/(1+s))``; satisfies the conditions for theta in [0, 1]."""
    if not 0 <= theta <= 1:
        raise InvalidOperator("blended operators need theta in [0, 1]")
    # s A'/A = (p-1) + theta s / ((1+s)(1+s+theta s)), and the extra term is < theta
    return AOperator(
        "blended", p,
        Constants(min(1.0, p - 1), max(1.0, p - 1 + theta), 1.0, 1.0 + theta),
        {"theta": float(theta)},
    )


def custom(func, p, claimed, derivative=None):
    if not isinstance(claimed, Constants):
        claimed = Constants(**claimed)
    return AOperator("custom", p, claimed, {}, func, derivative)


def from_spec(spec):
    """Build an operator from a config mapping ``{kind, p, params, claimed_constants}``."""
    kind, p, params = spec["kind"], float(spec["p"]), dict(spec.get("params", {}))
    if kind == "p_power":
        op = p_power(p)
    elif kind == "scaled_p_power":
        op = scaled_p_power(p, params["kappa"])
    elif kind == "blended":
        op = blended(p, params["theta"])
    else:
        raise InvalidOperator(f"operator kind {kind!r} cannot be built from a config")
    claimed = spec.get("claimed_constants")
    if claimed is not None:
        op = AOperator(op.kind, op.p, Constants(**claimed), op.params)
    return op


def log_grid(s_min=1e-8, s_max=1e8, num=512):
    return np.geomspace(s_min, s_max, num)


def validate_conditions(A, grid=None, strict=True, slack=1e-9):
    """Sample the structure conditions on a log grid.

    Returns a report with the worst ratio per condition, pass flags against
    the claimed constants, and the tightest empirical constants. With
    ``strict`` a failing condition raises :class:`ConditionViolated`.
    """
    s = log_grid() if grid is None else np.asarray(grid, dtype=float)
    a = A(s)
    da = A.derivative(s)
    growth = s * da / a
    ratio = a / s ** (A.p - 1.0)
    a0 = float(A(np.array([0.0]))[0])
    c = A.claimed

    def worst(values, pick):
        i = int(pick(values))
        return float(s[i]), float(values[i])

    checks = {
        "A_zero": (0.0, a0, a0 == 0.0),
        "A_positive": (*worst(a, np.argmin), bool(np.all(a > 0))),
        "lower_growth": (*worst(growth, np.argmin), bool(np.all(growth >= c.alpha * (1 - slack)))),
        "upper_growth": (*worst(growth, np.argmax), bool(np.all(growth <= c.beta * (1 + slack)))),
        "lower_bound": (*worst(ratio, np.argmin), bool(np.all(ratio >= c.D1 * (1 - slack)))),
        "upper_bound": (*worst(ratio, np.argmax), bool(np.all(ratio <= c.D2 * (1 + slack)))),
    }
    report = {
        "conditions": {
            name: {"worst_s": ws, "worst_ratio": wr, "passed": ok}
            for name, (ws, wr, ok) in checks.items()
        },
        "empirical": {
            "alpha": float(growth.min()),
            "beta": float(growth.max()),
            "D1": float(ratio.min()),
            "D2": float(ratio.max()),
        },
        "claimed": c.as_dict(),
        "increasing": bool(np.all(np.diff(a) > 0)),
        "grid_size": int(s.size),
    }
    report["passed"] = all(v["passed"] for v in report["conditions"].values())
    if strict and not report["passed"]:
        name, entry = next((k, v) for k, v in report["conditions"].items() if not v["passed"])
        raise ConditionViolated(name, entry["worst_s"], entry["worst_ratio"])
    return report


def random_pairs(n, samples, seed):
    """Seeded vector pairs with magnitudes spread over six decades."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((2, samples, n))
    v *= 10.0 ** rng.uniform(-3.0, 3.0, size=(2, samples, 1))
    return v[0], v[1]


def structure_inequalities_check(A, n=3, samples=10_000, seed=0, pairs=None):
    """Empirical constants of the monotonicity and Lipschitz inequalities.

    For each pair ``(v1, v2)`` the monotonicity ratio is
    ``(F(v2)-F(v1)).(v2-v1) / ((|v1|+|v2|)^(p-2) |v2-v1|^2)`` and the
    Lipschitz ratio ``|F(v2)-F(v1)| / ((|v1|+|v2|)^(p-2) |v2-v1|)`` with
    ``F = A.field``; ``c1`` is the minimum of the former and ``c2`` the
    maximum of the latter. The p >= 2 coercivity ratio (denominator
    ``|v2-v1|^p``) and the p <= 2 Hoelder ratio (denominator
    ``|v2-v1|^(p-1)``) are reported when they apply.
    """
    if pairs is None:
        v1, v2 = random_pairs(n, samples, seed)
    else:
        v1, v2 = (np.atleast_2d(np.asarray(x, dtype=float)) for x in pairs)
    p = A.p
    d = v2 - v1
    keep = np.linalg.norm(d, axis=1) > 0
    v1, v2, d = v1[keep], v2[keep], d[keep]
    F1, F2 = A.field(v1), A.field(v2)
    dF = F2 - F1
    inner = np.einsum("ij,ij->i", dF, d)
    if np.any(inner <= 0):
        i = int(np.argmin(inner))
        raise NonMonotone(v1[i].tolist(), v2[i].tolist(), float(inner[i]))
    nd = np.linalg.norm(d, axis=1)
    ndF = np.linalg.norm(dF, axis=1)
    scale = (np.linalg.norm(v1, axis=1) + np.linalg.norm(v2, axis=1)) ** (p - 2.0)
    mono = inner / (scale * nd ** 2)
    lip = ndF / (scale * nd)
    report = {
        "pairs": int(inner.size),
        "c1": float(mono.min()),
        "c2": float(lip.max()),
        "monotone": True,
    }
    report["positive_c1"] = report["c1"] > 0
    report["finite_c2"] = bool(np.isfinite(report["c2"]))
    if p >= 2:
        report["coercivity_c1"] = float((inner / nd ** p).min())
    if p <= 2:
        report["hoelder_c2"] = float((ndF / nd ** (p - 1.0)).max())

    # |F(v)| against D1 |v|^(p-1) and D2 |v|^(p-1)
    vs = np.concatenate([v1, v2])
    nv = np.linalg.norm(vs, axis=1)
    nz = nv > 0
    size = np.linalg.norm(A.field(vs[nz]), axis=1) / nv[nz] ** (p - 1.0)
    c = A.claimed
    report["field_bounds"] = {
        "min_ratio": float(size.min()),
        "max_ratio": float(size.max()),
        "passed": bool(np.all(size >= c.D1 * (1 - 1e-9)) and np.all(size <= c.D2 * (1 + 1e-9))),
    }
    return report


def a_inverse(A, t, max_iter=200):
    """Solve ``A(s) = t`` for ``s >= 0`` by bisection (vectorized over ``t``).

    The bracket ``[(t/D2)^(1/(p-1)), (t/D1)^(1/(p-1))]`` comes from the
    claimed bounds; the loop runs until the bracket collapses to adjacent
    floats, so the result is exact to working precision.
    """
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise ValueError("a_inverse needs finite t >= 0")
    e = 1.0 / (A.p - 1.0)
    lo = (t / A.claimed.D2) ** e
    hi = (t / A.claimed.D1) ** e
    pos = t > 0
    if pos.any():
        f_lo, f_hi = A(lo[pos]) - t[pos], A(hi[pos]) - t[pos]
        tiny = 1e-12 * t[pos]
        if np.any(f_lo > tiny) or np.any(f_hi < -tiny):
            raise BracketFailure("claimed D1/D2 do not bracket A^{-1}(t)")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        active = (mid > lo) & (mid < hi) & (hi - lo > 0)
        if not active.any():
            break
        below = A(mid) < t
        lo = np.where(active & below, mid, lo)
        hi = np.where(active & ~below, mid, hi)
    s = 0.5 * (lo + hi)
    return float(s[0]) if scalar else s
