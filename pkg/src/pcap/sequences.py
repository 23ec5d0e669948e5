"""Annulus sequences ``(R1^k, R2^k)`` and finite-sample tests on them.

Boundedness or decay of an infinite sequence cannot be decided from finitely
many terms; the tests below are explicit surrogates with fixed windows.
"""

from dataclasses import dataclass

import numpy as np

from .errors import BadSequence

STABILIZATION_WINDOW = 8
STABILIZATION_RTOL = 1e-6


@dataclass(frozen=True, eq=False)
class AnnulusSequence:
    inner: np.ndarray
    outer: np.ndarray
    name: str = "custom"

    def __post_init__(self):
        inner = np.asarray(self.inner, dtype=float)
        outer = np.asarray(self.outer, dtype=float)
        if inner.ndim != 1 or inner.shape != outer.shape or inner.size < 2:
            raise BadSequence("inner and outer radii must be 1-d arrays of equal length >= 2")
        if not (np.all(np.isfinite(inner)) and np.all(np.isfinite(outer))):
            raise BadSequence("sequence radii must be finite")
        if np.any(inner <= 0):
            raise BadSequence("inner radii must be positive")
        if np.any(outer <= inner):
            raise BadSequence("each outer radius must exceed its inner radius")
        if np.any(np.diff(inner) <= 0):
            raise BadSequence("inner radii must increase strictly (R1^k -> infinity)")
        object.__setattr__(self, "inner", inner)
        object.__setattr__(self, "outer", outer)

    def __len__(self):
        return self.inner.size

    def __iter__(self):
        return iter(zip(self.inner.tolist(), self.outer.tolist()))

    def as_dict(self):
        return {"name": self.name, "inner": self.inner.tolist(), "outer": self.outer.tolist()}


def dyadic(k_min=0, k_max=40, base=1.0):
    """``(base 2^k, base 2^(k+1))`` for ``k_min <= k <= k_max``."""
    k = np.arange(k_min, k_max + 1, dtype=float)
    return AnnulusSequence(base * 2.0 ** k, base * 2.0 ** (k + 1), "dyadic")


def dyadic_within(a, r_max, min_terms=2):
    """Dyadic annuli ``(a 2^k, a 2^(k+1))``, k >= 1, that fit inside ``[a, r_max]``."""
    k_top = int(np.floor(np.log2(r_max / a) + 1e-12)) - 1
    if k_top < min_terms:
        return None
    return dyadic(1, k_top, base=a)


def running_sup(values):
    return np.maximum.accumulate(np.asarray(values, dtype=float))


def stabilizes(values, window=STABILIZATION_WINDOW, rtol=STABILIZATION_RTOL):
    """True when the running supremum grew by at most ``rtol`` over the last ``window`` terms."""
    values = np.asarray(values, dtype=float)
    if values.size <= window or not np.all(np.isfinite(values)):
        return False
    sup = running_sup(values)
    before = sup[-window - 1]
    return bool(sup[-1] <= before * (1.0 + rtol) + 1e-300)


def tends_to_zero(values, factor=0.1):
    """Last-quarter maximum at most ``factor`` times the first-quarter maximum."""
    values = np.abs(np.asarray(values, dtype=float))
    if values.size < 4 or not np.all(np.isfinite(values)):
        return False
    q = values.size // 4
    head = values[:q].max()
    if head == 0:
        return bool(values.max() == 0)
    return bool(values[-q:].max() <= factor * head)
