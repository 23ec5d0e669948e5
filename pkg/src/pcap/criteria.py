"""p-parabolicity of model spaces by every available criterion.

Iff-criteria (``milnor``, ``capacity_sequence``, ``capacity_limit``) decide
either way. Holopainen's integrals and the shell-volume condition are only
sufficient: their negative outcome is ``no_conclusion``, never
``nonparabolic``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import quadrature
from .capacity import capacity_from_integral, global_capacity
from .errors import BadSequence, EvaluationFailure, NumericalError, ValidationError
from .geometry import annulus_volume, ball_volume
from .sequences import AnnulusSequence, dyadic, running_sup, stabilizes

PARABOLIC = "parabolic"
NONPARABOLIC = "nonparabolic"
NO_CONCLUSION = "no_conclusion"
INDETERMINATE = "indeterminate"
VERDICTS = (PARABOLIC, NONPARABOLIC, NO_CONCLUSION, INDETERMINATE)

IFF_CRITERIA = ("milnor", "capacity_sequence", "capacity_limit")
SUFFICIENT_CRITERIA = ("holopainen_RV", "holopainen_Vprime", "pggb")
CRITERIA = ("milnor", "holopainen_RV", "holopainen_Vprime", "pggb", "capacity_sequence", "capacity_limit")

K_MAX = 40
SEQUENCE_CUTOFF_EXP = 1000      # capacity search stops at R2 = 2^1000
PGGB_STRATEGIES = ("dyadic", "user", "volume_growth")

_GL_X, _GL_W = np.polynomial.legendre.leggauss(30)


@dataclass(frozen=True)
class CriterionResult:
    verdict: str
    detail: dict = field(default_factory=dict)

    def as_dict(self):
        return {"verdict": self.verdict, **self.detail}


def _from_integral(res, on_diverge, on_converge):
    if res.classification == quadrature.DIVERGED:
        return on_diverge
    if res.classification == quadrature.CONVERGED:
        return on_converge
    return INDETERMINATE


def milnor_test(space, a=1.0):
    """Parabolic iff ``int_a^inf f^{-q} = inf``."""
    res = quadrature.improper_integral(space.capacity_density, float(a))
    return CriterionResult(_from_integral(res, PARABOLIC, NONPARABOLIC), {"a": float(a), "integral": res.as_dict()})


class _VolumeFunction:
    """Vectorized ``V(R)`` for ``R >= base``.

    Exact anchors at ``base 2^k`` (adaptive quadrature), then a 30-point
    Gauss-Legendre rule from the anchor below each query point.
    """

    def __init__(self, space, base=1.0):
        self.space = space
        self.base = float(base)
        self.anchors = [self.base]
        self.values = [ball_volume(space, self.base)]

    def _extend(self, k):
        while len(self.anchors) <= k:
            lo = self.anchors[-1]
            inc, _, _ = quadrature.quad(self.space.area_density, lo, 2.0 * lo)
            self.anchors.append(2.0 * lo)
            self.values.append(self.values[-1] + inc)

    def __call__(self, R):
        R = np.asarray(R, dtype=float)
        k = np.maximum(np.floor(np.log2(R / self.base)), 0).astype(int)
        self._extend(int(k.max()))
        lo = np.asarray(self.anchors)[k]
        half = 0.5 * (R - lo)
        x = (lo + half)[..., None] + half[..., None] * _GL_X
        with np.errstate(over="ignore", invalid="ignore"):
            part = half * (self.space.area_density(x) @ _GL_W)
        return np.asarray(self.values)[k] + part


def holopainen_tests(space, a=1.0):
    """``int (R/V)^{1/(p-1)}`` and ``int (1/V')^{1/(p-1)}``: divergence of either is sufficient."""
    e = 1.0 / (space.p - 1.0)
    out = {}
    try:
        V = _VolumeFunction(space, a)

        def rv(R):
            with np.errstate(over="ignore", divide="ignore"):
                return (R / V(R)) ** e

        res = quadrature.improper_integral(rv, float(a))
        out["holopainen_RV"] = CriterionResult(_from_integral(res, PARABOLIC, NO_CONCLUSION), {"integral": res.as_dict()})
    except (NumericalError, EvaluationFailure) as exc:
        out["holopainen_RV"] = CriterionResult(INDETERMINATE, {"reason": str(exc)})

    log_c = -e * math.log(space.sphere_area)

    def vprime(R):
        return np.exp(log_c - space.q * space.profile.log(R))

    res = quadrature.improper_integral(vprime, float(a))
    out["holopainen_Vprime"] = CriterionResult(
        _from_integral(res, PARABOLIC, NO_CONCLUSION), {"integral": res.as_dict()}
    )
    return out


def _pggb_values(space, r, s):
    vals = []
    for rk, sk in zip(r, s):
        vol = annulus_volume(space, rk, sk)
        val = (2.0 / (sk - rk)) ** space.p * vol
        if not math.isfinite(val):
            break
        vals.append(val)
    return np.asarray(vals)


def pggb_search(space, strategy="dyadic", sequences=None, k_max=K_MAX):
    """Search for shells with ``sup_k (2/(s_k-r_k))^p Vol(shell_k) < inf``.

    ``dyadic`` uses ``r_k = 2^k, s_k = 2^(k+1)`` for ``k <= k_max``; ``user``
    takes an :class:`AnnulusSequence` of ``(r_k, s_k)``; ``volume_growth``
    tracks ``V(2^k) / 2^(kp)`` (a ball-volume bound ``V(r_k) <= C r_k^p``
    makes the dyadic shells satisfy the condition). Parabolic when the
    running supremum stabilizes; ``no_conclusion`` otherwise.
    """
    if strategy not in PGGB_STRATEGIES:
        raise ValidationError(f"unknown pggb strategy {strategy!r}; expected one of {PGGB_STRATEGIES}")
    if strategy == "user":
        if not isinstance(sequences, AnnulusSequence):
            raise BadSequence("strategy 'user' needs an AnnulusSequence of (r_k, s_k)")
        if np.any(np.diff(sequences.outer) <= 0):
            raise BadSequence("s_k must increase")
        r, s = sequences.inner, sequences.outer
    else:
        seq = dyadic(0, k_max)
        r, s = seq.inner, seq.outer

    if strategy == "volume_growth":
        V = _VolumeFunction(space, float(r[0]))
        V._extend(len(r) - 1)
        vals = np.asarray(V.values) / r ** space.p
        finite = np.isfinite(vals)
        vals = vals[: int(np.argmin(finite)) if not finite.all() else vals.size]
        label = "ball_volume_ratio"
    else:
        vals = _pggb_values(space, r, s)
        label = "shell_quantity"
    m = vals.size
    ok = m == len(r) and stabilizes(vals)
    detail = {
        "strategy": strategy,
        "witness": {
            "r": r[:m].tolist(),
            "s": s[:m].tolist(),
            label: vals.tolist(),
            "running_sup": running_sup(vals).tolist() if m else [],
            "sup": float(vals.max()) if m else math.inf,
            "terms_evaluated": int(m),
        },
    }
    if m < len(r):
        detail["stopped"] = "non-finite shell quantity"
    return CriterionResult(PARABOLIC if ok else NO_CONCLUSION, detail)


def capacity_sequence_test(space, k_max=K_MAX, cutoff_exp=SEQUENCE_CUTOFF_EXP):
    """Constructive search for annuli with ``cap_p(R1^k, R2^k) < 1/k``.

    ``R1^k = 2^k`` and ``R2^k = 2^(k k')`` for ``k' = 2, 3, ...`` up to
    ``2^cutoff_exp``. Success for every ``k <= k_max`` gives parabolic. On
    the first failure the search is reported exhausted; the verdict is then
    nonparabolic if the global capacity is positive, indeterminate otherwise.
    """
    inner, outer, caps = [], [], []
    failed = None
    for k in range(1, k_max + 1):
        integral = 0.0
        found = False
        kk = 2
        while k * kk <= cutoff_exp:
            lo, hi = 2.0 ** (k * (kk - 1)), 2.0 ** (k * kk)
            inc, _, _ = quadrature.quad(space.capacity_density, lo, hi)
            integral += inc
            cap = capacity_from_integral(space, integral)
            if cap < 1.0 / k:
                inner.append(2.0 ** k)
                outer.append(hi)
                caps.append(cap)
                found = True
                break
            if inc <= np.finfo(float).eps * integral:
                break       # the integral has converged: cap cannot drop further
            kk += 1
        if not found:
            failed = k
            break
    witness = {"R1": inner, "R2": outer, "cap": caps, "sup": max(caps) if caps else None}
    if failed is None:
        return CriterionResult(PARABOLIC, {"witness": witness, "search": "complete"})
    detail = {"witness": witness, "search": "search exhausted", "failed_at_k": failed}
    try:
        cap = global_capacity(space, 1.0)
    except NumericalError as exc:
        detail["reason"] = str(exc)
        return CriterionResult(INDETERMINATE, detail)
    detail["global_capacity"] = cap.value
    return CriterionResult(NONPARABOLIC if cap.classification == "positive" else INDETERMINATE, detail)


def capacity_limit_test(space, R1=1.0):
    try:
        cap = global_capacity(space, R1)
    except NumericalError as exc:
        return CriterionResult(INDETERMINATE, {"reason": str(exc)})
    verdict = PARABOLIC if cap.classification == "zero" else NONPARABOLIC
    return CriterionResult(verdict, {"R1": float(R1), "value": cap.value, "error_estimate": cap.error_estimate})


@dataclass(frozen=True)
class ParabolicityVerdict:
    space: dict
    results: dict
    aggregate: str
    consistent: bool

    @property
    def per_criterion(self):
        return {name: self.results[name].verdict for name in CRITERIA}

    @property
    def witnesses(self):
        return {
            "pggb": self.results["pggb"].detail.get("witness"),
            "capacity_sequence": self.results["capacity_sequence"].detail.get("witness"),
        }

    def as_dict(self):
        return {
            "space": self.space,
            "per_criterion": self.per_criterion,
            "aggregate": self.aggregate,
            "consistent": self.consistent,
            "details": {name: self.results[name].as_dict() for name in CRITERIA},
        }


def _guard(func, *args):
    try:
        return func(*args)
    except (NumericalError, EvaluationFailure) as exc:
        return CriterionResult(INDETERMINATE, {"reason": str(exc)})


def aggregate_verdicts(per_criterion):
    """Consensus of the iff-criteria and the consistency flag."""
    decided = {per_criterion[c] for c in IFF_CRITERIA} - {INDETERMINATE}
    consistent = len(decided) <= 1
    if any(per_criterion[c] == PARABOLIC for c in SUFFICIENT_CRITERIA) and NONPARABOLIC in decided:
        consistent = False
    if not decided or len(decided) > 1:
        return INDETERMINATE, consistent
    return decided.pop(), consistent


def classify(space, pggb_strategy="dyadic", pggb_sequences=None):
    """Run every criterion; indeterminate or failing criteria are recorded, not raised."""
    results = {"milnor": _guard(milnor_test, space)}
    holo = _guard(holopainen_tests, space)
    if isinstance(holo, CriterionResult):
        holo = {"holopainen_RV": holo, "holopainen_Vprime": holo}
    results.update(holo)
    results["pggb"] = _guard(pggb_search, space, pggb_strategy, pggb_sequences)
    results["capacity_sequence"] = _guard(capacity_sequence_test, space)
    results["capacity_limit"] = _guard(capacity_limit_test, space)
    per = {name: results[name].verdict for name in CRITERIA}
    aggregate, consistent = aggregate_verdicts(per)
    return ParabolicityVerdict(space.as_dict(), results, aggregate, consistent)
