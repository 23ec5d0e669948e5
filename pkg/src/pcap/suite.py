"""The model suite of warped-product spaces used for cross-criterion checks."""

from .geometry import ModelSpace, make_profile


def model_suite():
    """Euclidean ``n in {2,3,4}`` with ``p in {1.5, 2, 3, n}``; hyperbolic
    ``n in {2,3}``; power ``b in {0.5, 1, 2}``; exponential rate 1 (all
    others at ``p = 2``, ``n = 2`` unless stated). 16 spaces."""
    spaces = []
    for n in (2, 3, 4):
        for p in sorted({1.5, 2.0, 3.0, float(n)}):
            spaces.append(ModelSpace(make_profile("euclidean"), n, p))
    for n in (2, 3):
        spaces.append(ModelSpace(make_profile("hyperbolic"), n, 2.0))
    for b in (0.5, 1.0, 2.0):
        spaces.append(ModelSpace(make_profile("power", {"b": b}), 2, 2.0))
    spaces.append(ModelSpace(make_profile("exponential", {"rate": 1.0}), 2, 2.0))
    return spaces
