"""Hot loops of the discrete p-Dirichlet energy minimizer.

Every kernel exists twice: a numba version (explicit loops, Thomas solve) and
a numpy version (vectorized, LAPACK banded solve). ``KERNELS`` holds the set
chosen by :data:`pcap.options.BACKEND`; both sets stay importable so tests and
the benchmark can compare them.

Unknowns are the full nodal vector ``v`` (boundary nodes included). ``h`` are
the cell widths and ``w`` the cell integrals of the volume weight. The
regularized cell integrand is ``phi(s) = (eps**2 + s**2)**(p/2)`` with
``s`` the cell slope.
"""

from types import SimpleNamespace

import numpy as np
from scipy.linalg import solveh_banded

from . import options


# --------------------------------------------------------------------------
# numpy
# --------------------------------------------------------------------------
def _np_energy(v, h, w, p, eps):
    s = np.diff(v) / h
    return float(np.sum(w * (eps * eps + s * s) ** (0.5 * p)))


def _np_gradient_hessian(v, h, w, p, eps):
    s = np.diff(v) / h
    r2 = eps * eps + s * s
    t = r2 ** (0.5 * p - 2.0)
    d1 = w * p * s * (t * r2) / h
    d2 = w * p * t * (eps * eps + (p - 1.0) * s * s) / (h * h)
    grad = d1[:-1] - d1[1:]
    diag = d2[:-1] + d2[1:]
    off = -d2[1:-1]
    return grad, diag, off


def _np_solve_tridiagonal(diag, off, rhs):
    m = diag.shape[0]
    if m == 1:
        return rhs / diag
    ab = np.zeros((2, m))
    ab[0, 1:] = off
    ab[1] = diag
    try:
        return solveh_banded(ab, rhs, check_finite=False)
    except np.linalg.LinAlgError:
        # singular to working precision; the caller falls back like on numba's inf/nan
        return np.full(m, np.nan)


NUMPY = SimpleNamespace(
    name="numpy",
    energy=_np_energy,
    gradient_hessian=_np_gradient_hessian,
    solve_tridiagonal=_np_solve_tridiagonal,
)


# --------------------------------------------------------------------------
# numba
# --------------------------------------------------------------------------
def _build_numba():
    from numba import njit

    @njit(**options.NUMBA_OPTS)
    def energy(v, h, w, p, eps):
        total = 0.0
        e2 = eps * eps
        for i in range(h.shape[0]):
            s = (v[i + 1] - v[i]) / h[i]
            total += w[i] * (e2 + s * s) ** (0.5 * p)
        return total

    @njit(**options.NUMBA_OPTS)
    def gradient_hessian(v, h, w, p, eps):
        n_cells = h.shape[0]
        m = n_cells - 1
        grad = np.zeros(m)
        diag = np.zeros(m)
        off = np.zeros(max(m - 1, 0))
        e2 = eps * eps
        for i in range(n_cells):
            s = (v[i + 1] - v[i]) / h[i]
            r2 = e2 + s * s
            t = r2 ** (0.5 * p - 2.0)     # one pow per cell: r2^(p/2-1) = t * r2
            d1 = w[i] * p * s * (t * r2) / h[i]
            d2 = w[i] * p * t * (e2 + (p - 1.0) * s * s) / (h[i] * h[i])
            # cell i couples interior unknowns i-1 (left node) and i (right node)
            if i >= 1:
                grad[i - 1] -= d1
                diag[i - 1] += d2
            if i < m:
                grad[i] += d1
                diag[i] += d2
            if 1 <= i < m:
                off[i - 1] = -d2
        return grad, diag, off

    @njit(**options.NUMBA_OPTS)
    def solve_tridiagonal(diag, off, rhs):
        m = diag.shape[0]
        c = np.empty(m)
        d = np.empty(m)
        c[0] = off[0] / diag[0] if m > 1 else 0.0
        d[0] = rhs[0] / diag[0]
        for i in range(1, m):
            denom = diag[i] - off[i - 1] * c[i - 1]
            c[i] = off[i] / denom if i < m - 1 else 0.0
            d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / denom
        x = np.empty(m)
        x[m - 1] = d[m - 1]
        for i in range(m - 2, -1, -1):
            x[i] = d[i] - c[i] * x[i + 1]
        return x

    return SimpleNamespace(
        name="numba",
        energy=energy,
        gradient_hessian=gradient_hessian,
        solve_tridiagonal=solve_tridiagonal,
    )


_NUMBA = None


def get_kernels(name):
    global _NUMBA
    if name == "numpy":
        return NUMPY
    if name == "numba":
        if not options.HAVE_NUMBA:  # pragma: no cover
            raise ImportError("numba is not installed")
        if _NUMBA is None:
            _NUMBA = _build_numba()
        return _NUMBA
    raise ValueError(f"unknown backend {name!r}")


KERNELS = get_kernels(options.BACKEND)
