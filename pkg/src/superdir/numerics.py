"""Special functions, quadrature and linear-solve primitives.

Everything here is a pure function of its inputs and safe to call from any
number of threads. The heavy lifting is delegated to numpy/scipy; this module
pins down the contracts (domains, error behaviour, accuracy budgets) the rest
of the toolkit relies on.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve
from scipy.special import sici


class SingularMatrixError(ValueError):
    """Linear system has no usable pivot (matrix numerically singular)."""


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre abscissae and weights on [-1, 1].

    Weights sum to 2 and nodes are strictly increasing, symmetric about 0.
    A rule of order n integrates polynomials of degree <= 2n - 1 exactly.
    """

    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def integrate(self, f, a: float = -1.0, b: float = 1.0) -> float:
        """Integrate callable f over [a, b] by mapping the rule."""
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        return half * float(np.sum(self.weights * f(mid + half * self.nodes)))


def sin_integral(x):
    """Sine integral Si(x) = integral of sin(t)/t from 0 to x.

    Odd function of x; absolute error below 1e-10 everywhere in the ranges
    this toolkit uses (|x| <= a few hundred). Accepts scalars or arrays.
    """
    si, _ = sici(x)
    return si if isinstance(si, np.ndarray) else float(si)


def cos_integral(x):
    """Cosine integral Ci(x) for x > 0.

    Ci(x) = gamma + ln(x) + integral of (cos(t) - 1)/t from 0 to x. Diverges
    to -inf as x -> 0+, hence the strict domain check. Accepts scalars or
    arrays.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0.0):
        raise ValueError(f"cos_integral requires x > 0, got {x!r}")
    _, ci = sici(x)
    return ci if isinstance(ci, np.ndarray) else float(ci)


def gauss_legendre(order: int) -> QuadratureRule:
    """Build the Gauss-Legendre rule of the given order (1..512)."""
    if not isinstance(order, (int, np.integer)) or not 1 <= order <= 512:
        raise ValueError(f"quadrature order must be an integer in [1, 512], got {order!r}")
    nodes, weights = np.polynomial.legendre.leggauss(int(order))
    return QuadratureRule(nodes=nodes, weights=weights, order=int(order))


def solve_complex_linear(a, b):
    """Solve A x = b for complex A via partial-pivoted LU.

    b may be a vector or a matrix of stacked right-hand sides. Raises
    SingularMatrixError when the smallest pivot falls below
    1e-14 times the largest row norm of A.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    with warnings.catch_warnings():
        # exact singularity is detected below and raised as a typed error
        warnings.simplefilter("ignore", LinAlgWarning)
        lu, piv = lu_factor(a, check_finite=False)
    row_norm = float(np.max(np.linalg.norm(a, axis=1))) if a.size else 0.0
    pivots = np.abs(np.diag(lu))
    if a.shape[0] and (row_norm == 0.0 or np.min(pivots) < 1e-14 * row_norm):
        raise SingularMatrixError(
            f"pivot {np.min(pivots):.3e} below threshold {1e-14 * row_norm:.3e}"
        )
    return lu_solve((lu, piv), b, check_finite=False)
