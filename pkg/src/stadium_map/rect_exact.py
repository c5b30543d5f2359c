"""Exact harmonic measure of the ends of a ``2L x 2`` rectangle.

The measure ``p`` of the two vertical ends, seen from the centre, is the root
in ``(0, 1)`` of::

    g(p) = p pi / 2 + arg K(exp(i p pi)) - arccot(L)

with ``K`` the complete elliptic integral of the first kind (modulus
convention). ``g(1 - e; L) = -g(e; 1/L)``, so only the branch
``p = e <= 1/2`` (``L >= 1``) is solved directly, in the variable
``s = log(e)``. That keeps the complementary modulus free of cancellation and
lets long rectangles resolve measures far below ``1e-16``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, SolverError
from .special_functions import elliptic_K_from_complement

# below this s = log(p) the complementary modulus is < 1e-100 and K = log(4/k')
_ASYMPTOTIC_LOG_P = -450.0


@dataclass(frozen=True)
class RectMeasureQuery:
    L: float
    tol: float = 1e-12


def arg_K_unit_circle(p: float) -> float:
    """``arg K(exp(i p pi))`` for ``p`` in ``(0, 1)``."""
    if not 0.0 < p < 1.0:
        raise DomainError("p must lie in (0, 1)")
    if p <= 0.5:
        return _arg_K_small(math.log(p))
    return -_arg_K_small(math.log1p(-p))


def _arg_K_small(s: float) -> float:
    # k'^2 = 1 - exp(2 i pi e) = -2i exp(i pi e) sin(pi e), with e = exp(s) <= 1/2
    if s < _ASYMPTOTIC_LOG_P:
        log_abs_kprime = 0.5 * (math.log(2.0 * math.pi) + s)
        return math.atan2(math.pi / 4.0, math.log(4.0) - log_abs_kprime)
    e = math.exp(s)
    kprime = cmath.sqrt(-2j * cmath.exp(1j * math.pi * e) * math.sin(math.pi * e))
    return cmath.phase(elliptic_K_from_complement(kprime))


def _g_small(s: float, arccot_L: float) -> float:
    e = math.exp(s)
    return e * math.pi / 2.0 + _arg_K_small(s) - arccot_L


def residual(p: float, L: float) -> float:
    """``g(p)``; zero at the end measure of the ``2L x 2`` rectangle."""
    return p * math.pi / 2.0 + arg_K_unit_circle(p) - math.atan2(1.0, L)


def _solve_small(arccot_L: float, tol: float) -> float:
    """Root ``s = log(p)`` of ``g`` for ``arccot_L <= pi/4``."""
    hi = math.log(0.5)
    g_hi = _g_small(hi, arccot_L)
    if abs(g_hi) <= tol:
        return hi
    # arg K ~ (pi/4) / (log 4 - log|k'|) as p -> 0; start the lower bracket past that root
    lo = -2.0 * (math.pi / (4.0 * arccot_L)) - 10.0
    g_lo = _g_small(lo, arccot_L)
    for _ in range(8):
        if g_lo < 0:
            break
        lo *= 2.0
        g_lo = _g_small(lo, arccot_L)
    if not (g_lo < 0 < g_hi):
        raise SolverError(f"end-measure equation is not bracketed (g={g_lo:.3e}, {g_hi:.3e})")
    s = brentq(_g_small, lo, hi, args=(arccot_L,), xtol=1e-15, rtol=4 * np.finfo(float).eps,
               maxiter=200)
    if abs(_g_small(s, arccot_L)) > tol:
        raise SolverError(f"end-measure root misses tolerance: |g| = {abs(_g_small(s, arccot_L)):.3e}")
    return s


def rect_end_measure(L, tol: float = 1e-12) -> float:
    """Harmonic measure at the centre of the vertical ends of the ``2L x 2`` rectangle.

    Accepts a float or a :class:`RectMeasureQuery`. For ``L`` beyond a few
    hundred the true value underflows and 0.0 is returned; symmetrically 1.0
    for tiny ``L``.
    """
    if isinstance(L, RectMeasureQuery):
        L, tol = L.L, L.tol
    L = float(L)
    if not (math.isfinite(L) and L > 0):
        raise DomainError(f"L must be finite and positive, got {L!r}")
    if L >= 1.0:
        return math.exp(_solve_small(math.atan2(1.0, L), tol))
    return -math.expm1(_solve_small(math.atan2(1.0, 1.0 / L), tol))
