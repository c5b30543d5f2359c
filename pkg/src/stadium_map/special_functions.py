"""Special functions and quadrature rules used by the Symm solver.

Everything here works in binary64 and is vectorised over its real argument
where that is useful to the solver.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import zeta

from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061

_SICI_SERIES_MAX = 4.0
_CF_MAX_ITER = 500


def _check_unit_interval(t):
    t = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t)) or np.any(np.abs(t) > 1.0):
        raise DomainError("Chebyshev argument must lie in [-1, 1]")
    return t


def _check_order(n):
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise DomainError(f"polynomial order must be a non-negative integer, got {n!r}")
    return int(n)


def chebyshev_T(n: int, t):
    """Chebyshev polynomial of the first kind by the three-term recurrence."""
    n = _check_order(n)
    t = _check_unit_interval(t)
    prev, cur = np.ones_like(t), t.copy()
    if n == 0:
        return prev[()] if prev.ndim == 0 else prev
    for _ in range(n - 1):
        prev, cur = cur, 2.0 * t * cur - prev
    return cur[()] if cur.ndim == 0 else cur


def chebyshev_U(n: int, t):
    """Chebyshev polynomial of the second kind; exact limits at ``t = +-1``."""
    n = _check_order(n)
    t = _check_unit_interval(t)
    prev, cur = np.ones_like(t), 2.0 * t
    if n == 0:
        return prev[()] if prev.ndim == 0 else prev
    for _ in range(n - 1):
        prev, cur = cur, 2.0 * t * cur - prev
    return cur[()] if cur.ndim == 0 else cur


# --- sine and cosine integrals -------------------------------------------------

def _sici_series(x):
    x2 = x * x
    si = x.copy()
    ci = np.zeros_like(x)
    term_s = x.copy()
    term_c = np.ones_like(x)
    for k in range(1, 40):
        term_s = -term_s * x2 / ((2 * k) * (2 * k + 1))
        term_c = -term_c * x2 / ((2 * k - 1) * (2 * k))
        si += term_s / (2 * k + 1)
        ci += term_c / (2 * k)
    with np.errstate(divide="ignore"):
        ci += EULER_GAMMA + np.log(x)
    return si, ci


def _sici_continued_fraction(x):
    # Lentz evaluation of E1(ix); then Ci = -Re E1(ix), Si = pi/2 + Im E1(ix).
    tiny = 1e-300
    b = 1.0 + 1j * x
    c = np.full_like(b, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    done = np.zeros(x.shape, dtype=bool)
    for i in range(2, _CF_MAX_ITER):
        a = -float((i - 1) ** 2)
        b = b + 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h = np.where(done, h, h * delta)
        done |= np.abs(delta - 1.0) < 1e-16
        if done.all():
            break
    else:
        raise RuntimeError("continued fraction for E1(ix) did not converge")
    h = (np.cos(x) - 1j * np.sin(x)) * h
    return math.pi / 2 + h.imag, -h.real


def sici(x):
    """Sine and cosine integrals ``(Si(x), Ci(x))`` for ``x >= 0``.

    Power series below x = 4, continued fraction for E1(ix) above. ``Ci(0)``
    is returned as ``-inf``.
    """
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0):
        raise DomainError("sine/cosine integral argument must be finite and >= 0")
    flat = np.atleast_1d(x).ravel()
    si = np.empty_like(flat)
    ci = np.empty_like(flat)
    small = flat <= _SICI_SERIES_MAX
    if small.any():
        si[small], ci[small] = _sici_series(flat[small])
    if (~small).any():
        si[~small], ci[~small] = _sici_continued_fraction(flat[~small])
    si = si.reshape(x.shape)
    ci = ci.reshape(x.shape)
    if x.ndim == 0:
        return float(si), float(ci)
    return si, ci


def sin_integral(x):
    return sici(x)[0]


def cos_integral(x):
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0):
        raise DomainError("cosine integral requires x > 0")
    return sici(x)[1]


# --- Clausen function ----------------------------------------------------------

@lru_cache(maxsize=1)
def _clausen_coefficients(terms: int = 40):
    # Cl2(x) = x - x log x + sum_k c_k x^(2k+1),  c_k = 2 zeta(2k) / ((2pi)^2k 2k (2k+1))
    k = np.arange(1, terms + 1)
    return 2.0 * zeta(2.0 * k) / ((2.0 * math.pi) ** (2 * k) * (2 * k) * (2 * k + 1))


def clausen_cl2(x):
    """Clausen function Cl2 on ``[0, 2 pi]``."""
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0) or np.any(x > 2 * math.pi):
        raise DomainError("Clausen argument must lie in [0, 2 pi]")
    flip = x > math.pi
    y = np.where(flip, 2 * math.pi - x, x)
    coeffs = _clausen_coefficients()
    y2 = y * y
    poly = np.zeros_like(y)
    for c in coeffs[::-1]:
        poly = poly * y2 + c
    with np.errstate(divide="ignore", invalid="ignore"):
        ylogy = np.where(y > 0, y * np.log(np.where(y > 0, y, 1.0)), 0.0)
    val = y - ylogy + y * y2 * poly
    val = np.where(flip, -val, val)
    return float(val) if val.ndim == 0 else val


# --- complete elliptic integral of the first kind ------------------------------

def _agm_complex(a: complex, b: complex, max_iter: int = 100) -> complex:
    close = False
    for _ in range(max_iter):
        a_next = 0.5 * (a + b)
        b_next = np.sqrt(a * b)
        # keep b' on the same side as a' (Re(b'/a') >= 0)
        if (b_next / a_next).real < 0:
            b_next = -b_next
        a, b = a_next, b_next
        if close:
            # quadratic convergence: one step past 1e-9 is at rounding level
            return 0.5 * (a + b)
        close = abs(a - b) <= 1e-9 * abs(a)
    raise RuntimeError("AGM iteration did not converge")


def elliptic_K_from_complement(kprime: complex) -> complex:
    """K(k) given the complementary modulus ``k' = sqrt(1 - k^2)``.

    Lets callers avoid the cancellation in ``1 - k^2`` when k is close to +-1.
    For ``|k'| < 1e-100`` the leading asymptotic ``log(4 / k')`` is exact in
    binary64.
    """
    kprime = complex(kprime)
    if kprime == 0:
        raise DomainError("K(k) diverges at k = +-1")
    if abs(kprime) < 1e-100:
        return complex(np.log(4.0 / kprime))
    return math.pi / (2.0 * _agm_complex(1.0 + 0j, kprime))


def elliptic_K_complex(k: complex) -> complex:
    """Complete elliptic integral of the first kind with modulus ``k``.

    ``K(k) = int_0^1 dt / sqrt((1 - t^2)(1 - k^2 t^2))`` for ``|k| <= 1``,
    ``k != +-1``, by the complex arithmetic-geometric mean.
    """
    k = complex(k)
    if not (math.isfinite(k.real) and math.isfinite(k.imag)):
        raise DomainError("modulus must be finite")
    if abs(k) > 1.0 + 1e-15:
        raise DomainError(f"|k| must be <= 1, got {abs(k)}")
    if k == 1 or k == -1:
        raise DomainError("K(k) diverges at k = +-1")
    return elliptic_K_from_complement(np.sqrt(1.0 - k * k))


# --- quadrature ----------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return len(self.nodes)

    def integrate(self, f):
        return np.dot(self.weights, f(self.nodes))


def gauss_chebyshev(M: int) -> QuadratureRule:
    """M-point rule for ``int_{-1}^{1} f(t) / sqrt(1 - t^2) dt``; nodes increasing."""
    if M < 1:
        raise DomainError("number of nodes must be positive")
    i = np.arange(M)[::-1]
    return QuadratureRule(np.cos((2 * i + 1) * math.pi / (2 * M)), np.full(M, math.pi / M))


@lru_cache(maxsize=16)
def _gauss_legendre(q: int):
    return leggauss(q)


def composite_gauss_legendre(edges, q: int) -> QuadratureRule:
    """q-point Gauss-Legendre on every panel ``[edges[i], edges[i+1]]``."""
    edges = np.asarray(edges, dtype=float)
    x, w = _gauss_legendre(q)
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    nodes = (half[:, None] * (x[None, :] + 1.0) + a[:, None]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return QuadratureRule(nodes, weights)
