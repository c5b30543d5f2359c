"""Independent reference values used by several test modules."""
import math

import numpy as np
from scipy.integrate import quad


def self_coefficient_oracle(geom, j, m, n, nu):
    """``C_{jmjn}`` by singularity-subtracted adaptive quadrature.

    The integral in ``theta`` of ``cos(n theta) log|zeta_j(tau_m) - zeta_j(cos theta)|``
    is split as ``log|alpha - theta|`` (handled by QUADPACK's algebraic-log
    weights on each side of ``alpha``) plus a smooth remainder.
    """
    alpha = (2 * m + 1) * math.pi / (2 * nu + 2)
    f = lambda th: math.cos(n * th)
    singular = (quad(f, 0.0, alpha, weight="alg-logb", wvar=(0, 0), epsabs=1e-13, epsrel=1e-12, limit=400)[0]
                + quad(f, alpha, math.pi, weight="alg-loga", wvar=(0, 0), epsabs=1e-13, epsrel=1e-12,
                       limit=400)[0])
    if j % 2 == 0 or not geom.is_stadium:
        # |c (cos a - cos th)| = 2c |sin((a+th)/2)| |sin((th-a)/2)|
        scale = geom.arc_length_scale(j)
        rest = lambda th: math.log(scale * abs(math.sin(0.5 * (alpha + th)))) + math.log(np.sinc((th - alpha) / (2 * math.pi)))
    else:
        # chord of the unit circle: 2 |sin((a-th)/2)|
        rest = lambda th: math.log(np.sinc((th - alpha) / (2 * math.pi)))
    regular = quad(lambda th: f(th) * rest(th), 0.0, math.pi, points=[alpha], epsabs=1e-13, epsrel=1e-12,
                   limit=400)[0]
    return singular + regular
