"""Chebyshev-weighted collocation for Symm's integral equation.

The source density on arc ``k`` is ``phi_k(t) / sqrt(1 - t^2)`` with
``phi_k = sum_n phi_kn T_n``. Collocating at the Chebyshev points of every arc
gives ``4 nu + 4`` equations; together with the unit-mass condition
``pi sum_k phi_k0 = 1`` the overdetermined system is solved by least squares.

All integrals are taken in the angle variable ``t = cos(theta)``, where the
Chebyshev weight disappears and ``T_n(t) = cos(n theta)``.

Matrix layout: row ``j (nu + 1) + m`` is collocation point ``m`` on arc ``j``;
column ``k (nu + 1) + n`` is coefficient ``phi_kn``. The last row is the
normalisation.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, DomainError, SolverError
from .geometry import N_ARCS, DomainGeometry, Shape
from .special_functions import (
    QuadratureRule,
    clausen_cl2,
    composite_gauss_legendre,
    sici,
)

log = logging.getLogger(__name__)

MIN_NU = 4
MAX_QUADRATURE_NODES = 2**20
_GRADING_RATIO = 0.2


@dataclass(frozen=True)
class CollocationConfig:
    """Collocation order and quadrature controls.

    ``quadrature_points`` is the Gauss-Legendre order on each panel of the
    composite rule used for every non-closed-form integral.
    """

    nu: int
    quadrature_points: int = 20
    quadrature_tol: float = 1e-10

    def __post_init__(self):
        if isinstance(self.nu, bool) or int(self.nu) != self.nu or self.nu < MIN_NU:
            raise DomainError(f"collocation order nu must be an integer >= {MIN_NU}, got {self.nu!r}")
        if int(self.quadrature_points) < 4:
            raise DomainError("quadrature_points must be at least 4")
        if not (0 < self.quadrature_tol <= 1e-8):
            raise DomainError("quadrature_tol must lie in (0, 1e-8]")
        object.__setattr__(self, "nu", int(self.nu))
        object.__setattr__(self, "quadrature_points", int(self.quadrature_points))


@dataclass(frozen=True)
class CollocationPointSet:
    """Chebyshev points ``tau_m = cos(alpha_m)``, ``alpha_m = (2m+1) pi / (2 nu + 2)``.

    The same set is used on every arc.
    """

    nu: int
    tau: np.ndarray
    alpha: np.ndarray


def collocation_points(nu: int) -> CollocationPointSet:
    if int(nu) != nu or nu < 1:
        raise DomainError(f"nu must be a positive integer, got {nu!r}")
    nu = int(nu)
    alpha = (2 * np.arange(nu + 1) + 1) * math.pi / (2 * nu + 2)
    return CollocationPointSet(nu, np.cos(alpha), alpha)


# --- quadrature rule in theta --------------------------------------------------

def theta_rule(nu: int, L: float, q: int = 20, refine: int = 0) -> QuadratureRule:
    """Composite Gauss-Legendre rule on the panels of :func:`theta_edges`."""
    return composite_gauss_legendre(theta_edges(nu, L, refine), q)


def theta_edges(nu: int, L: float, refine: int = 0) -> np.ndarray:
    """Panel edges on ``[0, pi]`` for collocation order ``nu``.

    Uniform panels resolve ``cos(n theta)`` for ``n <= nu``; both ends are
    geometrically graded down to a scale well below the distance between the
    outermost collocation point and the arc corner, where the log kernel of a
    neighbouring arc is nearly singular. Each refinement level halves the
    uniform panels and adds one grading level.
    """
    n_uniform = max(8, math.ceil(nu / 6)) * 2**refine
    h0 = math.pi / n_uniform
    smallest = 1e-3 * min(1.0, L) * (math.pi / (2 * nu + 2)) ** 2 * _GRADING_RATIO**refine
    grades = [h0]
    while grades[-1] > smallest:
        grades.append(grades[-1] * _GRADING_RATIO)
    left = np.array([0.0] + grades[::-1])
    interior = np.linspace(0.0, math.pi, n_uniform + 1)[1:-1]
    return np.unique(np.concatenate([left, interior, math.pi - left]))


# --- closed-form self-arc coefficients -----------------------------------------

def straight_self_block(nu: int, half_length: float) -> np.ndarray:
    """``C_{jmjn}`` for a straight arc of half-length ``half_length``.

    ``-(pi/n) cos(n alpha_m)`` for ``n > 0`` and ``pi log(half_length / 2)`` for
    ``n = 0``.
    """
    alpha = collocation_points(nu).alpha
    n = np.arange(1, nu + 1)
    block = np.empty((nu + 1, nu + 1))
    block[:, 0] = math.pi * math.log(half_length / 2.0)
    block[:, 1:] = -(math.pi / n) * np.cos(np.outer(alpha, n))
    return block


def log_distance_moments(n, alpha):
    """``int_0^pi cos(n theta) log|alpha - theta| d theta`` for ``n >= 1``.

    Obtained by shifting to ``u = theta - alpha`` and integrating by parts on
    each side of the singularity; vectorised over broadcast ``n`` and ``alpha``.
    """
    n = np.asarray(n, dtype=float)
    a = np.asarray(alpha, dtype=float)
    b = math.pi - a
    na, nb = np.broadcast_arrays(n * a, n * b)
    si_a, ci_a = sici(na)
    si_b, ci_b = sici(nb)
    log_a, log_b = np.log(a), np.log(b)
    # int_{-a}^{b} cos(n u) log|u| du
    even = (np.sin(na) * log_a - si_a + np.sin(nb) * log_b - si_b) / n
    # int_{-a}^{b} sin(n u) log|u| du
    odd = (np.cos(na) * log_a - np.cos(nb) * log_b + ci_b - ci_a) / n
    return np.cos(na) * even - np.sin(na) * odd


def _dome_regular_part(alpha, rule: QuadratureRule, cos_table: np.ndarray) -> np.ndarray:
    # log[2 sin(x/2) / x] with the removable singularity at x = 0 (np.sinc(0) = 1)
    x = alpha[:, None] - rule.nodes[None, :]
    g = np.log(np.sinc(x / (2.0 * math.pi)))
    return (g * rule.weights) @ cos_table


def dome_self_block(nu: int, regular_part: np.ndarray) -> np.ndarray:
    """``C_{1m1n}`` for a unit semicircle given the numerically integrated regular part.

    For ``n = 0`` the whole integral ``int_0^pi log|2 sin((alpha - theta)/2)|``
    equals ``-Cl2(alpha) - Cl2(pi - alpha)``, so the regular part is not added.
    For ``n >= 1`` the singular ``log|alpha - theta|`` moment is closed form.
    """
    alpha = collocation_points(nu).alpha
    block = np.empty((nu + 1, nu + 1))
    block[:, 0] = -clausen_cl2(alpha) - clausen_cl2(math.pi - alpha)
    n = np.arange(1, nu + 1)
    block[:, 1:] = log_distance_moments(n[None, :], alpha[:, None]) + regular_part[:, 1:]
    return block


# --- numerically integrated blocks ---------------------------------------------

def _cross_block(geom, j, k, alpha, rule, cos_table):
    p = geom.arc_point_theta(j, alpha)
    zk = geom.arc_point_theta(k, rule.nodes)
    kernel = np.log(np.abs(p[:, None] - zk[None, :]))
    return (kernel * rule.weights) @ cos_table


# (j, k) pairs integrated numerically; every other off-diagonal block follows by symmetry
_CROSS_PAIRS = ((0, 1), (1, 0), (0, 2), (1, 3))


def _numerical_blocks(geom, nu, q, refine):
    rule = theta_rule(nu, geom.L, q, refine)
    alpha = collocation_points(nu).alpha
    cos_table = np.cos(np.outer(rule.nodes, np.arange(nu + 1)))
    blocks = {pair: _cross_block(geom, *pair, alpha, rule, cos_table) for pair in _CROSS_PAIRS}
    if geom.is_stadium:
        blocks["dome_regular"] = _dome_regular_part(alpha, rule, cos_table)
    return blocks, len(rule)


def _converged_blocks(geom: DomainGeometry, cfg: CollocationConfig):
    """Integrate the non-closed-form blocks, refining until two levels agree."""
    prev, _ = _numerical_blocks(geom, cfg.nu, cfg.quadrature_points, 0)
    refine = 1
    while True:
        cur, n_nodes = _numerical_blocks(geom, cfg.nu, cfg.quadrature_points, refine)
        err = max(float(np.max(np.abs(cur[key] - prev[key]))) for key in cur)
        log.debug("quadrature refine=%d nodes=%d change=%.3e", refine, n_nodes, err)
        if err <= cfg.quadrature_tol:
            return cur, err
        if n_nodes * 2 > MAX_QUADRATURE_NODES:
            raise ConvergenceError(
                f"coefficient quadrature did not reach {cfg.quadrature_tol:g} "
                f"with {n_nodes} nodes (change {err:.3e})",
                estimate=err,
            )
        prev = cur
        refine += 1


def _reflect(block: np.ndarray) -> np.ndarray:
    # C'[m, n] = (-1)^n C[nu - m, n]
    signs = (-1.0) ** np.arange(block.shape[1])
    return block[::-1, :] * signs


def coefficient_blocks(geom: DomainGeometry, cfg: CollocationConfig):
    """All sixteen ``(nu+1) x (nu+1)`` blocks ``C[j, k][m, n]`` and the quadrature error estimate.

    Only the self blocks of arcs 0 and 1 and four cross blocks are computed;
    the rest are copies under ``z -> -z`` and ``z -> -conj(z)``.
    """
    nu = cfg.nu
    numeric, err = _converged_blocks(geom, cfg)
    C = {}
    C[0, 0] = straight_self_block(nu, geom.L)
    if geom.is_stadium:
        C[1, 1] = dome_self_block(nu, numeric["dome_regular"])
    else:
        C[1, 1] = straight_self_block(nu, 1.0)
    for pair in _CROSS_PAIRS:
        C[pair] = numeric[pair]
    C[0, 3] = _reflect(C[0, 1])
    C[1, 2] = _reflect(C[1, 0])
    for j in range(2):
        for k in range(N_ARCS):
            C[j + 2, (k + 2) % N_ARCS] = C[j, k]
    return C, err


def coefficient_C(geom: DomainGeometry, j: int, m: int, k: int, n: int, nu: int,
                  quadrature_tol: float = 1e-10) -> float:
    """A single coefficient ``C_{jmkn}``; routes through the same formulas as assembly."""
    for name, idx in (("j", j), ("k", k)):
        if not 0 <= idx < N_ARCS:
            raise DomainError(f"{name} must be an arc index 0..3")
    if not 0 <= m <= nu or int(n) != n or n < 0:
        raise DomainError("need 0 <= m <= nu and an integer n >= 0")
    n = int(n)
    alpha = collocation_points(nu).alpha[m:m + 1]
    if j == k:
        if j % 2 == 0 or not geom.is_stadium:
            if n == 0:
                return math.pi * math.log(geom.arc_length_scale(j) / 2.0)
            return -(math.pi / n) * math.cos(n * alpha[0])
        if n == 0:
            return float(-clausen_cl2(alpha[0]) - clausen_cl2(math.pi - alpha[0]))
        singular = float(log_distance_moments(n, alpha[0]))
        compute = lambda rule, cos_table: _dome_regular_part(alpha, rule, cos_table)[0, n]
    else:
        compute = lambda rule, cos_table: _cross_block(geom, j, k, alpha, rule, cos_table)[0, n]
        singular = 0.0
    if not 0 < quadrature_tol <= 1e-8:
        raise DomainError("quadrature_tol must lie in (0, 1e-8]")
    prev = None
    refine = 0
    while True:
        rule = theta_rule(nu, geom.L, 20, refine)
        value = compute(rule, np.cos(np.outer(rule.nodes, np.arange(n + 1))))
        if prev is not None and abs(value - prev) <= quadrature_tol:
            return float(singular + value)
        if len(rule) * 2 > MAX_QUADRATURE_NODES:
            raise ConvergenceError("coefficient quadrature did not converge",
                                   estimate=None if prev is None else abs(value - prev))
        prev = value
        refine += 1


def constant_mu(geom: DomainGeometry, j: int, m: int, nu: int) -> float:
    """``log|zeta_j(tau_m)|``."""
    if not 0 <= j < N_ARCS or not 0 <= m <= nu:
        raise DomainError("invalid arc or collocation index")
    alpha = collocation_points(nu).alpha[m]
    return float(np.log(np.abs(geom.arc_point_theta(j, alpha))))


def assemble_system(geom: DomainGeometry, cfg: CollocationConfig, return_error: bool = False):
    """Dense ``(4 nu + 5) x (4 nu + 4)`` matrix and right-hand side."""
    nu = cfg.nu
    size = nu + 1
    blocks, err = coefficient_blocks(geom, cfg)
    A = np.zeros((N_ARCS * size + 1, N_ARCS * size))
    rhs = np.zeros(N_ARCS * size + 1)
    alpha = collocation_points(nu).alpha
    for j in range(N_ARCS):
        rows = slice(j * size, (j + 1) * size)
        for k in range(N_ARCS):
            A[rows, k * size:(k + 1) * size] = blocks[j, k]
    mu = {j: np.log(np.abs(geom.arc_point_theta(j, alpha))) for j in range(2)}
    for j in range(N_ARCS):
        rhs[j * size:(j + 1) * size] = mu[j % 2]
    A[-1, ::size] = math.pi
    rhs[-1] = 1.0
    if return_error:
        return A, rhs, err
    return A, rhs


def least_squares_qr(A: np.ndarray, b: np.ndarray):
    """Least-squares solution via Householder QR; returns ``(x, residual_norm)``."""
    Q, R = scipy.linalg.qr(A, mode="economic")
    diag = np.abs(np.diag(R))
    if diag.min() <= 1e-13 * diag.max():
        raise SolverError(f"collocation matrix is numerically rank deficient "
                          f"(|R_ii| ratio {diag.min() / diag.max():.2e})")
    x = scipy.linalg.solve_triangular(R, Q.T @ b)
    return x, float(np.linalg.norm(A @ x - b))


@dataclass(frozen=True)
class SourceDensitySolution:
    geometry: DomainGeometry
    nu: int
    phi: np.ndarray = field(repr=False)
    residual_norm: float
    quadrature_tol: float = 1e-10
    quadrature_error: float | None = None

    @property
    def dome_measure(self) -> float:
        """``pi (phi_10 + phi_30)``: harmonic measure of arcs 1 and 3 at the origin."""
        return math.pi * (self.phi[1, 0] + self.phi[3, 0])

    @property
    def normalization_defect(self) -> float:
        return abs(math.pi * self.phi[:, 0].sum() - 1.0)

    def density(self, k: int, t):
        """``phi_k(t)``, the Chebyshev-weighted density numerator on arc ``k``."""
        return np.polynomial.chebyshev.chebval(np.asarray(t, dtype=float), self.phi[k])

    def to_dict(self) -> dict:
        return {
            "kind": self.geometry.kind.value,
            "L": self.geometry.L,
            "nu": self.nu,
            "phi": [row.tolist() for row in self.phi],
            "residual_norm": self.residual_norm,
            "quadrature_tol": self.quadrature_tol,
            "measure": self.dome_measure,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SourceDensitySolution":
        phi = np.array(data["phi"], dtype=float)
        nu = int(data["nu"])
        if phi.shape != (N_ARCS, nu + 1):
            raise DomainError(f"phi must have shape (4, {nu + 1}), got {phi.shape}")
        geom = DomainGeometry(Shape(data["kind"]), float(data["L"]))
        return cls(geom, nu, phi, float(data["residual_norm"]), float(data["quadrature_tol"]))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n")

    @classmethod
    def load(cls, path) -> "SourceDensitySolution":
        return cls.from_dict(json.loads(Path(path).read_text()))


def solve(geom: DomainGeometry, cfg: CollocationConfig) -> SourceDensitySolution:
    A, rhs, err = assemble_system(geom, cfg, return_error=True)
    x, residual = least_squares_qr(A, rhs)
    phi = x.reshape(N_ARCS, cfg.nu + 1)
    log.info("solved %s L=%g nu=%d: p=%.10f residual=%.3e", geom.kind.value, geom.L,
             cfg.nu, math.pi * (phi[1, 0] + phi[3, 0]), residual)
    return SourceDensitySolution(geom, cfg.nu, phi, residual, cfg.quadrature_tol, err)
