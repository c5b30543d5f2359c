"""Conformal map of the domain onto the unit disk from a Symm solution.

Interior points: ``f(z) = z exp(-P(z))`` with
``P(z) = sum_k int sigma_k(t) log(z - zeta_k(t)) dt``.

Boundary points: the image angle of ``zeta_k(t)`` follows from integrating
the density, ``theta_k(t) = theta_k(-1) + 2 pi int_{-1}^{t} sigma_k``.

Branch of the logarithm in ``P``: ``arg(z - zeta)`` is continued along the
boundary counter-clockwise from the corner ``zeta_0(-1)``, where the
principal value is used, and the constant is then fixed so that
``Im P(0) = 0``. With that choice ``f'(0) > 0`` and the map commutes with
complex conjugation.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial.chebyshev import chebval

from .errors import ConvergenceError, DomainError
from .geometry import DOME_ARCS, N_ARCS, DomainGeometry
from .special_functions import composite_gauss_legendre
from .symm_solver import SourceDensitySolution, theta_edges

# interior points closer than this to the boundary are rejected
BOUNDARY_EXCLUSION = 5e-7
# inward offset of the probe point that fixes the boundary-angle rotation
PROBE_OFFSET = 1e-6

_PANEL_TOL = 1e-13
_MAX_SWEEPS = 80
_MAX_NODES_PER_ARC = 2**18
# points farther than this many (largest panel chords) from the boundary use the fixed rule
_FAST_CLEARANCE = 1.0
_FAST_CHUNK = 256

MESH_HEADER = ("z_re", "z_im", "f_re", "f_im", "curve_id")


class Method(str, enum.Enum):
    SYMM = "symm"
    RECT_EXACT = "rect_exact"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class HarmonicMeasureResult:
    p: float
    method: Method
    parameters: dict = field(default_factory=dict)
    uncertainty: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"harmonic measure {self.p} outside [0, 1]")


@dataclass(frozen=True)
class BoundaryAngleTable:
    """Image angles of the arc endpoints on the unit circle.

    ``starts[k]`` is ``theta_k(-1)``; the arcs are chained so that
    ``starts[k + 1] = starts[k] + spans[k]``.
    """

    starts: np.ndarray
    spans: np.ndarray
    phi: np.ndarray = field(repr=False)

    @property
    def rotation(self) -> float:
        return float(self.starts[0])

    @property
    def total(self) -> float:
        return float(self.spans.sum())

    def end(self, k: int) -> float:
        return float(self.starts[k] + self.spans[k])

    def angle(self, k: int, t):
        t = np.asarray(t, dtype=float)
        if np.any(np.abs(t) > 1.0):
            raise DomainError("arc parameter must lie in [-1, 1]")
        theta = np.arccos(t)
        coeffs = self.phi[k]
        n = np.arange(1, len(coeffs))
        series = np.sin(np.multiply.outer(theta, n)) @ (coeffs[1:] / n)
        val = self.starts[k] + 2 * math.pi * coeffs[0] * (math.pi - theta) - 2 * math.pi * series
        return float(val) if val.ndim == 0 else val

    def shifted(self, delta: float) -> "BoundaryAngleTable":
        return BoundaryAngleTable(self.starts + delta, self.spans, self.phi)

    def measure(self, arcs) -> float:
        """Share of the circle covered by the images of ``arcs``.

        Normalised by the total span, so complementary arc sets sum to one.
        """
        arcs = _check_arcs(arcs)
        weights = self.spans / self.spans.sum()
        return float(sum(weights[k] for k in sorted(arcs)))


def _check_arcs(arcs):
    arcs = frozenset(int(k) for k in arcs)
    if not arcs:
        raise DomainError("arc set must not be empty")
    if not arcs <= set(range(N_ARCS)):
        raise DomainError(f"arc indices must lie in 0..3, got {sorted(arcs)}")
    return arcs


def mobius_halfplane_to_disk(w: complex) -> complex:
    """``i (w - i) / (w + i)``: upper half-plane onto the unit disk, ``i -> 0``.

    Real ``w`` lands on the unit circle.
    """
    w = complex(w)
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise DomainError("w must be finite")
    if w.imag < 0:
        raise DomainError(f"w must lie in the closed upper half-plane, got {w}")
    return 1j * (w - 1j) / (w + 1j)


class DiskMap:
    """Evaluator for the map of ``solution.geometry`` onto the unit disk."""

    def __init__(self, solution: SourceDensitySolution, geometry: DomainGeometry | None = None):
        if geometry is not None and geometry != solution.geometry:
            raise DomainError("geometry does not match the solution")
        self.solution = solution
        self.geometry = solution.geometry
        self._phi = np.asarray(solution.phi, dtype=float)
        self._q = 20
        self._base_edges = theta_edges(solution.nu, self.geometry.L)

    # --- interior ------------------------------------------------------------

    def _check_interior(self, z) -> complex:
        z = complex(z)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise DomainError("z must be finite")
        d = float(self.geometry.distance_to_boundary(z.real, z.imag))
        if d < BOUNDARY_EXCLUSION:
            raise DomainError(f"z = {z} is on, outside, or within {BOUNDARY_EXCLUSION:g} of the boundary")
        return z

    def _arc_nodes(self, k: int, z: complex):
        """Adaptive composite rule on arc ``k`` for the kernel ``log(z - zeta_k)``."""
        geom = self.geometry
        coeffs = self._phi[k]
        x, w = np.polynomial.legendre.leggauss(self._q)
        a = self._base_edges[:-1]
        b = self._base_edges[1:]
        done_nodes, done_weights = [], []
        for _ in range(_MAX_SWEEPS):
            mid = 0.5 * (a + b)
            half = 0.5 * (b - a)
            # coarse rule on the panel, fine rule on its two halves
            coarse = mid[:, None] + half[:, None] * x[None, :]
            fine = np.concatenate([mid[:, None] + 0.5 * half[:, None] * (x[None, :] - 1.0),
                                   mid[:, None] + 0.5 * half[:, None] * (x[None, :] + 1.0)], axis=1)
            z_mid = z - geom.arc_point_theta(k, mid)

            def integrand(th):
                rel = np.log((z - geom.arc_point_theta(k, th)) / z_mid[:, None])
                return chebval(np.cos(th), coeffs) * rel

            i_coarse = (integrand(coarse) * w).sum(axis=1) * half
            i_fine = (integrand(fine) * np.concatenate([w, w])).sum(axis=1) * 0.5 * half
            ok = np.abs(i_coarse - i_fine) <= _PANEL_TOL * np.maximum(half, 1e-3)
            done_nodes.append(fine[ok].ravel())
            done_weights.append((0.5 * half[ok, None] * np.concatenate([w, w])[None, :]).ravel())
            if ok.all():
                break
            a_bad, b_bad = a[~ok], b[~ok]
            m_bad = 0.5 * (a_bad + b_bad)
            a = np.concatenate([a_bad, m_bad])
            b = np.concatenate([m_bad, b_bad])
            if sum(len(n) for n in done_nodes) + 2 * self._q * len(a) > _MAX_NODES_PER_ARC:
                raise ConvergenceError(f"potential quadrature on arc {k} did not converge at z = {z}")
        else:
            raise ConvergenceError(f"potential quadrature on arc {k} did not converge at z = {z}")
        nodes = np.concatenate(done_nodes)
        weights = np.concatenate(done_weights)
        order = np.argsort(nodes)[::-1]  # traversal direction: theta from pi down to 0
        return nodes[order], weights[order]

    @cached_property
    def _fast_rule(self):
        """Boundary points and density weights of the fixed rule, in traversal order."""
        edges = self._base_edges
        halves = np.sort(np.concatenate([edges, 0.5 * (edges[:-1] + edges[1:])]))
        rule = composite_gauss_legendre(halves, self._q)
        theta, w = rule.nodes[::-1], rule.weights[::-1]
        pts, wts = [], []
        for k in range(N_ARCS):
            nodes = np.concatenate([[math.pi], theta, [0.0]])
            pts.append(self.geometry.arc_point_theta(k, nodes))
            wts.append(np.concatenate([[0.0], chebval(np.cos(theta), self._phi[k]) * w, [0.0]]))
        return np.concatenate(pts), np.concatenate(wts)

    @cached_property
    def _fast_distance(self) -> float:
        edges = self._base_edges
        chord = max(np.abs(np.diff(self.geometry.arc_point_theta(k, edges))).max()
                    for k in range(N_ARCS))
        return _FAST_CLEARANCE * chord

    def _fast_potential(self, z: np.ndarray) -> np.ndarray:
        pts, wts = self._fast_rule
        out = np.empty(z.shape, dtype=complex)
        for lo in range(0, z.size, _FAST_CHUNK):
            zc = z[lo:lo + _FAST_CHUNK]
            diff = zc[:, None] - pts[None, :]
            args = np.unwrap(np.angle(diff), axis=1)
            args += np.angle(diff[:, :1]) - args[:, :1]
            if np.abs(np.diff(args, axis=1)).max() > math.pi / 2:
                raise ConvergenceError("argument unwrapping unresolved on the fixed rule")
            out[lo:lo + _FAST_CHUNK] = np.log(np.abs(diff)) @ wts + 1j * (args @ wts)
        return out

    def _raw_potential(self, z: complex) -> complex:
        geom = self.geometry
        corner = geom.arc_point_theta(0, math.pi)
        arg_start = math.atan2((z - corner).imag, (z - corner).real)
        pieces = []
        for k in range(N_ARCS):
            nodes, weights = self._arc_nodes(k, z)
            # corner anchors (zero weight) keep the unwrap continuous between arcs
            nodes = np.concatenate([[math.pi], nodes, [0.0]])
            weights = np.concatenate([[0.0], weights, [0.0]])
            diff = z - geom.arc_point_theta(k, nodes)
            dens = chebval(np.cos(nodes), self._phi[k])
            pieces.append((diff, dens * weights))
        diff = np.concatenate([p[0] for p in pieces])
        wts = np.concatenate([p[1] for p in pieces])
        raw_arg = np.angle(diff)
        args = np.unwrap(raw_arg)
        args += arg_start - args[0]
        steps = np.abs(np.diff(args))
        if steps.max() > math.pi / 2:
            raise ConvergenceError(f"argument unwrapping unresolved at z = {z}")
        return complex(np.dot(wts, np.log(np.abs(diff))), np.dot(wts, args))

    @cached_property
    def _branch_offset(self) -> float:
        return self._raw_potential(0j).imag

    def potential(self, z) -> complex:
        """``P(z)`` with the branch normalised to ``Im P(0) = 0``."""
        z = self._check_interior(z)
        return self._raw_potential(z) - 1j * self._branch_offset

    def map_point(self, z) -> complex:
        return complex(self.map_points(np.array([z], dtype=complex))[0])

    def map_points(self, z) -> np.ndarray:
        """Vectorised ``f``; points well inside use a fixed rule, the rest adapt."""
        z = np.asarray(z, dtype=complex)
        flat = z.ravel()
        if not np.all(np.isfinite(flat)):
            raise DomainError("z must be finite")
        d = np.atleast_1d(self.geometry.distance_to_boundary(flat.real, flat.imag))
        if np.any(d < BOUNDARY_EXCLUSION):
            bad = flat[np.argmin(d)]
            raise DomainError(f"z = {bad} is on, outside, or within {BOUNDARY_EXCLUSION:g} of the boundary")
        P = np.empty(flat.shape, dtype=complex)
        fast = d >= self._fast_distance
        if fast.any():
            P[fast] = self._fast_potential(flat[fast])
        for i in np.flatnonzero(~fast):
            P[i] = self._raw_potential(complex(flat[i]))
        P -= 1j * self._branch_offset
        f = flat * np.exp(-P)
        f[flat == 0] = 0.0
        return f.reshape(z.shape)

    __call__ = map_point

    # --- boundary ------------------------------------------------------------

    @cached_property
    def angle_table(self) -> BoundaryAngleTable:
        spans = 2 * math.pi**2 * self._phi[:, 0]
        # anchor at the midpoint of arc 0: the truncated density series is
        # least accurate next to the corners
        geom = self.geometry
        probe = geom.arc_point(0, 0.0) + PROBE_OFFSET * 1j * geom.unit_tangent(0, 0.0)
        unrotated = BoundaryAngleTable(np.zeros(N_ARCS), spans, self._phi).angle(0, 0.0)
        rotation = float(np.angle(self.map_point(probe))) - unrotated
        starts = rotation + np.concatenate([[0.0], np.cumsum(spans)[:-1]])
        return BoundaryAngleTable(starts, spans, self._phi)

    def boundary_angle(self, k: int, t) -> float:
        if not 0 <= k < N_ARCS:
            raise DomainError("arc index must lie in 0..3")
        return self.angle_table.angle(k, t)

    def prevertices(self) -> np.ndarray:
        """Unit-circle images of the four corners ``zeta_k(-1)``."""
        return np.exp(1j * self.angle_table.starts)

    def harmonic_measure(self, arcs=DOME_ARCS) -> HarmonicMeasureResult:
        p = self.angle_table.measure(arcs)
        return HarmonicMeasureResult(p, Method.SYMM, {"nu": self.solution.nu,
                                                      "arcs": sorted(_check_arcs(arcs))})

    # --- mesh export -----------------------------------------------------------

    def export_mesh(self, radial_lines: int, circles: int, samples: int):
        """Forward images of concentric level curves and rays of the domain.

        Level curve ``c`` (``c = 1..circles``) is the boundary scaled by
        ``c / (circles + 1)``; rays run from the origin to the outermost level.
        Returns rows ``(z_re, z_im, f_re, f_im, curve_id)``; level curves take
        ids ``0..circles-1`` and rays the following ids.
        """
        if min(radial_lines, circles, samples) < 1:
            raise DomainError("radial_lines, circles and samples must be positive")
        outer = circles / (circles + 1)
        angles = 2 * math.pi * np.arange(samples) / samples
        radii = np.array([boundary_radius(self.geometry, a) for a in angles])
        points, ids = [], []
        for c in range(circles):
            points.append((c + 1) / (circles + 1) * radii * np.exp(1j * angles))
            ids.append(np.full(samples, c))
        s = np.linspace(0.0, 1.0, max(samples, 2))
        for r in range(radial_lines):
            a = 2 * math.pi * r / radial_lines
            points.append(s * outer * boundary_radius(self.geometry, a) * complex(math.cos(a), math.sin(a)))
            ids.append(np.full(s.size, circles + r))
        z = np.concatenate(points)
        fz = self.map_points(z)
        return [(zi.real, zi.imag, fi.real, fi.imag, int(cid))
                for zi, fi, cid in zip(z, fz, np.concatenate(ids))]


def boundary_radius(geom: DomainGeometry, angle: float) -> float:
    """Distance from the origin to the boundary along direction ``angle``."""
    c, s = abs(math.cos(angle)), abs(math.sin(angle))
    L = geom.L
    if geom.is_stadium:
        if s > 0 and c / s <= L:
            return 1.0 / s
        return L * c + math.sqrt(L * L * c * c - L * L + 1.0)
    return min(L / c if c > 0 else math.inf, 1.0 / s if s > 0 else math.inf)


def write_mesh_csv(rows, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(MESH_HEADER)
    for z_re, z_im, f_re, f_im, cid in rows:
        writer.writerow([f"{z_re:.15g}", f"{z_im:.15g}", f"{f_re:.15g}", f"{f_im:.15g}", cid])
