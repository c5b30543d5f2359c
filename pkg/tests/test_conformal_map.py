import math

import numpy as np
import pytest

from stadium_map import DiskMap, DomainError, DomainGeometry
from stadium_map.conformal_map import BOUNDARY_EXCLUSION, boundary_radius, mobius_halfplane_to_disk


def _interior_samples(geom, count, seed):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        z = complex(rng.uniform(-geom.L - 1, geom.L + 1), rng.uniform(-1, 1))
        if geom.distance_to_boundary(z.real, z.imag) > 1e-3:
            out.append(z)
    return np.array(out)


def test_origin_and_real_axis(stadium_map_256):
    f = stadium_map_256
    assert f(0) == 0
    w = f(1.0)
    assert abs(w.imag) <= 1e-14 and 0 < w.real < 1


def test_symmetries(stadium_map_256):
    z = _interior_samples(stadium_map_256.geometry, 100, 1)
    w = stadium_map_256.map_points(z)
    assert np.abs(stadium_map_256.map_points(z.conj()) - w.conj()).max() <= 1e-8
    assert np.abs(stadium_map_256.map_points(-z) + w).max() <= 1e-8


def test_potential_conjugation(stadium_map_256):
    for z in (0.3 + 0.2j, 1.7 - 0.4j, -0.5 + 0.9j):
        assert stadium_map_256.potential(z.conjugate()).imag == pytest.approx(
            -stadium_map_256.potential(z).imag, abs=1e-12)


def test_map_points_agrees_with_adaptive_path(stadium_map_256):
    f = stadium_map_256
    z = _interior_samples(f.geometry, 30, 4)
    fast = f._fast_potential(z[f.geometry.distance_to_boundary(z.real, z.imag) >= f._fast_distance])
    slow = [f._raw_potential(complex(p)) for p in z[f.geometry.distance_to_boundary(z.real, z.imag)
                                                   >= f._fast_distance]]
    assert np.abs(fast - np.array(slow)).max() <= 1e-12


def test_unimodular_near_bottom_edge(stadium_map_256):
    z = stadium_map_256.geometry.arc_point(0, 0.0) * (1 - 1e-6)
    assert abs(abs(stadium_map_256(z)) - 1) <= 1e-4


def test_rejects_boundary_points(stadium_map_256):
    for z in (2.0, 1j, 3.0, 0.5 - 1j * (1 - BOUNDARY_EXCLUSION / 2)):
        with pytest.raises(DomainError):
            stadium_map_256(z)


def test_boundary_angle_spans(stadium_map_256, stadium_256):
    f = stadium_map_256
    phi = stadium_256.phi
    for k in range(4):
        span = f.boundary_angle(k, 1.0) - f.boundary_angle(k, -1.0)
        assert span == pytest.approx(2 * math.pi**2 * phi[k, 0], abs=1e-14)
    # the span total inherits the normalization defect, which tracks the residual
    assert abs(f.angle_table.total - 2 * math.pi) <= 2 * math.pi * stadium_256.residual_norm


def test_boundary_angles_monotone(stadium_map_256):
    t = np.linspace(-1, 1, 1000)
    for k in range(4):
        assert np.all(np.diff(stadium_map_256.boundary_angle(k, t)) > 0)


def test_boundary_angle_matches_interior_limit(stadium_map_256):
    f = stadium_map_256
    geom = f.geometry
    for k, t in [(0, 0.3), (1, -0.5), (2, 0.9), (3, 0.1)]:
        inward = 1j * geom.unit_tangent(k, t)
        w = f(geom.arc_point(k, t) + 1e-6 * inward)
        diff = np.angle(w) - f.boundary_angle(k, t)
        assert abs((diff + math.pi) % (2 * math.pi) - math.pi) <= 1e-6


def test_prevertices_on_circle(stadium_map_256):
    pv = stadium_map_256.prevertices()
    assert np.allclose(np.abs(pv), 1.0)
    # conjugation symmetry pairs the corners: zeta_0(-1) = conj(zeta_3(-1)), zeta_1(-1) = conj(zeta_2(-1))
    assert abs(pv[0] - pv[3].conjugate()) <= 1e-7 and abs(pv[1] - pv[2].conjugate()) <= 1e-7


def test_harmonic_measure_partition(stadium_map_256, stadium_256):
    f = stadium_map_256
    domes = f.harmonic_measure({1, 3}).p
    sides = f.harmonic_measure({0, 2}).p
    assert domes + sides == 1.0
    assert f.harmonic_measure(range(4)).p == 1.0
    assert domes == pytest.approx(stadium_256.dome_measure, abs=1e-8)
    assert f.harmonic_measure({1}).p == pytest.approx(f.harmonic_measure({3}).p, abs=1e-10)
    assert f.harmonic_measure({0}).p == pytest.approx(f.harmonic_measure({2}).p, abs=1e-10)


def test_measure_independent_of_rotation(stadium_map_256):
    table = stadium_map_256.angle_table
    for delta in (0.1, -2.0, 7.5):
        assert table.shifted(delta).measure({1, 3}) == table.measure({1, 3})


def test_unimodularity_400_samples(stadium_map_256):
    f = stadium_map_256
    geom = f.geometry
    ts = np.cos(np.linspace(0.05, math.pi - 0.05, 100))
    z = [geom.arc_point(k, t) + 1e-6 * 1j * geom.unit_tangent(k, t) for k in range(4) for t in ts]
    w = f.map_points(np.array(z))
    assert np.abs(np.abs(w) - 1).max() <= 1e-4


def test_mobius():
    assert mobius_halfplane_to_disk(1j) == 0
    assert abs(mobius_halfplane_to_disk(0.0)) == pytest.approx(1.0)
    assert abs(mobius_halfplane_to_disk(3.7)) == pytest.approx(1.0)
    assert mobius_halfplane_to_disk(2j) == pytest.approx(1j / 3)
    with pytest.raises(DomainError):
        mobius_halfplane_to_disk(1 - 1j)


def test_mesh(stadium_map_256):
    rows = stadium_map_256.export_mesh(radial_lines=16, circles=8, samples=24)
    ids = {r[4] for r in rows}
    assert ids == set(range(24))
    images = np.array([complex(r[2], r[3]) for r in rows])
    points = np.array([complex(r[0], r[1]) for r in rows])
    assert np.all(np.abs(images) < 1)
    # the centre maps to the centre
    assert images[points == 0].tolist() and np.all(images[points == 0] == 0)
    # injectivity spot-check: distinct sample points have distinct images
    _, first = np.unique(np.round(points, 12), return_index=True)
    pts, imgs = points[first], images[first]
    sep = np.abs(imgs[:, None] - imgs[None, :]) + np.eye(len(imgs))
    assert sep.min() > 1e-6


def test_mesh_ray_monotone(stadium_map_256):
    rows = stadium_map_256.export_mesh(radial_lines=1, circles=3, samples=40)
    ray = [abs(complex(r[2], r[3])) for r in rows if r[4] == 3]
    assert all(a < b for a, b in zip(ray, ray[1:]))


def test_boundary_radius():
    g = DomainGeometry.stadium(1.0)
    assert boundary_radius(g, 0.0) == pytest.approx(2.0)
    assert boundary_radius(g, math.pi / 2) == pytest.approx(1.0)
    r = DomainGeometry.rectangle(2.0)
    assert boundary_radius(r, math.pi / 4) == pytest.approx(math.sqrt(2))


def test_geometry_mismatch(stadium_256):
    with pytest.raises(DomainError):
        DiskMap(stadium_256, DomainGeometry.stadium(2.0))
