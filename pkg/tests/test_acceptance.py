"""Acceptance criteria, one check per criterion.

Each check prints a single PASS/FAIL line with the measured numbers, then
asserts. Also runnable directly: ``python tests/test_acceptance.py``.
"""
import math
import sys
import time
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import self_coefficient_oracle  # noqa: E402
from stadium_map import (  # noqa: E402
    CollocationConfig, DiskMap, DomainGeometry, McConfig, rect_end_measure, run_monte_carlo, solve,
)
from stadium_map.symm_solver import coefficient_blocks  # noqa: E402

TABLE3 = {64: 0.28176556, 100: 0.28180170, 128: 0.28181209, 256: 0.28182502,
          300: 0.28182628, 350: 0.28182718, 500: 0.28182850, 512: 0.28182856}
HEADLINE = 0.281829

TOL_TABLE3 = 2e-6
TIME_TABLE3_S = 60.0
TOL_HEADLINE = 1e-6
TIME_HEADLINE_S = 15 * 60.0
SLOPE_RANGE = (-2.6, -1.4)
TOL_RECT = 1e-6
TOL_SQUARE = 1e-8
MC_N, MC_H, MC_SEED = 10**7, 1e-3, 20240601
TOL_MC = 1e-3
TIME_MC_S = 10 * 60.0
TOL_RESIDUAL = 1e-9
TOL_ORACLE = 1e-9
TOL_SYMMETRY = 1e-10
TOL_NORMALIZATION = 1e-10
TOL_ANGLE_TOTAL = 1e-8

STADIUM = DomainGeometry.stadium(1.0)


@lru_cache(maxsize=None)
def stadium_solution(nu):
    start = time.perf_counter()
    sol = solve(STADIUM, CollocationConfig(nu))
    return sol, time.perf_counter() - start


def report(number, ok, text):
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {text}")
    return ok


def check_1():
    worst, slowest, lines = 0.0, 0.0, []
    for nu, ref in TABLE3.items():
        sol, secs = stadium_solution(nu)
        err = abs(sol.dome_measure - ref)
        worst, slowest = max(worst, err), max(slowest, secs)
        lines.append(f"nu={nu} p={sol.dome_measure:.10f} err={err:.1e} t={secs:.2f}s")
    ok = worst <= TOL_TABLE3 and slowest <= TIME_TABLE3_S
    return report(1, ok, f"Table 3: max |p - paper| = {worst:.2e} (tol {TOL_TABLE3:g}), "
                         f"slowest solve {slowest:.2f}s; " + "; ".join(lines))


def check_2():
    sol, secs = stadium_solution(1200)
    err = abs(sol.dome_measure - HEADLINE)
    ok = err <= TOL_HEADLINE and secs <= TIME_HEADLINE_S
    return report(2, ok, f"nu=1200 p={sol.dome_measure:.10f}, |p - {HEADLINE}| = {err:.2e} "
                         f"(tol {TOL_HEADLINE:g}), {secs:.1f}s")


def check_3():
    ref = stadium_solution(1200)[0].dome_measure
    nus = np.array([64, 128, 256, 512])
    gaps = np.array([abs(stadium_solution(int(nu))[0].dome_measure - ref) for nu in nus])
    slope = np.polyfit(np.log(nus), np.log(gaps), 1)[0]
    ok = SLOPE_RANGE[0] <= slope <= SLOPE_RANGE[1]
    return report(3, ok, f"fitted convergence slope {slope:.3f} in {list(SLOPE_RANGE)}; gaps "
                         + ", ".join(f"{g:.2e}" for g in gaps))


def check_4():
    parts, ok = [], True
    for L in (0.5, 1.0, 2.0):
        symm = solve(DomainGeometry.rectangle(L), CollocationConfig(200)).dome_measure
        exact = rect_end_measure(L)
        err = abs(symm - exact)
        ok &= err <= TOL_RECT
        parts.append(f"L={L}: symm={symm:.12f} exact={exact:.12f} diff={err:.1e}")
    square = abs(rect_end_measure(1.0) - 0.5)
    ok &= square <= TOL_SQUARE
    return report(4, ok, "; ".join(parts) + f"; |p_exact(1) - 0.5| = {square:.1e}")


def check_5():
    cfg = McConfig(MC_N, h=MC_H, seed=MC_SEED)
    start = time.perf_counter()
    first = run_monte_carlo(STADIUM, cfg)
    secs = time.perf_counter() - start
    second = run_monte_carlo(STADIUM, cfg)
    same = first.to_dict() == second.to_dict() and first.total_steps == second.total_steps
    err = abs(first.p_hat - HEADLINE)
    ok = err <= TOL_MC and secs <= TIME_MC_S and same
    return report(5, ok, f"N={MC_N:g} h={MC_H:g} seed={MC_SEED}: p_hat={first.p_hat:.6f} "
                         f"+- {first.std_error:.1e}, |p_hat - {HEADLINE}| = {err:.1e} (tol {TOL_MC:g}), "
                         f"{secs:.1f}s, rerun identical={same}")


def check_6():
    parts, ok = [], True
    for nu in TABLE3:
        res = stadium_solution(nu)[0].residual_norm
        ok &= res <= TOL_RESIDUAL
        parts.append(f"nu={nu}:{res:.1e}")
    return report(6, ok, f"residual norms (tol {TOL_RESIDUAL:g}) " + " ".join(parts))


def check_7():
    nu = 16
    blocks, _ = coefficient_blocks(STADIUM, CollocationConfig(nu))
    worst = {}
    for j in (0, 1):
        worst[j] = max(abs(blocks[j, j][m, n] - self_coefficient_oracle(STADIUM, j, m, n, nu))
                       for m in range(nu + 1) for n in range(nu + 1))
    ok = max(worst.values()) <= TOL_ORACLE
    return report(7, ok, f"nu=16 max |C - oracle|: C0m0n {worst[0]:.1e}, C1m1n {worst[1]:.1e} "
                         f"(tol {TOL_ORACLE:g})")


def check_8():
    sol = stadium_solution(1200)[0]
    dmap = DiskMap(sol)
    phi = sol.phi
    sym = max(np.abs(phi[0] - phi[2]).max(), np.abs(phi[1] - phi[3]).max())
    rect = solve(DomainGeometry.rectangle(1.0), CollocationConfig(200))
    norm = max(sol.normalization_defect, rect.normalization_defect)
    total = abs(dmap.angle_table.total - 2 * math.pi)
    t = np.linspace(-1, 1, 1000)
    monotone = all(np.all(np.diff(dmap.boundary_angle(k, t)) > 0) for k in range(4))
    sweep_Ls = np.linspace(0.1, 3.0, 30)
    ordered = all(rect_end_measure(L) > solve(DomainGeometry.stadium(L), CollocationConfig(200)).dome_measure
                  for L in sweep_Ls)
    complement = dmap.harmonic_measure({1, 3}).p + dmap.harmonic_measure({0, 2}).p
    ok = (sym <= TOL_SYMMETRY and norm <= TOL_NORMALIZATION and total <= TOL_ANGLE_TOTAL
          and monotone and ordered and complement == 1.0)
    return report(8, ok, f"nu=1200: phi symmetry {sym:.1e}, normalization {norm:.1e}, "
                         f"|angle total - 2pi| {total:.1e}, monotone={monotone}, "
                         f"p_rect > p_stadium on {len(sweep_Ls)} sweep rows={ordered}, "
                         f"complement sum == 1: {complement == 1.0}")


CHECKS = [check_1, check_2, check_3, check_4, check_5, check_6, check_7, check_8]


@pytest.mark.slow
@pytest.mark.parametrize("check", CHECKS, ids=[f"criterion_{i}" for i in range(1, 9)])
def test_criterion(check):
    assert check()


if __name__ == "__main__":
    results = [check() for check in CHECKS]
    print(f"{sum(results)}/{len(results)} criteria pass")
    sys.exit(0 if all(results) else 1)
