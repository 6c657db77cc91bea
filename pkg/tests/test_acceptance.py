"""Acceptance suite: every criterion at its stated tolerance.

Each test prints one `ACCEPTANCE <name>: PASS/FAIL` line (run pytest with
`-s` or read captured output) and fails hard if its criterion is missed.
"""

import time

import numpy as np
import pytest
import scipy.sparse.linalg as spla

from periflow.analysis import (
    derivative_periodicity,
    identity_refinement_study,
    manufactured_solution_study,
    norms_and_flux,
    poiseuille_exact,
    pressure_jump,
)
from periflow.assembly import (
    assemble_convection_skew,
    assemble_pressure_loss_rhs,
    assemble_system,
)
from periflow.constraints import apply_constraints, build_constraints
from periflow.dofmap import build_dofmap
from periflow.geometry import ChannelGeometry
from periflow.manufactured import default_manufactured
from periflow.meshing import build_channel_mesh
from periflow.solvers import solve_linear_saddle, solve_navier_stokes, solve_stokes

RATE_BANDS = {"u_h1": (2.0, 0.2), "u_l2": (3.0, 0.3), "p_l2": (2.0, 0.3)}


def report(name, ok, detail):
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}  ({detail})")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def straight32():
    t0 = time.perf_counter()
    geom = ChannelGeometry.straight()
    mesh = build_channel_mesh(geom, 32, 32)
    dofs = build_dofmap(mesh)
    cs = build_constraints(mesh, dofs)
    sol = solve_stokes(mesh, dofs, cs, 1.0)
    elapsed = time.perf_counter() - t0
    return mesh, dofs, cs, sol, elapsed


@pytest.fixture(scope="module")
def wavy_study():
    geom = ChannelGeometry.cosine(0.2, 1)
    return identity_refinement_study(geom, 1.0, [8, 16, 32], problem="stokes")


@pytest.fixture(scope="module")
def wavy16():
    geom = ChannelGeometry.cosine(0.2, 1)
    mesh = build_channel_mesh(geom, 16, 16)
    dofs = build_dofmap(mesh)
    cs = build_constraints(mesh, dofs)
    return mesh, dofs, cs


def test_criterion_1_poiseuille_exactness(straight32):
    mesh, _, _, sol, elapsed = straight32
    u1, u2, _ = poiseuille_exact(mesh.geometry, 1.0, mesh.nodes[:, 0], mesh.nodes[:, 1])
    verr = max(np.abs(sol.u[0::2] - u1).max(), np.abs(sol.u[1::2] - u2).max())
    verts = mesh.nodes[: mesh.n_vertices]
    perr = np.abs(sol.p - (0.5 - verts[:, 0])).max()
    ok = verr <= 1e-8 and perr <= 1e-8 and elapsed <= 5.0
    report(
        "1 poiseuille_exactness",
        ok,
        f"velocity err {verr:.3e} <= 1e-8, pressure err {perr:.3e} <= 1e-8, "
        f"runtime {elapsed:.2f}s <= 5s",
    )


def test_criterion_2_pressure_jump(straight32, wavy_study):
    mesh, _, _, sol, _ = straight32
    _, _, stats = pressure_jump(sol, mesh)
    straight_ok = stats["max_dev"] <= 1e-8
    rates = wavy_study["jump_rates"]
    decreasing = bool(np.all(np.diff(wavy_study["jump_dev"]) < 0))
    wavy_ok = decreasing and bool(np.all(rates >= 2.0))
    report(
        "2 pressure_jump",
        straight_ok and wavy_ok,
        f"straight max|j+lam| {stats['max_dev']:.3e} <= 1e-8; "
        f"wavy mean-jump rates {np.round(rates, 3).tolist()} >= 2",
    )


def test_criterion_3_energy_identity(straight32, wavy16):
    results = []
    mesh, dofs, cs, sol, _ = straight32
    for label, msh, dfs, css, lam, problem, tol in (
        ("straight stokes", mesh, dofs, cs, 1.0, "stokes", 1e-10),
        ("straight ns", mesh, dofs, cs, 1.0, "navier-stokes", 1e-8),
        ("wavy stokes", *wavy16, 2.0, "stokes", 1e-10),
        ("wavy ns", *wavy16, 2.0, "navier-stokes", 1e-8),
    ):
        if problem == "navier-stokes":
            s = solve_navier_stokes(msh, dfs, css, lam)
        elif lam == 1.0 and msh is mesh:
            s = sol
        else:
            s = solve_stokes(msh, dfs, css, lam)
        f = assemble_pressure_loss_rhs(msh, dfs, lam)
        energy = norms_and_flux(s, msh)["energy"]
        rel = abs(energy - f @ s.u) / energy
        results.append((label, rel, tol, rel <= tol))
    ok = all(r[3] for r in results)
    detail = "; ".join(f"{label} {rel:.2e} <= {tol:g}" for label, rel, tol, _ in results)
    report("3 energy_identity", ok, detail)


def test_criterion_4_skew_identity(wavy16):
    mesh, dofs, _ = wavy16
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(100):
        w = rng.standard_normal(dofs.n_velocity)
        v = rng.standard_normal(dofs.n_velocity)
        N = assemble_convection_skew(w, mesh, dofs)
        bound = 1e-12 * spla.norm(N) * (v @ v)
        val = abs(v @ (N @ v))
        worst = max(worst, val / bound)
        assert val <= bound
    report("4 skew_identity", worst <= 1.0, f"worst |b~(w;v,v)| / bound = {worst:.3f} over 100 pairs")


def test_criterion_5_estimate_scaling(straight32):
    mesh, dofs, cs, sol1, _ = straight32
    ref = norms_and_flux(sol1, mesh)["u_h1"]
    sols = {1.0: sol1}
    devs = []
    for lam in (2.0, 5.0):
        sols[lam] = solve_stokes(mesh, dofs, cs, lam)
        val = norms_and_flux(sols[lam], mesh)["u_h1"] / lam
        devs.append(abs(val - ref) / ref)
    lin = np.abs(sols[2.0].u - 2.0 * sols[1.0].u).max() / max(np.abs(sols[2.0].u).max(), 1.0)
    ok = max(devs) <= 1e-10 and lin <= 1e-10
    report(
        "5 estimate_scaling",
        ok,
        f"|u|_H1/lam deviations {[f'{d:.2e}' for d in devs]} <= 1e-10; "
        f"entrywise linearity {lin:.2e} <= 1e-10",
    )


def test_criterion_6_ns_reduces_to_poiseuille(straight32):
    mesh, dofs, cs, _, _ = straight32
    details = []
    ok = True
    for lam in (1.0, 10.0, 50.0):
        st = solve_stokes(mesh, dofs, cs, lam)
        ns = solve_navier_stokes(mesh, dofs, cs, lam)
        diff = max(np.abs(ns.u - st.u).max(), np.abs(ns.p - st.p).max())
        good = ns.diagnostics.iterations <= 5 and diff <= 1e-8
        ok = ok and good
        details.append(f"lam={lam:g}: {ns.diagnostics.iterations} it, diff {diff:.2e}")
    report("6 ns_reduces_to_poiseuille", ok, "; ".join(details))


def test_criterion_7_derivative_periodicity(straight32, wavy_study):
    mesh, _, _, sol, _ = straight32
    straight_mismatch = derivative_periodicity(sol, mesh)
    ratios = wavy_study["deriv_mismatch"][1:] / wavy_study["deriv_mismatch"][:-1]
    ok = straight_mismatch <= 1e-8 and bool(np.all(ratios <= 0.6))
    report(
        "7 derivative_periodicity",
        ok,
        f"straight mismatch {straight_mismatch:.3e} <= 1e-8; "
        f"wavy refinement ratios {np.round(ratios, 3).tolist()} <= 0.6",
    )


def test_criterion_8_brute_force_equivalence():
    geom = ChannelGeometry.straight()
    mesh = build_channel_mesh(geom, 2, 2)
    dofs = build_dofmap(mesh)
    cs = build_constraints(mesh, dofs)
    red = apply_constraints(assemble_system(mesh, dofs, 1.0), cs)
    K, rhs = red.kkt()
    xs, _ = solve_linear_saddle(K, rhs)
    xd = np.linalg.solve(K.toarray(), rhs)
    diff = np.abs(xs - xd).max()
    mineig = float(np.linalg.eigvalsh(red.A.toarray()).min())
    ok = diff <= 1e-12 and mineig > 0
    report(
        "8 brute_force_equivalence",
        ok,
        f"sparse-vs-dense {diff:.2e} <= 1e-12; min eig(reduced A) {mineig:.3f} > 0",
    )


def test_criterion_9_manufactured_convergence():
    t0 = time.perf_counter()
    table = manufactured_solution_study(
        ChannelGeometry.straight(), default_manufactured(), [12, 24, 48], problem="stokes"
    )
    elapsed = time.perf_counter() - t0
    ok = elapsed <= 60.0 and table.trusted
    details = [f"runtime {elapsed:.1f}s <= 60s"]
    for key, (target, width) in RATE_BANDS.items():
        fitted = table.fitted(key)
        in_band = abs(fitted - target) <= width and all(
            abs(r - target) <= width for r in table.rates[key]
        )
        ok = ok and in_band
        details.append(f"{key} rate {fitted:.2f} in {target}+-{width}")
    report("9 manufactured_convergence", ok, "; ".join(details))
