"""Acceptance checks: the package's headline guarantees, one test per claim.

Each test prints one summary line on success; a pytest FAILED line is the
failure signal.  Wall-clock budgets are asserted inside the tests so a
regression that silently blows up runtime fails loudly too.

Numbers here are either tolerances the library promises outright or
measured-once regression anchors; nothing is tuned to make a test pass.
"""

from __future__ import annotations

import json
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from fracfield import identities, pde
from fracfield.besov import verify_minkowski_bounds
from fracfield.cli import main as cli_main
from fracfield.core import (
    FieldSpec,
    GridField,
    lp_norm,
    make_grid,
    sample,
    sample_vector,
)
from fracfield.ops_direct import DirectConfig, frac_gradient, nl_divergence, nl_gradient
from fracfield.ops_spectral import (
    frac_gradient_spec,
    frac_laplacian_spec,
    nl_divergence_spec,
    nl_gradient_spec,
    riesz_multipliers,
)

_PERIODIC = DirectConfig(tail="periodic")
_CORRECTED = DirectConfig(tail="periodic", singular_cell_rule="lipschitz_extrapolate")


def _scalar(grid, seed):
    return sample(FieldSpec.random_smooth(seed), grid)


def _vector(grid, seed):
    return sample_vector(
        [FieldSpec.random_smooth(seed + j) for j in range(grid.n)], grid
    )


def _passline(num, label, detail):
    print(f"[{num:>2}/12] {label}: PASS ({detail})")


# ---------------------------------------------------------------------------
# 1. product rule, direct backend, random bumps, 1D and 2D
# ---------------------------------------------------------------------------


def test_01_leibniz_direct_random_bumps():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2025)
    alphas = (0.3, 0.5, 0.7)
    worst = 0.0
    for dim in (1, 2):
        grid = make_grid(dim, -1.0, 1.0, 128)
        for k in range(10):
            def bump():
                center = rng.uniform(-0.35, 0.35, size=dim)
                radius = float(rng.uniform(0.25, 0.55))
                amp = float(rng.uniform(0.5, 2.0))
                return sample(FieldSpec.bump(list(center), radius, amp), grid)

            report = identities.verify_leibniz(
                bump(), bump(), alphas[k % 3], backend="direct"
            )
            assert report.passed
            assert report.residuals["rel_linf"] <= 1e-12
            worst = max(worst, report.residuals["rel_linf"])
    elapsed = time.perf_counter() - t0
    assert elapsed <= 30.0
    _passline(1, "product rule, direct, 10 bump pairs x {1D,2D}",
              f"max rel {worst:.2e}, {elapsed:.1f}s")


# ---------------------------------------------------------------------------
# 2. adjointness pairings, both backends, 10 seeds
# ---------------------------------------------------------------------------


def test_02_duality_and_nl_duality():
    t0 = time.perf_counter()
    grid = make_grid(1, -1.0, 1.0, 128)
    worst = {"spectral": 0.0, "direct": 0.0}
    for seed in range(10):
        f = _scalar(grid, seed)
        g = _scalar(grid, seed + 50)
        phi = _vector(grid, seed + 100)
        for backend, tol in (("spectral", 1e-12), ("direct", 1e-10)):
            for report in (
                identities.verify_duality(f, phi, 0.5, backend=backend),
                identities.verify_nl_duality(f, g, phi, 0.5, backend=backend),
            ):
                assert report.passed
                assert report.residuals["rel_linf"] <= tol
                worst[backend] = max(worst[backend], report.residuals["rel_linf"])
    elapsed = time.perf_counter() - t0
    assert elapsed <= 10.0
    _passline(2, "duality + two-field duality, 10 seeds",
              f"spectral {worst['spectral']:.1e}, direct {worst['direct']:.1e}")


# ---------------------------------------------------------------------------
# 3. swap and zero-mean, 10 seeds
# ---------------------------------------------------------------------------


def test_03_swap_and_zero_mean():
    t0 = time.perf_counter()
    grid = make_grid(1, -1.0, 1.0, 128)
    worst = 0.0
    for seed in range(10):
        f, g, h = (_scalar(grid, seed + o) for o in (0, 40, 80))
        for backend in ("direct", "spectral"):
            for report in (
                identities.verify_swap(f, g, h, 0.5, backend=backend),
                identities.verify_zero_mean(f, g, 0.5, backend=backend),
            ):
                assert report.passed
                assert report.residuals["rel_linf"] <= 1e-10
                worst = max(worst, report.residuals["rel_linf"])
    elapsed = time.perf_counter() - t0
    assert elapsed <= 10.0
    _passline(3, "swap + zero-mean, 10 seeds, both backends", f"max rel {worst:.1e}")


# ---------------------------------------------------------------------------
# 4. cross-backend oracle: gradient of a sharp Gaussian
# ---------------------------------------------------------------------------


def test_04_cross_backend_gradient_oracle():
    t0 = time.perf_counter()
    finest = {}
    for alpha in (0.3, 0.5, 0.7):
        errors = []
        for N in (128, 256, 512):
            grid = make_grid(1, -1.0, 1.0, N)
            f = sample(FieldSpec.gaussian(0.0, 0.1), grid)
            direct = frac_gradient(f, alpha, config=_CORRECTED)
            spectral = frac_gradient_spec(f, alpha)
            rel = float(
                np.max(np.abs(direct.data - spectral.data))
                / np.max(np.abs(spectral.data))
            )
            errors.append(rel)
        assert errors[-1] <= 1e-3
        orders = [np.log2(errors[i] / errors[i + 1]) for i in range(2)]
        assert all(order >= 1.0 for order in orders)
        finest[alpha] = errors[-1]
    elapsed = time.perf_counter() - t0
    assert elapsed <= 60.0
    _passline(4, "cross-backend gradient, Gaussian sigma=0.1",
              "N=512 rel " + ", ".join(f"{a}:{e:.1e}" for a, e in finest.items()))


# ---------------------------------------------------------------------------
# 5. two-field remainder decomposition
# ---------------------------------------------------------------------------


def test_05_nl_decomposition():
    t0 = time.perf_counter()
    # symbol-level cancellation: the rearrangement holds all-spectrally
    grid = make_grid(1, -1.0, 1.0, 256)
    for seed in range(5):
        report = identities.verify_leibniz(
            _scalar(grid, seed), _scalar(grid, seed + 5), 0.5, backend="spectral"
        )
        assert report.passed
        assert report.residuals["rel_linf"] <= 1e-10

    # quadrature agreement: the two-field operators from both backends
    # converge to each other under refinement
    rows = {"grad": [], "div": []}
    for N in (64, 128, 256):
        g = make_grid(1, -1.0, 1.0, N)
        f, w = _scalar(g, 0), _scalar(g, 1)
        phi = _vector(g, 2)
        a = nl_gradient(f, w, 0.5, config=_PERIODIC)
        b = nl_gradient_spec(f, w, 0.5)
        rows["grad"].append(
            float(np.max(np.abs(a.data - b.data)) / np.max(np.abs(b.data)))
        )
        a = nl_divergence(f, phi, 0.5, config=_PERIODIC)
        b = nl_divergence_spec(f, phi, 0.5)
        rows["div"].append(
            float(np.max(np.abs(a.data - b.data)) / np.max(np.abs(b.data)))
        )
    for label, errs in rows.items():
        assert errs[-1] <= 1e-2
        assert errs[2] < errs[1] < errs[0], label
    elapsed = time.perf_counter() - t0
    assert elapsed <= 60.0
    _passline(5, "two-field decomposition",
              f"spectral exact; cross-backend N=256: grad {rows['grad'][-1]:.1e},"
              f" div {rows['div'][-1]:.1e}")


# ---------------------------------------------------------------------------
# 6. Riesz transform identities
# ---------------------------------------------------------------------------


def test_06_riesz_identities():
    t0 = time.perf_counter()
    worst_sq = worst_comp = 0.0
    for dim in (1, 2):
        grid = make_grid(dim, -1.0, 1.0, 64)
        f = _scalar(grid, 7)
        f = f + float(-f.values.mean())
        ms = riesz_multipliers(grid)

        # sum_j R_j^2 = -Id on mean-zero fields
        acc = sum(ms[j].apply(ms[j].apply(f)).values for j in range(dim))
        res = float(np.max(np.abs(acc + f.values)) / np.max(np.abs(f.values)))
        assert res <= 1e-12
        worst_sq = max(worst_sq, res)

        # R (-Lap)^(alpha/2) recovers the alpha-gradient componentwise
        lap = frac_laplacian_spec(f, 0.5)
        grad = frac_gradient_spec(f, 0.5)
        comp = np.stack([ms[j].apply(lap).values for j in range(dim)])
        res = float(np.max(np.abs(comp - grad.data)) / np.max(np.abs(grad.data)))
        assert res <= 1e-12
        worst_comp = max(worst_comp, res)
    elapsed = time.perf_counter() - t0
    assert elapsed <= 5.0
    _passline(6, "Riesz identities, 1D+2D",
              f"sum R^2+Id {worst_sq:.1e}, composition {worst_comp:.1e}")


# ---------------------------------------------------------------------------
# 7. inequality suites, 50-seed sweep
# ---------------------------------------------------------------------------


def test_07_inequality_sweep():
    t0 = time.perf_counter()
    grid = make_grid(1, -1.0, 1.0, 128)
    alphas = (0.3, 0.5, 0.7)
    checked = 0
    for seed in range(50):
        alpha = alphas[seed % 3]
        f = _scalar(grid, seed)
        g = _scalar(grid, seed + 200)
        halves = dict(beta=0.5 * alpha, gamma=0.5 * alpha)
        reports = (
            verify_minkowski_bounds(
                f, g, alpha, p=2.0, q=2.0, r=1.0, s=2.0, t=2.0, **halves
            ),
            identities.verify_nl_bound(
                f, g, alpha, p=2.0, q=2.0, r=1.0, s=2.0, t=2.0, **halves
            ),
        )
        for report in reports:
            assert report.passed
            scale = report.residuals["scale"]
            assert min(report.margins.values()) >= -1e-8 * scale
            checked += len(report.margins)
    elapsed = time.perf_counter() - t0
    assert elapsed <= 120.0
    _passline(7, "inequality sweep, 50 seeds",
              f"{checked} margins, zero violations, {elapsed:.1f}s")


# ---------------------------------------------------------------------------
# 8. empirical-constant studies and the refused endpoint
# ---------------------------------------------------------------------------


def test_08_commutator_constant_studies():
    t0 = time.perf_counter()
    kpv = identities.verify_kpv(0, 0.5, p=2.0, trials=20)
    crw = identities.verify_crw(0, p=2.0, trials=20)
    for report in (kpv, crw):
        assert report.passed
        ratios = [value for _, value in report.refinement]
        assert all(np.isfinite(r) and r > 0 for r in ratios)
        coarse, fine = ratios
        assert abs(fine - coarse) / max(coarse, fine) <= 0.20
    for bad in (lambda: identities.verify_kpv(0, 0.5, p=1.0, trials=20),
                lambda: identities.verify_crw(0, p=1.0, trials=20)):
        with pytest.raises(ValueError, match="open problem"):
            bad()
    elapsed = time.perf_counter() - t0
    assert elapsed <= 120.0
    _passline(8, "commutator constants, 20 trials",
              f"kpv max {kpv.refinement[1][1]:.3f}, crw max {crw.refinement[1][1]:.3f},"
              " p=1 refused")


# ---------------------------------------------------------------------------
# 9. boundary pairing: smooth, self-pairing, and indicator forms
# ---------------------------------------------------------------------------


def test_09_gauss_green():
    t0 = time.perf_counter()
    grid = make_grid(1, -1.0, 1.0, 256)
    f = _scalar(grid, 4)
    g = _scalar(grid, 5)

    smooth = identities.verify_gauss_green(f, g, alpha=0.5)
    assert smooth.passed and smooth.residuals["rel_linf"] <= 1e-10

    selfpair = identities.verify_gauss_green(f, f, alpha=0.5)
    assert selfpair.passed and selfpair.residuals["rel_linf"] <= 1e-10

    gset = make_grid(1, -2.0, 2.0, 1024)
    fset = sample(FieldSpec.gaussian(0.0, 0.3), gset)
    indicator = identities.verify_gauss_green(
        fset, E=FieldSpec.indicator(0.0, 1.0), alpha=0.5
    )
    assert indicator.passed
    assert indicator.residuals["linf"] <= 5e-2
    table = [value for _, value in indicator.refinement]
    assert all(b < a for a, b in zip(table, table[1:]))
    elapsed = time.perf_counter() - t0
    assert elapsed <= 60.0
    _passline(9, "boundary pairing",
              f"smooth {smooth.residuals['rel_linf']:.1e}, self"
              f" {selfpair.residuals['rel_linf']:.1e}, indicator@1024"
              f" {indicator.residuals['linf']:.3f} decreasing")


# ---------------------------------------------------------------------------
# 10. boundary-value solve: manufactured recovery and diagonal oracle
# ---------------------------------------------------------------------------


def test_10_bvp_manufactured_and_oracle():
    t0 = time.perf_counter()

    # reference rhs on a fine grid, decimated onto the nested coarse lattice
    Nref = 1024
    gref = make_grid(1, 0.0, 1.0, Nref)
    mref = sample(FieldSpec.indicator(0.25, 0.75), gref)
    uref = sample(FieldSpec.bump(0.5, 0.2), gref)
    pref = pde.make_problem(gref, 0.5, lam=1.0, mask=mref)
    fref = pde.apply_L(pref, uref) + 1.0 * uref

    N = 256
    gN = make_grid(1, 0.0, 1.0, N)
    maskN = sample(FieldSpec.indicator(0.25, 0.75), gN)
    k = Nref // N
    problem = pde.make_problem(
        gN, 0.5, lam=1.0, mask=maskN,
        rhs=GridField.scalar(gN, fref.values[::k] * (maskN.values != 0.0)),
    )
    ustar = GridField.scalar(gN, uref.values[::k].copy())
    u, report = pde.solve(problem, tol=1e-8, max_iter=500)
    assert report.converged
    assert report.iterations <= 500
    assert report.final_weak_residual <= 1e-8
    l2_error = lp_norm(u - ustar, 2) / lp_norm(ustar, 2)
    assert l2_error <= 1e-2

    # full mask, A = 1: the solve must match the exact symbol inversion
    godc = make_grid(1, 0.0, 1.0, 256)
    rhs = _scalar(godc, 7)
    diag = pde.make_problem(godc, 0.5, lam=1.0, rhs=rhs)
    udiag, drep = pde.solve(diag, tol=1e-12)
    xi = np.fft.rfftfreq(256, d=godc.widths[0] / 256)
    symbol = (2.0 * np.pi * np.abs(xi)) ** 1.0 + 1.0
    exact = np.fft.irfft(np.fft.rfft(rhs.values) / symbol, n=256)
    oracle_rel = float(np.abs(udiag.values - exact).max() / np.abs(exact).max())
    assert drep.converged
    assert oracle_rel <= 1e-10

    elapsed = time.perf_counter() - t0
    assert elapsed <= 60.0
    _passline(10, "manufactured solve + diagonal oracle",
              f"L2 error {l2_error:.2e} at N=256, oracle {oracle_rel:.1e},"
              f" {report.iterations} iters")


# ---------------------------------------------------------------------------
# 11. energy certificate over a random masked corpus
# ---------------------------------------------------------------------------


def test_11_energy_certificate():
    t0 = time.perf_counter()
    grid = make_grid(1, -1.0, 1.0, 128)
    smooth = lambda seed, amp: GridField.scalar(
        grid, amp * _scalar(grid, seed).values
    )
    problem = pde.make_problem(
        grid, 0.5,
        A=GridField.scalar(grid, 1.0 + 0.3 * _scalar(grid, 11).values),
        b1=[0.2], b2=[0.1], b3=[0.15],
        c0=smooth(12, 0.3),
        c1=GridField.scalar(grid, 1.0 + 0.2 * _scalar(grid, 13).values),
        c3=0.25,
        lam=5.0,
        mask=sample(FieldSpec.indicator(-0.6, 0.6), grid),
    )
    report = pde.check_energy(problem, trials=100, seed=0)
    assert report.passed
    scale = report.residuals["scale"]
    assert min(report.margins.values()) >= -1e-8 * scale
    assert report.residuals["rel_linf"] <= 1e-8
    elapsed = time.perf_counter() - t0
    assert elapsed <= 60.0
    _passline(11, "energy certificate, 100 masked pairs",
              f"M={report.details['M']:.3f} C={report.details['C']:.3f},"
              f" min margins: continuity {report.margins['continuity']:.2e},"
              f" coercivity {report.margins['coercivity']:.2e}")


# ---------------------------------------------------------------------------
# 12. determinism: repeat runs and thread counts are byte-identical
# ---------------------------------------------------------------------------


def test_12_determinism(tmp_path):
    # same (seed, flags) twice, several suites, in-process
    for suite in ("leibniz", "energy", "poincare", "kpv"):
        a, b = tmp_path / f"{suite}_a.json", tmp_path / f"{suite}_b.json"
        flags = ["verify", "--suite", suite, "--grid", "64", "--seed", "9"]
        assert cli_main(flags + ["--report", str(a)]) == 0
        assert cli_main(flags + ["--report", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes(), suite

    # serial vs parallel through the real entry point
    problem = {
        "grid": {"dim": 1, "lo": 0.0, "hi": 1.0, "N": 128},
        "alpha": 0.5,
        "lambda": 1.0,
        "mask": {"interval": [0.25, 0.75]},
        "A": 1.0,
        "rhs": {"kind": "gaussian", "center": 0.5, "sigma": 0.1},
    }
    problem_path = tmp_path / "problem.json"
    problem_path.write_text(json.dumps(problem))

    def run(threads, tag):
        env = dict(os.environ, FRACFIELD_THREADS=threads)
        report = tmp_path / f"verify_{tag}.json"
        subprocess.run(
            [sys.executable, "-m", "fracfield.cli", "verify", "--suite",
             "energy", "--grid", "64", "--report", str(report)],
            check=True, env=env, capture_output=True,
        )
        solution = tmp_path / f"u_{tag}.json"
        sout = subprocess.run(
            [sys.executable, "-m", "fracfield.cli", "solve", "--problem",
             str(problem_path), "--output", str(solution)],
            check=True, env=env, capture_output=True,
        ).stdout
        return report.read_bytes(), solution.read_bytes(), sout

    serial = run("1", "serial")
    parallel = run("4", "parallel")
    assert serial == parallel
    _passline(12, "determinism", "reports, solutions, and solve output"
              " byte-identical across reruns and thread counts")
