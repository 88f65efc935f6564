"""Acceptance suite.

Each test covers one acceptance criterion at its stated tolerance and
runtime budget and prints a single PASS/FAIL line (run with ``-s`` to see
them as they complete).  Undecided or unstable outcomes in the random-model
suite are reported skips, never silent passes.
"""

import time

import numpy as np
import pytest

from qpindex import ktheory as kt
from qpindex import models, zoo
from qpindex.boundary import (
    CORNERS,
    corner_indices,
    spectral_flows,
    theorem_check,
    winding3,
    winding_oracle,
    _solve_pqr,
)
from qpindex.bulk import homotopy_scan, mu2d, mu3d
from qpindex.config import DEFAULTS
from qpindex.errors import Undecided, UnstableCount
from qpindex.laurent import check_chiral, check_hermitian_on_torus, check_inversion
from qpindex.wienerhopf import ExtendedSymbol, assumption_check, factorize_right


def _report(name, ok, detail=""):
    line = f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}"
    if detail:
        line += f"  [{detail}]"
    print(line, flush=True)
    assert ok, line


def test_criterion_1_factorization_golden():
    """Right factorizations of the block match the closed-form factors."""
    t0 = time.time()
    h = models.block_model()
    rng = np.random.default_rng(20240809)
    pts = 0.999 * np.sqrt(rng.uniform(size=100)) * np.exp(
        2j * np.pi * rng.uniform(size=100)
    )
    worst_res = 0.0
    worst_x = 0.0
    for w in np.exp(2j * np.pi * np.arange(12) / 12):
        cf = factorize_right(h.fix_variable(1, w))
        worst_res = max(worst_res, cf.residual)
        ext = cf.extend(pts)
        ref = np.stack(
            [models.xfactor_minus(1 / np.conj(z), w) @ models.xfactor_plus(z, w)
             for z in pts]
        )
        worst_x = max(worst_x, float(np.abs(ext - ref).max()))
    worst_y = 0.0
    for z in np.exp(2j * np.pi * np.arange(12) / 12):
        cf = factorize_right(h.fix_variable(0, z))
        worst_res = max(worst_res, cf.residual)
        ext = cf.extend(pts)
        ref = np.stack(
            [models.yfactor_minus(z, 1 / np.conj(p)) @ models.yfactor_plus(z, p)
             for p in pts]
        )
        worst_y = max(worst_y, float(np.abs(ext - ref).max()))
    elapsed = time.time() - t0
    ok = worst_res < 1e-8 and worst_x < 1e-6 and worst_y < 1e-6 and elapsed < 10
    _report(
        "1 factorization-golden", ok,
        f"residual {worst_res:.1e}, x-defect {worst_x:.1e}, "
        f"y-defect {worst_y:.1e}, {elapsed:.1f}s",
    )


def test_criterion_2_gap_certification():
    """All four edges of the 2D model and all four surfaces of the 3D family."""
    t0 = time.time()
    H, _ = models.paper_2d()
    rep2 = assumption_check(H)
    fam, _ = models.paper_3d()
    rep3 = assumption_check(fam)
    elapsed = time.time() - t0
    ok = rep2.passed and rep3.passed and elapsed < 60
    ok = ok and all(e.invertible for e in rep2.entries + rep3.entries)
    _report(
        "2 gap-certification", ok,
        f"2D min sigma {min(e.min_singular for e in rep2.entries):.3f}, "
        f"3D min sigma {min(e.min_singular for e in rep3.entries):.3f}, "
        f"{elapsed:.1f}s",
    )


def test_criterion_3_indicators():
    """Parity counts, both indicators, and the deformation scan."""
    t0 = time.time()
    H1, sym = models.paper_2d(1.0)
    rep1 = mu2d(H1, sym)
    counts_ok = [e.n_minus for e in rep1.entries] == [3, 1, 1, 1]
    ranks_ok = all(e.occupied_rank == 3 for e in rep1.entries)

    H, _ = models.paper_2d()
    rep = mu2d(H, sym)
    mu_ok = rep.mu == 2 and rep.half_mu == 1

    scan = homotopy_scan(
        lambda r: models.paper_2d(r)[0], sym, np.linspace(0.0, 1.0, 11)
    )
    scan_ok = all(r.mu == 2 for _, r, _ in scan)

    fam, sym3 = models.paper_3d()
    rep3 = mu3d(fam, sym3)
    mu3_ok = rep3.half_mu == 1
    elapsed = time.time() - t0
    ok = counts_ok and ranks_ok and mu_ok and scan_ok and mu3_ok and elapsed < 5
    _report(
        "3 indicators", ok,
        f"n_minus {[e.n_minus for e in rep1.entries]}, mu2d {rep.mu}, "
        f"half mu3d {rep3.half_mu}, {elapsed:.1f}s",
    )


def test_criterion_4_bulk_corner():
    """Corner counts: parity, pairing, zero sum, L-stability, verify exit 0."""
    t0 = time.time()
    H, sym = models.paper_2d()
    gap = assumption_check(H)
    values24, _ = corner_indices(H, sym, L=24, gap=gap)  # checks 24 vs 32
    rep = theorem_check(H, sym, L=24)
    elapsed = time.time() - t0
    ok = (
        (values24["a"] + values24["b"]) % 2 == 1
        and values24["a"] == -values24["c"]
        and values24["b"] == -values24["d"]
        and sum(values24.values()) == 0
        and rep.passed
        and rep.boundary.values == values24
        and elapsed < 180
    )
    from qpindex.cli import main

    code = main(["--quiet", "verify", "--model", str(zoo.zoo_path("paper-2d")),
                 "--L", "24"])
    ok = ok and code == 0
    _report(
        "4 bulk-corner", ok,
        f"values {values24}, verify exit {code}, {time.time() - t0:.0f}s",
    )


def test_criterion_5_bulk_hinge(capsys):
    """Hinge flows at L=16 with 128 samples; verify exits 0."""
    t0 = time.time()
    from qpindex.cli import main

    code = main(["--quiet", "verify", "--model", str(zoo.zoo_path("paper-3d")),
                 "--L", "16", "--theta-samples", "128"])
    out = capsys.readouterr().out
    import json

    doc = json.loads(out)
    values = doc["boundary"]["values"]
    elapsed = time.time() - t0
    ok = (
        code == 0
        and doc["passed"]
        and (values["a"] + values["b"]) % 2 == 1
        and values["a"] == -values["c"]
        and values["b"] == -values["d"]
        and sum(values.values()) == 0
        and elapsed < 600
    )
    with capsys.disabled():
        _report(
            "5 bulk-hinge", ok,
            f"flows {values}, verify exit {code}, {elapsed:.0f}s",
        )


def test_criterion_6_winding_oracle():
    """Constant exact zero, reference within 0.05, per-corner match."""
    t0 = time.time()

    def const(z, w):
        shape = np.broadcast_shapes(np.shape(z), np.shape(w))
        return np.broadcast_to(np.eye(2), shape + (2, 2)).copy()

    raw0, k0 = winding3(const, (1, 1))
    const_ok = k0 == 0 and abs(raw0) < 1e-12

    raw1, k1 = winding3(models.degree_one_reference, (1, 1))
    ref_ok = k1 == 1 and abs(abs(raw1) - 1) < 0.05

    H, sym = models.paper_2d()
    gap = assumption_check(H)
    values, _ = corner_indices(H, sym, L=24, gap=gap)
    oracle = winding_oracle(H, sym, values)
    match_ok = oracle["consistent"] and all(
        abs(oracle["windings"][lab]["rounded"]) == abs(values[lab])
        for lab in CORNERS
    )
    elapsed = time.time() - t0
    ok = const_ok and ref_ok and match_ok and elapsed < 300
    _report(
        "6 winding-oracle", ok,
        f"reference {raw1:.4f}, sign {oracle['global_sign']}, {elapsed:.0f}s",
    )


def test_criterion_7_k_ledger():
    """Exact ledger identities, no tolerances anywhere."""
    t0 = time.time()
    result = kt.verify_ledger()
    mus = {g: kt.mu3d_ledger(kt.KClassT3.from_dict({g: 1}))
           for g in kt.T3_GENERATORS}
    images = {i: kt.mu3d_ledger(kt.psi_phi_image(i)) for i in range(1, 14)}
    elapsed = time.time() - t0
    ok = (
        all(result.values())
        and all(v in (0, 2) for v in mus.values())
        and images[11] == 2
        and all(v == 0 for i, v in images.items() if i != 11)
        and elapsed < 1
    )
    _report("7 k-ledger", ok, f"checks {result}, {elapsed:.2f}s")


def test_criterion_8_property_suites():
    """Random symmetric models: extension symmetries and corner identities."""
    t0 = time.time()
    rng = np.random.default_rng(314159)
    skipped = []
    checked = 0
    failures = []
    for i in range(20):
        size = 4 if i % 2 == 0 else 6
        seed = 9000 + i
        H, sym = models.random_chiral_inversion_model(seed, size=size)
        assert check_hermitian_on_torus(H)[0]
        assert check_inversion(H, sym)[0]
        assert check_chiral(H, sym)[0]
        try:
            gap = assumption_check(H)
        except Undecided as exc:
            skipped.append((seed, f"undecided gap: {exc}"))
            continue
        if not gap.passed:
            skipped.append((seed, "gap certification failed"))
            continue

        ext = ExtendedSymbol(H)
        inv, chi = sym.inversion, sym.chiral
        defect = 0.0
        for j in range(50):
            r = rng.uniform(0.1, 0.9) if j % 2 else rng.uniform(1.1, 5.0)
            a1, a2 = rng.uniform(0, 2 * np.pi, size=2)
            if j % 4 < 2:
                z, w = r * np.exp(1j * a1), np.exp(1j * a2)
            else:
                z, w = np.exp(1j * a1), r * np.exp(1j * a2)
            val = ext.value(z, w)
            defect = max(defect, np.abs(val - val.conj().T).max())
            defect = max(defect, np.abs(chi @ val @ chi.conj().T + val).max())
            defect = max(
                defect,
                np.abs(inv @ val @ inv.conj().T - ext.value(1 / z, 1 / w)).max(),
            )
        if defect >= 1e-6:
            failures.append((seed, f"extension defect {defect:.2e}"))
            continue

        try:
            rep = theorem_check(H, sym, L=16)
        except (UnstableCount, Undecided) as exc:
            skipped.append((seed, f"{type(exc).__name__}: {exc}"))
            continue
        values = rep.boundary.values
        if not (
            sum(values.values()) == 0
            and values["a"] == -values["c"]
            and values["b"] == -values["d"]
            and rep.theorem["pass"]
        ):
            failures.append((seed, f"identities failed: {values}"))
            continue
        checked += 1
    elapsed = time.time() - t0
    for seed, why in skipped:
        print(f"  criterion 8 reported skip: seed {seed}: {why}", flush=True)
    ok = not failures and checked >= 12 and elapsed < 900
    _report(
        "8 property-suites", ok,
        f"{checked} checked, {len(skipped)} reported skips, "
        f"failures {failures}, {elapsed:.0f}s",
    )
