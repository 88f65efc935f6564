"""Command-line interface.

Commands emit deterministic JSON reports on stdout (sorted keys, floats
rounded to 12 decimals) or write dump files; progress notes go to stderr
unless --quiet.  Exit codes: 0 pass, 1 theorem or assertion failure,
2 undecided gap certification, 3 input error.

QPI_THREADS caps the BLAS thread pools (set before numerics load);
QPI_CONFIG points at a JSON file of numeric defaults.
"""

from __future__ import annotations

import argparse
import json
import os
import sys


def _apply_thread_env():
    n = os.environ.get("QPI_THREADS")
    if n:
        for var in (
            "OMP_NUM_THREADS",
            "OPENBLAS_NUM_THREADS",
            "MKL_NUM_THREADS",
            "NUMEXPR_NUM_THREADS",
        ):
            os.environ.setdefault(var, n)


def _round_floats(obj, digits=12):
    if isinstance(obj, float):
        return round(obj, digits)
    if isinstance(obj, dict):
        return {k: _round_floats(v, digits) for k, v in sorted(obj.items())}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v, digits) for v in obj]
    return obj


def _emit(obj):
    print(json.dumps(_round_floats(obj), sort_keys=True, indent=1))


def _note(args, msg):
    if not args.quiet:
        print(msg, file=sys.stderr)


def _load(args):
    from .modelio import load_model

    bundle = load_model(args.model)
    if bundle.builtin:
        from .errors import SchemaError

        raise SchemaError(
            f"model {bundle.name!r} is a builtin reference object, not a symbol"
        )
    return bundle


def _config(args):
    from .config import load_config

    cfg = load_config(getattr(args, "config", None))
    if getattr(args, "theta_samples", None):
        cfg = cfg.replace(
            theta_samples=args.theta_samples,
            gap_theta_samples=min(args.theta_samples, cfg.gap_theta_samples),
        )
    return cfg


def _parse_freeze(text):
    var, _, val = text.partition("=")
    var = var.strip()
    if var not in ("z", "w") or not val:
        raise ValueError("freeze must look like z=<complex> or w=<complex>")
    return var, complex(val.strip().replace("i", "j"))


# -- subcommand implementations ----------------------------------------------


def cmd_check_symmetry(args):
    from .laurent import check_chiral, check_hermitian_on_torus, check_inversion

    bundle = _load(args)
    base = bundle.model.base if bundle.is_family else bundle.model
    herm = check_hermitian_on_torus(base)
    inv = check_inversion(base, bundle.symmetry)
    out = {
        "model": bundle.name,
        "hermitian": {"ok": herm[0], "defect": herm[1]},
        "inversion": {"ok": inv[0], "defect": inv[1]},
    }
    if bundle.symmetry.chiral is not None:
        chi = check_chiral(base, bundle.symmetry)
        out["chiral"] = {"ok": chi[0], "defect": chi[1]}
    _emit(out)
    return 0 if all(v["ok"] for v in out.values() if isinstance(v, dict)) else 1


def cmd_gap_check(args):
    from .wienerhopf import assumption_check

    bundle = _load(args)
    cfg = _config(args)
    _note(args, f"certifying half-plane gaps for {bundle.name}")
    report = assumption_check(bundle.model, cfg)
    _emit({"model": bundle.name, **report.to_dict()})
    return 0 if report.passed else 1


def cmd_factorize(args):
    from .modelio import _matrix_to_json
    from .wienerhopf import factorize_right

    bundle = _load(args)
    base = bundle.model.base if bundle.is_family else bundle.model
    cfg = _config(args)
    var, value = _parse_freeze(args.freeze)
    run_axis = 0 if args.var == "z" else 1
    frozen_axis = 1 - run_axis
    if ("zw"[frozen_axis]) != var:
        raise ValueError(
            f"--var {args.var} requires freezing the other variable, got {var}"
        )
    f = base.fix_variable(frozen_axis, value)
    cf = factorize_right(f, cfg)
    out = {
        "model": bundle.name,
        "var": args.var,
        "freeze": {var: [value.real, value.imag]},
        "residual": cf.residual,
        "decay": cf.decay,
        "nblocks": cf.nblocks,
    }
    if args.dump_coeffs:
        dump = {
            "plus": [
                {"k": i, "matrix": _matrix_to_json(m)}
                for i, m in enumerate(cf.plus_coeffs)
            ],
            "minus": [
                {"k": i, "matrix": _matrix_to_json(m)}
                for i, m in enumerate(cf.minus_coeffs)
            ],
        }
        with open(args.dump_coeffs, "w", encoding="utf-8") as fh:
            json.dump(_round_floats(dump), fh, sort_keys=True)
        out["dump"] = args.dump_coeffs
    _emit(out)
    return 0


def cmd_indicator(args):
    from .bulk import mu2d, mu3d

    bundle = _load(args)
    cfg = _config(args)
    dim = args.dim or bundle.dimension
    if dim == 3:
        if not bundle.is_family:
            raise ValueError("model has no family section; cannot run 3D")
        report = mu3d(bundle.model, bundle.symmetry, cfg)
    else:
        base = bundle.model.base if bundle.is_family else bundle.model
        report = mu2d(base, bundle.symmetry, cfg)
    _emit({"model": bundle.name, **report.to_dict()})
    return 0


def cmd_corner_index(args):
    from .boundary import corner_indices, winding_oracle, _solve_pqr

    bundle = _load(args)
    cfg = _config(args)
    _note(args, f"counting corner modes for {bundle.name} at L={args.L}")
    values, diags = corner_indices(
        bundle.model, bundle.symmetry, L=args.L, cfg=cfg
    )
    out = {
        "model": bundle.name,
        "values": values,
        "pqr": list(_solve_pqr(values)),
        "L": args.L,
        "mode_energies": diags["first"]["mode_energies"],
    }
    if args.oracle == "winding":
        _note(args, "running the glued-sphere winding oracle")
        out["oracle"] = winding_oracle(bundle.model, bundle.symmetry, values, cfg)
        if not out["oracle"]["consistent"]:
            _emit(out)
            return 1
    _emit(out)
    return 0


def cmd_spectral_flow(args):
    from .boundary import spectral_flows, _solve_pqr

    bundle = _load(args)
    if not bundle.is_family:
        raise ValueError("spectral flow needs a 3D family model")
    cfg = _config(args)
    _note(args, f"tracking hinge spectra for {bundle.name} at L={args.L}")
    values, diags = spectral_flows(
        bundle.model, bundle.symmetry, L=args.L,
        theta_samples=args.theta_samples, cfg=cfg,
    )
    _emit({
        "model": bundle.name,
        "values": values,
        "pqr": list(_solve_pqr(values)),
        "L": args.L,
        "theta_samples": diags["theta_samples"],
        "crossings": diags["crossings"],
    })
    return 0


def cmd_verify(args):
    from .boundary import theorem_check

    bundle = _load(args)
    cfg = _config(args)
    dim = args.dim or bundle.dimension
    model = bundle.model
    if dim == 2 and bundle.is_family:
        model = bundle.model.base
    _note(args, f"running full correspondence check for {bundle.name} (dim {dim})")
    report = theorem_check(
        model, bundle.symmetry, cfg=cfg, L=args.L,
        theta_samples=args.theta_samples, oracle=args.oracle == "winding",
    )
    _emit({"model": bundle.name, **report.to_dict()})
    return 0 if report.passed else 1


def cmd_spectrum(args):
    import numpy as np

    from .boundary import truncate, _near_zero_eigs
    from .wienerhopf import _edge_geometry, _frozen_symbol

    bundle = _load(args)
    cfg = _config(args)
    rows = []
    if args.edge:
        base = bundle.model.base if bundle.is_family else bundle.model
        axis, flip = _edge_geometry(args.edge)
        width = args.width
        momenta = 2 * np.pi * np.arange(args.momenta) / args.momenta
        for ang in momenta:
            f = _frozen_symbol(base, axis, flip, np.exp(1j * ang))
            n = f.size
            mat = np.zeros((width, n, width, n), dtype=complex)
            for (k,), a in f.terms.items():
                if abs(k) >= width:
                    continue
                i0, j0 = max(k, 0), max(-k, 0)
                for t in range(width - abs(k)):
                    mat[i0 + t, :, j0 + t, :] = a
            evals = np.linalg.eigvalsh(mat.reshape(width * n, width * n))
            rows.extend(
                (float(ang), idx, float(e)) for idx, e in enumerate(evals)
            )
    else:
        if not bundle.is_family:
            raise ValueError("hinge spectra need a 3D family model")
        nth = args.theta_samples or cfg.theta_samples
        thetas = 2 * np.pi * np.arange(nth) / nth
        for th in thetas:
            trunc = truncate(bundle.model.slice(th), "a", args.width, cfg)
            evals, _, _ = _near_zero_eigs(trunc.matrix, want_beyond=np.inf, k0=8)
            evals = np.sort(evals[np.argsort(np.abs(evals))[:8]])
            rows.extend(
                (float(th), idx, float(e)) for idx, e in enumerate(evals)
            )
    rows.sort(key=lambda r: (r[0], r[1]))
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("param,index,energy\n")
        for param, idx, energy in rows:
            fh.write(f"{param:.12g},{idx},{energy:.12g}\n")
    _note(args, f"wrote {len(rows)} rows to {args.out}")
    return 0


def cmd_ktable(args):
    from . import ktheory as kt

    if args.dump:
        fixed = [f"({i},{j},{k})" for (i, j, k) in kt.FIXED_POINTS_T3]
        print("generator," + ",".join(fixed))
        for gen in kt.T3_GENERATORS:
            row = kt.F3_TABLE[gen]
            cells = ["t" if r == kt.T else ("1" if r == kt.ONE else repr(r))
                     for r in row]
            print(gen + "," + ",".join(cells))
        return 0
    results = kt.verify_ledger()
    ok = True
    for name, passed in results.items():
        print(f"{name}: {'pass' if passed else 'FAIL'}")
        ok = ok and passed
    return 0 if ok else 1


# -- dispatch ------------------------------------------------------------------


def build_parser():
    top = argparse.ArgumentParser(
        prog="qpi",
        description=(
            "bulk and boundary invariants of inversion-symmetric "
            "second-order topological insulators"
        ),
    )
    top.add_argument("--quiet", action="store_true", help="suppress progress notes")
    top.add_argument("--config", help="JSON file overriding numeric defaults")
    sub = top.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        p = sub.add_parser(name, **kw)
        p.set_defaults(fn=fn)
        return p

    p = add("check-symmetry", cmd_check_symmetry,
            help="validate Hermiticity and symmetry relations")
    p.add_argument("--model", required=True)

    p = add("gap-check", cmd_gap_check, help="certify half-plane gaps")
    p.add_argument("--model", required=True)
    p.add_argument("--theta-samples", type=int, default=None)

    p = add("factorize", cmd_factorize,
            help="canonical one-sided factorization of a frozen symbol")
    p.add_argument("--model", required=True)
    p.add_argument("--var", choices=("z", "w"), default="z")
    p.add_argument("--freeze", required=True, metavar="VAR=VALUE")
    p.add_argument("--dump-coeffs", default=None)

    p = add("indicator", cmd_indicator, help="symmetry-based indicator")
    p.add_argument("--model", required=True)
    p.add_argument("--dim", type=int, choices=(2, 3), default=None)

    p = add("corner-index", cmd_corner_index, help="chiral corner-mode counts")
    p.add_argument("--model", required=True)
    p.add_argument("--L", type=int, default=24)
    p.add_argument("--oracle", choices=("winding",), default=None)

    p = add("spectral-flow", cmd_spectral_flow, help="hinge spectral flows")
    p.add_argument("--model", required=True)
    p.add_argument("--L", type=int, default=16)
    p.add_argument("--theta-samples", type=int, default=128)

    p = add("verify", cmd_verify, help="full bulk-boundary correspondence check")
    p.add_argument("--model", required=True)
    p.add_argument("--dim", type=int, choices=(2, 3), default=None)
    p.add_argument("--L", type=int, default=None)
    p.add_argument("--theta-samples", type=int, default=None)
    p.add_argument("--oracle", choices=("winding",), default=None)

    p = add("spectrum", cmd_spectrum, help="plot-ready CSV band spectra")
    p.add_argument("--model", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--edge", type=int, choices=(1, 2, 3, 4), default=None)
    group.add_argument("--hinge", choices=("a", "b", "c", "d"), default=None)
    p.add_argument("--momenta", type=int, default=128)
    p.add_argument("--width", type=int, default=24)
    p.add_argument("--theta-samples", type=int, default=None)
    p.add_argument("--out", required=True)

    p = add("ktable", cmd_ktable, help="exact ledger checks and table dump")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--verify", action="store_true")
    mode.add_argument("--dump", action="store_true")

    return top


def main(argv=None):
    _apply_thread_env()
    parser = build_parser()
    args = parser.parse_args(argv)
    from .errors import (
        GapViolation,
        NotHermitian,
        QpiError,
        SchemaError,
        SymmetryError,
        TrackingLost,
        Undecided,
        UnstableCount,
    )

    try:
        return args.fn(args)
    except (SchemaError, NotHermitian, SymmetryError, FileNotFoundError,
            ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 3
    except Undecided as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return 2
    except (GapViolation, UnstableCount, TrackingLost, QpiError) as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
