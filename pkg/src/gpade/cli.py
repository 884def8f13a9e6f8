"""Command-line front end.

Subcommands: analyze, build, verify, eval, certify, demo.
Exit codes: 0 success, 1 verification failure, 2 input error, 3 resource cap.
"""
from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from .approximants import ConstructionError, cache_lookup, cache_store, construct
from .certificates import CertificateError, certify
from .companion import RowSelectionError, build_system, derived_rows_for
from .config import ConfigError, RunConfig, load_config, parse_n_grid
from .evalnum import continue_solution, jf_eval
from .continuation import gp
from .operators import NotFuchsianError, NotGOperatorError, ResourceCapError, profile
from .verify import verify_pade

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_INPUT = 2
EXIT_RESOURCE = 3


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gpade",
                                 description="Pade approximants, Shidlovsky ranks and "
                                 "Siegel certificates for G-functions")
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None)
    common.add_argument("--operator", default=None,
                        help="built-in name (geometric, li2, li3, polylog)")
    common.add_argument("--n-grid", dest="n_grid", default=None, help="A..B[:step]")
    common.add_argument("--r", type=int, default=None)
    common.add_argument("--S", type=int, default=None)
    common.add_argument("--m", type=int, default=None)
    common.add_argument("--z0", default=None)
    common.add_argument("--precision-bits", dest="precision_bits", type=int, default=None)
    common.add_argument("--jobs", type=int, default=None)
    common.add_argument("--force", action="store_true", default=None)
    common.add_argument("--out", default=None)
    common.add_argument("--route", default=None, choices=["solve", "reduction"])
    for name in ("analyze", "build", "verify", "eval", "certify", "demo"):
        sub.add_parser(name, parents=[common])
    return ap


def _config(args) -> RunConfig:
    overrides = {
        "operator": args.operator, "n_grid": args.n_grid, "r": args.r,
        "S": args.S, "m": args.m, "z0": args.z0,
        "precision_bits": args.precision_bits, "jobs": args.jobs,
        "force": args.force, "out": args.out, "route": args.route,
    }
    return load_config(args.config, overrides)


def cmd_analyze(cfg: RunConfig) -> int:
    prof = profile(cfg.operator, m_override=cfg.m)
    print(f"operator        : {cfg.operator_name}")
    print(prof.describe())
    if cfg.S:
        q = prof.ell1 * cfg.S + prof.mu
        print(f"companion q     : {q} (= ell1*S + mu at S={cfg.S})")
    return EXIT_OK


def _default_rs(cfg: RunConfig, prof) -> tuple[int, int]:
    S = cfg.S if cfg.S is not None else max(4, prof.max_log_power + 2)
    if cfg.r is not None:
        r = cfg.r
    else:
        from .certificates import asymptotic_policy
        r = max(1, asymptotic_policy(max(S, 3))[0])
    return r, S


def _build_one(cfg: RunConfig, prof, n: int, r: int, S: int):
    cached = None
    if not cfg.force:
        cached = cache_lookup(cfg.operator.hash_key(), n, r, S, prof.m, cfg.cache_dir)
    if cached is not None:
        return cached, True
    F = cfg.f_coefficients(4 * (n + 8) * max(S, 2)) if cfg.provider else None
    approx = construct(cfg.operator, F, n=n, r=r, S=S, m=prof.m, prof=prof,
                       route=cfg.route)
    cache_store(approx, cfg.cache_dir)
    return approx, False


def cmd_build(cfg: RunConfig) -> int:
    prof = profile(cfg.operator, m_override=cfg.m)
    r, S = _default_rs(cfg, prof)
    for n in cfg.n_grid:
        approx, was_cached = _build_one(cfg, prof, n, r, S)
        path = approx.cache_path(cfg.cache_dir)
        print(f"n={n}: {'cache hit' if was_cached else 'built'} -> {path}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    prof = profile(cfg.operator, m_override=cfg.m)
    r, S = _default_rs(cfg, prof)
    failures = 0
    os.makedirs(cfg.out_dir, exist_ok=True)
    report_path = os.path.join(cfg.out_dir, "pade_report.txt")
    with open(report_path, "w") as fh:
        for n in cfg.n_grid:
            approx, _ = _build_one(cfg, prof, n, r, S)
            rep = verify_pade(approx, cfg.operator, prof=prof,
                              precision=cfg.precision_bits)
            fh.write(f"== n={n} r={r} S={S}\n")
            for line in rep.lines():
                fh.write(line + "\n")
            print(f"n={n}: {'all conditions pass' if rep.all_passed else 'FAILURES'}"
                  f" (kappa={rep.kappa_measured})")
            if not rep.all_passed:
                failures += 1
    print(f"report -> {report_path}")
    return EXIT_VERIFY_FAIL if failures else EXIT_OK


def cmd_eval(cfg: RunConfig) -> int:
    if cfg.z0 is None:
        raise ConfigError("--z0 required for eval")
    prof = profile(cfg.operator, m_override=cfg.m)
    r, S = _default_rs(cfg, prof)
    comp = build_system(prof, cfg.operator, S)
    F = cfg.f_coefficients(2048)
    values = continue_solution(cfg.operator, prof, S, F, gp(cfg.z0),
                               cfg.precision_bits)
    os.makedirs(cfg.out_dir, exist_ok=True)
    path = os.path.join(cfg.out_dir, "values.txt")
    import mpmath
    with open(path, "w") as fh:
        fh.write(f"z0 = {cfg.z0}; precision {cfg.precision_bits} bits\n")
        for tag, v in zip(comp.labels(), values):
            fh.write(f"{tag}(z0): {mpmath.nstr(v.mid, 30)} +- {mpmath.nstr(v.rad, 4)}\n")
        for n in cfg.n_grid[:3]:
            approx, _ = _build_one(cfg, prof, n, r, S)
            rows = derived_rows_for(approx, comp, 1)
            J = jf_eval(rows, 1, cfg.z0, values)
            fh.write(f"J_F(z0) at n={n}: {mpmath.nstr(J.mid, 25)} "
                     f"+- {mpmath.nstr(J.rad, 4)}\n")
    print(f"values -> {path}")
    return EXIT_OK


def cmd_certify(cfg: RunConfig) -> int:
    if cfg.z0 is None:
        raise ConfigError("--z0 required for certify")
    F = cfg.f_coefficients(4096)
    cert = certify(cfg.operator, F, cfg.z0, function_name=cfg.operator_name,
                   fld=cfg.fld, r=cfg.r, S=cfg.S, m=cfg.m, n_grid=cfg.n_grid,
                   precision=cfg.precision_bits, route=cfg.route)
    os.makedirs(cfg.out_dir, exist_ok=True)
    cpath = os.path.join(cfg.out_dir, "certificate.txt")
    with open(cpath, "w") as fh:
        fh.write(cert.serialize())
    with open(os.path.join(cfg.out_dir, "certificate.csv"), "w") as fh:
        fh.write(cert.csv_table())
    print(f"tau = {cert.tau:.6f}; dimension bound (real) = {cert.bound_real:.6f}; "
          f"integer >= {cert.bound_integer}")
    print(f"certificate -> {cpath}")
    return EXIT_OK if cert.tau > 0 else EXIT_VERIFY_FAIL


def cmd_demo(cfg: RunConfig) -> int:
    print("demo: geometric F = 1/(1-z) at z0 = 1/3 (values 1, Li_s(1/3))")
    from .builtins import builtin
    op, prov = builtin("geometric")
    cert = certify(op, prov.coefficients(2048), Fraction(1, 3),
                   function_name="geometric", S=cfg.S or 4, r=cfg.r,
                   n_grid=cfg.n_grid if cfg.n_grid else [4, 6, 8, 10, 12],
                   precision=cfg.precision_bits)
    print(f"tau = {cert.tau:.4f}; integer dimension bound >= {cert.bound_integer}")
    print("theta vector:", ", ".join(cert.theta_labels))
    return EXIT_OK if cert.bound_integer >= 2 else EXIT_VERIFY_FAIL


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = _config(args)
        handler = {
            "analyze": cmd_analyze, "build": cmd_build, "verify": cmd_verify,
            "eval": cmd_eval, "certify": cmd_certify, "demo": cmd_demo,
        }[args.command]
        return handler(cfg)
    except (ConfigError, NotGOperatorError, NotFuchsianError, KeyError,
            ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ResourceCapError, RowSelectionError) as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ConstructionError, CertificateError, ArithmeticError) as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY_FAIL


if __name__ == "__main__":
    sys.exit(main())
