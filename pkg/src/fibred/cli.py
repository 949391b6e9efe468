"""Command-line front end: ``python -m fibred <command> [--config PATH] [--set key=value ...]``.

Exit status: 0 when every claim holds, 1 when a claim fails, 2 on configuration
or construction errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import analysis
from .construction import cycle_term, kappa2_closed_form, multiplicator, multiplicator2_decomposition
from .core import uniform_grid
from .example import build_example
from .io import (
    LEGEND,
    ConfigError,
    codes_to_rgb,
    dump_config,
    load_config,
    read_curve_csv,
    write_complex_table,
    write_curve_csv,
    write_json,
    write_ppm,
)
from .verify import run_claims

EXIT_OK, EXIT_CLAIM, EXIT_ERROR = 0, 1, 2


class StageError(RuntimeError):
    def __init__(self, stage, exc):
        self.stage = stage
        super().__init__(f"{stage} failed: {exc}")


def _build(cfg, normalized=True):
    try:
        return build_example(cfg.r, cfg.a, cfg.alpha, cfg.cover_n, cfg.quad_n, cfg.tol_norm,
                             require_attracting=False, normalized=normalized)
    except Exception as exc:  # report which stage broke
        raise StageError("construction", exc) from exc


def _outdir(cfg):
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_map(path, fmap, n):
    theta = uniform_grid(n)
    write_complex_table(path, theta, {"A": fmap.coeffA.samples(n), "B": fmap.coeffB.samples(n),
                                      "C": fmap.coeffC.samples(n)})


def _write_normalization(out, ex):
    nd = ex.norm
    n = nd.u1.n
    write_complex_table(out / "normalization.csv", uniform_grid(n),
                        {"u1": nd.u1.values, "u2": nd.u2.samples(n), "ctilde": nd.ctilde.values})
    for i, g in enumerate(ex.curves, 1):
        t = uniform_grid(g.n)
        write_curve_csv(out / f"normalized_gamma{i}.csv", t, g.samples)


def cmd_construct(cfg):
    ex = _build(cfg)
    out = _outdir(cfg)
    n = ex.corr.slope.n
    theta = uniform_grid(n)
    write_complex_table(out / "loop.csv", theta, {"c": ex.loop(theta)})
    write_curve_csv(out / "two_curve.csv", ex.curve.grid, ex.curve.samples)
    write_complex_table(out / "correction.csv", theta,
                        {"slope": ex.corr.slope.values, "offset": ex.corr.offset.values})
    _write_map(out / "corrected_map.csv", ex.corrected, n)
    u = ex.unfolded
    _write_map(out / "unfolded_map.csv", u.map, u.map.coeffA.n)
    for i, g in enumerate((u.gamma1, u.gamma2), 1):
        write_curve_csv(out / f"gamma{i}.csv", uniform_grid(g.n), g.samples)
    _write_normalization(out, ex)
    meta = {
        "config": cfg.as_dict(),
        "alpha": ex.corrected.alpha,
        "unfolded_rotation": u.map.alpha,
        "tau": u.tau,
        "kappa2": ex.kappa2,
        "attracting": ex.attracting,
        "normalization_terms": ex.norm.terms,
        "normalization_residual": ex.norm.residual,
    }
    write_json(out / "construct.json", meta)
    (out / "config.txt").write_text(dump_config(cfg), encoding="utf-8")
    print(f"wrote construction artifacts to {out}")
    if not ex.attracting:
        print(f"kappa2 = {ex.kappa2:.6g} is not negative: the 2-curve does not attract",
              file=sys.stderr)
        return EXIT_CLAIM
    return EXIT_OK


def cmd_verify(cfg, curve_path=None):
    samples = None
    if curve_path is not None:
        _, samples = read_curve_csv(curve_path)
    try:
        records, _ = run_claims(cfg, samples)
    except StageError:
        raise
    except Exception as exc:
        raise StageError("verification", exc) from exc
    report = {"config": cfg.as_dict(), "claims": records,
              "all_pass": all(r["pass"] for r in records)}
    out = _outdir(cfg)
    write_json(out / "report.json", report)
    for r in records:
        print(f"{'PASS' if r['pass'] else 'FAIL'}  {r['id']}")
    return EXIT_OK if report["all_pass"] else EXIT_CLAIM


def cmd_kappa(cfg):
    ex = _build(cfg, normalized=False)
    u = ex.unfolded
    decomp, slope_term = multiplicator2_decomposition(ex.loop, ex.corr, cfg.quad_n)
    result = {
        "closed_form": kappa2_closed_form(cfg.r, cfg.a),
        "cycle_term": cycle_term(ex.loop, cfg.quad_n),
        "slope_term": slope_term,
        "kappa2": ex.kappa2,
        "kappa2_decomposition": decomp,
        "kappa_gamma1": multiplicator(u.map, u.gamma1, cfg.quad_n),
        "kappa_gamma2": multiplicator(u.map, u.gamma2, cfg.quad_n),
        "attracting": ex.attracting,
    }
    print(json.dumps(result, indent=2, sort_keys=True))
    return EXIT_OK if ex.attracting else EXIT_CLAIM


def cmd_normalize(cfg):
    ex = _build(cfg)
    out = _outdir(cfg)
    _write_normalization(out, ex)
    nd = ex.norm
    print(f"terms={nd.terms} conjugacy_residual={nd.residual:.3g} "
          f"functional_residual={nd.functional_residual:.3g} "
          f"coefficient_residual={nd.coefficient_residual:.3g}")
    return EXIT_OK if nd.residual < 1e-7 and nd.coefficient_residual < 1e-9 else EXIT_CLAIM


def write_basin(out, fmap, curves, cfg):
    """Per-angle CSV, fiber-slice pixmap, legend and summary for a scan of ``fmap``."""
    scan = analysis.basin_scan(fmap, curves, cfg.basin_g, cfg.budget, cfg.eps_conv,
                               window=cfg.window, workers=cfg.workers)
    with open(out / "basin.csv", "w", encoding="utf-8") as fh:
        fh.write("theta,label,step,distance\n")
        for th, lab in zip(scan.grid, scan.labels):
            step = "" if lab.step is None else str(lab.step)
            dist = "" if lab.distance is None else f"{lab.distance:.17g}"
            fh.write(f"{th:.17g},{lab.label},{step},{dist}\n")
    codes = analysis.fiber_slice(fmap, cfg.image_theta, curves, extent=cfg.image_extent,
                                 px=cfg.image_px, budget=cfg.image_budget,
                                 eps_conv=cfg.eps_conv, window=min(cfg.window, cfg.image_budget))
    write_ppm(out / "basin_slice.ppm", codes_to_rgb(codes))
    (out / "basin_legend.txt").write_text(LEGEND, encoding="utf-8")
    summary = {"counts": scan.counts, "label_changes": scan.witnesses,
               "undecided": scan.undecided, "steps": scan.steps,
               "omega_nonempty": scan.omega_nonempty,
               "complement_witness": scan.complement_witness,
               "image_theta": cfg.image_theta}
    write_json(out / "basin_summary.json", summary)
    return scan


def cmd_basin(cfg):
    ex = _build(cfg)
    scan = write_basin(_outdir(cfg), ex.normalized_map, list(ex.curves), cfg)
    print(json.dumps({"counts": scan.counts, "label_changes": len(scan.witnesses),
                      "undecided": len(scan.undecided)}, sort_keys=True))
    return EXIT_OK if scan.omega_nonempty and scan.complement_witness else EXIT_CLAIM


def cmd_report(cfg):
    path = Path(cfg.output_dir) / "report.json"
    if not path.exists():
        print(f"no report at {path}; run 'verify' first", file=sys.stderr)
        return EXIT_ERROR
    report = json.loads(path.read_text(encoding="utf-8"))
    for r in report["claims"]:
        print(f"{'PASS' if r['pass'] else 'FAIL'}  {r['id']:<24} {r['anchor']}")
        for k, v in sorted(r["measured"].items()) if isinstance(r["measured"], dict) else []:
            print(f"        {k} = {v}")
    return EXIT_OK if report["all_pass"] else EXIT_CLAIM


COMMANDS = {
    "construct": cmd_construct,
    "verify": cmd_verify,
    "kappa": cmd_kappa,
    "basin": cmd_basin,
    "normalize": cmd_normalize,
    "report": cmd_report,
}


def build_parser():
    p = argparse.ArgumentParser(prog="fibred", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="key = value configuration file")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one configuration key (repeatable)")
        if name == "verify":
            sp.add_argument("--curve", help="check a stored 2-curve table instead of trusting it")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.set)
    except (ConfigError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    np.seterr(all="ignore")
    try:
        if args.command == "verify":
            return cmd_verify(cfg, args.curve)
        return COMMANDS[args.command](cfg)
    except StageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
