"""Command line interface: ``rankeb <command> ...`` or ``python -m rankeb``.

Every command writes JSON (or CSV for sweeps) to ``--out`` or stdout. Reports
carry a ``meta`` block with the format version, instance hash and configuration.
``check`` exits with status 2 when a verdict fails.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .distance import dist_estimate
from .exponent import exponent_report, tau
from .experiments import (SweepTable, check_bounds, dumps, fit_loglog, probe_regularity,
                          probe_stability, sweep_local)
from .instance import Instance, generate_planted, load_point, metadata, save_point
from .residual import residual_f
from .variational import slope_mf


def _emit(args, payload):
    text = payload if isinstance(payload, str) else dumps(payload) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report(inst, cfg, body):
    return {"meta": metadata(inst, cfg), **body}


def cmd_gen(args):
    size = args.l if args.map == "dense" else args.density
    inst, wit = generate_planted(args.m, args.n, args.r, args.map, size, args.seed)
    if args.witness_out:
        save_point(args.witness_out, wit.X_star)
    _emit(args, inst.to_json() + "\n")


def cmd_eval(args):
    inst = Instance.load(args.instance)
    rep = residual_f(inst, load_point(args.point))
    _emit(args, _report(inst, {}, rep.to_dict()))


def cmd_slope(args):
    inst = Instance.load(args.instance)
    cfg = {"gap_tol": args.gap_tol, "degen_samples": args.degen_samples, "seed": args.seed}
    rep = slope_mf(inst, load_point(args.point), **cfg)
    _emit(args, _report(inst, cfg, rep.to_dict()))


def cmd_dist(args):
    inst = Instance.load(args.instance)
    witness = load_point(args.witness) if args.witness else None
    cfg = {"restarts": args.restarts, "max_iter": args.max_iter, "feas_tol": args.feas_tol,
           "seed": args.seed}
    rep = dist_estimate(inst, load_point(args.point), witness=witness, **cfg)
    _emit(args, _report(inst, cfg, rep.to_dict()))


def cmd_exponent(args):
    _emit(args, exponent_report(args.m, args.n, args.r))


def cmd_sweep(args):
    inst = Instance.load(args.instance)
    tables = [
        sweep_local(inst, load_point(args.witness), t_min=args.t_min, t_max=args.t_max,
                    points=args.points, seed=args.seed, direction=k, restarts=args.restarts,
                    n_jobs=args.jobs)
        for k in range(args.directions)
    ]
    if args.format in (None, "csv"):
        _emit(args, "".join(t.to_csv() if i == 0 else t.to_csv().split("\n", 1)[1]
                            for i, t in enumerate(tables)))
    else:
        _emit(args, {"tables": [t.to_dict() for t in tables]})


def _load_tables(paths):
    tables = []
    for p in paths:
        with open(p) as fh:
            text = fh.read()
        if text.lstrip().startswith("{"):
            d = json.loads(text)
            tables += [SweepTable.from_dict(t) for t in d.get("tables", [d])]
        else:
            tables.append(SweepTable.from_csv(text))
    return tables


def _tau_of(args):
    inst = Instance.load(args.instance)
    return inst, tau(inst.m, inst.n, inst.r)


def cmd_fit(args):
    tables = _load_tables(args.table)
    t = _tau_of(args)[1] if args.instance else None
    fits = [fit_loglog(tab, args.x, args.y, tau=t).to_dict() for tab in tables]
    _emit(args, {"fits": fits})


def cmd_check(args):
    inst, t = _tau_of(args)
    rep = check_bounds(_load_tables(args.table), t, fit_margin=args.fit_margin)
    _emit(args, _report(inst, {"fit_margin": args.fit_margin}, rep.to_dict()))
    return 0 if rep.passed else 2


def cmd_probe_stability(args):
    inst = Instance.load(args.instance)
    scales = np.logspace(np.log10(args.s_min), np.log10(args.s_max), args.scales)
    cfg = {"scales": scales.tolist(), "samples": args.samples, "seed": args.seed}
    rep = probe_stability(inst, load_point(args.point), **cfg)
    _emit(args, _report(inst, cfg, rep.to_dict()))


def cmd_probe_regularity(args):
    inst = Instance.load(args.instance)
    cfg = {"radii": args.radii, "samples_per_radius": args.samples, "seed": args.seed,
           "falsify_tol": args.falsify_tol}
    rep = probe_regularity(inst, **cfg)
    _emit(args, _report(inst, cfg, rep.to_dict()))


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=None,
                        help="sweep output format (default csv); other reports are JSON")

    parser = argparse.ArgumentParser(prog="rankeb", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    def with_instance(p, point=True):
        p.add_argument("-i", "--instance", required=True)
        if point:
            p.add_argument("-x", "--point", required=True)

    p = add("gen", cmd_gen, "generate a planted instance")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--map", choices=("dense", "mask"), default="dense")
    p.add_argument("--l", type=int, default=0)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--witness-out", default=None)

    with_instance(add("eval", cmd_eval, "evaluate the residual f"))

    p = add("slope", cmd_slope, "slope lower bound")
    with_instance(p)
    p.add_argument("--gap-tol", type=float, default=1e-8)
    p.add_argument("--degen-samples", type=int, default=256)

    p = add("dist", cmd_dist, "distance estimate")
    with_instance(p)
    p.add_argument("--witness", default=None)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--max-iter", type=int, default=5000)
    p.add_argument("--feas-tol", type=float, default=1e-16)

    p = add("exponent", cmd_exponent, "explicit exponent tau(m, n, r)")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)

    p = add("sweep", cmd_sweep, "local sweep along random rays")
    with_instance(p, point=False)
    p.add_argument("-w", "--witness", required=True)
    p.add_argument("--t-min", type=float, default=1e-6)
    p.add_argument("--t-max", type=float, default=1e-1)
    p.add_argument("--points", type=int, default=30)
    p.add_argument("--directions", type=int, default=1)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--jobs", type=int, default=1)

    p = add("fit", cmd_fit, "log-log fit of two sweep columns")
    p.add_argument("table", nargs="+")
    p.add_argument("--x", default="f")
    p.add_argument("--y", default="dist")
    p.add_argument("-i", "--instance", default=None)

    p = add("check", cmd_check, "check sweep tables against the exponents")
    p.add_argument("table", nargs="+")
    p.add_argument("-i", "--instance", required=True)
    p.add_argument("--fit-margin", type=float, default=0.05)

    p = add("probe-stability", cmd_probe_stability, "Hoelder stability of the argmin frames")
    with_instance(p)
    p.add_argument("--s-min", type=float, default=1e-6)
    p.add_argument("--s-max", type=float, default=1e-1)
    p.add_argument("--scales", type=int, default=11)
    p.add_argument("--samples", type=int, default=1)

    p = add("probe-regularity", cmd_probe_regularity, "search for small slopes far out")
    with_instance(p, point=False)
    p.add_argument("--radii", type=float, nargs="+", default=[10.0, 100.0, 1000.0])
    p.add_argument("--samples", type=int, default=32)
    p.add_argument("--falsify-tol", type=float, default=1e-6)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    code = args.func(args)
    return code or 0


if __name__ == "__main__":
    sys.exit(main())
