"""Command-line driver.

Subcommands: analyze | certify | certify-system | lambda-prime | classify |
reduce | pdlc-reduce | hull-check | plot-curve | plot-set.  Reports are JSON
(SVG for the plot commands), written under --out and echoed to stdout.
"""

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass

import numpy as np


def _limit_threads():
    cap = os.environ.get("QUADAGG_THREADS")
    if not cap:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, cap)
    try:
        from threadpoolctl import threadpool_limits

        threadpool_limits(int(cap))
    except Exception:
        pass


def _version():
    try:
        from importlib.metadata import version

        return version("artifact")
    except Exception:
        return "0"


@dataclass
class RunConfig:
    input: str
    command: str
    tol_eig: float = 1e-9
    tol_root: float = 1e-10
    grid_sphere: int = 5
    grid_box: int = 101
    box: tuple = (-5.0, 5.0)
    seed: int = 0
    out: str = "."
    format: str = "json"
    cone: str = None
    lambdas: str = None

    def validate(self):
        if self.tol_eig <= 0 or self.tol_root <= 0:
            raise ValueError("tolerances must be positive")
        if self.grid_sphere < 1 or self.grid_box < 8:
            raise ValueError("grid resolutions too small")


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _load_triple(cfg):
    from .gallery import triple_from_json

    d = _load_json(cfg.input)
    if "Q" not in d or len(d["Q"]) != 3:
        raise ValueError('input must be {"n": int, "Q": [Q1, Q2, Q3]}')
    return triple_from_json(d)


def _load_lambdas(cfg):
    if not cfg.lambdas:
        raise ValueError("this command needs --lambdas PATH")
    data = _load_json(cfg.lambdas)
    return [np.asarray(v, dtype=float) for v in data]


def _load_cone(cfg):
    from .cones import PolyCone3

    if not cfg.cone:
        raise ValueError("this command needs --cone PATH (generator list)")
    gens = [np.asarray(v, dtype=float) for v in _load_json(cfg.cone)]
    if not gens:
        return PolyCone3.zero()
    return PolyCone3.from_generators(gens)


def _emit(cfg, name, payload):
    payload = dict(payload)
    payload["config"] = asdict(cfg)
    payload["version"] = _version()
    os.makedirs(cfg.out, exist_ok=True)
    path = os.path.join(cfg.out, name + ".json")
    text = json.dumps(payload, indent=2, sort_keys=True, default=str)
    with open(path, "w") as fh:
        fh.write(text + "\n")
    print(text)
    return path


def _emit_svg(cfg, name, svg):
    os.makedirs(cfg.out, exist_ok=True)
    path = os.path.join(cfg.out, name + ".svg")
    with open(path, "w") as fh:
        fh.write(svg)
    print("wrote %s" % path)
    return path


def _sample_corpus(T, cfg):
    from .core import sample_S

    return sample_S(T, cfg.box, grid=cfg.grid_box)


def cmd_analyze(cfg):
    from .aggregate import classify, lambda_prime
    from .cones import pdlc_search, spectral_context
    from .core import sample_S
    from .errors import EmptySample, NoInteriorSamples

    T = _load_triple(cfg)
    ctx = spectral_context(T)
    rep = ctx.report
    lam_pd, val = pdlc_search(T)
    lp = lambda_prime(T, ctx.gf)
    try:
        samples = sample_S(T, cfg.box, grid=cfg.grid_box)
    except EmptySample:
        samples = None
    rows = []
    for lab in lp:
        entry = lab.to_json()
        if samples is not None and lab.sig.n_neg == 1:
            try:
                entry["quality"] = classify(T, lab, samples)
            except NoInteriorSamples:
                pass
        rows.append(entry)
    _emit(
        cfg,
        "analyze",
        {
            "n": T.n,
            "curve": {
                "smooth": rep.smooth,
                "hyperbolic": rep.hyperbolic,
                "direction": None if rep.direction is None else list(rep.direction),
                "maxDepthNest": rep.maxDepthNest,
                "emptyCurve": rep.emptyCurve,
            },
            "pdlc": bool(val > 0),
            "pdlcWitness": list(np.round(lam_pd, 9)) if val > 0 else None,
            "lambdaPrime": rows,
        },
    )
    return 0


def cmd_certify(cfg):
    from .cones import certify_variety_empty

    T = _load_triple(cfg)
    cert = certify_variety_empty(T)
    _emit(cfg, "certify", cert.to_json())
    return 2 if cert.verdict == "INCONCLUSIVE" else 0


def cmd_certify_system(cfg):
    from .cones import certify_system_empty

    T = _load_triple(cfg)
    K = _load_cone(cfg)
    cert = certify_system_empty(T, K)
    _emit(cfg, "certify-system", cert.to_json())
    return 2 if cert.verdict == "INCONCLUSIVE" else 0


def cmd_lambda_prime(cfg):
    from .aggregate import lambda_prime

    T = _load_triple(cfg)
    _emit(cfg, "lambda-prime", {"lambdaPrime": [l.to_json() for l in lambda_prime(T)]})
    return 0


def cmd_classify(cfg):
    from .aggregate import classify, lambda_membership

    T = _load_triple(cfg)
    samples = _sample_corpus(T, cfg)
    rows = []
    for v in _load_lambdas(cfg):
        lab = lambda_membership(T, v)
        entry = lab.to_json()
        if lab.sig.n_neg == 1:
            entry["quality"] = classify(T, lab, samples)
        rows.append(entry)
    _emit(cfg, "classify", {"classified": rows})
    return 0


def cmd_reduce(cfg):
    from .aggregate import reduce as agg_reduce

    T = _load_triple(cfg)
    _emit(cfg, "reduce", agg_reduce(T).to_json())
    return 0


def cmd_pdlc_reduce(cfg):
    from .aggregate import pdlc_reduce

    T = _load_triple(cfg)
    _emit(cfg, "pdlc-reduce", pdlc_reduce(T, box=cfg.box, grid=cfg.grid_box).to_json())
    return 0


def cmd_hull_check(cfg):
    from .verify import hull_check

    T = _load_triple(cfg)
    rep = hull_check(T, _load_lambdas(cfg), box=cfg.box, grid=cfg.grid_box)
    _emit(cfg, "hull-check", rep.to_json())
    return 0


def cmd_plot_curve(cfg):
    from .aggregate import lambda_prime
    from .cones import spectral_context
    from .plotting import plot_curve

    T = _load_triple(cfg)
    ctx = spectral_context(T)
    lp = [l.vec for l in lambda_prime(T, ctx.gf)]
    _emit_svg(cfg, "curve", plot_curve(ctx.gf, cone=ctx.cone, lambda_points=lp))
    return 0


def cmd_plot_set(cfg):
    from .aggregate import lambda_membership
    from .plotting import plot_set

    T = _load_triple(cfg)
    if T.n != 2:
        raise ValueError("plot-set draws planar sets (n = 2)")
    lams = []
    if cfg.lambdas:
        lams = [lambda_membership(T, v) for v in _load_lambdas(cfg)]
    _emit_svg(cfg, "set", plot_set(T, lams, box=cfg.box, res=max(cfg.grid_box, 201)))
    return 0


COMMANDS = {
    "analyze": cmd_analyze,
    "certify": cmd_certify,
    "certify-system": cmd_certify_system,
    "lambda-prime": cmd_lambda_prime,
    "classify": cmd_classify,
    "reduce": cmd_reduce,
    "pdlc-reduce": cmd_pdlc_reduce,
    "hull-check": cmd_hull_check,
    "plot-curve": cmd_plot_curve,
    "plot-set": cmd_plot_set,
}


def build_parser():
    p = argparse.ArgumentParser(prog="quadagg", description=__doc__)
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--input", required=True)
    p.add_argument("--cone", default=None)
    p.add_argument("--lambdas", default=None)
    p.add_argument("--tol-eig", type=float, default=1e-9)
    p.add_argument("--tol-root", type=float, default=1e-10)
    p.add_argument("--grid-sphere", type=int, default=5)
    p.add_argument("--grid-box", type=int, default=101)
    p.add_argument("--box", type=float, nargs=2, default=(-5.0, 5.0))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".")
    p.add_argument("--format", default="json", choices=("json", "csv", "svg"))
    return p


def main(argv=None):
    _limit_threads()
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        input=args.input,
        command=args.command,
        tol_eig=args.tol_eig,
        tol_root=args.tol_root,
        grid_sphere=args.grid_sphere,
        grid_box=args.grid_box,
        box=tuple(args.box),
        seed=args.seed,
        out=args.out,
        format=args.format,
        cone=args.cone,
        lambdas=args.lambdas,
    )
    try:
        cfg.validate()
        np.random.seed(cfg.seed % (2**32))
        return COMMANDS[args.command](cfg)
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except Exception as exc:
        print("error: %s: %s" % (type(exc).__name__, exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
