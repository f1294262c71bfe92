"""Command-line interface.

Subcommands:

    certify         certificate JSON for a mixture file against a class
    min-separation  CSV grid of the separation floor c0*eta0
    bounds-sweep    CSV grid of the refined bounds over (K, c, epsilon)
    contaminate     CSV contamination study (built-in example or files)
    tv              Monte Carlo (or exact single-Gaussian) TV between files
    density         CSV of 1-D densities for a built-in example pair

Exit codes: 0 success / certificate applicable, 2 certificate inapplicable
(verdict still printed), 1 malformed input or usage error.  All CSV output
is comma-separated UTF-8 with a header row, LF line endings, and floats
printed to 12 significant digits; randomized commands put their seed in a
leading ``# seed=...`` comment line.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from .certify import (
    EXAMPLE_IDS,
    ContaminationScenario,
    auto_class_spec,
    certify,
    builtin_example,
    example_scenario,
    run_contamination,
)
from .constants import StabilityInputs, solve_c0, solve_eta0
from .errors import DomainError, GmmStabError, InfeasibleEpsilon, NoConvergence
from .gaussian_tv import tv_exact
from .mixture import MixtureModel, ModelClassSpec
from .montecarlo import mc_tv

_MIN_MC_SAMPLES = 1000


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _cell(x: float) -> str:
    # Empty CSV cell for undefined values keeps absent curves absent.
    return _fmt(x) if math.isfinite(x) else ""


def _parse_floats(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _parse_ints(text: str) -> list[int]:
    out: list[int] = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if ":" in tok:
            lo, hi = tok.split(":")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(tok))
    return out


def _write_text(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
        return
    path = Path(output)
    if not path.parent.exists():
        raise DomainError(f"output directory does not exist: {path.parent}")
    path.write_text(text)


def _load_mixture(path: str) -> MixtureModel:
    try:
        return MixtureModel.load(path)
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read mixture file {path}: {exc}") from exc


def _class_spec(model: MixtureModel, args) -> ModelClassSpec:
    c = None if args.c in (None, "auto") else float(args.c)
    return auto_class_spec(model, pi_min=args.pi_min, pi_max=args.pi_max, c=c)


def _cmd_certify(args) -> int:
    model = _load_mixture(args.mixture)
    if args.pi_min is None:
        raise DomainError("--pi-min is required for certify")
    spec = _class_spec(model, args)
    cert = certify(model, spec, args.epsilon)
    _write_text(json.dumps(cert.to_dict(), indent=2) + "\n", args.output)
    return 0 if cert.applicable else 2


def _cmd_min_separation(args) -> int:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["d", "K", "eta_pi", "c0", "eta0", "c0_eta0", "status"])
    for d in _parse_ints(args.d):
        for k in _parse_ints(args.K):
            for eta_pi in _parse_floats(args.eta_pi):
                # pi_max = eta_pi * pi_min together with
                # pi_max = 1 - (K-1) pi_min pins both proportions.
                pi_min = 1.0 / (eta_pi + k - 1.0)
                pi_max = eta_pi * pi_min
                try:
                    spec = ModelClassSpec(K=k, pi_min=pi_min, pi_max=pi_max, c=1.0)
                    inputs = StabilityInputs(spec, args.epsilon, d)
                    c0 = solve_c0(pi_min, args.epsilon)
                    eta0 = solve_eta0(inputs)
                except (InfeasibleEpsilon, NoConvergence, DomainError):
                    writer.writerow([d, k, _fmt(eta_pi), "", "", "", "infeasible"])
                    continue
                writer.writerow(
                    [d, k, _fmt(eta_pi), _fmt(c0), _fmt(eta0), _fmt(c0 * eta0), "ok"]
                )
    _write_text(buf.getvalue(), args.output)
    return 0


def _cmd_bounds_sweep(args) -> int:
    from .constants import proportion_bound, refine
    from .errors import RefinementInapplicable, SeparationTooSmall

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["K", "c", "epsilon", "c_star", "eta_star_minus_1", "pi_bound_over_pi_min"])
    for k in _parse_ints(args.K):
        pi_min = args.pi_min if args.pi_min is not None else 1.0 / (k + 1.0)
        for c in _parse_floats(args.c):
            for eps in _parse_floats(args.epsilon_grid):
                row = [k, _fmt(c), _fmt(eps)]
                try:
                    spec = ModelClassSpec(K=k, pi_min=pi_min, c=c)
                    inputs = StabilityInputs(spec, eps, args.d)
                    trace = refine(inputs)
                    pi_bound = proportion_bound(inputs, trace.c_star, trace.eta_star)
                    row += [
                        _fmt(trace.c_star),
                        _fmt(trace.eta_star - 1.0),
                        _fmt(pi_bound / pi_min),
                    ]
                except (InfeasibleEpsilon, SeparationTooSmall, RefinementInapplicable,
                        NoConvergence, DomainError):
                    row += ["", "", ""]
                writer.writerow(row)
    _write_text(buf.getvalue(), args.output)
    return 0


def _contamination_rows(args) -> tuple[str, list]:
    lams = _parse_floats(getattr(args, "lambda"))
    sweep = tuple(_parse_floats(args.sweep)) if args.sweep else None
    rows = []
    for lam in lams:
        if args.example is not None:
            params = {}
            if args.K is not None:
                params["K"] = args.K
            scenario = example_scenario(args.example, lam, sweep, **params)
        else:
            if args.base is None or args.contaminant is None:
                raise DomainError("provide --example or both --base and --contaminant")
            scenario = ContaminationScenario(
                base=_load_mixture(args.base),
                contaminant=_load_mixture(args.contaminant),
                lam=lam,
                sweep=sweep if sweep is not None else (1.0,),
                sweep_param=args.sweep_param,
            )
        spec = None
        if args.pi_min is not None or args.c not in (None, "auto"):
            spec = auto_class_spec(
                scenario.base,
                pi_min=args.pi_min,
                pi_max=args.pi_max,
                c=None if args.c in (None, "auto") else float(args.c),
            )
        rows.extend(run_contamination(scenario, spec=spec, n=args.n, seed=args.seed))
    return rows


def _cmd_contaminate(args) -> int:
    if args.n < _MIN_MC_SAMPLES:
        raise DomainError(f"--n must be at least {_MIN_MC_SAMPLES}")
    rows = _contamination_rows(args)
    buf = io.StringIO()
    buf.write(f"# seed={args.seed} n={args.n}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([
        "sweep_value", "lambda", "epsilon_hat", "epsilon_hat_se", "componentwise_tv",
        "applicable", "vacuous", "failed_conditions", "c_star", "eta_star",
        "max_mean_bound", "sigma_ratio_bound", "proportion_bound",
        "conservative_applicable", "conservative_vacuous", "conservative_max_mean_bound",
    ])
    for row in rows:
        cert = row.certificate
        cons = row.certificate_conservative
        usable = cert.applicable and not cert.vacuous
        cons_usable = cons.applicable and not cons.vacuous
        writer.writerow([
            _fmt(row.sweep_value),
            _fmt(row.lam),
            _fmt(row.epsilon_hat.value),
            _fmt(row.epsilon_hat.std_error),
            ";".join(_fmt(est.value) for est in row.componentwise),
            int(cert.applicable),
            int(cert.vacuous),
            ";".join(cert.failed_conditions),
            _cell(cert.c_star if usable else math.nan),
            _cell(cert.eta_star if usable else math.nan),
            _cell(row.max_mean_bound),
            _cell(cert.per_component[0].sigma_ratio_bound if usable else math.nan),
            _cell(cert.per_component[0].proportion_bound if usable else math.nan),
            int(cons.applicable),
            int(cons.vacuous),
            _cell(max((b.mean_bound for b in cons.per_component), default=math.nan)
                  if cons_usable else math.nan),
        ])
    _write_text(buf.getvalue(), args.output)
    return 0


def _cmd_tv(args) -> int:
    a = _load_mixture(args.file_a)
    b = _load_mixture(args.file_b)
    if args.exact:
        if a.n_components != 1 or b.n_components != 1:
            raise DomainError("--exact is only valid for single-Gaussian inputs")
        value = tv_exact(a.components[0], b.components[0])
        payload = {"value": value, "std_error": 0.0, "method": "exact"}
    else:
        if args.n < _MIN_MC_SAMPLES:
            raise DomainError(f"--n must be at least {_MIN_MC_SAMPLES}")
        est = mc_tv(a, b, args.n, args.seed)
        payload = {"method": "monte-carlo", **est.to_dict()}
    _write_text(json.dumps(payload, indent=2) + "\n", args.output)
    return 0


def _cmd_density(args) -> int:
    first, second = builtin_example(args.example)
    if first.dim != 1:
        raise DomainError("density export is defined for 1-D examples only")
    xs = np.linspace(args.x_min, args.x_max, args.points)
    p = np.exp(first.logpdf(xs[:, None]))
    q = np.exp(second.logpdf(xs[:, None]))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "density_p", "density_q"])
    for x, pv, qv in zip(xs, p, q):
        writer.writerow([_fmt(x), _fmt(pv), _fmt(qv)])
    _write_text(buf.getvalue(), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gmmstab",
        description="Parameter-stability certificates for mixtures of spherical Gaussians.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="certificate for a mixture JSON file")
    p.add_argument("mixture", help="mixture JSON path")
    p.add_argument("--pi-min", type=float, default=None)
    p.add_argument("--pi-max", type=float, default=None)
    p.add_argument("--c", default="auto", help="class separation constant, or 'auto'")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("min-separation", help="grid of the separation floor c0*eta0")
    p.add_argument("--d", default="5,20,35", help="comma list of dimensions")
    p.add_argument("--K", default="2:40", help="comma list / lo:hi range of component counts")
    p.add_argument("--eta-pi", default="1,2,4,8,16", help="comma list of pi_max/pi_min ratios")
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=_cmd_min_separation)

    p = sub.add_parser("bounds-sweep", help="refined bounds over (K, c, epsilon)")
    p.add_argument("--d", type=int, default=20)
    p.add_argument("--K", default="2,5,10")
    p.add_argument("--c", default="3,4,5,6")
    p.add_argument("--epsilon-grid",
                   default="1e-6,1e-5,1e-4,1e-3,3e-3,0.01,0.02,0.03,0.04")
    p.add_argument("--pi-min", type=float, default=None,
                   help="override the default pi_min = 1/(K+1)")
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=_cmd_bounds_sweep)

    p = sub.add_parser("contaminate", help="contamination study CSV")
    p.add_argument("--example", choices=EXAMPLE_IDS, default=None)
    p.add_argument("--base", default=None, help="base mixture JSON (with --contaminant)")
    p.add_argument("--contaminant", default=None)
    p.add_argument("--sweep-param", choices=("sigma_scale", "mean_scale"),
                   default="sigma_scale", help="sweep semantics for file-based runs")
    p.add_argument("--lambda", default="0.01", help="comma list of contamination levels")
    p.add_argument("--sweep", default=None, help="comma list of sweep values")
    p.add_argument("--K", type=int, default=None, help="component count for example2 ids")
    p.add_argument("--pi-min", type=float, default=None)
    p.add_argument("--pi-max", type=float, default=None)
    p.add_argument("--c", default="auto")
    p.add_argument("--n", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=_cmd_contaminate)

    p = sub.add_parser("tv", help="TV distance between two mixture files")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--n", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact", action="store_true",
                   help="closed form; single-Gaussian inputs only")
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=_cmd_tv)

    p = sub.add_parser("density", help="1-D density table for a built-in example pair")
    p.add_argument("--example", choices=("fig-example1-stable", "fig-example1-unstable"),
                   default="fig-example1-stable")
    p.add_argument("--x-min", type=float, default=-8.0)
    p.add_argument("--x-max", type=float, default=8.0)
    p.add_argument("--points", type=int, default=801)
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=_cmd_density)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GmmStabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
