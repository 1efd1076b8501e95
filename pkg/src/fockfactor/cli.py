"""Command-line interface.

Subcommands
    verify    run one suite, write report.json / checks.csv / residuals.png
    converge  run one suite's refinement ladders, write CSV and log-log plot
    spectrum  eigensolve one lattice model, write CSV and eigenvalue plot
    sample    draw configurations from the point ensemble, write CSV and
              histogram

Exit codes: 0 all checks passed, 1 a gated check failed, 2 configuration
error, 3 capacity limit hit.
"""

import argparse
import os
import sys

try:
    import tomllib
except ImportError:
    import tomli as tomllib

import numpy as np

from . import factorized, measure, plots, report, suites
from .errors import CapacityError, ConfigError, FockFactorError
from .lattice import LatticeGrid


def _load_config(path):
    try:
        with open(path, "rb") as handle:
            data = tomllib.load(handle)
    except OSError as exc:
        raise ConfigError("cannot read config %r: %s" % (path, exc)) from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("malformed TOML in %r: %s" % (path, exc)) from exc
    if "suite" not in data:
        raise ConfigError("config %r is missing the 'suite' key" % path)
    suite = data["suite"]
    if suite not in suites.SUITES:
        raise ConfigError("unknown suite %r; registered suites: %s"
                          % (suite, ", ".join(sorted(suites.SUITES))))
    seed = data.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError("'seed' must be an integer")
    params = data.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("[params] must be a table")
    return suite, seed, params


def _out_path(args, name):
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def _effective_seed(args, config_seed):
    return args.seed if args.seed is not None else config_seed


def cmd_verify(args):
    suite, seed, params = _load_config(args.config)
    seed = _effective_seed(args, seed)
    result = suites.run_suite(suite, params, seed)
    doc = report.VerificationReport(
        suite=suite, seed=seed,
        config={"suite": suite, "seed": seed, "params": params},
        checks=result.checks)
    report.write_report_json(doc, _out_path(args, "report.json"))
    report.write_checks_csv(result.checks, _out_path(args, "checks.csv"))
    plots.plot_residuals(result.checks, _out_path(args, "residuals.png"))
    for check in result.checks:
        print("%-58s %s  residual=%.3e" % (
            check.name, "pass" if check.passed else "FAIL", check.residual))
    print("suite %s: %s" % (suite, "pass" if result.passed else "FAIL"))
    return 0 if result.passed else 1


def cmd_converge(args):
    suite, seed, params = _load_config(args.config)
    seed = _effective_seed(args, seed)
    for key in ("grid_sizes", "epsilons"):
        if key in params and len(params[key]) < 3:
            raise ConfigError("%r needs at least three ladder entries "
                              "for converge" % key)
    result = suites.run_suite(suite, params, seed)
    if not result.convergence:
        raise ConfigError("suite %r has no refinement ladder" % suite)
    for record in result.convergence:
        if len(record.spacings) < 3:
            raise ConfigError("ladder %r has fewer than three points"
                              % record.label)
    report.write_convergence_csv(result.convergence,
                                 _out_path(args, "converge.csv"))
    plots.plot_convergence(result.convergence,
                           _out_path(args, "converge.png"))
    for record in result.convergence:
        print("%-44s fitted order %.3f  finest residual %.3e" % (
            record.label, record.fitted_order, record.residuals[-1]))
    return 0 if result.passed else 1


_SPECTRUM_VARIANTS = {
    "oscillatory": lambda p: factorized.Oscillatory(p.pop("omega", 1.0)),
    "generalized-oscillatory":
        lambda p: factorized.GeneralizedOscillatory(p.pop("omega_bar", 0.8)),
    "cms": lambda p: factorized.CalogeroSutherland(p.pop("beta", 2.0)),
    "delta-gas": lambda p: factorized.DeltaGas(p.pop("beta", 1.0)),
    "coulomb": lambda p: factorized.CoulombType(p.pop("alpha", 1.0),
                                                p.pop("epsilon", 0.2)),
}


def cmd_spectrum(args):
    suite, seed, params = _load_config(args.config)
    params = dict(params)
    if suite not in _SPECTRUM_VARIANTS:
        raise ConfigError(
            "suite %r does not define a lattice model; spectrum supports: %s"
            % (suite, ", ".join(sorted(_SPECTRUM_VARIANTS))))
    # a verify config may carry ladder parameters; reuse what translates
    grid_sizes = params.pop("grid_sizes", None)
    epsilons = params.pop("epsilons", None)
    params.pop("order_threshold", None)
    if epsilons and "epsilon" not in params:
        params["epsilon"] = epsilons[0]
    variant = _SPECTRUM_VARIANTS[suite](params)
    default_sites = int(grid_sizes[-1]) if grid_sizes else 16
    n_sites = int(params.pop("n_sites", default_sites))
    length = float(params.pop("length", 1.0))
    particle_count = int(params.pop("particle_count", 2))
    kinetic = params.pop("kinetic", "forward")
    n_eigenvalues = params.pop("n_eigenvalues", None)
    if n_eigenvalues is not None:
        n_eigenvalues = int(n_eigenvalues)
    if params:
        raise ConfigError("unknown parameters for spectrum: %s"
                          % ", ".join(sorted(params)))
    if length <= 0:
        raise ConfigError("length must be positive")

    grid = LatticeGrid.from_length(n_sites, length)
    spec = factorized.ModelSpec(variant, grid, particle_count)
    ham = factorized.model_hamiltonian(spec, kinetic=kinetic)
    result = factorized.eigensolve(ham, n_eigenvalues=n_eigenvalues)
    report.write_spectrum_csv(result, _out_path(args, "spectrum.csv"))
    reference = None
    if suite == "oscillatory":
        omega = variant.omega
        reference = [omega * (k + 0.5) for k in range(4)]
    plots.plot_spectrum(result, _out_path(args, "spectrum.png"),
                        reference=reference)
    shown = min(result.eigenvalues.size, 8)
    for idx in range(shown):
        print("lambda_%d = %.12g" % (idx, result.eigenvalues[idx]))
    print("wrote %d eigenvalues (%s solver)"
          % (result.eigenvalues.size, result.method))
    return 0


def cmd_sample(args):
    suite, seed, params = _load_config(args.config)
    seed = _effective_seed(args, seed)
    if suite != "poisson-functional":
        raise ConfigError("sample draws from the point ensemble; use the "
                          "poisson-functional suite")
    params = dict(params)
    intensity = float(params.pop("intensity", 1.3))
    box_low = float(params.pop("box_low", 0.0))
    box_high = float(params.pop("box_high", 2.0))
    draws = int(params.pop("draws", 200))
    params.pop("n_samples", None)
    if params:
        raise ConfigError("unknown parameters for sample: %s"
                          % ", ".join(sorted(params)))
    if draws < 1:
        raise ConfigError("draws must be positive")

    ensemble = measure.PoissonEnsemble(intensity, (box_low, box_high), seed)
    configurations = measure.sample_configuration(ensemble, draws=draws)
    report.write_samples_csv(configurations, _out_path(args, "samples.csv"))
    plots.plot_sample_histogram(configurations, ensemble.box,
                                _out_path(args, "samples.png"))
    counts = np.array([len(c) for c in configurations])
    print("drew %d configurations, mean count %.3f (expected %.3f)"
          % (draws, counts.mean(),
             intensity * (box_high - box_low)))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fockfactor",
        description="Numerical checks for factorized lattice Hamiltonians "
                    "and their closed-form ground states.")
    parser.add_argument("--list-suites", action="store_true",
                        help="print the registered suite names and exit")
    sub = parser.add_subparsers(dest="command")
    for name, fn, blurb in (
            ("verify", cmd_verify, "run a suite and write its report"),
            ("converge", cmd_converge, "run refinement ladders"),
            ("spectrum", cmd_spectrum, "eigensolve a lattice model"),
            ("sample", cmd_sample, "draw point-process configurations")):
        cmd = sub.add_parser(name, help=blurb)
        cmd.add_argument("--config", required=True,
                         help="TOML file with suite, seed and [params]")
        cmd.add_argument("--out", default=".",
                         help="directory for report artifacts")
        cmd.add_argument("--seed", type=int, default=None,
                         help="override the config seed")
        cmd.set_defaults(handler=fn)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_suites:
        for name in sorted(suites.SUITES):
            print(name)
        return 0
    if not getattr(args, "handler", None):
        parser.print_help()
        return 2
    try:
        return args.handler(args)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    except CapacityError as exc:
        print("capacity limit: %s" % exc, file=sys.stderr)
        return 3
    except FockFactorError as exc:
        print("check failed: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
