"""Command-line front end: ``crnkit <command> [options]``.

Exit codes: 0 success, 2 parse error (including bad flags), 3 domain
error, 4 numerical failure, 5 infeasible system.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .chemkin import import_chemkin_subset
from .errors import CrnError, ParseError
from .models import load_builtin
from .network import ReactionNetwork, parse_network, parse_reactions

log = logging.getLogger("crnkit")


# -- input helpers ------------------------------------------------------------

def _numbers(text: str | None, what: str) -> np.ndarray | None:
    """Comma/space separated numbers; fractions such as ``1/1000`` allowed."""
    if text is None:
        return None
    parts = [p for p in text.replace(",", " ").split() if p]
    try:
        return np.array([float(Fraction(p)) for p in parts], dtype=float)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"cannot read {what}: {text!r}") from exc


def _load(args):
    """Network plus default rates and initial state from --model/--reactions/--file."""
    sources = [s for s in (args.model, args.reactions, args.file) if s is not None]
    if len(sources) != 1:
        raise ParseError("give exactly one of --model, --reactions, --file")
    rates = initial = None
    if args.model is not None:
        model = load_builtin(args.model)
        net, rates, initial = model.network, model.rates, model.initial
    elif args.reactions is not None:
        net = parse_network(args.reactions)
    else:
        text = Path(args.file).read_text(encoding="utf-8")
        net = import_chemkin_subset(text) if args.chemkin else parse_network(text)
    if getattr(args, "rates", None) is not None:
        rates = _numbers(args.rates, "rates")
    if getattr(args, "initial", None) is not None:
        initial = _numbers(args.initial, "initial state")
    return net, rates, initial


def _require(value, flag, net: ReactionNetwork, length: int):
    if value is None:
        raise ParseError(f"{flag} is required for this network")
    if len(value) != length:
        raise ParseError(f"{flag} needs {length} values, got {len(value)}")
    return value


def _emit(args, payload_json, text: str | None = None, csv: str | None = None, dot: str | None = None):
    fmt = args.format
    if fmt == "json":
        out = json.dumps(payload_json, indent=2, ensure_ascii=False)
    elif fmt == "csv":
        if csv is None:
            raise ParseError(f"--format csv is not available for '{args.command}'")
        out = csv.rstrip("\n")
    elif fmt == "dot":
        if dot is None:
            raise ParseError(f"--format dot is not available for '{args.command}'")
        out = dot.rstrip("\n")
    else:
        out = (text if text is not None else json.dumps(payload_json, indent=2)).rstrip("\n")
    print(out)


def _workers(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("CRNKIT_THREADS")
    return max(1, int(env)) if env else 1


# -- commands -----------------------------------------------------------------

def cmd_info(args):
    from .structure import conservation_laws, structure_report

    net, _, _ = _load(args)
    rep = structure_report(net)
    cx = [net.format_complex(c) for c in net.complexes]
    laws = conservation_laws(net)
    payload = {
        "species": list(net.species_names),
        "steps": [net.format_step(r) for r in range(net.n_steps)],
        "complexes": cx,
        "N": rep.N, "L": rep.L, "S": rep.S, "deficiency": rep.delta, "P": rep.P,
        "linkage_classes": [[cx[v] for v in lc] for lc in rep.linkage_classes],
        "strong_components": [{"complexes": [cx[v] for v in comp], "terminal": t}
                              for comp, t in zip(rep.strong_components, rep.terminal)],
        "weakly_reversible": rep.weakly_reversible,
        "conservation_laws": [list(law.weights) for law in laws],
    }
    lines = [
        f"species ({net.n_species}): " + ", ".join(net.species_names),
        f"steps ({net.n_steps}):",
        *[f"  {r + 1:>3}: {net.format_step(r)}" for r in range(net.n_steps)],
        f"complexes N = {rep.N}, linkage classes L = {rep.L}, rank S = {rep.S}",
        f"deficiency = {rep.N} - {rep.L} - {rep.S} = {rep.delta}",
        f"reversible pairs P = {rep.P}; weakly reversible: {'yes' if rep.weakly_reversible else 'no'}",
        "strong components:",
        *[f"  {{{', '.join(cx[v] for v in comp)}}}{' (terminal)' if t else ''}"
          for comp, t in zip(rep.strong_components, rep.terminal)],
        "conservation laws:" + ("" if laws else " none"),
        *[f"  {law.format(net.species_names)}" for law in laws],
    ]
    _emit(args, payload, "\n".join(lines))


def cmd_db(args):
    from .detailed_balance import check_detailed_balance, detailed_balance_conditions
    from .structure import structure_report

    net, rates, _ = _load(args)
    circ, forest = detailed_balance_conditions(net)
    rep = structure_report(net)
    payload = {
        "circuit_conditions": [eq.to_json() for eq in circ],
        "forest_conditions": [eq.to_json() for eq in forest],
        "cycle_count": rep.P - rep.N + rep.L,
        "deficiency": rep.delta,
    }
    lines = []
    if not circ:
        lines.append("# the complex graph has no cycle; only spanning forest conditions apply")
    lines += [eq.text() for eq in circ + forest]
    if rates is not None and not args.no_check:
        k = _require(rates, "--rates", net, net.n_steps)
        report = check_detailed_balance(net, k, tol=args.tol)
        payload["holds"] = report.holds
        payload["residuals"] = report.residuals
        lines.append(f"# detailed balanced at the given rates: {'yes' if report.holds else 'no'}")
        lines += [f"# residual {eq.text()}: {r:.17g}" for eq, r in zip(report.conditions, report.residuals)]
    _emit(args, payload, "\n".join(lines))


def cmd_acr(args):
    from .robustness import acr_test

    net, rates, initial = _load(args)
    defaulted = rates is None
    k = _require(np.ones(net.n_steps) if defaulted else rates, "--rates", net, net.n_steps)
    c0 = None if initial is None else _require(initial, "--initial", net, net.n_species)
    rep = acr_test(net, k, c0, starts=args.starts, seed=args.seed)
    if defaulted:
        rep.notes.append("no rate coefficients given; all ones were used")
    payload = rep.to_json(net)
    names = net.species_names
    lines = [f"verdict: {rep.verdict}", f"deficiency: {rep.deficiency}",
             "robust species: {" + ", ".join(names[i] for i in rep.robust_species) + "}"]
    for a, b, s in rep.witness_pairs:
        lines.append(f"witness: ({net.format_complex(net.complexes[a])}) - ({net.format_complex(net.complexes[b])})"
                     f" differ only in {names[s]}")
    if rep.positive_point is not None:
        lines.append("positive stationary point: " + ", ".join(f"{v:.17g}" for v in rep.positive_point))
    lines += [f"note: {n}" for n in rep.notes]
    _emit(args, payload, "\n".join(lines))


def cmd_ode(args):
    from .deterministic import integrate

    net, rates, initial = _load(args)
    k = _require(rates, "--rates", net, net.n_steps)
    c0 = _require(initial, "--initial", net, net.n_species)
    traj = integrate(net, k, c0, (args.t0, args.t_end), rtol=args.rtol, atol=args.atol,
                     method=args.method, max_steps=args.max_steps, samples=args.samples or 101)
    if args.emit_plot_data:
        Path(args.emit_plot_data).write_text(_gnuplot(traj.times, traj.states, net.species_names))
    text = (f"# method {traj.method}, accepted {traj.n_accepted}, rejected {traj.n_rejected}\n"
            + traj.to_csv(sep="\t"))
    _emit(args, traj.to_json(), text, csv=traj.to_csv())


def cmd_stationary(args):
    from .deterministic import stationary_points

    net, rates, initial = _load(args)
    k = _require(rates, "--rates", net, net.n_steps)
    c0 = _require(initial if initial is not None else np.ones(net.n_species), "--initial", net, net.n_species)
    pts = stationary_points(net, k, c0, positivity=args.positive, starts=args.starts, tol=args.tol,
                            seed=args.seed)
    payload = {"species": list(net.species_names),
               "points": [{"c": [float(v) for v in p.c], "residual": p.residual,
                           "class_residual": p.class_residual} for p in pts]}
    csv = ",".join(net.species_names) + "\n" + "".join(",".join(f"{v:.17g}" for v in p.c) + "\n" for p in pts)
    lines = [f"{len(pts)} stationary point(s)"]
    for p in pts:
        lines.append("  " + ", ".join(f"{n} = {v:.17g}" for n, v in zip(net.species_names, p.c))
                     + f"  (residual {p.residual:.3g})")
    _emit(args, payload, "\n".join(lines), csv=csv)


def cmd_ssa(args):
    from .stochastic import ensemble, ssa_direct, stochastic_rates, tau_leap

    net, rates, initial = _load(args)
    k = _require(rates, "--rates", net, net.n_steps)
    if args.volume is not None:
        k = stochastic_rates(net, k, args.volume)
    x0 = _require(initial, "--initial", net, net.n_species)
    if np.any(x0 != np.round(x0)):
        raise ParseError("--initial must be integer molecule counts for ssa")
    x0 = x0.astype(np.int64)
    method = "tau-leap" if args.method in ("tau", "tau-leap") else "direct"
    if args.runs > 1:
        n = args.samples or 11
        stats = ensemble(net, k, x0, args.t_end, method=method, n=args.runs, master_seed=args.seed,
                         sample_times=np.linspace(0.0, args.t_end, n), eps=args.eps, workers=_workers(args))
        rows = ["t," + ",".join(f"mean_{s},var_{s}" for s in net.species_names)]
        for t, mu, var in zip(stats.times, stats.sample_means, stats.sample_variances):
            rows.append(f"{t:.17g}," + ",".join(f"{a:.17g},{b:.17g}" for a, b in zip(mu, var)))
        if args.emit_plot_data:
            Path(args.emit_plot_data).write_text(_gnuplot(stats.times, stats.sample_means, net.species_names))
        _emit(args, stats.to_json(), "\n".join(rows), csv="\n".join(rows))
        return
    grid = None if args.samples is None else np.linspace(0.0, args.t_end, args.samples)
    if method == "direct":
        traj = ssa_direct(net, k, x0, args.t_end, args.seed, sample_times=grid)
    else:
        traj = tau_leap(net, k, x0, args.t_end, args.eps, args.seed, sample_times=grid)
    if args.emit_plot_data:
        Path(args.emit_plot_data).write_text(_gnuplot(traj.times, traj.counts, net.species_names))
    _emit(args, traj.to_json(), traj.to_csv(sep="\t"), csv=traj.to_csv())


def _formula_path(name: str) -> str:
    p = Path(name)
    if p.exists():
        return p.read_text(encoding="utf-8")
    data = resources.files("crnkit").joinpath("data", p.name)
    if data.is_file():
        return data.read_text(encoding="utf-8")
    raise ParseError(f"species file not found: {name}")


def cmd_elementary(args):
    from .stoichiometry import atomic_matrix, elementary_reactions, read_formula_file

    am = atomic_matrix(read_formula_file(_formula_path(args.species)))
    steps = elementary_reactions(am, max_product_molecularity=args.max_product,
                                 allow_shared_species=not args.no_shared)
    if args.count_only:
        _emit(args, {"count": len(steps)}, str(len(steps)))
        return
    lines = [s.format() for s in steps]
    payload = {"species": list(am.species), "atomic_matrix": {"rows": list(am.rows), "matrix": am.matrix.tolist()},
               "count": len(steps), "steps": lines}
    _emit(args, payload, "\n".join(lines))


def cmd_decompose(args):
    from .stoichiometry import cycles, decompositions, heuristic_decompositions, preprocess

    net, _, _ = _load(args)
    overall = parse_reactions(args.overall)
    if len(overall) != 1:
        raise ParseError("--overall must be a single one-way reaction")
    step = overall[0]
    w = np.zeros(net.n_species, dtype=np.int64)
    for name, c in step.product.as_dict().items():
        w[_species_index(net, name)] += c
    for name, c in step.reactant.as_dict().items():
        w[_species_index(net, name)] -= c
    gamma = net.gamma
    payload: dict = {"overall": step.format(), "w": w.tolist()}
    lines = [f"overall: {step.format()}"]
    if args.preprocess:
        pre = preprocess(gamma, w)
        payload["forced_steps"] = [i + 1 for i in pre.forced_steps]
        payload["excluded_steps"] = [i + 1 for i in pre.excluded_steps]
        lines.append("forced steps: " + (", ".join(str(i + 1) for i in pre.forced_steps) or "none"))
        lines.append("excluded steps: " + (", ".join(str(i + 1) for i in pre.excluded_steps) or "none"))
    if args.heuristic:
        sols = heuristic_decompositions(gamma, w, samples=args.samples or 100, seed=args.seed)
        payload["heuristic"] = [list(s.multipliers) for s in sols]
        lines.append(f"heuristic decompositions ({len(sols)}, completeness not guaranteed):")
        lines += ["  " + _combo(net, s.multipliers) for s in sols]
    else:
        res = decompositions(gamma, w, max_solutions=args.max_solutions)
        payload["decompositions"] = [list(s.multipliers) for s in res.solutions]
        payload["truncated"] = res.truncated
        lines.append(f"minimal decompositions ({len(res.solutions)}{', truncated' if res.truncated else ''}):")
        lines += ["  " + _combo(net, s.multipliers) for s in res.solutions]
    if args.cycles:
        cyc = cycles(gamma)
        payload["cycles_exist"] = cyc.exists
        payload["minimal_cycles"] = [list(c) for c in cyc.minimal_cycles]
        lines.append(f"cycles exist: {'yes' if cyc.exists else 'no'}")
        lines += ["  " + _combo(net, c) for c in cyc.minimal_cycles]
    _emit(args, payload, "\n".join(lines))


def _species_index(net: ReactionNetwork, name: str) -> int:
    try:
        return net.species_index(name)
    except (KeyError, ValueError):
        raise ParseError(f"species {name!r} of the overall reaction is not in the network") from None


def _combo(net: ReactionNetwork, x) -> str:
    return " + ".join(f"{v} x ({net.format_step(r)})" if v > 1 else f"({net.format_step(r)})"
                      for r, v in enumerate(x) if v)


def cmd_graph(args):
    from .structure import to_dot

    net, _, _ = _load(args)
    dot = to_dot(net)
    _emit(args, {"dot": dot}, dot, dot=dot)


def cmd_repro(args):
    from .repro import run_all

    results = run_all(quick=args.quick)
    payload = [{"criterion": r.key, "title": r.title, "passed": r.passed, "detail": r.detail,
                "seconds": round(r.seconds, 3)} for r in results]
    width = max(len(r.title) for r in results)
    lines = [f"{r.key:>3}  {'PASS' if r.passed else 'FAIL'}  {r.title:<{width}}  {r.detail}" for r in results]
    lines.append(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    _emit(args, payload, "\n".join(lines))
    return 0 if all(r.passed for r in results) else 1


def _gnuplot(times, states, names) -> str:
    rows = ["# t " + " ".join(names)]
    rows += [" ".join(f"{v:.17g}" for v in (t, *row)) for t, row in zip(times, states)]
    return "\n".join(rows) + "\n"


# -- argument parsing -----------------------------------------------------------

def _source(p: argparse.ArgumentParser):
    g = p.add_argument_group("network source (exactly one)")
    g.add_argument("--model", help="built-in model, e.g. wegscheider, envz-ompr, ross-chain, chain(10)")
    g.add_argument("--reactions", help='reactions in the text notation, e.g. "A + B -> 2 B, B -> A"')
    g.add_argument("--file", help="file with reactions (or a CHEMKIN mechanism with --chemkin)")
    g.add_argument("--chemkin", action="store_true", help="read --file as a CHEMKIN subset")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crnkit", description="Reaction network analysis and simulation.")
    parser.add_argument("--version", action="version", version=f"crnkit {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv", "dot"), default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=None, help="worker cap (default: $CRNKIT_THREADS or 1)")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", parents=[common], help="structural indices and deficiency")
    _source(p)
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("db", parents=[common], help="detailed balance conditions")
    _source(p)
    p.add_argument("--rates", help="rate coefficients to check, in step order")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--no-check", action="store_true", help="only print the conditions")
    p.set_defaults(func=cmd_db)

    p = sub.add_parser("acr", parents=[common], help="absolute concentration robustness test")
    _source(p)
    p.add_argument("--rates", help="rate coefficients (default: the model's, else all ones)")
    p.add_argument("--initial", help="reference state for the stationary point search (default all ones)")
    p.add_argument("--starts", type=int, default=16)
    p.set_defaults(func=cmd_acr)

    p = sub.add_parser("ode", parents=[common], help="integrate the mass-action ODE")
    _source(p)
    p.add_argument("--rates")
    p.add_argument("--initial")
    p.add_argument("--t0", type=float, default=0.0)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--method", choices=("explicit-adaptive", "stiff"), default="explicit-adaptive")
    p.add_argument("--rtol", type=float, default=1e-8)
    p.add_argument("--atol", type=float, default=1e-10)
    p.add_argument("--max-steps", type=int, default=200_000)
    p.add_argument("--samples", type=int, help="number of equally spaced output times (default 101)")
    p.add_argument("--emit-plot-data", metavar="PATH", help="also write gnuplot-ready columns")
    p.set_defaults(func=cmd_ode)

    p = sub.add_parser("stationary", parents=[common], help="stationary points in a compatibility class")
    _source(p)
    p.add_argument("--rates")
    p.add_argument("--initial", help="reference concentrations (default all ones)")
    p.add_argument("--positive", action="store_true", help="keep only strictly positive points")
    p.add_argument("--starts", type=int, default=16)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_stationary)

    p = sub.add_parser("ssa", parents=[common], help="stochastic simulation")
    _source(p)
    p.add_argument("--rates")
    p.add_argument("--initial", help="initial molecule counts")
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--method", choices=("direct", "tau", "tau-leap"), default="direct")
    p.add_argument("--eps", type=float, default=0.03)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--samples", type=int, help="number of equally spaced sample times")
    p.add_argument("--volume", type=float, help="convert deterministic rates using this volume (litres)")
    p.add_argument("--emit-plot-data", metavar="PATH")
    p.set_defaults(func=cmd_ssa)

    p = sub.add_parser("elementary", parents=[common], help="generate balanced elementary steps")
    p.add_argument("--species", required=True, help="formula file, one formula per line")
    p.add_argument("--count-only", action="store_true")
    p.add_argument("--no-shared", action="store_true", help="drop steps with a species on both sides")
    p.add_argument("--max-product", type=int, help="cap on product molecularity")
    p.set_defaults(func=cmd_elementary)

    p = sub.add_parser("decompose", parents=[common], help="decompose an overall reaction")
    _source(p)
    p.add_argument("--overall", required=True, help='overall reaction, e.g. "A -> C"')
    p.add_argument("--minimal", action="store_true", default=True, help="minimal decompositions (default)")
    p.add_argument("--cycles", action="store_true", help="also report cycles")
    p.add_argument("--preprocess", action="store_true", help="report forced and excluded steps")
    p.add_argument("--max-solutions", type=int)
    p.add_argument("--heuristic", action="store_true", help="randomised sampler instead of the exact search")
    p.add_argument("--samples", type=int, help="samples for --heuristic")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("graph", parents=[common], help="Feinberg-Horn-Jackson graph as GraphViz DOT")
    _source(p)
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("repro", parents=[common], help="run the reproduction checks")
    p.add_argument("--quick", action="store_true", help="smaller ensembles and instance counts")
    p.set_defaults(func=cmd_repro)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:       # bad flags (2), --help and --version (0)
        return exc.code if isinstance(exc.code, int) else 2
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="crnkit: %(levelname)s: %(message)s")
    try:
        code = args.func(args)
    except CrnError as exc:
        print(f"crnkit: error: {exc}", file=sys.stderr)
        cert = getattr(exc, "certificate", None)
        if cert is not None:
            print("crnkit: certificate: " + " ".join(str(v) for v in cert), file=sys.stderr)
        return exc.exit_code
    except (ValueError, OSError) as exc:
        print(f"crnkit: error: {exc}", file=sys.stderr)
        return 3
    return code or 0


if __name__ == "__main__":
    sys.exit(main())
