"""Batch front door: measure, rates, infer, simulate, reproduce, report.

Inputs are JSON spec files or CSV panels; outputs are JSON reports, delimited
tables, DOT graphs, and (for the report subcommand only) rendered figures.
Exit codes: 0 success, 1 input error, 2 numerical failure.  Errors go to
standard error as one machine-readable JSON object.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import analytic, inference, io, measures, report as figures
from .errors import (
    CausalflowError,
    NoConvergence,
    SingularCovariance,
)
from .model import (
    ARProcessSpec,
    TimeSeriesPanel,
    build_window_model,
    trivariate_chain_spec,
)
from .simulate import SimulationConfig, estimate_window_covariance, simulate

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERICAL = 2

KIND_CHOICES = ("mi", "di", "delayed-di", "te", "iie")

# Chain network used by the graph-contrast preset: x drives z, z drives y,
# innovations independent, so the only correct edges are x->z and z->y.
FIG2_SPEC = dict(c_xz=0.6, c_zy=0.7, c_yx=0.0, diag=(0.3, 0.3, 0.3),
                 sigma_v=1.0, sigma_u=1.0, sigma_w=1.0, gamma_vw=0.0)


def bundled_example_spec() -> ARProcessSpec:
    """The example spec shipped with the package."""
    with resources.files("causalflow.data").joinpath("example_spec.json").open() as fh:
        return io.spec_from_dict(json.load(fh))


def _emit_error(code: str, message: str) -> None:
    doc = {"schema": io.SCHEMA, "error": code, "message": message}
    print(json.dumps(doc), file=sys.stderr)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        _emit_error("UsageError", message)
        raise SystemExit(EXIT_INPUT)


def _parse_cond(items: "list[str] | None") -> list[tuple[str, str]]:
    cond = []
    for item in items or []:
        channel, sep, mode = item.partition(":")
        if not sep:
            mode = "causal"
        cond.append((channel, mode))
    return cond


def _load_source(args) -> "ARProcessSpec | TimeSeriesPanel":
    if getattr(args, "spec", None):
        return io.load_spec(args.spec)
    if getattr(args, "panel", None):
        return io.load_panel_csv(args.panel)
    raise ValueError("one of --spec or --panel is required")


def _outdir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _print_or_write(doc: dict, out: "str | None") -> None:
    if out:
        io.write_json(doc, out)
    else:
        print(json.dumps(doc, indent=2))


def _cmd_measure(args) -> int:
    source = _load_source(args)
    cond = _parse_cond(args.cond)
    horizon = args.horizon
    if isinstance(source, ARProcessSpec):
        model = build_window_model(source, horizon)
    else:
        model = estimate_window_covariance([source], horizon)
    kind = args.kind
    if kind == "mi":
        rep = measures.mutual_information_block(model, args.source, args.target,
                                                horizon, cond)
    elif kind == "di":
        rep = measures.directed_information(model, args.source, args.target,
                                            horizon, cond)
    elif kind == "delayed-di":
        rep = measures.delayed_directed_information(model, args.source, args.target,
                                                    horizon, cond)
    elif kind == "iie":
        rep = measures.instantaneous_information_exchange(model, args.source,
                                                          args.target, horizon, cond)
    else:
        k = args.k if args.k is not None else horizon
        l = args.l if args.l is not None else horizon
        rep = measures.transfer_entropy(model, args.source, args.target, k, l, horizon)
    _print_or_write(io.report_to_dict(rep, bits=args.bits), args.out)
    return EXIT_OK


def _rate_rows(spec: ARProcessSpec, conditioned: bool, rate_tol: float) -> list[dict]:
    rows = []
    channels = spec.channel_names
    for src in channels:
        for dst in channels:
            if src == dst:
                continue
            cond = [(c, "delayed") for c in channels if c not in (src, dst)] \
                if conditioned else []
            di = measures.measure_rate(spec, "di", src, dst, cond, rate_tol=rate_tol)
            te = measures.measure_rate(spec, "delayed_di", src, dst, cond,
                                       rate_tol=rate_tol)
            iie = measures.measure_rate(spec, "iie", src, dst, cond, rate_tol=rate_tol)
            rows.append({
                "source": src, "target": dst,
                "di_rate": di.value_nats, "te_rate": te.value_nats,
                "iie_rate": iie.value_nats,
                "horizon_reached": di.config["rate_horizon"],
            })
    return rows


def _cmd_rates(args) -> int:
    spec = io.load_spec(args.spec)
    conditioned = args.cond == "causal"
    rows = _rate_rows(spec, conditioned, args.rate_tol)
    if args.bits:
        for row in rows:
            for key in ("di_rate", "te_rate", "iie_rate"):
                row[key] = row[key] / float(np.log(2.0))
    doc = {
        "schema": io.SCHEMA,
        "units": "bits" if args.bits else "nats",
        "conditioning": "delayed record of all remaining channels" if conditioned
                        else "none",
        "config": {"rate_tol": args.rate_tol, "cond": args.cond, "spec": str(args.spec)},
        "rates": rows,
    }
    columns = ["source", "target", "di_rate", "te_rate", "iie_rate", "horizon_reached"]
    if args.out:
        out = _outdir(args.out)
        io.write_json(doc, out / "rates.json")
        io.write_csv_table(rows, columns, out / "rates.csv")
    header = f"{'pair':10s} {'DI':>12s} {'TE':>12s} {'IIE':>12s}"
    print(header)
    for row in rows:
        print(f"{row['source']}->{row['target']:7s} {row['di_rate']:12.6f} "
              f"{row['te_rate']:12.6f} {row['iie_rate']:12.6f}")
    return EXIT_OK


def _cmd_infer(args) -> int:
    source = _load_source(args)
    policy = "causally_conditioned" if args.policy == "conditioned" else args.policy
    graph = inference.infer_graph(
        source, policy=policy, edge_threshold=args.threshold,
        surrogate_count=args.surrogates, alpha=args.alpha, seed=args.seed,
        lag=args.lag)
    out = _outdir(args.out)
    io.write_json(io.graph_to_dict(graph), out / "graph.json")
    io.write_text(io.graph_to_dot(graph), out / "graph.dot")
    for src, dst, w in graph.dynamic_edges:
        print(f"{src} -> {dst}  ({w:.6g} nats)")
    for a, b, w in graph.instantaneous_edges:
        print(f"{a} -- {b}  ({w:.6g} nats, instantaneous)")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    spec = io.load_spec(args.spec)
    config = SimulationConfig(path_length=args.length, ensemble_size=args.ensemble,
                              seed=args.seed, burn_in=args.burn_in,
                              stationary_init=not args.burn_in)
    panels = simulate(spec, config)
    out = Path(args.out)
    if out.suffix == ".csv" and len(panels) == 1:
        out.parent.mkdir(parents=True, exist_ok=True)
        io.save_panel_csv(panels[0], out)
        written = [out]
        manifest_path = out.parent / (out.stem + "_manifest.json")
    else:
        outdir = _outdir(args.out)
        written = []
        for i, panel in enumerate(panels):
            path = outdir / f"panel_{i:04d}.csv"
            io.save_panel_csv(panel, path)
            written.append(path)
        manifest_path = outdir / "manifest.json"
    io.write_json({"schema": io.SCHEMA, "spec": io.spec_to_dict(spec),
                   "path_length": config.path_length,
                   "ensemble_size": config.ensemble_size, "seed": config.seed,
                   "burn_in": config.burn_in,
                   "stationary_init": config.stationary_init,
                   "panels": [p.name for p in written]}, manifest_path)
    print(f"wrote {len(written)} panel(s) under {written[0].parent}")
    return EXIT_OK


def _reproduce_fig2(seed: int, out: Path) -> dict:
    spec = trivariate_chain_spec(**FIG2_SPEC)
    conditioned = inference.infer_graph(spec, policy="causally_conditioned", seed=seed)
    pairwise = inference.infer_graph(spec, policy="pairwise", seed=seed)
    io.write_text(io.graph_to_dot(conditioned, "conditioned"), out / "conditioned.dot")
    io.write_text(io.graph_to_dot(pairwise, "pairwise"), out / "pairwise.dot")
    cond_edges = sorted(conditioned.dynamic_edge_set())
    pair_edges = sorted(pairwise.dynamic_edge_set())
    diff = {
        "conditioned_edges": [list(e) for e in cond_edges],
        "pairwise_edges": [list(e) for e in pair_edges],
        "pairwise_only": [list(e) for e in pair_edges if e not in cond_edges],
        "conditioned_only": [list(e) for e in cond_edges if e not in pair_edges],
        "graphs_differ": cond_edges != pair_edges,
    }
    doc = {"schema": io.SCHEMA, "preset": "fig2", "seed": seed,
           "spec": io.spec_to_dict(spec),
           "conditioned": conditioned.to_dict(), "pairwise": pairwise.to_dict(),
           "diff": diff}
    io.write_json(doc, out / "summary.json")
    print(f"conditioned edges: {cond_edges}")
    print(f"pairwise edges:    {pair_edges}")
    return doc


def _reproduce_bivariate(out: Path) -> dict:
    spec = bundled_example_spec()
    x, y = spec.channel_names
    rows = []
    for n in range(2, 9):
        model = build_window_model(spec, n)
        closed = analytic.bivariate_closed_forms(spec, n)
        marginal = analytic.bivariate_marginal_variance_forms(spec, n)
        numeric = measures.directed_information(model, x, y, n).value_nats
        rows.append({"horizon": n, "closed_di_xy": closed.di_xy,
                     "numeric_di_xy": numeric,
                     "closed_minus_numeric": closed.di_xy - numeric,
                     "marginal_di_xy": marginal.di_xy,
                     "marginal_minus_numeric": marginal.di_xy - numeric})
    rates = analytic.bivariate_rates(spec)
    doc = {"schema": io.SCHEMA, "preset": "bivariate",
           "spec": io.spec_to_dict(spec), "horizons": rows,
           "rates": {"di_xy": rates.di_xy, "di_yx": rates.di_yx,
                     "te_xy": rates.te_xy, "te_yx": rates.te_yx, "iie": rates.iie}}
    io.write_json(doc, out / "bivariate.json")
    io.write_csv_table(rows, list(rows[0].keys()), out / "bivariate.csv")
    return doc


def _reproduce_trivariate(out: Path) -> dict:
    cases = {}
    for case, c_yx in (("A", 0.0), ("B", 0.5)):
        spec = trivariate_chain_spec(c_xz=0.5, c_zy=0.6, c_yx=c_yx,
                                     diag=(0.3, 0.2, 0.4), gamma_vw=0.3)
        closed = analytic.trivariate_case_rates(spec, case)
        x, z, y = spec.channel_names
        numeric = measures.measure_rate(spec, "di", y, x, [(z, "delayed")])
        cases[case] = {
            "closed_form": closed.value,
            "numeric_rate": numeric.value_nats,
            "closed_minus_numeric": closed.value - numeric.value_nats,
            "marginal_shortcut": closed.marginal_value,
            "marginal_shortcut_alt_sign": closed.marginal_value_alt,
            "spec": io.spec_to_dict(spec),
        }
    doc = {"schema": io.SCHEMA, "preset": "trivariate", "cases": cases}
    io.write_json(doc, out / "trivariate.json")
    return doc


def _cmd_reproduce(args) -> int:
    out = _outdir(args.out)
    if args.preset == "fig2":
        _reproduce_fig2(args.seed, out)
    elif args.preset == "bivariate":
        _reproduce_bivariate(out)
    else:
        _reproduce_trivariate(out)
    return EXIT_OK


def _cmd_report(args) -> int:
    spec = io.load_spec(args.spec) if args.spec else bundled_example_spec()
    out = _outdir(args.out)
    rows = _rate_rows(spec, conditioned=True, rate_tol=args.rate_tol)
    columns = ["source", "target", "di_rate", "te_rate", "iie_rate", "horizon_reached"]
    io.write_csv_table(rows, columns, out / "rates.csv")
    io.write_json({"schema": io.SCHEMA, "rates": rows}, out / "rates.json")
    figures.render_rate_bars(rows, out / "rates.png")

    graphs = {}
    for policy in ("pairwise", "causally_conditioned"):
        graph = inference.infer_graph(spec, policy=policy, seed=args.seed)
        graphs[policy] = graph
        io.write_text(io.graph_to_dot(graph, policy), out / f"graph_{policy}.dot")
    figures.render_graph_figure(graphs, out / "graphs.png")

    x, y = spec.channel_names[0], spec.channel_names[1]
    horizons = list(range(1, 11))
    curves = {"DI": [], "delayed DI": [], "IIE": []}
    for n in horizons:
        model = build_window_model(spec, n)
        curves["DI"].append(measures.directed_information(model, x, y, n).value_nats)
        curves["delayed DI"].append(
            measures.delayed_directed_information(model, x, y, n).value_nats)
        curves["IIE"].append(
            measures.instantaneous_information_exchange(model, x, y, n).value_nats)
    growth_rows = [{"horizon": h, "di": curves["DI"][i],
                    "delayed_di": curves["delayed DI"][i], "iie": curves["IIE"][i]}
                   for i, h in enumerate(horizons)]
    io.write_csv_table(growth_rows, ["horizon", "di", "delayed_di", "iie"],
                       out / "di_growth.csv")
    figures.render_horizon_curves(horizons, curves, out / "di_growth.png")
    print(f"report written under {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="causalflow",
                     description="Directed information and Granger-Geweke "
                                 "causality for Gaussian AR networks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="one information measure on a spec or panel")
    p.add_argument("--spec")
    p.add_argument("--panel")
    p.add_argument("--kind", choices=KIND_CHOICES, required=True)
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--cond", action="append", metavar="CHANNEL:MODE",
                   help="side channel, mode in {full,causal,delayed}")
    p.add_argument("--k", type=int, help="target-past length (te)")
    p.add_argument("--l", type=int, help="source-past length (te)")
    p.add_argument("--bits", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_measure)

    p = sub.add_parser("rates", help="table of all pairwise DI/TE/IIE rates")
    p.add_argument("--spec", required=True)
    p.add_argument("--cond", choices=("none", "causal"), default="causal")
    p.add_argument("--rate-tol", type=float, default=measures.DEFAULT_RATE_TOL)
    p.add_argument("--bits", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_rates)

    p = sub.add_parser("infer", help="infer a causal graph")
    p.add_argument("--spec")
    p.add_argument("--panel")
    p.add_argument("--policy", choices=("pairwise", "conditioned"), default="conditioned")
    p.add_argument("--threshold", type=float, default=inference.DEFAULT_EDGE_THRESHOLD)
    p.add_argument("--surrogates", type=int, default=inference.DEFAULT_SURROGATES)
    p.add_argument("--alpha", type=float, default=inference.DEFAULT_ALPHA)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lag", type=int, default=measures.DEFAULT_LAG)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_infer)

    p = sub.add_parser("simulate", help="sample paths from a spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--ensemble", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--burn-in", type=int, default=0,
                   help="disable stationary init and burn in from zero instead")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("reproduce", help="named experiment presets")
    p.add_argument("preset", choices=("fig2", "bivariate", "trivariate"))
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_reproduce)

    p = sub.add_parser("report", help="rates, graphs and figures in one directory")
    p.add_argument("--spec")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rate-tol", type=float, default=measures.DEFAULT_RATE_TOL)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv: "list[str] | None" = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SingularCovariance, NoConvergence) as exc:
        _emit_error(type(exc).__name__, str(exc))
        return EXIT_NUMERICAL
    except CausalflowError as exc:
        _emit_error(type(exc).__name__, str(exc))
        return EXIT_INPUT
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        _emit_error(type(exc).__name__, str(exc))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
