"""Command-line experiment driver.

Subcommands generate instances, run the spanner / completion pipelines with
their verifications, audit long edges, estimate dimensions, emit the two
lower-bound certificates, and collect report files into plot tables. Exit
status: 0 when every enabled verification passed, 1 on a verification or
pipeline failure, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass

from . import closure, completion, instances, metric, spanner
from .errors import ConfigError, DoublingError
from .report import RunReport, emit_plot_data

__all__ = ["RunConfig", "run", "main"]

PIPELINES = ("spanner", "complete-tree", "audit-only", "dim", "certify-star", "certify-lcp")


@dataclass
class RunConfig:
    pipeline: str
    instance: instances.InstanceSpec | None = None
    input_path: str | None = None
    epsilon: float | None = None
    samples_per_edge: int = 2
    exact_max_n: int = 64
    output: str | None = None

    def validate(self) -> None:
        if self.pipeline not in PIPELINES:
            raise ConfigError(f"unknown pipeline {self.pipeline!r}")
        if self.epsilon is not None and not 0.0 < self.epsilon <= 0.25:
            raise ConfigError(f"epsilon must lie in (0, 1/4], got {self.epsilon!r}")
        if self.samples_per_edge < 0:
            raise ConfigError("samples-per-edge must be nonnegative")
        if self.exact_max_n < 1:
            raise ConfigError("exact-dim-max-n must be positive")


def _load_input(path: str) -> metric.WeightedGraph | metric.FiniteMetric:
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            kind = line.split()[0]
            if kind == "graph":
                return metric.load_graph(path)
            if kind == "metric":
                return metric.load_metric(path)
            raise ConfigError(f"{path}: unrecognized file header {kind!r}")
    raise ConfigError(f"{path}: empty input file")


def _resolve(config: RunConfig) -> metric.WeightedGraph | metric.FiniteMetric:
    if config.instance is not None:
        return config.instance.build()
    if config.input_path is None:
        raise ConfigError("no instance and no input file given")
    return _load_input(config.input_path)


def _config_echo(config: RunConfig) -> dict[str, object]:
    echo: dict[str, object] = {"pipeline": config.pipeline}
    if config.instance is not None:
        echo.update(config.instance.describe())
    if config.input_path is not None:
        echo["input"] = config.input_path
    if config.epsilon is not None:
        echo["epsilon"] = config.epsilon
    echo["samples_per_edge"] = config.samples_per_edge
    echo["exact_max_n"] = config.exact_max_n
    return echo


def _need_epsilon(config: RunConfig) -> float:
    if config.epsilon is None:
        raise ConfigError(f"pipeline {config.pipeline!r} requires --epsilon")
    return config.epsilon


def _as_metric(obj: metric.WeightedGraph | metric.FiniteMetric) -> metric.FiniteMetric:
    if isinstance(obj, metric.WeightedGraph):
        return metric.shortest_path_metric(obj)
    return obj


def _audit_section(audit: closure.AuditResult) -> dict[str, object]:
    u, r, edges = audit.witness
    return {
        "max": audit.max_count,
        "witness_vertex": u,
        "witness_radius": r,
        "witness_edges": [list(e) for e in edges],
    }


def _stretch_section(rep: metric.StretchReport) -> dict[str, object]:
    return {"min": rep.min_ratio, "max": rep.max_ratio, "pass": rep.passed}


def _input_dims(m: metric.FiniteMetric, config: RunConfig) -> dict[str, object]:
    est = metric.doubling_estimate(m, exact_max_n=config.exact_max_n)
    est = est.merged_with_lower(metric.packing_lower_bound(m))
    return {
        "input_upper": est.dim_upper,
        "input_lower": est.dim_lower,
        "input_mode": est.mode,
    }


def _conv_dims(g: metric.WeightedGraph, config: RunConfig) -> dict[str, object]:
    est = closure.sampled_conv_dimension(
        g, config.samples_per_edge, exact_max_n=config.exact_max_n
    )
    return {"conv_sampled_upper": est.dim_upper, "conv_sampled_lower": est.dim_lower}


def run(config: RunConfig) -> tuple[RunReport, bool]:
    """Execute one pipeline; returns the report and overall pass/fail."""
    config.validate()
    report = RunReport(config=_config_echo(config))
    t0 = time.perf_counter()
    passed = True

    if config.pipeline == "spanner":
        m = _as_metric(_resolve(config))
        eps = _need_epsilon(config)
        s = spanner.build_spanner(m, eps)
        assert s.net_tree is not None and s.stretch is not None
        report.add("scale", {"scale": s.net_tree.scale})
        report.add("stretch", _stretch_section(s.stretch))
        report.add(
            "degree", {"max_degree": s.max_degree, "n_edges": len(s.graph.edges)}
        )
        report.add("long_edges", _audit_section(closure.long_edge_audit(s.graph)))
        dims = _input_dims(m, config)
        dims.update(_conv_dims(s.graph, config))
        report.add("dim", dims)
        passed = s.stretch.passed
        if config.output:
            spanner.save_spanner(s, config.output + ".spanner")

    elif config.pipeline == "complete-tree":
        g = _resolve(config)
        if not isinstance(g, metric.WeightedGraph):
            raise ConfigError("complete-tree needs a graph input")
        eps = _need_epsilon(config)
        c = completion.complete_tree(g, eps)
        rep = completion.verify_completion(
            g, c, eps,
            samples_per_edge=config.samples_per_edge,
            exact_max_n=config.exact_max_n,
        )
        report.add("scale", {"scale": c.scale})
        report.add("stretch", _stretch_section(rep.stretch))
        report.add(
            "tree",
            {"input_is_tree": c.input_is_tree, "output_is_tree": rep.tree_ok},
        )
        report.add("long_edges", _audit_section(rep.audit))
        dims = _input_dims(metric.shortest_path_metric(g), config)
        dims["conv_sampled_upper"] = rep.conv_dim.dim_upper
        dims["conv_sampled_lower"] = rep.conv_dim.dim_lower
        report.add("dim", dims)
        passed = rep.passed
        if config.output:
            completion.save_completion(c, config.output + ".completion")

    elif config.pipeline == "audit-only":
        g = _resolve(config)
        if not isinstance(g, metric.WeightedGraph):
            raise ConfigError("audit needs a graph input")
        report.add("long_edges", _audit_section(closure.long_edge_audit(g)))

    elif config.pipeline == "dim":
        obj = _resolve(config)
        dims = _input_dims(_as_metric(obj), config)
        if isinstance(obj, metric.WeightedGraph):
            dims.update(_conv_dims(obj, config))
        report.add("dim", dims)

    elif config.pipeline == "certify-star":
        if config.instance is None or config.instance.family != "exponential-star":
            raise ConfigError("certify-star needs an exponential-star instance")
        eps = _need_epsilon(config)
        g = config.instance.build()
        assert isinstance(g, metric.WeightedGraph)
        c = completion.complete_tree(g, eps)
        cert = instances.star_lb_certificate(c, eps)
        report.add("scale", {"scale": c.scale})
        report.add("certificate", _packing_section(cert))
        passed = cert.ok

    elif config.pipeline == "certify-lcp":
        if config.instance is None or config.instance.p is None:
            raise ConfigError("certify-lcp needs an lcp-hypercube instance")
        p = config.instance.p
        eps = config.epsilon if config.epsilon is not None else 2.0 ** -(p + 1)
        m = instances.lcp_metric(p)
        s = spanner.build_spanner(m, eps)
        assert s.stretch is not None
        crossing = instances.lcp_crossing_check(s.graph, p)
        packing = instances.crossing_midpoint_packing(s.graph, p)
        report.config["epsilon"] = eps
        report.add("stretch", _stretch_section(s.stretch))
        report.add(
            "crossing",
            {
                "present": crossing.present,
                "total": crossing.total,
                "all_present": crossing.all_present,
                "missing": "-" if crossing.missing is None else list(crossing.missing),
            },
        )
        report.add("midpoint_packing", _packing_section(packing))
        passed = s.stretch.passed and crossing.all_present and packing.ok

    report.timings["total_s"] = time.perf_counter() - t0
    return report, passed


def _packing_section(cert: instances.PackingCertificate) -> dict[str, object]:
    return {
        "size": cert.size,
        "min_pairwise": cert.min_pairwise,
        "max_pairwise": cert.max_pairwise,
        "ball_radius": cert.ball_radius,
        "dim_lower": cert.dim_lower,
        "ok": cert.ok,
    }


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="doubling",
        description="Build and verify doubling-preserving spanners and tree completions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, *, epsilon: bool = True) -> None:
        if epsilon:
            p.add_argument("--epsilon", type=float, default=None)
        p.add_argument("--samples-per-edge", type=int, default=2)
        p.add_argument("--exact-dim-max-n", type=int, default=64)
        p.add_argument("--output", default=None)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("--family", required=True, choices=instances.FAMILIES)
    g.add_argument("--n", type=int, default=None)
    g.add_argument("--p", type=int, default=None)
    g.add_argument("--ambient-dim", type=int, default=2)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--output", required=True)

    for name in ("spanner", "complete-tree", "audit", "dim"):
        p = sub.add_parser(name, help=f"run the {name} pipeline on an input file")
        p.add_argument("--input", required=True)
        add_common(p, epsilon=name in ("spanner", "complete-tree"))

    p = sub.add_parser("certify-star", help="completed-star packing certificate")
    p.add_argument("--n", type=int, required=True)
    add_common(p)

    p = sub.add_parser("certify-lcp", help="crossing-edge certificate on prefix strings")
    p.add_argument("--p", type=int, required=True)
    add_common(p)

    p = sub.add_parser("report", help="merge report JSON files into a plot table")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--output", default=None)
    return parser


def _cmd_gen(args: argparse.Namespace) -> int:
    try:
        spec = instances.InstanceSpec(
            family=args.family,
            n=args.n,
            p=args.p,
            ambient_dim=args.ambient_dim,
            seed=args.seed,
        )
        built = spec.build()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if isinstance(built, metric.WeightedGraph):
        metric.save_graph(built, args.output)
    else:
        metric.save_metric(built, args.output)
    print(args.output)
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    import json

    reports = []
    for path in args.inputs:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        rep = RunReport(config=data.pop("config", {}))
        timings = data.pop("timings", {})
        rep.sections = list(data.items())
        rep.timings = timings
        reports.append(rep)
    table = emit_plot_data(reports)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(table)
    else:
        sys.stdout.write(table)
    return 0


_PIPELINE_OF_COMMAND = {
    "spanner": "spanner",
    "complete-tree": "complete-tree",
    "audit": "audit-only",
    "dim": "dim",
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "report":
            return _cmd_report(args)

        if args.command in _PIPELINE_OF_COMMAND:
            config = RunConfig(
                pipeline=_PIPELINE_OF_COMMAND[args.command],
                input_path=args.input,
                epsilon=getattr(args, "epsilon", None),
                samples_per_edge=args.samples_per_edge,
                exact_max_n=args.exact_dim_max_n,
                output=args.output,
            )
        elif args.command == "certify-star":
            config = RunConfig(
                pipeline="certify-star",
                instance=instances.InstanceSpec(family="exponential-star", n=args.n),
                epsilon=args.epsilon,
                samples_per_edge=args.samples_per_edge,
                exact_max_n=args.exact_dim_max_n,
                output=args.output,
            )
        else:
            config = RunConfig(
                pipeline="certify-lcp",
                instance=instances.InstanceSpec(family="lcp-hypercube", p=args.p),
                epsilon=args.epsilon,
                samples_per_edge=args.samples_per_edge,
                exact_max_n=args.exact_dim_max_n,
                output=args.output,
            )
        report, passed = run(config)
        sys.stdout.write(report.render_text())
        if config.output:
            report.save(config.output)
        return 0 if passed else 1
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DoublingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
