"""Command-line surface: serve, run, bench, eval, gen-map, render.

The CLI is a thin client over the service handler layer — each command builds
the same request model the HTTP endpoint accepts and dispatches in-process, so
flags, validation, and output have exactly one implementation. Results are
emitted as JSON records on stdout; failures emit an error record and exit
nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import yaml

from .errors import SimError
from .evaluation import compare_reports, easy_tasks, hard_tasks, medium_tasks, run_protocol
from .policies import POLICY_NAMES, make_policy
from .rendering import render_chart_svg, render_trace_svg, write_svg
from .service import handlers
from .service import models as m
from .service.handlers import ServiceError
from .traces import load_trace, save_trace


def _emit(record: dict) -> None:
    print(json.dumps(record, separators=(",", ":")))


def _fail(error: str, detail: str) -> int:
    _emit({"error": error, "detail": detail})
    return 1


def _load_raw_config(path: str | None) -> dict | None:
    if path is None:
        return None
    raw = yaml.safe_load(Path(path).read_text())
    return raw or {}


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    req = m.RunEpisodeRequest(
        config=_load_raw_config(args.config),
        policy=args.policy,
        seed=args.seed,
        include_trace=args.trace is not None,
    )
    resp = handlers.run_episode_handler(req)
    if args.trace is not None:
        save_trace(resp.trace, args.trace)
    record = {"policy": resp.policy, "seed": resp.seed, **resp.metrics}
    if args.trace is not None:
        record["trace"] = str(args.trace)
    _emit(record)
    return 0


def _bench_config(args: argparse.Namespace) -> dict:
    raw = _load_raw_config(args.config) or {}
    generator = raw.setdefault("generator", {})
    if args.map is not None:
        generator["kind"] = args.map
    if args.size is not None:
        generator["height"] = args.size
        generator["width"] = args.size
    if args.density is not None:
        generator["obstacle_density"] = args.density
    if args.agents is not None:
        generator["num_agents"] = args.agents
    return raw


def _cmd_bench(args: argparse.Namespace) -> int:
    req = m.BenchRequest(
        config=_bench_config(args),
        envs=args.envs,
        steps=args.steps,
        seed=args.seed,
        policy=args.policy,
        warmup=args.warmup,
        threads=args.threads,
    )
    resp = handlers.bench_handler(req)
    _emit(resp.model_dump())
    return 0


def _cmd_gen_map(args: argparse.Namespace) -> int:
    raw = _load_raw_config(args.config) or {}
    generator = raw.setdefault("generator", {})
    if args.kind is not None:
        generator["kind"] = args.kind
    if args.size is not None:
        generator["height"] = args.size
        generator["width"] = args.size
    if args.density is not None:
        generator["obstacle_density"] = args.density
    req = m.GenMapRequest(config=raw, seed=args.seed)
    resp = handlers.gen_map_handler(req)
    if args.out is not None:
        Path(args.out).write_text(resp.text)
        _emit({"out": str(args.out), "layout_id": resp.layout_id,
               "landmarks": resp.landmark_count})
    else:
        sys.stdout.write(resp.text)
    return 0


def _tier_tasks(tier: str, episodes: int, seed: int, overrides: dict | None):
    builders = {"easy": easy_tasks, "medium": medium_tasks, "hard": hard_tasks}
    if tier not in builders:
        raise ServiceError(422, "unknown_tier", f"tier must be one of {sorted(builders)}")
    return builders[tier](episodes=episodes, seed=seed, overrides=overrides)


def _cmd_eval(args: argparse.Namespace) -> int:
    overrides = _load_raw_config(args.config)
    tasks = _tier_tasks(args.tier, args.episodes, args.seed, overrides)
    if args.task_filter:
        tasks = [t for t in tasks if args.task_filter in t.name]
        if not tasks:
            return _fail("no_tasks", f"no tasks match filter {args.task_filter!r}")
    reports = []
    for policy_name in args.policy:
        make_policy(policy_name)  # validate early
        report = run_protocol(
            args.tier, tasks, lambda name=policy_name: make_policy(name), threads=args.threads
        )
        reports.append(report)

    out_lines = []
    for report in reports:
        for row in report.task_rows():
            out_lines.append(row)
    if len(reports) == 2:
        poi = compare_reports(reports[0], reports[1])
        out_lines.append(
            {
                "record": "prob_improvement",
                "x": reports[0].policy_name,
                "y": reports[1].policy_name,
                **poi,
            }
        )
    if args.out is not None:
        with open(args.out, "w") as f:
            for row in out_lines:
                f.write(json.dumps(row, separators=(",", ":")) + "\n")
        _emit({"out": str(args.out), "records": len(out_lines)})
    else:
        for row in out_lines:
            _emit(row)
    if args.csv is not None and args.tier == "hard":
        Path(args.csv).write_text(reports[0].sweep_csv())
    if args.svg_dir is not None:
        out_dir = Path(args.svg_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        taus = [i / 50 for i in range(51)]
        for report in reports:
            for metric in ("sr", "co"):
                curve = report.profile(metric, taus)
                svg = render_chart_svg(
                    {report.policy_name: list(zip(taus, curve))},
                    title=f"performance profile ({metric})",
                    x_label="tau",
                    y_label="fraction > tau",
                )
                write_svg(svg, out_dir / f"profile_{report.policy_name}_{metric}.svg")
    return 0


def _cmd_render(args: argparse.Namespace) -> int:
    if args.trace is not None:
        trace = load_trace(args.trace)
        svg = render_trace_svg(trace, step=args.step, show_paths=not args.no_paths)
        write_svg(svg, args.out)
    elif args.report is not None:
        series: dict[str, list[tuple[float, float]]] = {}
        with open(args.report) as f:
            for line in f:
                row = json.loads(line)
                if "metric" not in row or "iqm" not in row:
                    continue
                series.setdefault(row["metric"], []).append(
                    (len(series.get(row["metric"], [])), row["iqm"])
                )
        svg = render_chart_svg(series, title="metric aggregates by task",
                               x_label="task index", y_label="iqm")
        write_svg(svg, args.out)
    else:
        return _fail("bad_request", "render needs --trace or --report")
    _emit({"out": str(args.out)})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swarmpath")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8717)
    p.set_defaults(fn=_cmd_serve)

    p = sub.add_parser("run", help="run one episode with a named policy")
    p.add_argument("--policy", default="zero", choices=POLICY_NAMES)
    p.add_argument("--config", default=None, help="YAML config file")
    p.add_argument("--seed", type=int, default=5)
    p.add_argument("--trace", default=None, help="write a trace file")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("bench", help="throughput benchmark")
    p.add_argument("--map", default=None, help="generator kind")
    p.add_argument("--size", type=int, default=None)
    p.add_argument("--density", type=float, default=None)
    p.add_argument("--agents", type=int, default=None)
    p.add_argument("--envs", type=int, default=8)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--seed", type=int, default=5)
    p.add_argument("--policy", default="zero", choices=("zero", "random"))
    p.add_argument("--warmup", type=int, default=3)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--config", default=None)
    p.set_defaults(fn=_cmd_bench)

    p = sub.add_parser("gen-map", help="generate a map to canonical text")
    p.add_argument("--kind", default=None)
    p.add_argument("--size", type=int, default=None)
    p.add_argument("--density", type=float, default=None)
    p.add_argument("--seed", type=int, default=5)
    p.add_argument("--config", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_gen_map)

    p = sub.add_parser("eval", help="run an evaluation protocol tier")
    p.add_argument("--tier", default="medium", choices=("easy", "medium", "hard"))
    p.add_argument("--policy", action="append", required=True,
                   help="policy name (repeat to compare two)")
    p.add_argument("--episodes", type=int, default=5)
    p.add_argument("--seed", type=int, default=5)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--config", default=None, help="YAML config overrides")
    p.add_argument("--task-filter", default=None)
    p.add_argument("--out", default=None, help="JSONL report path")
    p.add_argument("--csv", default=None, help="agent-count sweep CSV (hard tier)")
    p.add_argument("--svg-dir", default=None, help="write profile charts here")
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("render", help="render a trace snapshot or report chart")
    p.add_argument("--trace", default=None)
    p.add_argument("--report", default=None)
    p.add_argument("--step", type=int, default=-1)
    p.add_argument("--no-paths", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_render)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ServiceError as exc:
        return _fail(exc.error, exc.detail)
    except SimError as exc:
        return _fail(type(exc).__name__, str(exc))
    except FileNotFoundError as exc:
        return _fail("missing_file", str(exc))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
