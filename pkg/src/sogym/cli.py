"""Command-line entry point.

Subcommands: sample, optimize, rollout, evaluate, render, serve, selftest.
Every command is reproducible from its flags and seed alone; all artifacts
are JSON or JSON-lines so they stay diffable and the UI can consume them.
Exit codes: 0 success, 1 user error, 2 internal failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np


def data_dir() -> Path:
    return Path(os.environ.get("SOGYM_DATA_DIR", "./sogym-data"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sogym",
        description="Structural design episodes, baseline optimization and evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    p = sub.add_parser("sample", help="sample boundary-condition problems", formatter_class=fmt)
    p.add_argument("--seed", type=int, default=2024, help="master seed of the set")
    p.add_argument("--n", type=int, default=10, help="number of problems")
    p.add_argument("--out", type=Path, default=Path("problems"), help="output directory")

    p = sub.add_parser("optimize", help="run the baseline optimizer on one problem", formatter_class=fmt)
    p.add_argument("--problem", type=Path, required=True, help="problem JSON file")
    p.add_argument("--out", type=Path, required=True, help="output run JSON file")
    p.add_argument("--components", type=int, default=8, help="number of bars")
    p.add_argument("--max-outer", type=int, default=1000, help="outer iteration cap")

    p = sub.add_parser("rollout", help="play a policy over a problem set", formatter_class=fmt)
    p.add_argument("--problems", type=Path, required=True, help="problem directory or JSON file")
    p.add_argument("--policy", choices=("random", "replay"), default="random", help="action source")
    p.add_argument("--replay-run", type=Path, default=None, help="optimizer run JSON for policy=replay")
    p.add_argument("--seed", type=int, default=0, help="policy seed")
    p.add_argument("--obs-mode", choices=("vector", "image", "game"), default="vector", help="observation mode")
    p.add_argument("--reward-mode", choices=("sparse", "soft_volume", "strain_uniform"), default="sparse", help="reward mode")
    p.add_argument("--t-max", type=int, default=8, help="components per episode")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1, help="parallel workers")
    p.add_argument("--out", type=Path, required=True, help="episode records JSON-lines file")

    p = sub.add_parser("evaluate", help="compare episode records against a baseline", formatter_class=fmt)
    p.add_argument("--records", type=Path, required=True, help="episode records JSON-lines")
    p.add_argument("--baseline", type=Path, required=True, help="baseline records JSON-lines")
    p.add_argument("--out", type=Path, default=None, help="report JSON file (default: stdout)")
    p.add_argument("--csv", type=Path, default=None, help="also write per-record CSV here")

    p = sub.add_parser("render", help="rasterize a design to PNG", formatter_class=fmt)
    p.add_argument("--problem", type=Path, required=True, help="problem JSON file")
    p.add_argument("--actions", type=Path, default=None, help="JSON file with a list of actions")
    p.add_argument("--run", type=Path, default=None, help="optimizer run JSON (renders its final design)")
    p.add_argument("--out", type=Path, default=Path("render"), help="output prefix; writes <prefix>-design.png and <prefix>-strain.png")
    p.add_argument("--density-out", type=Path, default=None, help="also dump the terminal density field as JSON")

    p = sub.add_parser("serve", help="start the session service", formatter_class=fmt)
    p.add_argument("--host", default="127.0.0.1", help="bind address")
    p.add_argument("--port", type=int, default=8080, help="port")
    p.add_argument("--data-dir", type=Path, default=None, help="store directory (default: $SOGYM_DATA_DIR or ./sogym-data)")
    p.add_argument("--ui", type=Path, default=None, help="serve the built game client from this directory at /app")

    p = sub.add_parser("selftest", help="run the built-in oracle checks", formatter_class=fmt)
    p.add_argument("--quick", action="store_true", help="smaller random samples")
    return parser


def _load_problems(path: Path):
    from .problems import BoundaryProblem

    if path.is_dir():
        files = sorted(path.glob("*.json"))
        if not files:
            raise FileNotFoundError(f"no problem files in {path}")
        return [BoundaryProblem.from_json(f.read_text()) for f in files]
    return [BoundaryProblem.from_json(path.read_text())]


def _cmd_sample(args) -> int:
    from .problems import eval_set

    args.out.mkdir(parents=True, exist_ok=True)
    for i, problem in enumerate(eval_set(args.seed, args.n)):
        (args.out / f"problem-{i:04d}.json").write_text(problem.to_json())
    print(f"wrote {args.n} problems to {args.out}")
    return 0


def _cmd_optimize(args) -> int:
    from . import optimizer
    from .mma import OptimizerConfig
    from .problems import BoundaryProblem

    problem = BoundaryProblem.from_json(args.problem.read_text())
    cfg = OptimizerConfig(max_outer=args.max_outer)
    run = optimizer.optimize(problem, cfg, n_components=args.components)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(run.to_json())
    print(
        f"iterations={run.iterations} compliance={run.final_compliance} "
        f"volume={run.final_volume} connected={run.connected}"
    )
    return 0


def _cmd_rollout(args) -> int:
    from . import harness
    from .env import EnvConfig, ObsMode, RewardConfig, RewardMode
    from .optimizer import OptRun, components_from_design
    from .geometry import unscale_component

    problems = _load_problems(args.problems)
    config = EnvConfig(
        obs_mode=ObsMode(args.obs_mode),
        reward=RewardConfig(mode=RewardMode(args.reward_mode)),
        t_max=args.t_max,
    )
    if args.policy == "random":
        policy = harness.RandomPolicy(args.seed)
    else:
        if args.replay_run is None:
            raise ValueError("--replay-run is required for policy=replay")
        run = OptRun.from_json(args.replay_run.read_text())
        domain = problems[0].domain()
        actions = [
            unscale_component(c, domain) for c in components_from_design(run.final_design)
        ]
        policy = harness.ReplayPolicy(actions)
    records = harness.rollout(policy, problems, config, workers=args.workers)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    harness.write_records_jsonl(records, args.out)
    print(f"wrote {len(records)} episode records to {args.out}")
    return 0


def _cmd_evaluate(args) -> int:
    from . import harness

    records = harness.read_records_jsonl(args.records)
    baseline = harness.read_records_jsonl(args.baseline)
    report = harness.metrics(records, baseline)
    text = json.dumps(report.to_dict(), indent=2)
    if args.out is None:
        print(text)
    else:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text)
        print(f"wrote report to {args.out}")
    if args.csv is not None:
        harness.write_records_csv(records, args.csv)
    return 0


def _cmd_render(args) -> int:
    from PIL import Image

    from .env import DesignEnv, EnvConfig, ObsMode, render_design_image, render_strain_image
    from .geometry import unscale_component
    from .optimizer import OptRun, components_from_design
    from .problems import BoundaryProblem

    problem = BoundaryProblem.from_json(args.problem.read_text())
    if args.actions is not None:
        actions = json.loads(args.actions.read_text())
    elif args.run is not None:
        run = OptRun.from_json(args.run.read_text())
        domain = problem.domain()
        actions = [
            unscale_component(c, domain).tolist()
            for c in components_from_design(run.final_design)
        ]
    else:
        actions = []
    env = DesignEnv(EnvConfig(obs_mode=ObsMode.GAME, t_max=max(len(actions), 1)))
    env.reset(problem=problem)
    for action in actions:
        env.step(action)
    design = render_design_image(env.state)
    strain = render_strain_image(env.state)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    for name, raster in (("design", design), ("strain", strain)):
        path = args.out.parent / f"{args.out.name}-{name}.png"
        Image.fromarray(np.ascontiguousarray(raster.transpose(1, 2, 0))).save(path)
        print(f"wrote {path}")
    if args.density_out is not None:
        args.density_out.parent.mkdir(parents=True, exist_ok=True)
        args.density_out.write_text(env.state.field.to_json())
        print(f"wrote {args.density_out}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(store_dir=args.data_dir or data_dir(), ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_selftest(args) -> int:
    from .selftest import run_selftest

    return 0 if run_selftest(quick=args.quick) else 2


_COMMANDS = {
    "sample": _cmd_sample,
    "optimize": _cmd_optimize,
    "rollout": _cmd_rollout,
    "evaluate": _cmd_evaluate,
    "render": _cmd_render,
    "serve": _cmd_serve,
    "selftest": _cmd_selftest,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, FileNotFoundError, KeyError) as exc:
        print(json.dumps({"error": "user", "detail": str(exc)}), file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        print(json.dumps({"error": "internal", "detail": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
