"""hivekit command line: registry, collection, benchmarking, datasets, teleop.

Exit codes: 0 success, 1 usage error, 2 runtime error, 3 verification
failure (a check/replay/eval that ran but did not meet its bar).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path


from . import __version__
from .agents import (
    PolicyRef,
    evaluate_policy,
    feature_layout_for_config,
    resolve_policy,
    save_bc,
    train_bc,
)
from .collector import (
    OBS_MODE_STATE,
    OBS_MODE_VISUAL,
    benchmark_throughput,
    collect_trajectories_parallel,
)
from .config import ConfigError, with_seed
from .dataset import DatasetContainer, build_manifest, replay_container, write_trajectories
from .registry import EnvRegistry, load_config_dir, load_config_file, register_builtin
from .rng import derive_episode_seed
from .teleop import teleop_serve

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2
EXIT_VERIFICATION = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); we want exit code 1
        raise _UsageError(message)


def _build_registry(args) -> EnvRegistry:
    import os

    registry = EnvRegistry()
    register_builtin(registry)
    extra = os.environ.get("HIVEKIT_CONFIG_DIR")
    if extra:
        for part in extra.split(os.pathsep):
            if part:
                load_config_dir(part, registry)
    if args.config:
        path = Path(args.config)
        if path.is_dir():
            load_config_dir(path, registry)
        else:
            registry.register(load_config_file(path))
    return registry


def _policy_ref(spec: str) -> PolicyRef:
    if spec.startswith("bc:"):
        return PolicyRef(kind="bc", path=spec[3:])
    if spec in ("random", "expert", "zero"):
        return PolicyRef(kind=spec)
    raise _UsageError(f"unknown policy {spec!r} (use random|expert|zero|bc:<path>)")


def _emit(args, payload: dict, text: str, out_is_report: bool = True) -> None:
    print(json.dumps(payload, indent=2) if args.json else text)
    # reporting subcommands write their JSON document to --out; commands whose
    # --out is an artifact path (collect, train-bc) handle it themselves
    if out_is_report and args.out:
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


# -- subcommands ----------------------------------------------------------------


def cmd_list(args) -> int:
    registry = _build_registry(args)
    ids = registry.ids()
    _emit(args, {"schema_version": 1, "envs": ids}, "\n".join(ids))
    return EXIT_OK


def cmd_check(args) -> int:
    registry = _build_registry(args)
    failures = []
    checked = 0
    for env_id in registry.ids():
        try:
            env = registry.make(env_id)
            env.reset(derive_episode_seed(args.seed, 0))
            policy = resolve_policy(PolicyRef(kind="zero"), env.cfg)
            from .rng import CounterRng

            env.step(policy.act(env.robot.get_sensors().readings, CounterRng(0)))
            env.close()
            print(f"ok   {env_id}")
        except Exception as e:  # a check failure is data, not a crash
            failures.append((env_id, f"{type(e).__name__}: {e}"))
            print(f"FAIL {env_id}: {type(e).__name__}: {e}")
        checked += 1
    print(f"checked {checked}/{len(registry)} registered envs, {len(failures)} failure(s)")
    if checked != len(registry):
        return EXIT_RUNTIME
    return EXIT_VERIFICATION if failures else EXIT_OK


def cmd_collect(args) -> int:
    registry = _build_registry(args)
    ref = _policy_ref(args.policy)
    cfg = registry.config(args.env)
    if args.seed is not None:
        cfg = with_seed(cfg, args.seed)
    horizon = cfg.horizon
    trajectories = []
    total = 0
    workers = max(args.workers, 1)
    episode = 0
    t0 = time.monotonic()
    while total < args.steps:
        remaining = args.steps - total
        n = max(workers, -(-remaining // horizon))  # full wave per round
        seeds = [derive_episode_seed(cfg.seed, episode + i) for i in range(n)]
        episode += n
        batch = collect_trajectories_parallel(
            args.env, ref, seeds, n_workers=workers, registry=registry
        )
        trajectories.extend(batch)
        total += sum(t.length for t in batch)
    wall = time.monotonic() - t0
    out_path = args.out or f"{args.env}.rsl"
    write_trajectories(out_path, registry.config(args.env), trajectories)
    payload = {
        "schema_version": 1,
        "env_id": args.env,
        "policy": args.policy,
        "episodes": len(trajectories),
        "steps": total,
        "wall_time_s": wall,
        "out": str(out_path),
    }
    _emit(
        args,
        payload,
        f"collected {len(trajectories)} episodes / {total} steps -> {out_path}",
        out_is_report=False,
    )
    return EXIT_OK


def cmd_bench(args) -> int:
    registry = _build_registry(args)
    seeds = tuple(args.seed + i for i in range(3))
    report = benchmark_throughput(
        args.env,
        n_workers=args.workers,
        total_steps=args.steps,
        obs_mode=args.obs_mode,
        seeds=seeds,
        registry=registry,
    )
    payload = report.to_json_dict()
    text = (
        f"{report.env_id} [{report.obs_mode}] x{report.n_workers} workers: "
        f"{report.steps_per_sec_mean:.1f} +/- {report.steps_per_sec_std:.1f} steps/s "
        f"over seeds {list(seeds)}"
    )
    _emit(args, payload, text)
    return EXIT_OK


def cmd_teleop(args) -> int:
    registry = _build_registry(args)
    cfg = registry.config(args.env)
    if args.seed is not None:
        cfg = with_seed(cfg, args.seed)
    server = teleop_serve(cfg, port=args.port, rate_hz=args.rate, out_path=args.out)
    print(f"teleop gateway for {args.env} on ws://{server.host}:{server.port} "
          f"at {args.rate:.0f} Hz (Ctrl-C to stop)")
    try:
        while True:
            time.sleep(0.5)
    except KeyboardInterrupt:
        pass
    finally:
        server.stop()
    return EXIT_OK


def cmd_replay(args) -> int:
    container = DatasetContainer(args.dataset)
    report = replay_container(container)
    payload = report.to_json_dict()
    payload["dataset"] = str(args.dataset)
    text = (
        f"replayed {len(report.reports)} trajectories from {args.dataset}\n"
        f"max final_state_diff: {report.max_final_state_diff:.3e}\n"
        f"final_state_diff histogram:\n{report.histogram_text()}"
    )
    _emit(args, payload, text)
    if args.report:
        Path(args.report).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK if report.max_final_state_diff <= args.tol else EXIT_VERIFICATION


def cmd_train_bc(args) -> int:
    container = DatasetContainer(args.dataset)
    layout = feature_layout_for_config(container.config)
    model = train_bc(
        container.read_all(),
        ridge_lambda=args.ridge_lambda,
        layout=layout,
        control_mode=container.config.control_mode,
    )
    out_path = args.out or "bc_model.rbc"
    save_bc(model, out_path)
    payload = {
        "schema_version": 1,
        "dataset": str(args.dataset),
        "env_id": container.env_id,
        "ridge_lambda": args.ridge_lambda,
        "n_trajectories": container.n_trajectories,
        "action_dim": model.action_dim,
        "n_features": model.n_features,
        "out": str(out_path),
    }
    _emit(
        args,
        payload,
        f"trained BC on {container.n_trajectories} trajectories -> {out_path}",
        out_is_report=False,
    )
    return EXIT_OK


def cmd_eval(args) -> int:
    registry = _build_registry(args)
    ref = _policy_ref(args.policy)
    cfg = registry.config(args.env)
    policy = resolve_policy(ref, cfg)
    report = evaluate_policy(
        policy, args.env, args.episodes, registry=registry, base_seed=args.seed
    )
    payload = report.to_json_dict()
    text = (
        f"{args.env} / {args.policy}: success_rate={report.success_rate:.3f} "
        f"mean_return={report.mean_return:.3f} over {args.episodes} episodes"
    )
    _emit(args, payload, text)
    return EXIT_OK


def cmd_manifest(args) -> int:
    manifest = build_manifest(args.inputs)
    payload = manifest.to_json_dict()
    _emit(args, payload, manifest.to_text())
    return EXIT_OK


# -- wiring ----------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="hivekit", description=__doc__)
    parser.add_argument("--version", action="version", version=f"hivekit {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base seed")
    common.add_argument("--config", help="extra config file or directory to register")
    common.add_argument("--out", help="output path")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", parents=[common], help="list registered envs").set_defaults(fn=cmd_list)

    sub.add_parser(
        "check", parents=[common], help="construct+reset+step every registered env"
    ).set_defaults(fn=cmd_check)

    p = sub.add_parser("collect", parents=[common], help="collect trajectories to a container")
    p.add_argument("--env", required=True)
    p.add_argument("--policy", default="expert")
    p.add_argument("--steps", type=int, default=10_000)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(fn=cmd_collect)

    p = sub.add_parser("bench", parents=[common], help="throughput benchmark (3 seeds)")
    p.add_argument("--env", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--obs-mode", choices=[OBS_MODE_STATE, OBS_MODE_VISUAL], default=OBS_MODE_STATE)
    p.add_argument("--steps", type=int, default=3000, help="steps per seeded run")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("teleop", parents=[common], help="run the teleoperation gateway")
    p.add_argument("--env", required=True)
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--rate", type=float, default=20.0)
    p.set_defaults(fn=cmd_teleop)

    p = sub.add_parser("replay", parents=[common], help="replay-verify a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--report", help="write the JSON report here")
    p.add_argument("--tol", type=float, default=0.0, help="max allowed final_state_diff")
    p.set_defaults(fn=cmd_replay)

    p = sub.add_parser("train-bc", parents=[common], help="ridge-regression behavior cloning")
    p.add_argument("--dataset", required=True)
    p.add_argument("--lambda", dest="ridge_lambda", type=float, default=1e-3)
    p.set_defaults(fn=cmd_train_bc)

    p = sub.add_parser("eval", parents=[common], help="evaluate a policy by success rate")
    p.add_argument("--env", required=True)
    p.add_argument("--policy", default="random")
    p.add_argument("--episodes", type=int, default=25)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("manifest", parents=[common], help="summarize dataset containers")
    p.add_argument("--inputs", nargs="+", required=True)
    p.set_defaults(fn=cmd_manifest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.fn(args)
    except _UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except KeyboardInterrupt:
        return EXIT_RUNTIME
    except Exception as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
