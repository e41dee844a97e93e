"""Command-line entry point: ``alertgate <command> ...``.

Exit status is 0 on success, 2 on usage errors and 1 on data errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import records
from .core import NUM_CLASSES, AlertGateError, FrameRate, InvalidConfig
from .baselines import MajorityConfig
from .loss import DEFAULT_CAP, DEFAULT_GAMMA, class_weights, focal_loss, focal_loss_grad
from .mapping import PRESETS, load_map
from .pipeline import VARIANTS, RunConfig, ablation_grid, evaluate_run, run_pipeline, suite_specs
from .profiling import StageRecorder, aggregate, effective_window_report, format_table, report_rows
from .simulate import SCENARIOS, StreamSpec, get_scenario, simulate_stream

METRIC_COLUMNS = [
    "variant",
    "false_alerts_per_min",
    "mean_ttd_frames",
    "mean_ttd_seconds",
    "fragmentation",
    "matched",
    "unmatched_pred",
    "unmatched_gt",
]
MATCH_COLUMNS = ["pred_index", "gt_index", "class_id", "tiou", "ttd_frames"]
ABLATION_COLUMNS = ["variant", "macro_f1", "false_alerts_per_min"]
PROFILE_COLUMNS = ["stage", "mean_ms", "median_ms", "p95_ms"]


def _map_arg(value: str) -> str:
    if value in PRESETS or Path(value).exists():
        return value
    raise argparse.ArgumentTypeError(f"no such map file or preset: {value} (presets: {', '.join(PRESETS)})")


def _add_gate_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("temporal gate")
    g.add_argument("--tau", type=float, help="trigger confidence (default 0.75)")
    g.add_argument("--k", type=int, help="persistence window in frames (default 25)")
    g.add_argument("--tau-off", type=float, help="release threshold (default 0.60)")
    g.add_argument("--m", type=int, help="release persistence in frames (default 3)")
    g.add_argument("--cooldown", type=int, help="cooldown in frames (default 0)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="alertgate", description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0, help="simulation seed (default 0)")
    ap.add_argument("--fps", type=float, help="frame rate used for time conversions (default 25)")
    ap.add_argument("--config", type=Path, help="JSON run config (variant, gate, majority, ema, map_file, eta, fps)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write a synthetic labeled stream")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario", choices=SCENARIOS)
    src.add_argument("--spec", type=Path, help="StreamSpec JSON file")
    p.add_argument("--out-dir", type=Path, default=Path("."))

    p = sub.add_parser("run", help="turn a frames file into alert events")
    p.add_argument("--frames", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True, help="events file (.jsonl or .csv)")
    p.add_argument("--variant", choices=VARIANTS)
    p.add_argument("--frame-map", type=_map_arg, help="class map applied to probabilities before alerting")
    p.add_argument("--event-map", type=_map_arg, help="class map applied to the emitted events")
    _add_gate_flags(p)
    p.add_argument("--w", type=int, help="majority window (default 15)")
    p.add_argument("--lam", type=float, help="EMA factor (default 0.8)")
    p.add_argument("--ema-tau", type=float, help="EMA threshold (default 0.75)")

    p = sub.add_parser("eval", help="score events against frame labels")
    p.add_argument("--events", type=Path, required=True)
    p.add_argument("--labels", type=Path, required=True)
    p.add_argument("--eta", type=float, help="tIoU match threshold (default 0.3)")
    p.add_argument("--map", type=_map_arg, help="class map for evaluation")
    p.add_argument("--map-target", choices=("both", "gt", "pred"), default="both")
    p.add_argument("--name", default="run", help="value of the variant column")
    p.add_argument("--out", type=Path, help="metrics CSV (default: stdout)")
    p.add_argument("--matches", type=Path, help="per-match detail CSV")

    p = sub.add_parser("ablate", help="confounder x temporal-head ablation on simulated streams")
    p.add_argument("--scenario", choices=SCENARIOS + ("all",), default="mixed")
    p.add_argument("--eta", type=float)
    p.add_argument("--out", type=Path, help="table CSV (default: stdout)")
    _add_gate_flags(p)

    p = sub.add_parser("profile", help="latency report from a timing log")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--log", type=Path, help="timing JSONL")
    src.add_argument("--live", choices=SCENARIOS, help="time the in-process pipeline on a simulated scenario")
    p.add_argument("--out", type=Path, help="report CSV")
    p.add_argument("--k", type=int, help="persistence window to convert to seconds")

    p = sub.add_parser("loss-check", help="evaluate focal loss and class weights")
    p.add_argument("--p", type=float, default=0.5, help="probability of the true class")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)
    p.add_argument("--counts", help=f"comma-separated sample counts for the {NUM_CLASSES} classes")
    p.add_argument("--cap", type=float, default=DEFAULT_CAP)
    return ap


def _run_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config is not None:
        try:
            cfg = RunConfig.from_dict(json.loads(args.config.read_text(encoding="utf-8")))
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"{args.config}: {exc}") from None
    if args.fps is not None:
        cfg = replace(cfg, fps=FrameRate(args.fps))
    if getattr(args, "variant", None):
        cfg = replace(cfg, variant=args.variant)
    if getattr(args, "eta", None) is not None:
        cfg = replace(cfg, eta=args.eta)
    gate_kw = {
        name: getattr(args, name)
        for name in ("tau", "k", "tau_off", "m", "cooldown")
        if getattr(args, name, None) is not None
    }
    if gate_kw:
        cfg = replace(cfg, gate=replace(cfg.gate, **gate_kw))
    if getattr(args, "w", None) is not None:
        cfg = replace(cfg, majority=MajorityConfig(args.w))
    ema_kw = {}
    if getattr(args, "lam", None) is not None:
        ema_kw["lam"] = args.lam
    if getattr(args, "ema_tau", None) is not None:
        ema_kw["tau"] = args.ema_tau
    if ema_kw:
        cfg = replace(cfg, ema=replace(cfg.ema, **ema_kw))
    return cfg


def _emit(path: Path | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text, encoding="utf-8", newline="")


def cmd_simulate(args) -> int:
    if args.spec is not None:
        spec = StreamSpec.from_dict(json.loads(args.spec.read_text(encoding="utf-8")))
    else:
        spec = get_scenario(args.scenario, args.seed, args.fps or 25.0)
    labels, frames = simulate_stream(spec)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    records.write_jsonl(args.out_dir / "frames.jsonl", frames)
    records.write_jsonl(args.out_dir / "labels.jsonl", labels)
    (args.out_dir / "spec.json").write_text(json.dumps(spec.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {len(frames)} frames of scenario {spec.name!r} (seed {spec.seed}) to {args.out_dir}")
    return 0


def cmd_run(args) -> int:
    cfg = _run_config(args)
    frames = records.read_frames(args.frames)
    frame_map = load_map(args.frame_map) if args.frame_map else None
    if frame_map is None and cfg.map_file:
        frame_map = load_map(cfg.map_file)
    event_map = load_map(args.event_map) if args.event_map else None
    events = run_pipeline(frames, cfg, frame_map, event_map)
    records.write_events(args.out, events)
    print(f"{len(events)} events from {len(frames)} frames ({cfg.variant})", file=sys.stderr)
    return 0


def cmd_eval(args) -> int:
    cfg = _run_config(args)
    pred = records.read_events(args.events)
    labels = records.read_labels(args.labels)
    cmap = load_map(args.map) if args.map else (load_map(cfg.map_file) if cfg.map_file else None)
    metrics, result, pred, gt = evaluate_run(pred, labels, cfg.fps, cfg.eta, cmap, args.map_target)
    ttd = metrics.mean_time_to_detect
    row = {
        "variant": args.name,
        "false_alerts_per_min": metrics.false_alerts_per_min,
        "mean_ttd_frames": ttd,
        "mean_ttd_seconds": None if ttd is None else ttd / cfg.fps.fps,
        "fragmentation": metrics.fragmentation,
        "matched": metrics.matched,
        "unmatched_pred": metrics.unmatched_pred,
        "unmatched_gt": metrics.unmatched_gt,
    }
    _emit(args.out, records.csv_text([row], METRIC_COLUMNS))
    if args.matches is not None:
        detail = [
            {
                "pred_index": i,
                "gt_index": j,
                "class_id": gt[j].class_id,
                "tiou": iou,
                "ttd_frames": pred[i].t_start - gt[j].t_start,
            }
            for i, j, iou in result.matches
        ]
        records.write_csv(args.matches, detail, MATCH_COLUMNS)
    return 0


def cmd_ablate(args) -> int:
    cfg = _run_config(args)
    specs = suite_specs(args.scenario, args.seed, cfg.fps.fps)
    rows = ablation_grid(specs, cfg.gate, cfg.eta)
    _emit(args.out, records.csv_text((r.to_dict() for r in rows), ABLATION_COLUMNS))
    return 0


def _live_log(scenario: str, seed: int, cfg: RunConfig) -> list:
    from .core import validate_frame
    from .gate import TemporalGate

    _, frames = simulate_stream(get_scenario(scenario, seed, cfg.fps.fps))
    rec = StageRecorder()
    gate = TemporalGate(cfg.gate)
    emitted = []
    for frame in frames:
        with rec.frame(frame.t):
            with rec.stage("pre_ms"):
                validate_frame(frame)
            with rec.stage("post_ms"):
                ev = gate.push(frame)
            with rec.stage("io_ms"):
                if ev is not None:
                    emitted.append(ev.to_dict())
    return rec.records


def cmd_profile(args) -> int:
    cfg = _run_config(args)
    log = records.read_timings(args.log) if args.log else _live_log(args.live, args.seed, cfg)
    report = aggregate(log)
    print(format_table(report))
    k = args.k if args.k is not None else cfg.gate.k
    window = effective_window_report(replace(cfg.gate, k=k), report)
    print(f"persistence window K={k}: {window:g} s at measured FPS")
    if args.out is not None:
        records.write_csv(args.out, report_rows(report), PROFILE_COLUMNS)
    return 0


def cmd_loss_check(args) -> int:
    out = {
        "p_true": args.p,
        "alpha": args.alpha,
        "gamma": args.gamma,
        "focal_loss": focal_loss(args.p, args.alpha, args.gamma),
    }
    if 0.0 < args.p < 1.0:
        out["d_loss_d_p"] = focal_loss_grad(args.p, args.alpha, args.gamma)
    if args.counts:
        try:
            counts = [int(x) for x in args.counts.split(",")]
        except ValueError:
            raise InvalidConfig("--counts must be comma-separated integers") from None
        w = class_weights(counts, args.cap)
        out["class_weights"] = {
            "alpha": list(w.alpha),
            "cap": w.cap,
            "normalization": "N / (C * n_c)",
        }
    print(json.dumps(out, indent=2))
    return 0


COMMANDS = {
    "simulate": cmd_simulate,
    "run": cmd_run,
    "eval": cmd_eval,
    "ablate": cmd_ablate,
    "profile": cmd_profile,
    "loss-check": cmd_loss_check,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (AlertGateError, OSError, ValueError) as exc:
        print(f"alertgate {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
