"""Command-line front end.

Exit codes: 0 success, 1 runtime or domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from presence_aif import audio, gaze, io
from presence_aif.calibration import calibrate
from presence_aif.inference import Categorical
from presence_aif.presence import (
    ATTENTION_STATES,
    PresenceModelSpec,
    SimulationCondition,
    infer_level_1_1,
    presence_evidence,
    simulate,
    sweep,
)


class CommandError(Exception):
    """Runtime failure reported with exit status 1."""


@contextlib.contextmanager
def _output(path: str | None):
    if path in (None, "-"):
        yield sys.stdout
    else:
        try:
            fh = open(path, "w", newline="")
        except OSError as exc:
            raise CommandError(f"cannot write {path}: {exc.strerror}") from None
        with fh:
            yield fh


# ------------------------------------------------------------------ model flags


def _add_model_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON model config (flags override it)")
    p.add_argument("--model", "--variant", dest="variant", choices=("original", "modified"))
    p.add_argument("--zeta11", type=float, help="Level 1-1 likelihood precision")
    p.add_argument("--zeta2", type=float, help="Level 2 likelihood precision")
    p.add_argument("--prior-a", type=float, help="Level 1-1 prior weight on 'attentive'")
    p.add_argument("--gamma", type=float, help="policy precision")
    p.add_argument("--preference-mode", choices=("softmax", "raw"))
    p.add_argument("--null-efe", type=float, help="expected free energy of staying silent")


def _model_from_args(args) -> PresenceModelSpec:
    model = io.load_model_config(args.config) if args.config else PresenceModelSpec()
    if args.variant and args.variant != model.variant:
        model = replace(model, variant=args.variant, prior_2=None, pref_matrix=None)
    changes = {}
    for flag, field in (
        ("zeta11", "zeta_11"),
        ("zeta2", "zeta_2"),
        ("gamma", "gamma"),
        ("preference_mode", "preference_mode"),
        ("null_efe", "null_policy_efe"),
    ):
        v = getattr(args, flag)
        if v is not None:
            changes[field] = v
    if args.prior_a is not None:
        a = args.prior_a
        if not 0.0 <= a <= 1.0:
            raise CommandError(f"--prior-a must lie in [0, 1], got {a}")
        changes["prior_1_1"] = Categorical(np.array([a, 1.0 - a]), ATTENTION_STATES)
    return replace(model, **changes) if changes else model


# ---------------------------------------------------------------------- commands


def _text_report(d: dict, indent: int = 0) -> str:
    lines = []
    width = max(len(k) for k in d)
    for k, v in d.items():
        if isinstance(v, dict):
            lines.append(" " * indent + f"{k}:")
            lines.append(_text_report(v, indent + 2))
        elif isinstance(v, float):
            lines.append(" " * indent + f"{k:<{width}}  {v:.6f}")
        else:
            lines.append(" " * indent + f"{k:<{width}}  {v}")
    return "\n".join(lines)


def _flat(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}".replace(" ", "_")
        if isinstance(v, dict):
            out.update(_flat(v, key + "."))
        else:
            out[key] = v
    return out


def _emit_report(d: dict, fmt: str, fh):
    if fmt == "json":
        json.dump(d, fh, indent=2)
        fh.write("\n")
    elif fmt == "csv":
        flat = _flat(d)
        fh.write(",".join(flat) + "\n")
        fh.write(",".join(f"{v:.6f}" if isinstance(v, float) else str(v) for v in flat.values()) + "\n")
    else:
        fh.write(_text_report(d) + "\n")


def cmd_simulate(args) -> int:
    model = _model_from_args(args)
    result = simulate(model, args.observation)
    with _output(args.out) as fh:
        _emit_report(result.to_dict(), args.format, fh)
    return 0


def cmd_presence(args) -> int:
    model = _model_from_args(args)
    q, presence = infer_level_1_1(model, args.observation)
    report = {
        "observation": args.observation,
        "presence": presence,
        "evidence": presence_evidence(model, args.observation),
        "q_1_1": dict(zip(ATTENTION_STATES, q.tolist())),
    }
    with _output(args.out) as fh:
        _emit_report(report, args.format, fh)
    return 0


def sweep_grid(start: float, stop: float, steps: int) -> np.ndarray:
    if steps < 1:
        raise CommandError("--steps must be >= 1")
    if steps == 1:
        return np.array([start])
    if not stop > start:
        raise CommandError("--to must exceed --from when --steps > 1")
    return np.linspace(start, stop, steps)


def cmd_sweep(args) -> int:
    model = _model_from_args(args)
    grid = sweep_grid(args.start, args.stop, args.steps)
    rows = sweep(args.param, grid, SimulationCondition(observation=args.observation), model)
    with _output(args.out) as fh:
        io.write_sweep_csv(args.param, rows, fh)
    return 0


def cmd_calibrate(args) -> int:
    report = calibrate().to_dict()
    with _output(args.out) as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    summary = (
        f"calibration {'reproduced' if report['achieved'] else 'did not reproduce'} targets "
        f"(max |residual| {report['max_abs_residual']:.4f}, tolerance {report['tolerance']})"
    )
    print(summary, file=sys.stderr)
    return 0


def _easing_from_args(args) -> gaze.EasingSpec:
    return gaze.EasingSpec(damping=args.damping, duration=args.shift_duration)


def cmd_gaze_generate(args) -> int:
    spec = _easing_from_args(args)
    frames = gaze.render_behavior(args.behavior, args.rate, spec, hold_duration=args.duration)
    with _output(args.out) as fh:
        io.write_frames_csv(frames, fh)
    return 0


def cmd_gaze_control(args) -> int:
    frames = gaze.render_control(args.duration, args.rate)
    with _output(args.out) as fh:
        io.write_frames_csv(frames, fh)
    return 0


def _trace_text(trace, onsets) -> str:
    return "".join(f"{b} {io._f6(t)}\n" for b, t in zip(trace, onsets))


def cmd_gaze_run(args) -> int:
    spec = _easing_from_args(args)
    if args.events:
        try:
            text = Path(args.events).read_text()
        except OSError as exc:
            raise CommandError(f"cannot read {args.events}: {exc.strerror}") from None
        events = io.parse_event_script(text)
    else:
        if args.sample_rate is None or args.start_threshold is None or args.breath_threshold is None:
            raise CommandError("--audio needs --sample-rate, --start-threshold and --breath-threshold")
        try:
            samples = io.read_pcm(args.audio)
        except OSError as exc:
            raise CommandError(f"cannot read {args.audio}: {exc.strerror}") from None
        events = audio.detect_events(
            samples,
            args.sample_rate,
            args.start_threshold,
            args.breath_threshold,
            window=args.window,
            breath_hold=args.breath_hold,
        )
        if args.end is not None:
            events.append(gaze.SpeechEvent(args.end, gaze.EventKind.SPEECH_END))
            events.sort(key=lambda e: e.timestamp)
    out = gaze.drive(events, spec, args.rate, until=args.until)
    with _output(args.out) as fh:
        io.write_frames_csv(out.frames, fh)
    trace_path = args.trace or (args.out + ".trace" if args.out not in (None, "-") else None)
    text = _trace_text(out.trace, out.onsets)
    if trace_path:
        with _output(trace_path) as fh:
            fh.write(text)
    else:
        sys.stderr.write("trace: " + "->".join(map(str, out.trace)) + "\n")
    return 0


# ------------------------------------------------------------------------ parser


def _positive(x: str) -> float:
    v = float(x)
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {x}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="presence-aif", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one observation through the model")
    _add_model_flags(p)
    p.add_argument("--observation", choices=("direct", "averted"), default="direct")
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("presence", help="Level 1-1 posterior and presence only")
    _add_model_flags(p)
    p.add_argument("--observation", choices=("direct", "averted"), default="direct")
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_presence)

    p = sub.add_parser("sweep", help="p_express over a parameter grid (CSV)")
    _add_model_flags(p)
    p.add_argument("--param", choices=("zeta11", "prior-a"), required=True)
    p.add_argument("--from", dest="start", type=float, default=0.0)
    p.add_argument("--to", dest="stop", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=21)
    p.add_argument("--observation", choices=("direct", "averted"), default="direct")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("calibrate", help="grid-search the free parameters against the published probabilities")
    p.add_argument("--out", help="JSON report path (default stdout)")
    p.set_defaults(func=cmd_calibrate)

    g = sub.add_parser("gaze", help="avatar gaze trajectories").add_subparsers(dest="gaze_command", required=True)

    def easing_flags(q):
        q.add_argument("--rate", type=_positive, default=100.0, help="frames per second")
        q.add_argument("--damping", type=_positive, default=1.0, help="slow-in/slow-out damping ratio")
        q.add_argument("--shift-duration", type=_positive, default=0.52)
        q.add_argument("--out")

    q = g.add_parser("generate", help="frames for one behaviour")
    q.add_argument("--behavior", type=int, choices=range(1, 9), required=True, metavar="N")
    q.add_argument("--duration", type=_positive, default=1.0, help="length of hold behaviours (s)")
    easing_flags(q)
    q.set_defaults(func=cmd_gaze_generate)

    q = g.add_parser("run", help="drive a session from an event script or PCM audio")
    src = q.add_mutually_exclusive_group(required=True)
    src.add_argument("--events", help="event script: '<kind> <seconds>' per line")
    src.add_argument("--audio", help="raw signed 16-bit little-endian mono PCM")
    q.add_argument("--sample-rate", type=_positive)
    q.add_argument("--start-threshold", type=int)
    q.add_argument("--breath-threshold", type=int)
    q.add_argument("--window", type=_positive, default=0.05, help="amplitude window (s)")
    q.add_argument("--breath-hold", type=_positive, default=0.2, help="quiet time that counts as a breath (s)")
    q.add_argument("--end", type=float, help="speech-end button time (s) for audio sessions")
    q.add_argument("--until", type=float, help="session length (s)")
    q.add_argument("--trace", help="sidecar behaviour log (default <out>.trace)")
    easing_flags(q)
    q.set_defaults(func=cmd_gaze_run)

    q = g.add_parser("control", help="control-group blink pattern, centred gaze")
    q.add_argument("--duration", type=_positive, default=12.0)
    q.add_argument("--rate", type=_positive, default=100.0)
    q.add_argument("--out")
    q.set_defaults(func=cmd_gaze_control)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CommandError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
