"""Render every gaze behaviour, the control blink pattern and a scripted session to CSV.

    python3 scripts/render_gaze.py --outdir results/gaze --rate 100
"""

import argparse
from pathlib import Path

import numpy as np

from presence_aif.gaze import EasingSpec, EventKind, SpeechEvent, drive, render_behavior, render_control
from presence_aif.io import write_frames_csv


def save(frames, path):
    with open(path, "w", newline="") as fh:
        write_frames_csv(frames, fh)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", type=Path, default=Path("results/gaze"))
    ap.add_argument("--rate", type=float, default=100.0)
    ap.add_argument("--damping", type=float, default=1.0)
    args = ap.parse_args()

    args.outdir.mkdir(parents=True, exist_ok=True)
    spec = EasingSpec(damping=args.damping)
    print(f"{'behavior':>8} {'frames':>7} {'yaw0':>9} {'yaw1':>9} {'peak deg/s':>11}")
    for b in range(1, 9):
        frames = render_behavior(b, args.rate, spec)
        yaw = np.array([f.yaw for f in frames])
        peak = np.max(np.abs(np.diff(yaw))) * args.rate if len(yaw) > 1 else 0.0
        save(frames, args.outdir / f"behavior_{b}.csv")
        print(f"{b:>8} {len(frames):>7} {yaw[0]:>9.3f} {yaw[-1]:>9.3f} {peak:>11.1f}")

    save(render_control(12.0, args.rate), args.outdir / "control.csv")

    events = [SpeechEvent(1.0, EventKind.SPEECH_START), SpeechEvent(3.0, EventKind.BREATH), SpeechEvent(5.0, EventKind.SPEECH_END)]
    session = drive(events, spec, args.rate)
    save(session.frames, args.outdir / "session.csv")
    print("session trace:", " -> ".join(f"{b}@{t:.2f}s" for b, t in zip(session.trace, session.onsets)))


if __name__ == "__main__":
    main()
