"""File formats: frame CSV, sweep CSV, event scripts, raw PCM and JSON model configs."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from presence_aif.gaze import EventKind, SpeechEvent, TrajectoryFrame
from presence_aif.inference import Categorical, StochasticMatrix
from presence_aif.presence import ATTENTION_STATES, CONTEXTS, FEEDBACK, PresenceModelSpec, build_model

FRAME_HEADER = ("t", "yaw", "pitch", "roll", "gaze_x", "gaze_y", "blink")
SWEEP_HEADER = ("param", "value", "p_express")


class FormatError(ValueError):
    """Malformed input file; message names the offending line where possible."""


def _f6(x: float) -> str:
    s = f"{x:.6f}"
    # avoid "-0.000000"
    return "0.000000" if s == "-0.000000" else s


# ------------------------------------------------------------------ frame CSV


def write_frames_csv(frames: Iterable[TrajectoryFrame], fh: IO[str]):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(FRAME_HEADER)
    for f in frames:
        w.writerow([_f6(f.t), _f6(f.yaw), _f6(f.pitch), _f6(f.roll), _f6(f.gaze_x), _f6(f.gaze_y), str(int(f.blink))])


def read_frames_csv(fh: IO[str]) -> list[TrajectoryFrame]:
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None or tuple(header) != FRAME_HEADER:
        raise FormatError(f"line 1: expected header {','.join(FRAME_HEADER)}, got {header}")
    frames = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != len(FRAME_HEADER):
            raise FormatError(f"line {lineno}: expected {len(FRAME_HEADER)} fields, got {len(row)}")
        try:
            *vals, blink = row
            frames.append(TrajectoryFrame(*(float(v) for v in vals), blink=int(blink)))
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
    return frames


# ------------------------------------------------------------------ sweep CSV


def write_sweep_csv(param: str, rows: Iterable[tuple[float, float]], fh: IO[str]):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for value, p in rows:
        w.writerow([param, _f6(value), _f6(p)])


def read_sweep_csv(fh: IO[str]) -> list[tuple[str, float, float]]:
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None or tuple(header) != SWEEP_HEADER:
        raise FormatError(f"line 1: expected header {','.join(SWEEP_HEADER)}")
    out = []
    for lineno, row in enumerate(reader, start=2):
        try:
            param, value, p = row
            out.append((param, float(value), float(p)))
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
    return out


# -------------------------------------------------------------- event scripts

_KIND_ALIASES = {k.value.lower(): k for k in EventKind}
_KIND_ALIASES.update({"start": EventKind.SPEECH_START, "end": EventKind.SPEECH_END})


def parse_event_script(text: str) -> list[SpeechEvent]:
    """Parse ``<kind> <timestamp_seconds>`` lines; blank lines and ``#`` comments are skipped."""
    events: list[SpeechEvent] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(f"line {lineno}: expected '<kind> <timestamp>', got {raw!r}")
        kind = _KIND_ALIASES.get(parts[0].lower())
        if kind is None:
            raise FormatError(f"line {lineno}: unknown event kind {parts[0]!r}")
        try:
            ts = float(parts[1])
        except ValueError:
            raise FormatError(f"line {lineno}: bad timestamp {parts[1]!r}") from None
        if not math.isfinite(ts) or ts < 0:
            raise FormatError(f"line {lineno}: timestamp must be finite and >= 0")
        if events and ts < events[-1].timestamp:
            raise FormatError(f"line {lineno}: timestamp {ts} precedes {events[-1].timestamp}")
        events.append(SpeechEvent(ts, kind))
    return events


def format_event_script(events: Iterable[SpeechEvent]) -> str:
    return "".join(f"{e.kind.value} {_f6(e.timestamp)}\n" for e in events)


def read_pcm(path: str | Path) -> np.ndarray:
    """Headerless signed 16-bit little-endian mono PCM."""
    data = Path(path).read_bytes()
    if len(data) % 2:
        raise FormatError(f"{path}: odd byte count {len(data)} for 16-bit PCM")
    return np.frombuffer(data, dtype="<i2").astype(np.int16)


def write_pcm(path: str | Path, samples) -> None:
    np.asarray(samples, dtype="<i2").tofile(str(path))


# -------------------------------------------------------------- model configs

CONFIG_KEYS = frozenset(
    {
        "variant",
        "zeta_11",
        "zeta_2",
        "prior_a",
        "prior_1_1",
        "prior_2",
        "prior_1_2",
        "A_1_2",
        "pref_matrix",
        "gamma",
        "preference_mode",
        "null_policy_efe",
    }
)


def model_from_dict(d: dict) -> PresenceModelSpec:
    """Build a :class:`PresenceModelSpec` from a JSON-style mapping; unknown keys are rejected."""
    if not isinstance(d, dict):
        raise FormatError("model config must be a JSON object")
    unknown = set(d) - CONFIG_KEYS
    if unknown:
        raise FormatError(f"unknown config keys: {sorted(unknown)}")
    if "prior_a" in d and "prior_1_1" in d:
        raise FormatError("give either prior_a or prior_1_1, not both")
    variant = d.get("variant", "original")
    if variant not in CONTEXTS:
        raise FormatError(f"unknown variant {variant!r}")
    kw = {}
    for key in ("zeta_2", "gamma", "null_policy_efe"):
        if key in d:
            kw[key] = float(d[key])
    if "preference_mode" in d:
        kw["preference_mode"] = d["preference_mode"]
    if "prior_1_1" in d:
        kw["prior_1_1"] = Categorical(np.asarray(d["prior_1_1"], dtype=float), ATTENTION_STATES)
    if "prior_2" in d:
        kw["prior_2"] = Categorical(np.asarray(d["prior_2"], dtype=float), CONTEXTS[variant])
    if "prior_1_2" in d:
        kw["prior_1_2"] = Categorical(np.asarray(d["prior_1_2"], dtype=float), FEEDBACK)
    if "A_1_2" in d:
        kw["A_1_2"] = StochasticMatrix(np.asarray(d["A_1_2"], dtype=float))
    if "pref_matrix" in d:
        kw["pref_matrix"] = np.asarray(d["pref_matrix"], dtype=float)
    zeta_11 = float(d.get("zeta_11", 0.2))
    if "prior_1_1" in kw:
        return PresenceModelSpec(variant=variant, zeta_11=zeta_11, **kw)
    return build_model(variant, zeta_11=zeta_11, prior_a=float(d.get("prior_a", 0.5)), **kw)


def load_model_config(path: str | Path) -> PresenceModelSpec:
    try:
        d = json.loads(Path(path).read_text())
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None
    try:
        return model_from_dict(d)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"{path}: {exc}") from None

