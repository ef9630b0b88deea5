"""Gaze behaviour of the avatar robot while a remote participant speaks.

Behaviours (numbering follows the robot's behaviour table):

    1  look between the two local participants (before speech)
    2  shift gaze to participant 1 when speech starts
    3  hold on participant 1 until a breath
    4  shift gaze to participant 2 on a breath
    5  hold on participant 2 until a breath
    6  shift gaze to participant 1 on a breath
    7  return to centre when speech ends during 3
    8  return to centre when speech ends during 5

Shift behaviours (2, 4, 6, 7, 8) last ``EasingSpec.duration`` and then pass
automatically to a hold.  7 and 8 end looking at the centre and stay there
until the next utterance.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from presence_aif.inference import InvalidInputError

CENTER_YAW = 0.0
P1_YAW = 10.0
P2_YAW = -20.0

# pupil x for each gaze target; y rests at GAZE_Y
CENTER_X = 50.0
P1_X = 60.0
P2_X = 40.0
GAZE_Y = 50.0

SHIFT_BEHAVIORS = frozenset({2, 4, 6, 7, 8})
HOLD_BEHAVIORS = frozenset({1, 3, 5})
# after a shift completes
AUTO_NEXT = {2: 3, 4: 5, 6: 3}


class EventKind(str, enum.Enum):
    SPEECH_START = "SpeechStart"
    BREATH = "Breath"
    SPEECH_END = "SpeechEnd"


@dataclass(frozen=True, order=True)
class SpeechEvent:
    timestamp: float
    kind: EventKind

    def __post_init__(self):
        object.__setattr__(self, "kind", EventKind(self.kind))
        if not math.isfinite(self.timestamp) or self.timestamp < 0:
            raise InvalidInputError(f"event timestamp must be finite and >= 0, got {self.timestamp}")


@dataclass(frozen=True)
class TrajectoryFrame:
    t: float
    yaw: float
    pitch: float
    roll: float
    gaze_x: float
    gaze_y: float
    blink: int


@dataclass(frozen=True)
class EasingSpec:
    start_yaw: float = P2_YAW
    end_yaw: float = P1_YAW
    duration: float = 0.52
    damping: float = 1.0
    eye_lead: float = 0.31
    overshoot: float = 0.1
    blink_width: float = 0.12
    blink_dip: float = 10.0

    def __post_init__(self):
        if self.duration <= 0:
            raise InvalidInputError("duration must be > 0")
        if not 0 < self.eye_lead < self.duration:
            raise InvalidInputError("eye_lead must lie in (0, duration)")
        if self.damping <= 0:
            raise InvalidInputError("damping must be > 0")
        if self.overshoot < 0 or self.blink_dip < 0:
            raise InvalidInputError("overshoot and blink_dip must be >= 0")
        if not 0 < self.blink_width <= self.duration / 2:
            raise InvalidInputError("blink_width must lie in (0, duration / 2]")


def check_behavior(behavior: int) -> int:
    if isinstance(behavior, bool) or behavior not in range(1, 9):
        raise InvalidInputError(f"behaviour id must be 1..8, got {behavior!r}")
    return int(behavior)


# ---------------------------------------------------------------- state machine


def transition(state: int, event: SpeechEvent | EventKind | str) -> int:
    """Successor behaviour for ``event``; pairs the table does not define leave ``state`` unchanged."""
    state = check_behavior(state)
    kind = EventKind(event.kind if isinstance(event, SpeechEvent) else event)
    if kind is EventKind.SPEECH_START and state in (1, 7, 8):
        return 2
    if kind is EventKind.BREATH:
        return {3: 4, 5: 6}.get(state, state)
    if kind is EventKind.SPEECH_END:
        return {3: 7, 5: 8}.get(state, state)
    return state


def complete(state: int) -> int:
    """Behaviour entered automatically once a shift behaviour finishes."""
    return AUTO_NEXT.get(check_behavior(state), state)


# ------------------------------------------------------------------ trajectories


def _clamp_t(t: float, duration: float) -> float:
    if t < 0 or t > duration:
        warnings.warn(f"t={t} outside [0, {duration}], clamped", RuntimeWarning, stacklevel=3)
        return min(max(t, 0.0), duration)
    return t


def phase_fraction(t: float, damping: float = 1.0) -> float:
    """Normalised inverted phase of ``1 / (s^2 + 2 zeta s + 1)`` at ``omega = 10^((2t - 0.5) / 0.25)``.

    Returns a value in [0, 1]: 0 well below resonance, exactly 0.5 at
    ``omega = 1`` (t = 0.25) for any damping, approaching 1 above it.
    """
    omega = 10.0 ** ((2.0 * t - 0.5) / 0.25)
    return math.degrees(math.atan2(2.0 * damping * omega, 1.0 - omega * omega)) / 180.0


def yaw_at(spec: EasingSpec, t: float) -> float:
    """Head yaw in degrees ``t`` seconds into a shift."""
    t = _clamp_t(t, spec.duration)
    return spec.start_yaw + phase_fraction(t, spec.damping) * (spec.end_yaw - spec.start_yaw)


def eye_x_at(t: float, spec: EasingSpec, from_x: float, to_x: float) -> float:
    t = _clamp_t(t, spec.duration)
    peak = to_x + spec.overshoot * (to_x - from_x)
    t_peak = spec.eye_lead / (1.0 + spec.overshoot)
    if t <= t_peak:
        x = from_x + (peak - from_x) * t / t_peak
    elif t < spec.eye_lead:
        x = peak + (to_x - peak) * (t - t_peak) / (spec.eye_lead - t_peak)
    else:
        x = to_x
    return min(max(x, 0.0), 100.0)


def blink_openness_at(t: float, spec: EasingSpec) -> int:
    """Eye opening (0 closed, 100 open) during a shift.

    One triangular blink starts with the head swing and a second ends with
    it; each closes fully at its centre.
    """
    t = _clamp_t(t, spec.duration)
    half = spec.blink_width / 2.0
    centres = (half, spec.duration - half)
    return min(_triangle(t, c, half) for c in centres)


def _triangle(t: float, centre: float, half: float) -> int:
    d = abs(t - centre)
    if d >= half:
        return 100
    return int(round(100.0 * d / half))


def eye_position_at(t: float, spec: EasingSpec, from_x: float, to_x: float) -> tuple[float, float]:
    """Pupil ``(x, y)``: x leads the head with a slight overshoot, y dips while blinking."""
    x = eye_x_at(t, spec, from_x, to_x)
    closed = 1.0 - blink_openness_at(t, spec) / 100.0
    y = min(max(GAZE_Y - spec.blink_dip * closed, 0.0), 100.0)
    return x, y


def control_blink_pattern(t: float, width: float = 0.12, gap: float = 0.3) -> int:
    """Blink pattern of the non-gazing robot: once at 3 s, twice at 6 s, repeating every 6 s."""
    if t < 0:
        raise InvalidInputError("t must be >= 0")
    half = width / 2.0
    k = math.floor(t / 6.0)
    centres = []
    for cycle in (k - 1, k, k + 1):
        if cycle < 0:
            continue
        base = 6.0 * cycle
        centres.append(base + 3.0)
        # the double blink closes cycle ``cycle``
        centres.extend((base + 6.0, base + 6.0 + width + gap))
    return min(_triangle(t, c, half) for c in centres)


# ------------------------------------------------------------------- rendering

_SHIFT_TARGETS = {
    2: ((CENTER_YAW, CENTER_X), (P1_YAW, P1_X)),
    4: ((P1_YAW, P1_X), (P2_YAW, P2_X)),
    6: ((P2_YAW, P2_X), (P1_YAW, P1_X)),
    7: ((P1_YAW, P1_X), (CENTER_YAW, CENTER_X)),
    8: ((P2_YAW, P2_X), (CENTER_YAW, CENTER_X)),
}
_HOLD_POSE = {1: (CENTER_YAW, CENTER_X), 3: (P1_YAW, P1_X), 5: (P2_YAW, P2_X)}


def pose_endpoints(behavior: int) -> tuple[tuple[float, float], tuple[float, float]]:
    """``((yaw, x) at onset, (yaw, x) at end)`` for a behaviour."""
    b = check_behavior(behavior)
    if b in _SHIFT_TARGETS:
        return _SHIFT_TARGETS[b]
    return _HOLD_POSE[b], _HOLD_POSE[b]


def shift_frame(
    t_local: float,
    spec: EasingSpec,
    from_pose: tuple[float, float],
    to_pose: tuple[float, float],
    t_global: float | None = None,
) -> TrajectoryFrame:
    """One frame of a shift from ``from_pose`` to ``to_pose`` (each ``(yaw, x)``)."""
    s = EasingSpec(
        start_yaw=from_pose[0],
        end_yaw=to_pose[0],
        duration=spec.duration,
        damping=spec.damping,
        eye_lead=spec.eye_lead,
        overshoot=spec.overshoot,
        blink_width=spec.blink_width,
        blink_dip=spec.blink_dip,
    )
    x, y = eye_position_at(t_local, s, from_pose[1], to_pose[1])
    return TrajectoryFrame(
        t=t_local if t_global is None else t_global,
        yaw=yaw_at(s, t_local),
        pitch=0.0,
        roll=0.0,
        gaze_x=x,
        gaze_y=y,
        blink=blink_openness_at(t_local, s),
    )


def hold_frame(t: float, pose: tuple[float, float]) -> TrajectoryFrame:
    return TrajectoryFrame(t=t, yaw=pose[0], pitch=0.0, roll=0.0, gaze_x=pose[1], gaze_y=GAZE_Y, blink=100)


def _sample_times(duration: float, rate: float) -> np.ndarray:
    if not rate > 0:
        raise InvalidInputError("rate must be > 0")
    n = int(math.floor(duration * rate + 1e-9))
    return np.arange(n + 1) / rate


def render_behavior(behavior: int, rate: float = 100.0, spec: EasingSpec | None = None, hold_duration: float = 1.0):
    """Frames for one behaviour, sampled at ``rate`` Hz from 0 to its duration inclusive.

    Hold behaviours have no natural length; ``hold_duration`` sets it.
    """
    spec = spec or EasingSpec()
    b = check_behavior(behavior)
    start, end = pose_endpoints(b)
    if b in SHIFT_BEHAVIORS:
        return [shift_frame(float(t), spec, start, end) for t in _sample_times(spec.duration, rate)]
    return [hold_frame(float(t), start) for t in _sample_times(hold_duration, rate)]


def render_control(duration: float, rate: float = 100.0) -> list[TrajectoryFrame]:
    """Control-group robot: centred gaze with the fixed blink pattern."""
    return [
        TrajectoryFrame(float(t), CENTER_YAW, 0.0, 0.0, CENTER_X, GAZE_Y, control_blink_pattern(float(t)))
        for t in _sample_times(duration, rate)
    ]


# -------------------------------------------------------------------- sessions


@dataclass
class SessionOutput:
    frames: list[TrajectoryFrame]
    trace: list[int]
    onsets: list[float]


class GazeSession:
    """Single-owner state machine that turns speech events into frames.

    Events are applied at their timestamps.  A ``SpeechEnd`` arriving while
    the head is still shifting is held until the shift finishes, so the robot
    always returns to centre.  A breath during a shift is dropped.
    """

    def __init__(self, spec: EasingSpec | None = None):
        self.spec = spec or EasingSpec()
        self.state = 1
        self.onset = 0.0
        self.from_pose = _HOLD_POSE[1]
        self.to_pose = _HOLD_POSE[1]
        self.trace = [1]
        self.onsets = [0.0]
        self.settled = False
        self._pending_end: float | None = None
        self._last_event = -math.inf

    def _enter(self, state: int, at: float, from_pose):
        self.state = state
        self.onset = at
        self.settled = False
        self.from_pose = from_pose
        if state in SHIFT_BEHAVIORS:
            self.to_pose = _SHIFT_TARGETS[state][1]
        else:
            self.to_pose = _HOLD_POSE[state]
        self.trace.append(state)
        self.onsets.append(at)

    def _advance_to(self, t: float):
        # complete any shift that finishes at or before t
        while self.state in SHIFT_BEHAVIORS and self.onset + self.spec.duration <= t:
            done = self.onset + self.spec.duration
            nxt = complete(self.state)
            if nxt == self.state:
                # 7 / 8 stay at centre once settled
                self.settled = True
                break
            self._enter(nxt, done, self.to_pose)
            if self._pending_end is not None:
                self._pending_end = None
                self._apply(EventKind.SPEECH_END, done)

    def _apply(self, kind: EventKind, at: float):
        if self.state in SHIFT_BEHAVIORS and at < self.onset + self.spec.duration:
            if kind is EventKind.SPEECH_END:
                self._pending_end = at
            return
        nxt = transition(self.state, kind)
        if nxt != self.state:
            self._enter(nxt, at, self.pose_at(at)[:2])

    def feed(self, event: SpeechEvent):
        if event.timestamp < self._last_event:
            raise InvalidInputError(
                f"event at t={event.timestamp} precedes previous event at t={self._last_event}"
            )
        self._last_event = event.timestamp
        self._advance_to(event.timestamp)
        self._apply(event.kind, event.timestamp)

    def pose_at(self, t: float) -> tuple[float, float]:
        f = self.frame_at(t)
        return f.yaw, f.gaze_x

    def frame_at(self, t: float) -> TrajectoryFrame:
        if self.state in SHIFT_BEHAVIORS and not self.settled:
            local = min(max(t - self.onset, 0.0), self.spec.duration)
            return shift_frame(local, self.spec, self.from_pose, self.to_pose, t_global=t)
        return hold_frame(t, self.to_pose)


def drive(
    events: Iterable[SpeechEvent],
    spec: EasingSpec | None = None,
    rate: float = 100.0,
    until: float | None = None,
) -> SessionOutput:
    """Run a session over time-ordered ``events`` and sample frames at ``rate`` Hz.

    The session runs until ``until`` or, by default, one shift duration after
    the last event (1 s of behaviour 1 when there are no events).
    """
    spec = spec or EasingSpec()
    events = list(events)
    for prev, cur in zip(events, events[1:]):
        if cur.timestamp < prev.timestamp:
            raise InvalidInputError(f"events out of order at t={cur.timestamp} (after t={prev.timestamp})")
    if until is None:
        until = events[-1].timestamp + spec.duration if events else 1.0
    session = GazeSession(spec)
    frames = []
    i = 0
    for t in _sample_times(until, rate):
        t = float(t)
        while i < len(events) and events[i].timestamp <= t:
            session.feed(events[i])
            i += 1
        session._advance_to(t)
        frames.append(session.frame_at(t))
    while i < len(events):
        session.feed(events[i])
        i += 1
    return SessionOutput(frames=frames, trace=list(session.trace), onsets=list(session.onsets))


def behavior_trace(events: Sequence[SpeechEvent], spec: EasingSpec | None = None) -> list[int]:
    """Sequence of behaviours entered while processing ``events``."""
    session = GazeSession(spec)
    for e in events:
        session.feed(e)
    session._advance_to(math.inf)
    return session.trace
