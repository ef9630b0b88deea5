"""Speech start and breath detection from 16-bit PCM amplitude."""

from __future__ import annotations

import numpy as np

from presence_aif.gaze import EventKind, SpeechEvent, check_behavior
from presence_aif.inference import InvalidInputError

SPEAKING_BEHAVIORS = frozenset(range(2, 7))


def windowed_amplitude(samples, sample_rate: float, window: float = 0.05) -> np.ndarray:
    """Trailing max of ``|sample|`` over ``window`` seconds; causal."""
    x = np.abs(np.asarray(samples, dtype=np.int32))
    n = max(1, int(round(window * sample_rate)))
    if x.size == 0:
        return x
    padded = np.concatenate([np.zeros(n - 1, dtype=x.dtype), x])
    return np.lib.stride_tricks.sliding_window_view(padded, n).max(axis=1)


def detect_events(
    samples,
    sample_rate: float,
    start_threshold: int,
    breath_threshold: int,
    current_state: int = 1,
    window: float = 0.05,
    breath_hold: float = 0.2,
) -> list[SpeechEvent]:
    """Scan PCM samples for speech onset and breaths.

    ``SpeechStart`` fires at the first sample whose windowed amplitude exceeds
    ``start_threshold`` while the robot is in behaviour 1 (or has returned to
    centre in 7/8).  ``Breath`` fires once the windowed amplitude has stayed
    below ``breath_threshold`` for ``breath_hold`` seconds while speaking; the
    event is stamped when that condition is met, so it never depends on later
    samples.  Loudness must rise above ``breath_threshold`` again before the
    next breath.  Speech end is never inferred from audio.
    """
    if not sample_rate > 0:
        raise InvalidInputError("sample_rate must be > 0")
    for name, v in (("start_threshold", start_threshold), ("breath_threshold", breath_threshold)):
        if not 0 <= v <= 32767:
            raise InvalidInputError(f"{name} must lie in [0, 32767], got {v}")
    check_behavior(current_state)
    amp = windowed_amplitude(samples, sample_rate, window)
    hold_n = max(1, int(round(breath_hold * sample_rate)))

    events = []
    speaking = current_state in SPEAKING_BEHAVIORS
    armed = True
    quiet = 0
    for i, a in enumerate(amp):
        t = i / sample_rate
        if not speaking:
            if a > start_threshold:
                events.append(SpeechEvent(t, EventKind.SPEECH_START))
                speaking = True
                armed = True
                quiet = 0
            continue
        if a < breath_threshold:
            quiet += 1
            if armed and quiet >= hold_n:
                events.append(SpeechEvent(t, EventKind.BREATH))
                armed = False
        else:
            quiet = 0
            armed = True
    return events
