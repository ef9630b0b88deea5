import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from presence_aif.audio import detect_events, windowed_amplitude
from presence_aif.gaze import EventKind, behavior_trace
from presence_aif.inference import InvalidInputError

SR = 1000


def step(t_on, level=20000, total=3.0):
    x = np.zeros(int(total * SR), dtype=np.int16)
    x[int(t_on * SR):] = level
    return x


def test_silence_has_no_events():
    assert detect_events(np.zeros(5 * SR, dtype=np.int16), SR, 5000, 1000) == []


def test_empty_stream():
    assert detect_events(np.zeros(0, dtype=np.int16), SR, 5000, 1000) == []
    assert windowed_amplitude([], SR).size == 0


def test_step_fires_speech_start():
    events = detect_events(step(1.0), SR, 5000, 1000)
    assert [e.kind for e in events] == [EventKind.SPEECH_START]
    assert abs(events[0].timestamp - 1.0) <= 0.05


def test_no_breath_before_speech():
    # quiet throughout, so never speaking and never breathing
    x = np.full(2 * SR, 200, dtype=np.int16)
    assert detect_events(x, SR, 5000, 1000) == []


def test_breath_after_hold_and_rearm():
    x = np.full(4 * SR, 20000, dtype=np.int16)
    x[: SR // 2] = 0
    x[1500:2000] = 0  # first pause, 0.5 s
    x[3000:3300] = 0  # second pause, 0.3 s
    events = detect_events(x, SR, 5000, 1000)
    kinds = [e.kind for e in events]
    assert kinds == [EventKind.SPEECH_START, EventKind.BREATH, EventKind.BREATH]
    # a breath is confirmed after 0.2 s of quiet, measured on the windowed envelope
    assert events[1].timestamp == pytest.approx(1.5 + 0.05 + 0.2, abs=3 / SR)
    assert events[2].timestamp == pytest.approx(3.0 + 0.05 + 0.2, abs=3 / SR)


def test_short_dip_is_not_a_breath():
    x = np.full(2 * SR, 20000, dtype=np.int16)
    x[800:900] = 0
    assert [e.kind for e in detect_events(x, SR, 5000, 1000)] == [EventKind.SPEECH_START]


def test_already_speaking_skips_start():
    x = np.zeros(SR, dtype=np.int16)
    events = detect_events(x, SR, 5000, 1000, current_state=3)
    assert [e.kind for e in events] == [EventKind.BREATH]


def test_detected_events_drive_state_machine():
    x = np.full(4 * SR, 20000, dtype=np.int16)
    x[:SR] = 0
    x[2000:2400] = 0
    assert behavior_trace(detect_events(x, SR, 5000, 1000)) == [1, 2, 3, 4, 5]


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3000))
def test_causal(seed, cut):
    rng = np.random.default_rng(seed)
    x = (rng.random(3000) < 0.5) * rng.integers(-30000, 30000, 3000)
    x = x.astype(np.int16)
    full = detect_events(x, SR, 8000, 3000)
    head = detect_events(x[:cut], SR, 8000, 3000)
    assert head == [e for e in full if e.timestamp < cut / SR]


def test_deterministic():
    x = np.random.default_rng(1).integers(-20000, 20000, 4000).astype(np.int16)
    assert detect_events(x, SR, 9000, 4000) == detect_events(x, SR, 9000, 4000)


def test_windowed_amplitude_is_trailing_max():
    x = np.array([0, 5, -9, 1, 0, 0], dtype=np.int16)
    np.testing.assert_array_equal(windowed_amplitude(x, 1000, 0.003), [0, 5, 9, 9, 9, 1])


def test_int16_extreme_does_not_overflow():
    assert windowed_amplitude(np.array([-32768], dtype=np.int16), SR)[0] == 32768


@pytest.mark.parametrize("start, breath", [(-1, 100), (5000, 40000)])
def test_threshold_validation(start, breath):
    with pytest.raises(InvalidInputError):
        detect_events(np.zeros(10, dtype=np.int16), SR, start, breath)


def test_sample_rate_validation():
    with pytest.raises(InvalidInputError):
        detect_events(np.zeros(10, dtype=np.int16), 0, 1, 1)
