import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from sociobadge.core import InteractionEvent, ObservationWindow, normalize

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def raw_logs(draw, max_n=6, max_seconds=80, max_events=25):
    """(raw events, roster, window) with every event inside the window."""
    n = draw(st.integers(2, max_n))
    roster = list(range(1, n + 1))
    t0 = draw(st.integers(0, 100))
    seconds = draw(st.integers(1, max_seconds))
    window = ObservationWindow(t0, t0 + seconds)
    events = []
    for _ in range(draw(st.integers(0, max_events))):
        a, b = draw(st.lists(st.sampled_from(roster), min_size=2, max_size=2, unique=True))
        start = draw(st.integers(t0, t0 + seconds))
        end = draw(st.integers(start, t0 + seconds))
        events.append(InteractionEvent.make(a, b, start, end))
    return events, roster, window


@st.composite
def event_logs(draw, **kwargs):
    events, roster, window = draw(raw_logs(**kwargs))
    return normalize(events, roster, window)


@pytest.fixture
def badge_rows_path(tmp_path):
    path = tmp_path / "badge_rows.csv"
    path.write_text(
        "Start,ID Badge A,ID Badge B,End\n"
        "18:19:46,3,5,18:19:58\n"
        "18:19:47,1,10,18:20:15\n"
        "18:19:47,1,8,18:22:32\n"
        "18:19:49,10,8,18:22:35\n"
        "18:19:53,2,5,18:20:37\n"
        "18:20:04,6,11,18:20:14\n"
    )
    return path
