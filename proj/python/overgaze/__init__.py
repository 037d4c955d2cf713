"""Synthetic Overcooked gameplay+gaze pipeline (Python surface of the C++ core)."""

from ._core import (
    GAZE_PER_STEP,
    ROUND_STEPS,
    STATE_CHANNELS,
    OvergazeError,
    detect_subtasks,
    f1_macro,
    intent_labels,
    layouts,
    proficiency_bins,
    representation,
    session_info,
    simulate_session,
    subtask_names,
)

__all__ = [
    "GAZE_PER_STEP",
    "ROUND_STEPS",
    "STATE_CHANNELS",
    "OvergazeError",
    "detect_subtasks",
    "f1_macro",
    "intent_labels",
    "layouts",
    "proficiency_bins",
    "representation",
    "session_info",
    "simulate_session",
    "subtask_names",
]
