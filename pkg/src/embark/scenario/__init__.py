"""Scenario execution: configuration, runner, transcripts, checkers."""

from embark.scenario.config import ConfigError, ScenarioConfig, load_config
from embark.scenario.transcript import Transcript, TranscriptIndex, read_transcript
from embark.scenario.runner import ScenarioRunner, run_scenario
from embark.scenario.checks import evaluate_checkers

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "ScenarioRunner",
    "Transcript",
    "TranscriptIndex",
    "evaluate_checkers",
    "load_config",
    "read_transcript",
    "run_scenario",
]
