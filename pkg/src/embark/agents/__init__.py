"""Agents: lifecycle, ReAct and FSM loops, and the scenario roster."""

from embark.agents.base import Agent, AgentState, AlreadyRunning
from embark.agents.react import ReactResult, react_turn, run_react_loop
from embark.agents.fsm import FSMDefinition, FSMRun, FSMResult, NoTransition, Transition, fsm_run
from embark.agents.conversational import ConversationalAgent
from embark.agents.missions import (
    ControlAgent,
    MissionStatus,
    dispatch_mission_tool,
    mission_record,
)
from embark.agents.tractor import TractorAutonomy
from embark.agents.anomaly import AnomalyAgent

TOPIC_HRI_IN = "hri/in"
TOPIC_HRI_OUT = "hri/out"
TOPIC_MISSION_REQUESTS = "mission/requests"
TOPIC_MISSION_STATUS = "mission/status"
TOPIC_ANOMALY_EVENTS = "anomaly/events"
TOPIC_ANOMALY_RESOLUTIONS = "anomaly/resolutions"

__all__ = [
    "Agent",
    "AgentState",
    "AlreadyRunning",
    "AnomalyAgent",
    "ControlAgent",
    "ConversationalAgent",
    "FSMDefinition",
    "FSMResult",
    "FSMRun",
    "MissionStatus",
    "NoTransition",
    "ReactResult",
    "TOPIC_ANOMALY_EVENTS",
    "TOPIC_ANOMALY_RESOLUTIONS",
    "TOPIC_HRI_IN",
    "TOPIC_HRI_OUT",
    "TOPIC_MISSION_REQUESTS",
    "TOPIC_MISSION_STATUS",
    "TractorAutonomy",
    "Transition",
    "dispatch_mission_tool",
    "fsm_run",
    "mission_record",
    "react_turn",
    "run_react_loop",
]
