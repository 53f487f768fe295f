"""Embodied multi-agent runtime.

Subpackages:

* ``msgbus``   -- pub/sub, request/response services, and long-running
  actions over an in-process bus plus a newline-delimited JSON wire
  transport.
* ``toolkit``  -- tool schemas, validation, and the built-in tool set
  exposed to tool-calling language models.
* ``llm``      -- provider-agnostic chat completion and embeddings,
  including a deterministic scripted provider for offline runs.
* ``identity`` -- embodiment store: document ingestion, retrieval, system
  prompt assembly, and non-text self-description assets.
* ``agents``   -- the agent abstraction, ReAct and finite-state-machine
  agents, and the scenario agent roster.
* ``simworld`` -- deterministic tick-based 2D world with navigation,
  manipulation, and orchard scenarios.
* ``scenario`` -- configuration loading, the scenario runner, transcripts
  and checkers.
"""

__version__ = "0.1.0"
