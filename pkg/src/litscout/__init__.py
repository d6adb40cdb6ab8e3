"""litscout: proactive literature scout for research project documents.

Monitors a project's document, infers the project's stage, generates and
ranks literature questions, queries a deep-research provider, and
distills the reports into ranked, non-redundant suggestions anchored to
document sentences — delivered on a change-gated heartbeat.
"""

__version__ = "0.1.0"
