from litscout.updates.runs import DiffResult, RunStatus, UpdateRun, UpdateRunner, diff_answers
from litscout.updates.scheduler import Heartbeat, SchedulerState

__all__ = [
    "DiffResult",
    "Heartbeat",
    "RunStatus",
    "SchedulerState",
    "UpdateRun",
    "UpdateRunner",
    "diff_answers",
]
