"""Heartbeat scheduling: frequency gating, change gating, simulated clocks."""

from __future__ import annotations

import os
from datetime import timedelta

import pytest

from litscout.clock import isoformat_utc
from litscout.errors import RunInFlightError, UnknownProjectError
from litscout.projects import UpdateFrequency
from litscout.storage import atomic_write_json
from litscout.updates.scheduler import Heartbeat, SchedulerState


def record_run_gate(harness, project_id, run_number=1, state_label="Ideation"):
    """Persist a run record reflecting the document as it exists right now,
    the way a completed pipeline run would."""
    snap = harness.documents.snapshot(project_id)
    harness.projects.runs_dir(project_id).mkdir(parents=True, exist_ok=True)
    atomic_write_json(
        harness.projects.runs_dir(project_id) / f"run-{run_number:06d}.json",
        {
            "run_id": f"run-{run_number:06d}",
            "input_revision_id": snap.revision_id,
            "recorded_last_modified": isoformat_utc(snap.last_modified),
            "recorded_content_hash": snap.content_hash,
            "recorded_state_label": state_label,
        },
    )
    atomic_write_json(
        harness.projects.state_path(project_id),
        {
            "state_label": state_label,
            "rationale": "r",
            "assessed_at": "",
            "user_overridden": False,
        },
    )


def edit_doc(doc_path, text, harness):
    doc_path.write_text(text, encoding="utf-8")
    bumped = harness.clock.now().timestamp()
    os.utime(doc_path, (bumped, bumped))


class RecordingRunner:
    """Stands in for the pipeline: records invocations and writes the run
    gate so change detection sees a fresh baseline."""

    def __init__(self, harness):
        self.harness = harness
        self.calls: list[tuple[str, str]] = []

    def run_update(self, project_id, trigger, change_reason=None):
        self.calls.append((project_id, trigger.value))
        record_run_gate(self.harness, project_id, run_number=len(self.calls) + 1)


class TestHeartbeatTick:
    def test_all_never_yields_empty(self, harness):
        harness.make_project("p1", frequency=UpdateFrequency.NEVER)
        harness.make_project("p2", frequency=UpdateFrequency.NEVER)
        assert harness.heartbeat.heartbeat_tick(harness.clock.now()) == []

    def test_weekly_edited_after_seven_days_triggers(self, harness):
        doc = harness.make_project("p1", frequency=UpdateFrequency.WEEKLY)
        record_run_gate(harness, "p1")
        state = SchedulerState(harness.projects)
        state.set_next_due("p1", harness.clock.now() + timedelta(days=7))
        harness.clock.advance(timedelta(days=7))
        edit_doc(doc, "edited for the weekly cycle.\n", harness)
        assert harness.heartbeat.heartbeat_tick(harness.clock.now()) == ["p1"]

    def test_weekly_three_days_elapsed_not_due(self, harness):
        doc = harness.make_project("p1", frequency=UpdateFrequency.WEEKLY)
        record_run_gate(harness, "p1")
        state = SchedulerState(harness.projects)
        state.set_next_due("p1", harness.clock.now() + timedelta(days=7))
        harness.clock.advance(timedelta(days=3))
        edit_doc(doc, "edited early.\n", harness)
        # Due-date arithmetic: start + 7d > start + 3d, so no check happens.
        assert harness.heartbeat.heartbeat_tick(harness.clock.now()) == []

    def test_due_but_unchanged_advances_without_trigger(self, harness):
        harness.make_project("p1", frequency=UpdateFrequency.WEEKLY)
        record_run_gate(harness, "p1")
        state = SchedulerState(harness.projects)
        state.set_next_due("p1", harness.clock.now())
        assert harness.heartbeat.heartbeat_tick(harness.clock.now()) == []
        entry = SchedulerState(harness.projects).entry("p1")
        assert entry["last_checked"] == isoformat_utc(harness.clock.now())

    def test_first_check_triggers_onboarding_run(self, harness):
        harness.make_project("p1", frequency=UpdateFrequency.WEEKLY)
        # No run recorded yet: first-ever check counts as changed.
        assert harness.heartbeat.heartbeat_tick(harness.clock.now()) == ["p1"]

    def test_per_project_errors_isolated(self, harness):
        harness.make_project("broken", doc_text="x.\n", frequency=UpdateFrequency.DAILY)
        doc = harness.make_project("fine", frequency=UpdateFrequency.DAILY)
        # Corrupt the broken project's registry entry.
        (harness.projects.project_path("broken")).write_text("{not json", encoding="utf-8")
        triggered = harness.heartbeat.heartbeat_tick(harness.clock.now())
        assert triggered == ["fine"]


class TestSimulatedMonth:
    def run_simulation(self, harness, edit_each_week: bool):
        doc = harness.make_project("p1", frequency=UpdateFrequency.WEEKLY)
        record_run_gate(harness, "p1")
        runner = RecordingRunner(harness)
        heartbeat = Heartbeat(harness.projects, harness.documents, runner, harness.clock)
        SchedulerState(harness.projects).set_next_due(
            "p1", harness.clock.now() + timedelta(days=7)
        )
        week = 0
        for hour in range(1, 28 * 24 + 1):
            now = harness.clock.advance(timedelta(hours=1))
            if edit_each_week and hour % (7 * 24) == 7 * 24 - 12:
                week += 1
                edit_doc(doc, f"week {week} content.\n", harness)
            heartbeat.run_tick(now)
        return runner.calls

    def test_weekly_edits_trigger_exactly_four_runs(self, harness):
        calls = self.run_simulation(harness, edit_each_week=True)
        assert len(calls) == 4
        assert all(trigger == "scheduled" for _pid, trigger in calls)

    def test_unchanged_weeks_trigger_zero(self, harness):
        calls = self.run_simulation(harness, edit_each_week=False)
        assert calls == []

    def test_frequency_never_triggers_zero(self, harness):
        doc = harness.make_project("p1", frequency=UpdateFrequency.NEVER)
        record_run_gate(harness, "p1")
        runner = RecordingRunner(harness)
        heartbeat = Heartbeat(harness.projects, harness.documents, runner, harness.clock)
        for day in range(28):
            harness.clock.advance(timedelta(days=1))
            edit_doc(doc, f"day {day} content.\n", harness)
            heartbeat.run_tick(harness.clock.now())
        assert runner.calls == []


class TestFrequencyControls:
    def test_set_frequency_recomputes_next_due(self, harness):
        harness.make_project("p1", frequency=UpdateFrequency.BIWEEKLY)
        state = SchedulerState(harness.projects)
        checked_at = harness.clock.now()
        state.save({"p1": {"last_checked": isoformat_utc(checked_at), "next_due": isoformat_utc(checked_at + timedelta(days=14))}})
        harness.heartbeat.set_update_frequency("p1", UpdateFrequency.WEEKLY)
        entry = SchedulerState(harness.projects).entry("p1")
        assert entry["next_due"] == isoformat_utc(checked_at + timedelta(days=7))
        assert harness.projects.get_project("p1").frequency == UpdateFrequency.WEEKLY

    def test_set_never_clears_next_due(self, harness):
        harness.make_project("p1", frequency=UpdateFrequency.WEEKLY)
        harness.heartbeat.set_update_frequency("p1", UpdateFrequency.NEVER)
        assert SchedulerState(harness.projects).entry("p1")["next_due"] is None

    def test_manual_update_unknown_project(self, harness):
        with pytest.raises(UnknownProjectError):
            harness.heartbeat.request_manual_update("ghost")

    def test_manual_while_running_busy(self, harness):
        harness.make_project("p1")
        harness.runner.lock.acquire("p1")
        try:
            with pytest.raises(RunInFlightError):
                harness.heartbeat.request_manual_update("p1")
        finally:
            harness.runner.lock.release("p1")
