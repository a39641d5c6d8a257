"""Simulated competition server: timed KIS/AVS tasks, immediate judging,
scoring, and the feature-usage log behind per-role/per-task-type reports.

Judging is a pure function of (task, submission, prior submissions), so a
submission log can be replayed to identical verdicts and scores. The scoring
formulas are explicit stand-ins: they keep the qualitative shape that matters
(time penalty, wrong-submission penalty, multiple AVS credits) without
claiming to be any real campaign's formula.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import InvariantViolation, MalformedTask, TaskMismatch, UnknownTask

TASK_TYPES = ("kis_visual", "kis_textual", "avs")
KIS_TYPES = ("kis_visual", "kis_textual")

VERDICTS = ("correct", "wrong", "duplicate", "too_late")

# QueryDescriptor feature vocabulary plus the two UI-originated activities.
USAGE_FEATURES = (
    "concept_search",
    "map_search",
    "color_filter",
    "similarity_search",
    "sketch",
    "shot_filter",
    "map_browsing",
    "video_inspection",
)


@dataclass(frozen=True)
class Task:
    id: str
    type: str
    duration_sec: float
    prompt: str = ""
    target: tuple[str, float, float] | None = None  # (video, start_sec, end_sec), KIS
    relevant: frozenset[tuple[str, int]] = frozenset()  # {(video, shot_index)}, AVS

    def validate(self) -> None:
        if self.type not in TASK_TYPES:
            raise MalformedTask(f"unknown task type {self.type!r}")
        if self.duration_sec <= 0:
            raise InvariantViolation(f"task {self.id!r}: duration must be > 0")
        if self.type in KIS_TYPES:
            if self.target is None:
                raise InvariantViolation(f"KIS task {self.id!r} needs a target")
            if self.relevant:
                raise InvariantViolation(f"KIS task {self.id!r} must not list relevant shots")
            _, start, end = self.target
            if not start < end:
                raise InvariantViolation(f"task {self.id!r}: target start must be < end")
        else:
            if not self.relevant:
                raise InvariantViolation(f"AVS task {self.id!r} needs a non-empty relevant set")
            if self.target is not None:
                raise InvariantViolation(f"AVS task {self.id!r} must not carry a target")


@dataclass(frozen=True)
class Submission:
    task_id: str
    session: str
    user: str
    role: str
    video_id: str
    shot_index: int
    timestamp_sec: float
    at_sec: float

    def validate(self) -> None:
        if self.at_sec < 0:
            raise InvariantViolation("at_sec must be >= 0")


@dataclass(frozen=True)
class Judgment:
    verdict: str
    score_delta: float


def load_tasks(path) -> list[Task]:
    """Load and validate a JSON list of task definitions."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise MalformedTask(f"tasks file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise MalformedTask(f"tasks file is not valid JSON: {exc}") from None
    if not isinstance(doc, list):
        raise MalformedTask("tasks file must be a JSON list")
    tasks = [task_from_dict(entry) for entry in doc]
    if len({t.id for t in tasks}) != len(tasks):
        raise MalformedTask("duplicate task id")
    return tasks


def task_from_dict(entry) -> Task:
    if not isinstance(entry, dict):
        raise MalformedTask("task entry must be an object")
    try:
        task_id = entry["id"]
        task_type = entry["type"]
        duration = float(entry["duration_sec"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedTask(f"bad task entry: {exc}") from None
    target = None
    relevant: frozenset[tuple[str, int]] = frozenset()
    if "target" in entry and entry["target"] is not None:
        raw = entry["target"]
        try:
            target = (raw["video"], float(raw["start_sec"]), float(raw["end_sec"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedTask(f"task {task_id!r}: bad target: {exc}") from None
    if "relevant" in entry and entry["relevant"] is not None:
        try:
            relevant = frozenset((r["video"], int(r["shot_index"])) for r in entry["relevant"])
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedTask(f"task {task_id!r}: bad relevant list: {exc}") from None
    task = Task(
        id=task_id,
        type=task_type,
        duration_sec=duration,
        prompt=entry.get("prompt", ""),
        target=target,
        relevant=relevant,
    )
    task.validate()
    return task


def task_to_dict(task: Task) -> dict:
    doc: dict = {
        "id": task.id,
        "type": task.type,
        "duration_sec": task.duration_sec,
        "prompt": task.prompt,
    }
    if task.target is not None:
        video, start, end = task.target
        doc["target"] = {"video": video, "start_sec": start, "end_sec": end}
    if task.relevant:
        doc["relevant"] = [
            {"video": v, "shot_index": s} for v, s in sorted(task.relevant)
        ]
    return doc


def score_kis(at_sec: float, duration_sec: float, wrong_count_before: int) -> float:
    """Stand-in KIS score: 100 minus time and wrong-submission penalties."""
    return max(0.0, 100.0 - 50.0 * (at_sec / duration_sec) - 10.0 * wrong_count_before)


def score_avs(correct_count: int, wrong_count: int) -> float:
    """Stand-in AVS session total: 10 per correct shot, -5 per wrong one."""
    return max(0.0, 10.0 * correct_count - 5.0 * wrong_count)


def judge(task: Task, sub: Submission, prior_subs: Sequence[Submission]) -> Judgment:
    """Judge one submission against a task given all earlier submissions.

    Pure and replayable: prior submissions are re-judged in order to recover
    the per-session counts that verdicts and score deltas depend on.
    """
    if sub.task_id != task.id:
        raise TaskMismatch(f"submission for {sub.task_id!r} judged against task {task.id!r}")
    sub.validate()
    verdicts = _replay_verdicts(task, prior_subs)
    return _judge_next(task, sub, prior_subs, verdicts)


def judge_all(task: Task, subs: Sequence[Submission]) -> list[Judgment]:
    """Judge a whole submission log in order (each against its prefix)."""
    judgments: list[Judgment] = []
    verdicts: list[str] = []
    for i, sub in enumerate(subs):
        if sub.task_id != task.id:
            raise TaskMismatch(f"submission for {sub.task_id!r} in log of task {task.id!r}")
        sub.validate()
        judgment = _judge_next(task, sub, subs[:i], verdicts)
        judgments.append(judgment)
        verdicts.append(judgment.verdict)
    return judgments


def _replay_verdicts(task: Task, subs: Sequence[Submission]) -> list[str]:
    verdicts: list[str] = []
    for i, prior in enumerate(subs):
        verdicts.append(_judge_next(task, prior, subs[:i], verdicts).verdict)
    return verdicts


def _session_counts(
    session: str, subs: Sequence[Submission], verdicts: Sequence[str]
) -> tuple[int, int]:
    correct = wrong = 0
    for sub, verdict in zip(subs, verdicts):
        if sub.session != session:
            continue
        if verdict == "correct":
            correct += 1
        elif verdict == "wrong":
            wrong += 1
    return correct, wrong


def _judge_next(
    task: Task,
    sub: Submission,
    prior_subs: Sequence[Submission],
    prior_verdicts: Sequence[str],
) -> Judgment:
    if sub.at_sec > task.duration_sec:
        return Judgment(verdict="too_late", score_delta=0.0)

    correct_before, wrong_before = _session_counts(sub.session, prior_subs, prior_verdicts)

    if task.type in KIS_TYPES:
        video, start, end = task.target
        hit = sub.video_id == video and start <= sub.timestamp_sec <= end
        if not hit:
            return Judgment(verdict="wrong", score_delta=0.0)
        if correct_before > 0:
            return Judgment(verdict="correct", score_delta=0.0)
        return Judgment(
            verdict="correct",
            score_delta=score_kis(sub.at_sec, task.duration_sec, wrong_before),
        )

    # AVS
    shot = (sub.video_id, sub.shot_index)
    if shot not in task.relevant:
        delta = score_avs(correct_before, wrong_before + 1) - score_avs(
            correct_before, wrong_before
        )
        return Judgment(verdict="wrong", score_delta=delta)
    already = any(
        verdict == "correct"
        and prior.session == sub.session
        and (prior.video_id, prior.shot_index) == shot
        for prior, verdict in zip(prior_subs, prior_verdicts)
    )
    if already:
        return Judgment(verdict="duplicate", score_delta=0.0)
    delta = score_avs(correct_before + 1, wrong_before) - score_avs(correct_before, wrong_before)
    return Judgment(verdict="correct", score_delta=delta)


# ---------------------------------------------------------------------------
# usage logging

@dataclass(frozen=True)
class UsageEvent:
    session: str
    user: str
    role: str
    task_id: str
    feature: str
    at_sec: float

    def validate(self) -> None:
        if self.feature not in USAGE_FEATURES:
            raise ValueError(f"unknown usage feature {self.feature!r}")


@dataclass
class UsageLog:
    events: list[UsageEvent] = field(default_factory=list)


def record_usage(log: UsageLog, event: UsageEvent) -> UsageLog:
    event.validate()
    log.events.append(event)
    return log


def usage_report(
    log: UsageLog, tasks: Iterable[Task]
) -> dict[tuple[str, str, str], int]:
    """Aggregate event counts keyed by (role, task type, feature).

    Keys are emitted in ascending lexicographic order so reports are
    directly comparable across runs.
    """
    by_id = {t.id: t for t in tasks}
    counts: dict[tuple[str, str, str], int] = {}
    for event in log.events:
        task = by_id.get(event.task_id)
        if task is None:
            raise UnknownTask(f"usage event references unknown task {event.task_id!r}")
        key = (event.role, task.type, event.feature)
        counts[key] = counts.get(key, 0) + 1
    return dict(sorted(counts.items()))


def report_rows(report: dict[tuple[str, str, str], int]) -> list[dict]:
    return [
        {"role": role, "task_type": task_type, "feature": feature, "count": count}
        for (role, task_type, feature), count in report.items()
    ]


def report_to_csv(report: dict[tuple[str, str, str], int]) -> str:
    lines = ["role,task_type,feature,count"]
    for (role, task_type, feature), count in report.items():
        lines.append(f"{role},{task_type},{feature},{count}")
    return "\n".join(lines) + "\n"
