"""Engine facade behind the network API and the CLI.

Owns the immutable corpus and map catalog, per-session search histories,
collaboration rooms, the active task with its submissions, and the usage and
score logs. Session-scoped mutations are serialized with per-session locks;
all retrieval stays lock-free on the immutable corpus/catalog.
"""

from __future__ import annotations

import hashlib
import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from . import collab, search, som, taskserver
from .corpus import Corpus, load_manifest
from .colorfeat import load_concept_scores
from .errors import UnknownSession, UnknownTask
from .search import ResultSet, SearchHistory
from .taskserver import Judgment, Submission, Task, UsageEvent, UsageLog


@dataclass
class EngineConfig:
    manifest: str
    concepts: str | None = None
    tasks: str | None = None
    host: str = "127.0.0.1"
    port: int = 8765
    catalog_cache_dir: str | None = None
    usage_log: str | None = None
    score_log: str | None = None
    min_members: int = som.DEFAULT_MIN_MEMBERS
    concept_threshold: float = som.DEFAULT_CONCEPT_THRESHOLD
    som_params: dict = field(default_factory=dict)
    static_dir: str | None = None  # optional browser client, mounted at /ui

    @classmethod
    def load(cls, path) -> "EngineConfig":
        path = Path(path)
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        config = cls(**doc)
        # paths in the config file resolve relative to the file itself
        for attr in ("manifest", "concepts", "tasks", "catalog_cache_dir",
                     "usage_log", "score_log", "static_dir"):
            value = getattr(config, attr)
            if value is not None and not Path(value).is_absolute():
                setattr(config, attr, str(path.parent / value))
        return config


@dataclass
class UserSession:
    token: str
    user: str
    role: str
    history: SearchHistory = field(default_factory=SearchHistory)
    lock: threading.Lock = field(default_factory=threading.Lock)


class CollabRoom:
    def __init__(self, session_id: str):
        self.state = collab.SessionState(session_id)
        self.lock = threading.Lock()


@dataclass
class TaskRun:
    task: Task
    started_at: float
    submissions: list[Submission] = field(default_factory=list)
    judgments: list[Judgment] = field(default_factory=list)


class Engine:
    def __init__(self, config: EngineConfig, corpus: Corpus, catalog: som.MapCatalog,
                 tasks: list[Task]):
        self.config = config
        self.corpus = corpus
        self.catalog = catalog
        self.tasks: dict[str, Task] = {t.id: t for t in tasks}
        self.sessions: dict[str, UserSession] = {}
        self.rooms: dict[str, CollabRoom] = {}
        self.usage = UsageLog()
        self.active_task_id: str | None = None
        self.task_runs: dict[str, TaskRun] = {}
        self._state_lock = threading.RLock()

    # -- startup ------------------------------------------------------------

    @classmethod
    def start(cls, config: EngineConfig) -> "Engine":
        corpus = load_manifest(config.manifest)
        if config.concepts:
            merge_concept_scores(corpus, load_concept_scores(config.concepts))
        catalog = load_or_build_catalog(corpus, config)
        tasks = taskserver.load_tasks(config.tasks) if config.tasks else []
        return cls(config, corpus, catalog, tasks)

    # -- sessions -----------------------------------------------------------

    def create_session(self, user: str = "anonymous", role: str = "novice") -> UserSession:
        if role not in collab.ROLES:
            raise ValueError(f"role must be one of {collab.ROLES}")
        token = uuid.uuid4().hex
        session = UserSession(token=token, user=user, role=role)
        with self._state_lock:
            self.sessions[token] = session
        return session

    def session(self, token: str) -> UserSession:
        try:
            return self.sessions[token]
        except KeyError:
            raise UnknownSession(f"unknown session {token!r}") from None

    # -- search dispatch ----------------------------------------------------

    def dispatch_search(self, token: str, feature: str, params: dict) -> ResultSet:
        """Run one search, push it into the session history, log usage."""
        session = self.session(token)
        results = self._run_search(session, feature, params)
        with session.lock:
            session.history.push(results)
        self._record_usage(session, results.query.feature)
        return results

    def _run_search(self, session: UserSession, feature: str, params: dict) -> ResultSet:
        if feature == "concept_search":
            return search.concept_search(
                self.corpus,
                params["query"],
                theta=float(params.get("theta", search.DEFAULT_CONCEPT_THETA)),
                limit=int(params.get("limit", search.DEFAULT_K)),
            )
        if feature == "color_filter":
            return search.color_filter(
                self.corpus,
                set(params["colors"]),
                coverage_theta=float(params.get("coverage_theta", 0.15)),
            )
        if feature == "similarity_search":
            return search.similarity_search(
                self.corpus,
                params["probe"],
                k=int(params.get("k", search.DEFAULT_K)),
                space=params.get("space", "color"),
            )
        if feature == "sketch":
            return search.sketch_search(
                self.corpus,
                {int(c): int(p) for c, p in params["cells"].items()},
                min_match=int(params.get("min_match", 1)),
            )
        if feature == "shot_filter":
            with session.lock:
                current = session.history.current()
            if current is None:
                raise ValueError("shot_filter needs a previous search in the history")
            return search.shot_filter(self.corpus, current, params["video"])
        raise ValueError(f"unknown search feature {feature!r}")

    def map_search(self, query: str, token: str | None = None) -> list[str]:
        result = search.map_search(self.catalog, query)
        if token is not None:
            self._record_usage(self.session(token), "map_search")
        return result

    def history_back(self, token: str) -> ResultSet | None:
        """Navigate back: drop the current result set, serve the previous one.

        The history op itself pops and returns the most recent entry; the
        gateway responds with the set that becomes current, which is what a
        client going "back" wants to display.
        """
        session = self.session(token)
        with session.lock:
            session.history.back()
            return session.history.current()

    def similarity_tab(self, token: str) -> ResultSet | None:
        return self.session(token).history.last_similarity

    # -- collaboration --------------------------------------------------------

    def room(self, session_id: str) -> CollabRoom:
        with self._state_lock:
            if session_id not in self.rooms:
                self.rooms[session_id] = CollabRoom(session_id)
            return self.rooms[session_id]

    def apply_collab(self, session_id: str, msg: collab.CollabMessage) -> tuple[collab.Effect, int]:
        room = self.room(session_id)
        with room.lock:
            effect = room.state.apply(msg)
            return effect, room.state.revision

    def spectator(self, session_id: str) -> dict:
        room = self.room(session_id)
        with room.lock:
            return room.state.snapshot()

    # -- tasks ----------------------------------------------------------------

    def task(self, task_id: str) -> Task:
        try:
            return self.tasks[task_id]
        except KeyError:
            raise UnknownTask(f"unknown task {task_id!r}") from None

    def start_task(self, task_id: str, at: float | None = None) -> TaskRun:
        task = self.task(task_id)
        with self._state_lock:
            run = TaskRun(task=task, started_at=time.time() if at is None else at)
            self.task_runs[task_id] = run
            self.active_task_id = task_id
        return run

    def submit(self, token: str, task_id: str, video_id: str, shot_index: int,
               timestamp_sec: float, at_sec: float | None = None) -> Judgment:
        session = self.session(token)
        task = self.task(task_id)
        with self._state_lock:
            run = self.task_runs.get(task_id)
            if run is None:
                run = self.start_task(task_id)
            elapsed = time.time() - run.started_at if at_sec is None else at_sec
            sub = Submission(
                task_id=task_id,
                session=token,
                user=session.user,
                role=session.role,
                video_id=video_id,
                shot_index=shot_index,
                timestamp_sec=timestamp_sec,
                at_sec=elapsed,
            )
            judgment = taskserver.judge(task, sub, run.submissions)
            run.submissions.append(sub)
            run.judgments.append(judgment)
        self._append_score_log(sub, judgment)
        return judgment

    def _record_usage(self, session: UserSession, feature: str) -> None:
        task_id = self.active_task_id
        if task_id is None:
            return
        run = self.task_runs[task_id]
        event = UsageEvent(
            session=session.token,
            user=session.user,
            role=session.role,
            task_id=task_id,
            feature=feature,
            at_sec=max(0.0, time.time() - run.started_at),
        )
        with self._state_lock:
            taskserver.record_usage(self.usage, event)
        self._append_usage_log(event)

    def record_manual_usage(self, token: str, feature: str) -> bool:
        """UI-originated activity (map_browsing / video_inspection / shot_filter)."""
        if feature not in taskserver.USAGE_FEATURES:
            raise ValueError(f"unknown usage feature {feature!r}")
        session = self.session(token)
        if self.active_task_id is None:
            return False
        self._record_usage(session, feature)
        return True

    def usage_report(self) -> dict[tuple[str, str, str], int]:
        return taskserver.usage_report(self.usage, self.tasks.values())

    # -- persistence ----------------------------------------------------------

    def _append_usage_log(self, event: UsageEvent) -> None:
        if not self.config.usage_log:
            return
        task = self.tasks[event.task_id]
        line = {
            "session": event.session,
            "user": event.user,
            "role": event.role,
            "task": event.task_id,
            "task_type": task.type,
            "feature": event.feature,
            "at_sec": event.at_sec,
        }
        _append_jsonl(self.config.usage_log, line)

    def _append_score_log(self, sub: Submission, judgment: Judgment) -> None:
        if not self.config.score_log:
            return
        line = {
            "task": sub.task_id,
            "session": sub.session,
            "user": sub.user,
            "role": sub.role,
            "video": sub.video_id,
            "shot_index": sub.shot_index,
            "timestamp_sec": sub.timestamp_sec,
            "at_sec": sub.at_sec,
            "verdict": judgment.verdict,
            "score_delta": judgment.score_delta,
        }
        _append_jsonl(self.config.score_log, line)


def _append_jsonl(path, line: dict) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(line, separators=(",", ":")) + "\n")


def merge_concept_scores(corpus: Corpus, scores: dict[str, dict[str, float]]) -> None:
    """Overlay CSV concept scores onto manifest keyframes (CSV wins per label)."""
    for kf_id, per_label in scores.items():
        kf = corpus.keyframes.get(kf_id)
        if kf is not None:
            kf.concepts.update(per_label)


def catalog_cache_key(config: EngineConfig) -> str:
    """Digest of everything the catalog depends on: inputs and parameters."""
    h = hashlib.sha256()
    for path in (config.manifest, config.concepts):
        if path:
            h.update(Path(path).read_bytes())
        h.update(b"\x00")
    params = {
        "min_members": config.min_members,
        "concept_threshold": config.concept_threshold,
        "som": dict(sorted(config.som_params.items())),
    }
    h.update(json.dumps(params, sort_keys=True).encode("utf-8"))
    return h.hexdigest()


def load_or_build_catalog(corpus: Corpus, config: EngineConfig) -> som.MapCatalog:
    cache_dir = None
    if config.catalog_cache_dir:
        cache_dir = Path(config.catalog_cache_dir) / catalog_cache_key(config)
        if (cache_dir / "catalog.json").exists():
            return som.load_catalog(cache_dir)
    template = som.SelfOrganizingMap(**config.som_params)
    catalog = som.build_map_catalog(
        corpus,
        som=template,
        min_members=config.min_members,
        concept_threshold=config.concept_threshold,
    )
    if cache_dir is not None:
        som.save_catalog(catalog, cache_dir)
    return catalog
