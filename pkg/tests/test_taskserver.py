import json

import pytest

from divex.errors import InvariantViolation, MalformedTask, TaskMismatch, UnknownTask
from divex.taskserver import (
    Judgment,
    Submission,
    Task,
    UsageEvent,
    UsageLog,
    judge,
    judge_all,
    load_tasks,
    record_usage,
    report_to_csv,
    score_avs,
    score_kis,
    task_from_dict,
    usage_report,
)

KIS_TASK = Task(
    id="t1",
    type="kis_visual",
    duration_sec=300.0,
    prompt="find the red door",
    target=("v3", 30.0, 50.0),
)

AVS_TASK = Task(
    id="t2",
    type="avs",
    duration_sec=300.0,
    prompt="people riding bikes",
    relevant=frozenset({("v1", 4), ("v1", 7), ("v2", 0)}),
)


def sub(task, video, t, at, session="s1", shot=0, role="expert", user="alice"):
    return Submission(
        task_id=task.id,
        session=session,
        user=user,
        role=role,
        video_id=video,
        shot_index=shot,
        timestamp_sec=t,
        at_sec=at,
    )


class TestLoadTasks:
    def test_valid_file(self, tmp_path):
        doc = [
            {
                "id": "t1",
                "type": "kis_visual",
                "duration_sec": 300,
                "prompt": "p",
                "target": {"video": "v3", "start_sec": 30, "end_sec": 50},
            },
            {
                "id": "t2",
                "type": "avs",
                "duration_sec": 300,
                "relevant": [{"video": "v1", "shot_index": 4}],
            },
        ]
        path = tmp_path / "tasks.json"
        path.write_text(json.dumps(doc))
        tasks = load_tasks(path)
        assert [t.id for t in tasks] == ["t1", "t2"]
        assert tasks[0].target == ("v3", 30.0, 50.0)
        assert tasks[1].relevant == frozenset({("v1", 4)})

    def test_inverted_window(self):
        with pytest.raises(InvariantViolation):
            task_from_dict(
                {
                    "id": "t1",
                    "type": "kis_textual",
                    "duration_sec": 300,
                    "target": {"video": "v1", "start_sec": 50, "end_sec": 30},
                }
            )

    def test_avs_empty_relevant(self):
        with pytest.raises(InvariantViolation):
            task_from_dict({"id": "t1", "type": "avs", "duration_sec": 300, "relevant": []})

    def test_kis_without_target(self):
        with pytest.raises(InvariantViolation):
            task_from_dict({"id": "t1", "type": "kis_visual", "duration_sec": 300})

    def test_unknown_type(self):
        with pytest.raises(MalformedTask):
            task_from_dict({"id": "t1", "type": "quiz", "duration_sec": 300})

    def test_duplicate_ids(self, tmp_path):
        doc = [
            {"id": "t1", "type": "avs", "duration_sec": 10,
             "relevant": [{"video": "v1", "shot_index": 0}]},
        ] * 2
        path = tmp_path / "tasks.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(MalformedTask):
            load_tasks(path)


class TestKisJudging:
    def test_inside_window_correct(self):
        judgment = judge(KIS_TASK, sub(KIS_TASK, "v3", 40.0, 60.0), [])
        assert judgment.verdict == "correct"
        assert judgment.score_delta == score_kis(60.0, 300.0, 0)

    def test_window_boundaries_inclusive(self):
        assert judge(KIS_TASK, sub(KIS_TASK, "v3", 30.0, 1.0), []).verdict == "correct"
        assert judge(KIS_TASK, sub(KIS_TASK, "v3", 50.0, 1.0), []).verdict == "correct"

    def test_just_below_window_wrong(self):
        judgment = judge(KIS_TASK, sub(KIS_TASK, "v3", 29.9, 1.0), [])
        assert judgment.verdict == "wrong"
        assert judgment.score_delta == 0.0

    def test_wrong_video(self):
        assert judge(KIS_TASK, sub(KIS_TASK, "v1", 40.0, 1.0), []).verdict == "wrong"

    def test_too_late(self):
        judgment = judge(KIS_TASK, sub(KIS_TASK, "v3", 40.0, 301.0), [])
        assert judgment.verdict == "too_late"
        assert judgment.score_delta == 0.0

    def test_wrong_submissions_penalize_later_correct(self):
        priors = [sub(KIS_TASK, "v1", 5.0, 10.0), sub(KIS_TASK, "v2", 5.0, 20.0)]
        judgment = judge(KIS_TASK, sub(KIS_TASK, "v3", 40.0, 30.0), priors)
        assert judgment.score_delta == score_kis(30.0, 300.0, 2)

    def test_other_sessions_do_not_penalize(self):
        priors = [sub(KIS_TASK, "v1", 5.0, 10.0, session="other")]
        judgment = judge(KIS_TASK, sub(KIS_TASK, "v3", 40.0, 30.0), priors)
        assert judgment.score_delta == score_kis(30.0, 300.0, 0)

    def test_second_correct_scores_zero(self):
        priors = [sub(KIS_TASK, "v3", 40.0, 30.0)]
        judgment = judge(KIS_TASK, sub(KIS_TASK, "v3", 45.0, 60.0), priors)
        assert judgment.verdict == "correct"
        assert judgment.score_delta == 0.0

    def test_task_mismatch(self):
        with pytest.raises(TaskMismatch):
            judge(KIS_TASK, sub(AVS_TASK, "v3", 40.0, 1.0), [])


class TestAvsJudging:
    def test_correct_then_duplicate(self):
        first = sub(AVS_TASK, "v1", 12.0, 10.0, shot=4)
        second = sub(AVS_TASK, "v1", 12.5, 20.0, shot=4)
        assert judge(AVS_TASK, first, []).verdict == "correct"
        assert judge(AVS_TASK, second, [first]).verdict == "duplicate"
        assert judge(AVS_TASK, second, [first]).score_delta == 0.0

    def test_duplicate_only_within_session(self):
        first = sub(AVS_TASK, "v1", 12.0, 10.0, shot=4, session="a")
        second = sub(AVS_TASK, "v1", 12.5, 20.0, shot=4, session="b")
        assert judge(AVS_TASK, second, [first]).verdict == "correct"

    def test_irrelevant_shot_wrong(self):
        assert judge(AVS_TASK, sub(AVS_TASK, "v9", 1.0, 5.0, shot=1), []).verdict == "wrong"

    def test_session_total_matches_formula(self):
        subs = [
            sub(AVS_TASK, "v1", 1.0, 10.0, shot=4),
            sub(AVS_TASK, "v9", 1.0, 20.0, shot=0),  # wrong
            sub(AVS_TASK, "v1", 1.0, 30.0, shot=7),
            sub(AVS_TASK, "v9", 1.0, 40.0, shot=3),  # wrong
            sub(AVS_TASK, "v2", 1.0, 50.0, shot=0),
        ]
        judgments = judge_all(AVS_TASK, subs)
        assert [j.verdict for j in judgments] == [
            "correct", "wrong", "correct", "wrong", "correct",
        ]
        assert sum(j.score_delta for j in judgments) == score_avs(3, 2) == 20.0

    def test_deltas_telescope_through_zero_clamp(self):
        subs = [
            sub(AVS_TASK, "v9", 1.0, 10.0, shot=0),  # wrong at total 0
            sub(AVS_TASK, "v1", 1.0, 20.0, shot=4),  # correct
            sub(AVS_TASK, "v9", 1.0, 30.0, shot=1),  # wrong
        ]
        judgments = judge_all(AVS_TASK, subs)
        # the first wrong is absorbed by the zero floor; deltas always sum to
        # the session total score_avs(correct, wrong)
        assert [j.score_delta for j in judgments] == [0.0, 5.0, -5.0]
        assert sum(j.score_delta for j in judgments) == score_avs(1, 2) == 0.0

    def test_correct_count_never_exceeds_relevant(self):
        subs = [
            sub(AVS_TASK, v, 1.0, float(i), shot=s)
            for i, (v, s) in enumerate([("v1", 4), ("v1", 7), ("v2", 0)] * 3)
        ]
        judgments = judge_all(AVS_TASK, subs)
        correct = sum(1 for j in judgments if j.verdict == "correct")
        assert correct == len(AVS_TASK.relevant)


class TestScoring:
    def test_kis_at_zero(self):
        assert score_kis(0.0, 300.0, 0) == 100.0

    def test_kis_at_duration(self):
        assert score_kis(300.0, 300.0, 0) == 50.0

    def test_kis_floor_zero(self):
        assert score_kis(300.0, 300.0, 9) == 0.0

    def test_avs_example(self):
        assert score_avs(3, 2) == 20.0

    def test_avs_floor_zero(self):
        assert score_avs(0, 4) == 0.0


class TestReplayDeterminism:
    def test_judge_all_replays_identically(self):
        subs = [
            sub(AVS_TASK, "v1", 1.0, 10.0, shot=4),
            sub(AVS_TASK, "v1", 1.0, 20.0, shot=4),
            sub(AVS_TASK, "v9", 1.0, 21.0, shot=0),
            sub(AVS_TASK, "v2", 1.0, 400.0, shot=0),  # too late
        ]
        first = judge_all(AVS_TASK, subs)
        second = judge_all(AVS_TASK, subs)
        assert first == second
        assert first[3] == Judgment(verdict="too_late", score_delta=0.0)

    def test_judge_consistent_with_judge_all(self):
        subs = [
            sub(AVS_TASK, "v1", 1.0, 10.0, shot=4),
            sub(AVS_TASK, "v9", 1.0, 20.0, shot=0),
            sub(AVS_TASK, "v1", 1.0, 30.0, shot=4),
        ]
        expected = judge_all(AVS_TASK, subs)
        for i, s in enumerate(subs):
            assert judge(AVS_TASK, s, subs[:i]) == expected[i]


class TestUsage:
    def event(self, feature, role="novice", task="t2", n=1):
        return [
            UsageEvent(
                session="s1", user="u1", role=role, task_id=task, feature=feature, at_sec=float(i)
            )
            for i in range(n)
        ]

    def test_counts_by_role_type_feature(self):
        log = UsageLog()
        for e in self.event("concept_search", n=3):
            record_usage(log, e)
        report = usage_report(log, [KIS_TASK, AVS_TASK])
        assert report == {("novice", "avs", "concept_search"): 3}

    def test_empty_log(self):
        assert usage_report(UsageLog(), [KIS_TASK]) == {}

    def test_unknown_task(self):
        log = UsageLog()
        record_usage(log, self.event("sketch", task="t9")[0])
        with pytest.raises(UnknownTask):
            usage_report(log, [KIS_TASK])

    def test_unknown_feature_rejected(self):
        with pytest.raises(ValueError):
            record_usage(UsageLog(), self.event("mind_reading")[0])

    def test_rows_sorted_and_csv(self):
        log = UsageLog()
        for feature in ("similarity_search", "concept_search", "map_search"):
            record_usage(log, self.event(feature, role="expert")[0])
        record_usage(log, self.event("concept_search", role="novice")[0])
        report = usage_report(log, [AVS_TASK])
        assert list(report) == [
            ("expert", "avs", "concept_search"),
            ("expert", "avs", "map_search"),
            ("expert", "avs", "similarity_search"),
            ("novice", "avs", "concept_search"),
        ]
        csv_text = report_to_csv(report)
        assert csv_text.splitlines()[0] == "role,task_type,feature,count"
        assert "expert,avs,map_search,1" in csv_text
