from fractions import Fraction
from random import Random

import pytest

from oracle import exact_scores, flat_scores, random_answers, random_framework
from secready.demo import sample_answers
from secready.scoring import (
    AnswerSet,
    GradeOutOfRangeError,
    IncompleteAnswersError,
    NoAnswersError,
    UnknownLeafError,
    aggregate,
    coverage_of,
    predicate_of,
    priority_of,
    to_percent,
)
from secready.taxonomy import GradingScale

SCALE = GradingScale.default()


def all_grade(definition, grade):
    return AnswerSet(definition.id, {leaf.id: grade for leaf in definition.leaves})


# -- aggregate ----------------------------------------------------------------

def test_knowledge_2_3_2(iso, iso_sample_result):
    knowledge = next(d for d in iso_sample_result.domains if d.node_id == "knowledge")
    assert knowledge.achievement == pytest.approx(7 / 3, abs=0.01)
    # bit-exact against the frozen oracle value for mean(2, 3, 2)
    assert knowledge.achievement == 2.3333333333333335


def test_all_fours_propagate(iso):
    result = aggregate(iso, all_grade(iso, 4), "strict")
    for node in result.root.walk():
        assert node.achievement == 4.0
        assert node.priority == 0.0


def test_sample_domain_achievements(iso_sample_result):
    by_id = {d.node_id: d.achievement for d in iso_sample_result.domains}
    assert by_id["policy"] == 4.0
    assert by_id["tools_technology"] == 3.0
    assert by_id["organization"] == 4.0
    assert by_id["culture"] == 3.0  # mean over its 8 controls
    assert by_id["stakeholder"] == 2.0
    assert by_id["knowledge"] == pytest.approx(7 / 3, abs=0.01)


def test_sample_top_achievement(iso, iso_sample_answers, iso_sample_result):
    # Hand mean of the six domain means: (4 + 3 + 4 + 3 + 2 + 7/3) / 6 = 55/18.
    oracle = flat_scores(iso, iso_sample_answers.answers)
    assert iso_sample_result.overall_achievement == oracle[""]
    assert iso_sample_result.overall_achievement == pytest.approx(55 / 18, abs=1e-12)
    exact = exact_scores(iso, iso_sample_answers.answers)
    assert exact[""] == Fraction(55, 18)


def test_oracle_equivalence_random_trees(iso):
    rng = Random(20260809)
    for _ in range(50):
        definition = random_framework(rng)
        answers = random_answers(rng, definition)
        result = aggregate(definition, AnswerSet(definition.id, answers), "strict")
        oracle = flat_scores(definition, answers)
        for node in result.root.walk():
            expected = oracle[""] if node.node_id == definition.id else oracle[node.node_id]
            assert abs(node.achievement - expected) <= 1e-9


def test_strict_missing_leaves_listed(iso):
    answers = dict(sample_answers(iso).answers)
    removed = sorted(answers)[:3]
    for leaf_id in removed:
        del answers[leaf_id]
    with pytest.raises(IncompleteAnswersError) as err:
        aggregate(iso, AnswerSet(iso.id, answers), "strict")
    assert set(err.value.missing) == set(removed)


def test_unknown_leaf_rejected(iso):
    with pytest.raises(UnknownLeafError):
        aggregate(iso, AnswerSet(iso.id, {"no.such.leaf": 3}), "provisional")


def test_aggregate_node_id_rejected(iso):
    with pytest.raises(UnknownLeafError):
        aggregate(iso, AnswerSet(iso.id, {"policy.5.1.1": 3}), "provisional")


def test_grade_out_of_scale(iso):
    answers = dict(sample_answers(iso).answers)
    answers["policy.5.1.1.q1"] = 7
    with pytest.raises(GradeOutOfRangeError):
        aggregate(iso, AnswerSet(iso.id, answers), "strict")


def test_bool_grade_rejected(iso):
    with pytest.raises(GradeOutOfRangeError):
        aggregate(iso, AnswerSet(iso.id, {"policy.5.1.1.q1": True}), "provisional")


# -- provisional mode -----------------------------------------------------------

def test_provisional_excludes_unanswered(iso):
    # Only the policy subtree answered: its mean stands in for the top level.
    answers = {leaf.id: 4 for leaf in iso.leaves if leaf.id.startswith("policy.")}
    result = aggregate(iso, AnswerSet(iso.id, answers), "provisional")
    assert result.overall_achievement == 4.0
    assert result.answered_count == 2
    assert result.total_leaves == 42
    by_id = {d.node_id: d for d in result.domains}
    assert by_id["policy"].achievement == 4.0
    assert by_id["policy"].coverage == 1.0
    for domain_id in ("tools_technology", "organization", "culture", "stakeholder", "knowledge"):
        assert by_id[domain_id].achievement is None
        assert by_id[domain_id].priority is None
        assert by_id[domain_id].coverage == 0.0


def test_provisional_partial_control(iso):
    answers = {"knowledge.15.1.2.q1": 0, "knowledge.15.1.2.q2": 4, "knowledge.15.1.3.q1": 2}
    result = aggregate(iso, AnswerSet(iso.id, answers), "provisional")
    knowledge = next(d for d in result.domains if d.node_id == "knowledge")
    # 15.1.2 -> mean(0, 4) = 2; 15.1.3 -> 2 (single answered leaf); 15.1.4 excluded
    assert knowledge.achievement == 2.0
    assert knowledge.coverage == pytest.approx(3 / 6)


def test_provisional_zero_answers_signals_no_result(iso):
    with pytest.raises(NoAnswersError) as err:
        aggregate(iso, AnswerSet(iso.id, {}), "provisional")
    assert err.value.coverage == 0.0


def test_strict_mode_full_coverage(iso_sample_result):
    for node in iso_sample_result.root.walk():
        assert node.coverage == 1.0


# -- priority / percent / predicate / coverage ---------------------------------

def test_priority_examples():
    assert priority_of(4.0, SCALE) == 0.0
    assert priority_of(0.0, SCALE) == 4.0
    assert priority_of(2.6, SCALE) == pytest.approx(1.4)


def test_priority_range_check():
    with pytest.raises(ValueError):
        priority_of(4.5, SCALE)
    with pytest.raises(ValueError):
        priority_of(-0.1, SCALE)


def test_percent_examples():
    assert to_percent(4.0, SCALE) == 100.0
    assert to_percent(0.0, SCALE) == 0.0
    assert to_percent(2.66, SCALE) == pytest.approx(66.5)


def test_predicate_examples():
    assert predicate_of(4.0, SCALE) == "excellent"
    assert predicate_of(2.66, SCALE) == "above average"
    assert predicate_of(2.5, SCALE) == "above average"  # half rounds up


def test_predicate_buckets():
    assert predicate_of(0.0, SCALE) == "not implementing"
    assert predicate_of(0.49, SCALE) == "not implementing"
    assert predicate_of(0.5, SCALE) == "below average"
    assert predicate_of(1.49, SCALE) == "below average"
    assert predicate_of(1.5, SCALE) == "average"
    assert predicate_of(2.49, SCALE) == "average"
    assert predicate_of(3.49, SCALE) == "above average"
    assert predicate_of(3.5, SCALE) == "excellent"


def test_coverage_examples(iso):
    assert coverage_of(iso, all_grade(iso, 2)) == 1.0
    assert coverage_of(iso, AnswerSet(iso.id, {})) == 0.0
    half = {leaf.id: 1 for leaf in iso.leaves[:21]}
    assert coverage_of(iso, AnswerSet(iso.id, half)) == 0.5
