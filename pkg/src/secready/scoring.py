"""Recursive mean aggregation over assessment trees.

Grades entered at the leaves roll up level by level: every aggregate node's
achievement is the arithmetic mean of its children's achievements, from the
deepest level to the top, whatever the tree depth. Priority is the complement
(ideal minus achievement) and quantifies where improvement effort should go.

Child sums use math.fsum so means are correctly rounded: reordering siblings
cannot change any score, and an independent bottom-up recomputation lands on
bit-identical values. All arithmetic is double precision; rounding for
display happens in reporting, never here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Mapping, Optional

from .taxonomy import FrameworkDefinition, FrameworkNode, GradingScale

AggregationMode = Literal["strict", "provisional"]


class ScoringError(Exception):
    """Base for answer/aggregation problems."""


class UnknownLeafError(ScoringError):
    def __init__(self, leaf_id: str, reason: str = "no such leaf in the framework"):
        self.leaf_id = leaf_id
        super().__init__(f"{leaf_id}: {reason}")


class GradeOutOfRangeError(ScoringError):
    def __init__(self, leaf_id: str, grade: object, scale: GradingScale):
        self.leaf_id = leaf_id
        self.grade = grade
        super().__init__(
            f"grade {grade!r} for {leaf_id} is not on the scale 0..{scale.max_value}"
        )


class IncompleteAnswersError(ScoringError):
    """Strict aggregation with unanswered leaves; carries the missing ids in pre-order."""

    def __init__(self, missing: list[str]):
        self.missing = missing
        shown = ", ".join(missing[:5]) + ("..." if len(missing) > 5 else "")
        super().__init__(f"{len(missing)} leaf/leaves unanswered: {shown}")


class NoAnswersError(ScoringError):
    """Provisional aggregation over an empty answer set: there is no result to report."""

    def __init__(self) -> None:
        self.coverage = 0.0
        super().__init__("no leaves answered; coverage 0, no achievement to report")


@dataclass(frozen=True)
class AnswerSet:
    """One session's grades: leaf id -> integer grade on the framework's scale."""

    framework_id: str
    answers: Mapping[str, int]


@dataclass(frozen=True)
class NodeScore:
    """Score annotations for one framework node.

    achievement/priority are None only in provisional results, on nodes with
    no answered leaf beneath them (such nodes are excluded from the parent
    mean but stay in the tree so their coverage is visible).
    """

    node_id: str
    label: str
    achievement: Optional[float]
    priority: Optional[float]
    coverage: float
    children: tuple["NodeScore", ...] = ()

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass(frozen=True)
class AggregateResult:
    framework_id: str
    root: NodeScore
    answered_count: int
    total_leaves: int
    mode: AggregationMode
    scale: GradingScale

    @property
    def domains(self) -> tuple[NodeScore, ...]:
        return self.root.children

    @property
    def overall_achievement(self) -> float:
        assert self.root.achievement is not None
        return self.root.achievement

    def score_for(self, node_id: str) -> Optional[NodeScore]:
        for score in self.root.walk():
            if score.node_id == node_id:
                return score
        return None


def validate_answers(definition: FrameworkDefinition, answers: AnswerSet) -> None:
    """Raise unless every key is a real leaf and every grade is on the scale."""
    values = set(definition.scale.values)
    for leaf_id, grade in answers.answers.items():
        node = definition._index.get(leaf_id)
        if node is None:
            raise UnknownLeafError(leaf_id)
        if not node.is_leaf:
            raise UnknownLeafError(leaf_id, "refers to an aggregate node, not a leaf")
        if not isinstance(grade, int) or isinstance(grade, bool) or grade not in values:
            raise GradeOutOfRangeError(leaf_id, grade, definition.scale)


def coverage_of(definition: FrameworkDefinition, answers: AnswerSet) -> float:
    """Fraction of the framework's leaves that have an answer."""
    validate_answers(definition, answers)
    total = definition.leaf_count
    answered = sum(1 for leaf in definition.leaves if leaf.id in answers.answers)
    return answered / total if total else 0.0


def aggregate(
    definition: FrameworkDefinition,
    answers: AnswerSet,
    mode: AggregationMode = "strict",
) -> AggregateResult:
    """Roll leaf grades up the tree and return the score-annotated mirror.

    strict: every leaf must be answered (IncompleteAnswersError lists the
    missing ids otherwise). provisional: unanswered leaves are left out of
    their parent's mean, nodes left with nothing beneath them are excluded
    from the level above, and coverage reports how much of the tree the
    result actually rests on.
    """
    validate_answers(definition, answers)

    if mode == "strict":
        missing = [leaf.id for leaf in definition.leaves if leaf.id not in answers.answers]
        if missing:
            raise IncompleteAnswersError(missing)
    elif mode != "provisional":
        raise ValueError(f"mode must be 'strict' or 'provisional', not {mode!r}")

    max_value = float(definition.scale.max_value)
    graded: Mapping[str, int] = answers.answers

    def score_node(node: FrameworkNode) -> tuple[NodeScore, int, int]:
        if node.is_leaf:
            if node.id in graded:
                achievement = float(graded[node.id])
                return (
                    NodeScore(node.id, node.name, achievement, max_value - achievement, 1.0),
                    1,
                    1,
                )
            return NodeScore(node.id, node.name, None, None, 0.0), 0, 1

        child_scores = []
        answered = 0
        total = 0
        for child in node.children:
            child_score, child_answered, child_total = score_node(child)
            child_scores.append(child_score)
            answered += child_answered
            total += child_total

        contributing = [c.achievement for c in child_scores if c.achievement is not None]
        if contributing:
            achievement: Optional[float] = math.fsum(contributing) / len(contributing)
            priority: Optional[float] = max_value - achievement
        else:
            achievement = None
            priority = None
        coverage = answered / total if total else 0.0
        return (
            NodeScore(node.id, node.name, achievement, priority, coverage, tuple(child_scores)),
            answered,
            total,
        )

    domain_scores = []
    answered_count = 0
    total_leaves = 0
    for domain in definition.domains:
        score, answered, total = score_node(domain)
        domain_scores.append(score)
        answered_count += answered
        total_leaves += total

    contributing = [d.achievement for d in domain_scores if d.achievement is not None]
    if not contributing:
        raise NoAnswersError()
    top_achievement = math.fsum(contributing) / len(contributing)
    root = NodeScore(
        node_id=definition.id,
        label=definition.name,
        achievement=top_achievement,
        priority=max_value - top_achievement,
        coverage=answered_count / total_leaves if total_leaves else 0.0,
        children=tuple(domain_scores),
    )
    return AggregateResult(
        framework_id=definition.id,
        root=root,
        answered_count=answered_count,
        total_leaves=total_leaves,
        mode=mode,
        scale=definition.scale,
    )


def priority_of(achievement: float, scale: GradingScale) -> float:
    """Gap between the ideal score and the achieved one."""
    _check_range(achievement, scale)
    return scale.max_value - achievement


def to_percent(achievement: float, scale: GradingScale) -> float:
    _check_range(achievement, scale)
    return achievement / scale.max_value * 100.0


def predicate_of(achievement: float, scale: GradingScale) -> str:
    """Verbal label of the nearest scale value; exact halves round up."""
    _check_range(achievement, scale)
    nearest = min(int(math.floor(achievement + 0.5)), scale.max_value)
    return scale.label_for(nearest)


def _check_range(achievement: float, scale: GradingScale) -> None:
    if not 0.0 <= achievement <= scale.max_value:
        raise ValueError(f"achievement {achievement!r} outside [0, {scale.max_value}]")
