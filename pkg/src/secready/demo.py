"""Sample assessment data for demos and smoke runs.

The grades mirror a published walkthrough of a six-domain readiness check:
strong policy and organization, mid-range technology and continuity practice,
weak stakeholder engagement. Grades are stated per control and spread to
every assessment issue beneath, so each control scores exactly its grade.
"""

from __future__ import annotations

from .scoring import AnswerSet
from .taxonomy import FrameworkDefinition, find_node

SAMPLE_CONTROL_GRADES: dict[str, int] = {
    "policy.5.1.1": 4,
    "tools_technology.12.2.1": 3,
    "tools_technology.12.2.2": 3,
    "tools_technology.12.2.3": 3,
    "tools_technology.12.2.4": 3,
    "tools_technology.12.6.1": 3,
    "organization.6.1.3": 4,
    "culture.incident_mgmt.13.2.1": 2,
    "culture.incident_mgmt.13.2.2": 3,
    "culture.incident_mgmt.13.2.3": 4,
    "culture.continuity.14.1.1": 3,
    "culture.continuity.14.1.2": 3,
    "culture.continuity.14.1.3": 3,
    "culture.continuity.14.1.4": 3,
    "culture.continuity.14.1.5": 3,
    "stakeholder.8.2.1": 2,
    "stakeholder.8.2.2": 2,
    "stakeholder.8.2.3": 2,
    "knowledge.15.1.2": 2,
    "knowledge.15.1.3": 3,
    "knowledge.15.1.4": 2,
}


def spread_to_leaves(definition: FrameworkDefinition, control_grades: dict[str, int]) -> AnswerSet:
    """Expand per-control grades to an AnswerSet grading every leaf beneath each control."""
    answers: dict[str, int] = {}
    for control_id, grade in control_grades.items():
        control = find_node(definition, control_id)
        if control is None:
            raise KeyError(f"no such control: {control_id}")
        for node in control.walk():
            if node.is_leaf:
                answers[node.id] = grade
    return AnswerSet(framework_id=definition.id, answers=answers)


def sample_answers(definition: FrameworkDefinition) -> AnswerSet:
    return spread_to_leaves(definition, SAMPLE_CONTROL_GRADES)
