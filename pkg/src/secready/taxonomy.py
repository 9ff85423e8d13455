"""Assessment framework trees: grading scale, node taxonomy, parsing and validation.

A framework is a tree of aggregate nodes (domains, control groups, controls)
whose leaves are assessment issues: the questions a human assessor actually
grades. Trees are arbitrary depth: domains sit at the top, leaves anywhere at
depth 2 or below. Definitions are immutable after construction and safe to
share across threads.

Framework files are YAML documents (JSON works too); the schema is documented
in docs/framework-file.md and docs/framework.schema.json.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterator, Optional, Union

import yaml

BUILTIN_ISO27001_ID = "iso27001"

DEFAULT_SCALE_LABELS = (
    (0, "not implementing"),
    (1, "below average"),
    (2, "average"),
    (3, "above average"),
    (4, "excellent"),
)


class FrameworkError(Exception):
    """Base for framework loading problems."""


class FrameworkSyntaxError(FrameworkError):
    """Document cannot be read into a tree at all (bad YAML, wrong shape).

    ``location`` carries "line:column" when the underlying parser reports one.
    """

    def __init__(self, message: str, location: Optional[str] = None):
        self.location = location
        super().__init__(f"{message} (at {location})" if location else message)


class FrameworkValidationError(FrameworkError):
    """Tree was built but breaks one or more invariants; carries all of them."""

    def __init__(self, violations: list["Violation"]):
        self.violations = violations
        lines = "; ".join(str(v) for v in violations)
        super().__init__(f"{len(violations)} violation(s): {lines}")


@dataclass(frozen=True)
class Violation:
    code: str
    node_id: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code}] {self.node_id}: {self.message}"


@dataclass(frozen=True)
class ScaleLevel:
    value: int
    label: str


@dataclass(frozen=True)
class GradingScale:
    """Ordered discrete grades, consecutive integers from 0, each with a label."""

    levels: tuple[ScaleLevel, ...]

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(lv.value for lv in self.levels)

    @property
    def max_value(self) -> int:
        return self.levels[-1].value

    def label_for(self, value: int) -> str:
        for lv in self.levels:
            if lv.value == value:
                return lv.label
        raise KeyError(value)

    @classmethod
    def default(cls) -> "GradingScale":
        return cls(tuple(ScaleLevel(v, l) for v, l in DEFAULT_SCALE_LABELS))


@dataclass(frozen=True)
class FrameworkNode:
    """One node of the assessment tree.

    Aggregates carry children; leaves carry the question an assessor grades.
    ``id`` is a dotted path extending the parent's id (e.g.
    "culture.incident_mgmt.13.2.1.q1"); ``iso_ref`` is the ISO clause number
    where one applies.
    """

    id: str
    name: str
    kind: str  # "aggregate" | "leaf"
    iso_ref: Optional[str] = None
    question: Optional[str] = None
    children: tuple["FrameworkNode", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return self.kind == "leaf"

    def walk(self) -> Iterator["FrameworkNode"]:
        """Pre-order traversal of this node and everything beneath it."""
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass(frozen=True)
class FrameworkDefinition:
    id: str
    name: str
    version: str
    scale: GradingScale
    domains: tuple[FrameworkNode, ...]

    def walk(self) -> Iterator[FrameworkNode]:
        for domain in self.domains:
            yield from domain.walk()

    @cached_property
    def _index(self) -> dict[str, FrameworkNode]:
        return {node.id: node for node in self.walk()}

    @cached_property
    def leaves(self) -> tuple[FrameworkNode, ...]:
        return tuple(n for n in self.walk() if n.is_leaf)

    @cached_property
    def controls(self) -> tuple[FrameworkNode, ...]:
        """Aggregate nodes all of whose children are leaves, in pre-order.

        For the bundled ISO 27001 framework these are the 21 essential
        controls; the structural rule keeps the notion meaningful on
        arbitrary-depth trees.
        """
        return tuple(
            n
            for n in self.walk()
            if not n.is_leaf and n.children and all(c.is_leaf for c in n.children)
        )

    @property
    def leaf_count(self) -> int:
        return len(self.leaves)


def find_node(definition: FrameworkDefinition, node_id: str) -> Optional[FrameworkNode]:
    """Return the node with ``node_id`` or None when no such node exists."""
    return definition._index.get(node_id)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def validate_framework(definition: FrameworkDefinition) -> list[Violation]:
    """Check every invariant; empty list means the definition is sound.

    Violations come back in deterministic order: scale problems first, then
    tree problems in pre-order.
    """
    violations: list[Violation] = []

    _validate_scale(definition.scale, violations)

    if not definition.id:
        violations.append(Violation("empty-framework-id", "", "framework id must be non-empty"))
    if not definition.domains:
        violations.append(Violation("no-domains", definition.id, "framework has no domains"))

    seen: dict[str, str] = {}
    for domain in definition.domains:
        if domain.is_leaf:
            violations.append(
                Violation(
                    "leaf-domain",
                    domain.id,
                    "top-level domains must be aggregates (tree depth >= 2)",
                )
            )
        _validate_node(domain, parent_id=None, seen=seen, violations=violations)

    return violations


def _validate_scale(scale: GradingScale, violations: list[Violation]) -> None:
    if len(scale.levels) < 2:
        violations.append(Violation("scale-too-small", "", "scale needs at least 2 levels"))
    expected = 0
    for lv in scale.levels:
        if lv.value != expected:
            violations.append(
                Violation(
                    "non-contiguous-scale",
                    "",
                    f"scale values must be consecutive integers from 0; got {lv.value} where {expected} expected",
                )
            )
            expected = lv.value
        expected += 1
        if not lv.label:
            violations.append(Violation("empty-scale-label", "", f"level {lv.value} has an empty label"))
    labels = [lv.label for lv in scale.levels]
    for label in sorted(set(l for l in labels if labels.count(l) > 1)):
        violations.append(Violation("duplicate-scale-label", "", f"label {label!r} used more than once"))


def _validate_node(
    node: FrameworkNode,
    parent_id: Optional[str],
    seen: dict[str, str],
    violations: list[Violation],
) -> None:
    if not node.id:
        violations.append(Violation("empty-id", "", "node id must be non-empty"))
    elif node.id in seen:
        violations.append(Violation("duplicate-id", node.id, "id already used elsewhere in the tree"))
    else:
        seen[node.id] = node.id

    if parent_id is not None and node.id and not node.id.startswith(parent_id + "."):
        violations.append(
            Violation("id-not-nested", node.id, f"id must extend parent path {parent_id!r} with a dot")
        )

    if not node.name:
        violations.append(Violation("empty-name", node.id, "node name must be non-empty"))

    if node.is_leaf:
        if not node.question:
            violations.append(Violation("missing-question", node.id, "leaf has no assessment question"))
        if node.children:
            violations.append(Violation("leaf-with-children", node.id, "leaves cannot have children"))
    elif node.kind == "aggregate":
        if not node.children:
            violations.append(Violation("empty-aggregate", node.id, "aggregate has no children"))
        for child in node.children:
            _validate_node(child, parent_id=node.id, seen=seen, violations=violations)
    else:
        violations.append(Violation("bad-kind", node.id, f"kind must be aggregate or leaf, not {node.kind!r}"))


# ---------------------------------------------------------------------------
# Parsing / serialization
# ---------------------------------------------------------------------------

def parse_framework(source: Union[str, Path]) -> FrameworkDefinition:
    """Load a framework document into a validated definition.

    ``source`` is YAML text or a path to a YAML file. Raises
    FrameworkSyntaxError when the document cannot be read into a tree
    (position-reported where the parser gives one) and
    FrameworkValidationError, carrying the full violation list, when the tree
    breaks an invariant. Never returns a partial tree.
    """
    if isinstance(source, Path):
        text = source.read_text(encoding="utf-8")
    else:
        text = source

    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        location = None
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            location = f"{mark.line + 1}:{mark.column + 1}"
        raise FrameworkSyntaxError(f"not valid YAML: {exc}", location) from exc

    definition = _definition_from_doc(doc)
    violations = validate_framework(definition)
    if violations:
        raise FrameworkValidationError(violations)
    return definition


def _definition_from_doc(doc: object) -> FrameworkDefinition:
    if not isinstance(doc, dict):
        raise FrameworkSyntaxError("framework document must be a mapping")

    for key in ("id", "name", "version", "scale", "domains"):
        if key not in doc:
            raise FrameworkSyntaxError(f"missing required key {key!r}")

    scale_doc = doc["scale"]
    if not isinstance(scale_doc, list):
        raise FrameworkSyntaxError("'scale' must be a list of {value, label} entries")
    levels = []
    for entry in scale_doc:
        if not isinstance(entry, dict) or "value" not in entry or "label" not in entry:
            raise FrameworkSyntaxError("each scale entry needs 'value' and 'label'")
        if not isinstance(entry["value"], int) or isinstance(entry["value"], bool):
            raise FrameworkSyntaxError("scale 'value' must be an integer")
        levels.append(ScaleLevel(entry["value"], str(entry["label"])))

    domains_doc = doc["domains"]
    if not isinstance(domains_doc, list):
        raise FrameworkSyntaxError("'domains' must be a list of nodes")

    return FrameworkDefinition(
        id=str(doc["id"]),
        name=str(doc["name"]),
        version=str(doc["version"]),
        scale=GradingScale(tuple(levels)),
        domains=tuple(_node_from_doc(d) for d in domains_doc),
    )


def _node_from_doc(doc: object) -> FrameworkNode:
    if not isinstance(doc, dict):
        raise FrameworkSyntaxError("every node must be a mapping")
    if "id" not in doc or "name" not in doc:
        raise FrameworkSyntaxError("every node needs 'id' and 'name'")
    if "children" in doc and "question" in doc:
        raise FrameworkSyntaxError(f"node {doc.get('id')!r} cannot have both children and a question")

    node_id = str(doc["id"])
    iso_ref = doc.get("iso_ref")
    if "children" in doc:
        children_doc = doc["children"]
        if not isinstance(children_doc, list):
            raise FrameworkSyntaxError(f"'children' of {node_id!r} must be a list")
        return FrameworkNode(
            id=node_id,
            name=str(doc["name"]),
            kind="aggregate",
            iso_ref=None if iso_ref is None else str(iso_ref),
            children=tuple(_node_from_doc(c) for c in children_doc),
        )
    return FrameworkNode(
        id=node_id,
        name=str(doc["name"]),
        kind="leaf",
        iso_ref=None if iso_ref is None else str(iso_ref),
        question=None if doc.get("question") is None else str(doc["question"]),
    )


def framework_to_doc(definition: FrameworkDefinition) -> dict:
    """Plain-dict form of a definition; parse_framework(yaml of it) round-trips."""
    return {
        "id": definition.id,
        "name": definition.name,
        "version": definition.version,
        "scale": [{"value": lv.value, "label": lv.label} for lv in definition.scale.levels],
        "domains": [_node_to_doc(d) for d in definition.domains],
    }


def serialize_framework(definition: FrameworkDefinition) -> str:
    return yaml.safe_dump(framework_to_doc(definition), sort_keys=False, allow_unicode=True)


def _node_to_doc(node: FrameworkNode) -> dict:
    doc: dict = {"id": node.id, "name": node.name}
    if node.iso_ref is not None:
        doc["iso_ref"] = node.iso_ref
    if node.is_leaf:
        doc["question"] = node.question
    else:
        doc["children"] = [_node_to_doc(c) for c in node.children]
    return doc


def builtin_iso27001() -> FrameworkDefinition:
    """The bundled ISO 27001 six-domain framework: 21 essential controls,
    42 representative assessment issues, default 0-4 scale."""
    ref = importlib.resources.files("secready.frameworks").joinpath("iso27001.yaml")
    return parse_framework(ref.read_text(encoding="utf-8"))
