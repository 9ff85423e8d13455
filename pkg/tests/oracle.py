"""Independent scoring oracle plus a random framework generator.

The oracle recomputes every node's mean bottom-up from a flat row list with a
dependency-count worklist; no recursion, no code shared with the engine.
Per-node sums are correctly rounded (math.fsum), the same numeric definition
of "mean" the engine uses, so matching nodes must match bit-for-bit. A
Fraction variant evaluates the identical means in exact rational arithmetic
to catch any systematic float bias.
"""

from __future__ import annotations

import math
from fractions import Fraction
from random import Random
from typing import Mapping, Union

from secready.taxonomy import (
    FrameworkDefinition,
    FrameworkNode,
    GradingScale,
)

Number = Union[float, Fraction]


def _flatten(definition: FrameworkDefinition) -> list[tuple[str, str, FrameworkNode]]:
    """(node_id, parent_id, node) rows via an explicit stack; "" parents the domains."""
    rows = []
    stack = [(d, "") for d in reversed(definition.domains)]
    while stack:
        node, parent = stack.pop()
        rows.append((node.id, parent, node))
        for child in reversed(node.children):
            stack.append((child, node.id))
    return rows


def _bottom_up(definition, answers, to_value, mean):
    rows = _flatten(definition)
    children: dict[str, list[str]] = {"": [d.id for d in definition.domains]}
    values: dict[str, Number] = {}
    pending: dict[str, int] = {"": len(definition.domains)}

    for node_id, parent, node in rows:
        if parent:
            children.setdefault(parent, [])
        if node.is_leaf:
            values[node_id] = to_value(answers[node_id])
        else:
            children[node_id] = [c.id for c in node.children]
            pending[node_id] = len(node.children)

    resolved = dict(values)
    while pending:
        progressed = False
        for node_id in list(pending):
            kids = children[node_id]
            if all(k in resolved for k in kids):
                resolved[node_id] = mean([resolved[k] for k in kids])
                del pending[node_id]
                progressed = True
        assert progressed, "dependency cycle in framework rows"
    return resolved


def flat_scores(definition: FrameworkDefinition, answers: Mapping[str, int]) -> dict[str, float]:
    """Float achievements for every node id, plus the top level under ``""``."""
    return _bottom_up(
        definition,
        answers,
        to_value=float,
        mean=lambda xs: math.fsum(xs) / len(xs),
    )


def exact_scores(definition: FrameworkDefinition, answers: Mapping[str, int]) -> dict[str, Fraction]:
    """Exact rational achievements for every node id, top level under ``""``."""
    return _bottom_up(
        definition,
        answers,
        to_value=Fraction,
        mean=lambda xs: sum(xs, Fraction(0)) / len(xs),
    )


# ---------------------------------------------------------------------------
# Random frameworks
# ---------------------------------------------------------------------------

def random_framework(
    rng: Random,
    min_depth: int = 2,
    max_depth: int = 6,
    max_fanout: int = 8,
) -> FrameworkDefinition:
    """Ragged random tree: leaves between min_depth and max_depth, fan-out 1..max_fanout."""
    target_depth = rng.randint(min_depth, max_depth)

    def build(prefix: str, depth: int, must_reach: int) -> FrameworkNode:
        node_id = prefix
        if depth >= must_reach:
            return FrameworkNode(
                id=node_id,
                name=f"leaf {node_id}",
                kind="leaf",
                question=f"Is item {node_id} in place?",
            )
        fanout = rng.randint(1, max_fanout)
        deep_child = rng.randrange(fanout)
        children = []
        for i in range(fanout):
            # One child keeps the target depth; the rest may bottom out earlier
            # (but never above min_depth).
            child_target = must_reach if i == deep_child else rng.randint(
                max(depth + 1, min_depth), must_reach
            )
            children.append(build(f"{node_id}.{i}", depth + 1, child_target))
        return FrameworkNode(id=node_id, name=f"group {node_id}", kind="aggregate", children=tuple(children))

    domain_count = rng.randint(1, max_fanout)
    deep_domain = rng.randrange(domain_count)
    domains = []
    for i in range(domain_count):
        domain_target = target_depth if i == deep_domain else rng.randint(min_depth, target_depth)
        domains.append(build(f"d{i}", 1, domain_target))

    return FrameworkDefinition(
        id=f"random-{rng.randrange(10**9)}",
        name="random framework",
        version="0",
        scale=GradingScale.default(),
        domains=tuple(domains),
    )


def random_answers(rng: Random, definition: FrameworkDefinition) -> dict[str, int]:
    values = definition.scale.values
    return {leaf.id: rng.choice(values) for leaf in definition.leaves}
