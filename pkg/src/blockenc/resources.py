"""Query and gate accounting for oracles, encodings, and estimators.

Low-level objects carry a ``QueryCost`` that composes additively through the
calculus; top-level estimators assemble a ``ResourceLedger`` whose counts are
evaluated from the per-estimator formulas (degree formulas times amplitude-
estimation repetitions) and whose tree can be replayed to re-derive them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


def _merge(a: tuple, b: tuple, k: int = 1) -> tuple:
    out: dict[str, int] = dict(a)
    for label, count in b:
        out[label] = out.get(label, 0) + k * count
    return tuple(sorted(out.items()))


@dataclass(frozen=True)
class QueryCost:
    """Additive oracle-query and gate counter attached to values."""

    queries: tuple = ()        # ((oracle label, count to U and U^dag), ...)
    controlled: tuple = ()
    gates: int = 0

    @staticmethod
    def of(label: str, queries: int = 1, controlled: int = 0, gates: int = 0) -> "QueryCost":
        return QueryCost(queries=((label, queries),),
                         controlled=((label, controlled),) if controlled else (),
                         gates=gates)

    def __add__(self, other: "QueryCost") -> "QueryCost":
        return QueryCost(queries=_merge(self.queries, other.queries),
                         controlled=_merge(self.controlled, other.controlled),
                         gates=self.gates + other.gates)

    def scaled(self, k: int) -> "QueryCost":
        return QueryCost(queries=_merge((), self.queries, k),
                         controlled=_merge((), self.controlled, k),
                         gates=k * self.gates)

    def plus_gates(self, gates: int) -> "QueryCost":
        return QueryCost(self.queries, self.controlled, self.gates + gates)

    def query_count(self, label: str | None = None) -> int:
        if label is None:
            return sum(c for _, c in self.queries)
        return dict(self.queries).get(label, 0)


# ---------------------------------------------------------------------------
# Formula-level accounting for the estimators
# ---------------------------------------------------------------------------

def degree_formula(family: str, delta: float, epsilon: float, c: float = 0.0) -> int:
    """Asymptotic polynomial degree with the ladder's starting constant 4."""
    if family == "neg-power":
        return math.ceil(4.0 * (c + 1.0) / delta * math.log(1.0 / epsilon))
    if family == "sqrt-neglog":
        return math.ceil(4.0 / delta * math.log(1.0 / (delta * epsilon)))
    # pos-power, threshold, support-indicator, interior-indicator
    return math.ceil(4.0 / delta * math.log(1.0 / epsilon))


def ae_repetitions(bound: float, epsilon: float) -> int:
    """M = ceil(2 pi (2 sqrt(B)/eps + 1/sqrt(eps))) coherent repetitions."""
    if epsilon <= 0 or bound < 0:
        raise ValueError("need epsilon > 0 and bound >= 0")
    return math.ceil(2.0 * math.pi * (2.0 * math.sqrt(bound) / epsilon
                                      + 1.0 / math.sqrt(epsilon)))


def tree_query(label: str, count: int = 1) -> dict:
    return {"op": "query", "label": label, "count": int(count)}


def tree_repeat(times: int, body: dict) -> dict:
    return {"op": "repeat", "times": int(times), "body": body}


def tree_sum(*parts: dict) -> dict:
    return {"op": "sum", "parts": list(parts)}


def replay_tree(tree: dict) -> dict[str, int]:
    """Evaluate a cost tree to per-oracle query counts."""
    if tree["op"] == "query":
        return {tree["label"]: tree["count"]}
    if tree["op"] == "repeat":
        inner = replay_tree(tree["body"])
        return {k: tree["times"] * v for k, v in inner.items()}
    if tree["op"] == "sum":
        out: dict[str, int] = {}
        for part in tree["parts"]:
            for k, v in replay_tree(part).items():
                out[k] = out.get(k, 0) + v
        return out
    raise ValueError(f"unknown tree op {tree['op']!r}")


@dataclass(frozen=True)
class ResourceLedger:
    """Per-oracle query counters plus the symbolic gate-count expression."""

    queries: tuple = ()            # ((label, count), ...)
    controlled: tuple = ()
    gates: int = 0
    gate_expression: str = "0"
    tree: dict = field(default_factory=dict)
    expected_complexity: str = ""

    @staticmethod
    def from_tree(tree: dict, controlled: dict | None = None, gates: int = 0,
                  gate_expression: str = "0", expected: str = "") -> "ResourceLedger":
        counts = replay_tree(tree)
        return ResourceLedger(
            queries=tuple(sorted(counts.items())),
            controlled=tuple(sorted((controlled or {}).items())),
            gates=gates, gate_expression=gate_expression,
            tree=tree, expected_complexity=expected)

    def query_count(self, label: str | None = None) -> int:
        if label is None:
            return sum(c for _, c in self.queries)
        return dict(self.queries).get(label, 0)

    def replay_matches(self) -> bool:
        return dict(self.queries) == replay_tree(self.tree)

    def as_dict(self) -> dict:
        return {"queries": dict(self.queries), "controlled": dict(self.controlled),
                "gates": self.gates, "gate_expression": self.gate_expression,
                "tree": self.tree, "expected_complexity": self.expected_complexity}
