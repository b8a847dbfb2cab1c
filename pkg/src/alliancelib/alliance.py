"""Alliance problem instances and the defensive alliance predicate.

A candidate set S is a defensive alliance when every member has at
least as many closed neighbors inside S as outside, i.e. each member
can pair off its attackers with distinct defenders. Instances add a
spending limit k plus optional constraint sets: forbidden vertices can
never be picked, necessary vertices always must be, and each
complementary pair contributes exactly one endpoint.
"""

import json
import warnings
from dataclasses import dataclass

from .graph import Graph, edge_key, parse_vertex

MODES = ("at-most", "exact")


@dataclass(frozen=True)
class AllianceVerdict:
    """Outcome of the alliance check; violators lists every member that
    cannot pair off its attackers."""

    ok: bool
    violators: frozenset

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class Defense:
    """Witness that vertex survives: an injective map from its attackers
    (closed neighbors outside the set) to defenders (inside)."""

    vertex: object
    assignment: dict

    def __post_init__(self):
        values = list(self.assignment.values())
        if len(set(values)) != len(values):
            raise ValueError("defense assignment must be injective")


@dataclass(frozen=True)
class AllianceInstance:
    graph: Graph
    k: int
    forbidden: frozenset = frozenset()
    necessary: frozenset = frozenset()
    pairs: frozenset = frozenset()
    mode: str = "at-most"

    def __post_init__(self):
        object.__setattr__(self, "forbidden", frozenset(self.forbidden))
        object.__setattr__(self, "necessary", frozenset(self.necessary))
        object.__setattr__(self, "pairs", frozenset(edge_key(a, b) for a, b in self.pairs))
        if self.mode not in MODES:
            raise ValueError("mode must be one of %s" % (MODES,))
        if not isinstance(self.k, int) or self.k < 0:
            raise ValueError("k must be a non-negative integer")
        if self.k == 0 and self.mode == "at-most":
            raise ValueError("k = 0 leaves no room for a nonempty set in at-most mode")
        for name, group in (("forbidden", self.forbidden), ("necessary", self.necessary)):
            for u in group:
                if u not in self.graph.vertices:
                    raise ValueError("%s vertex %s is not in the graph" % (name, u))
        overlap = self.forbidden & self.necessary
        if overlap:
            raise ValueError(
                "vertex %s is both forbidden and necessary" % (sorted(overlap)[0],)
            )
        for a, b in self.pairs:
            for u in (a, b):
                if u not in self.graph.vertices:
                    raise ValueError("pair vertex %s is not in the graph" % (u,))
                if u in self.forbidden:
                    raise ValueError("pair vertex %s is forbidden" % (u,))
        shared = self.pairs & self.graph.edges
        if shared:
            warnings.warn(
                "%d complementary pair(s) coincide with graph edges; they are "
                "kept and collapse in the primal graph" % (len(shared),),
                stacklevel=2,
            )

    @property
    def variant(self):
        """Constraint profile: FNC with pairs, FN with necessary vertices,
        F with only forbidden ones, plain otherwise."""
        if self.pairs:
            return "FNC"
        if self.necessary:
            return "FN"
        if self.forbidden:
            return "F"
        return "plain"


def is_defensive_alliance(graph, candidate):
    """Check the counting condition at every member of candidate."""
    candidate = frozenset(candidate)
    for u in candidate:
        if u not in graph.vertices:
            raise ValueError("candidate vertex %s is not in the graph" % (u,))
    violators = set()
    for u in candidate:
        closed = graph.closed_neighborhood(u)
        if 2 * len(closed & candidate) < len(closed):
            violators.add(u)
    return AllianceVerdict(not violators, frozenset(violators))


def construct_defense(graph, candidate, vertex):
    """Injective attacker-to-defender map for vertex, or None.

    None is returned exactly when the vertex is outnumbered, so a
    candidate is a defensive alliance iff every member gets a defense.
    """
    candidate = frozenset(candidate)
    if vertex not in candidate:
        raise ValueError("vertex %s is not in the candidate set" % (vertex,))
    closed = graph.closed_neighborhood(vertex)
    attackers = sorted(closed - candidate)
    defenders = sorted(closed & candidate)
    if len(attackers) > len(defenders):
        return None
    return Defense(vertex, dict(zip(attackers, defenders)))


def is_solution(instance, candidate):
    """Solution test: size within budget, constraints met, alliance holds."""
    candidate = frozenset(candidate)
    for u in candidate:
        if u not in instance.graph.vertices:
            raise ValueError("candidate vertex %s is not in the graph" % (u,))
    if instance.mode == "exact":
        if len(candidate) != instance.k:
            return False
    else:
        if not 1 <= len(candidate) <= instance.k:
            return False
    if not candidate:
        return False
    if candidate & instance.forbidden:
        return False
    if not instance.necessary <= candidate:
        return False
    for a, b in instance.pairs:
        if (a in candidate) == (b in candidate):
            return False
    return bool(is_defensive_alliance(instance.graph, candidate))


def primal_graph(instance):
    """Instance graph with every complementary pair added as an edge."""
    return Graph(
        instance.graph.vertices, list(instance.graph.edges) + list(instance.pairs)
    )


def instance_to_json(instance):
    payload = {
        "vertices": [str(u) for u in instance.graph.sorted_vertices()],
        "edges": [[str(u), str(w)] for u, w in instance.graph.sorted_edges()],
        "k": instance.k,
        "forbidden": [str(u) for u in sorted(instance.forbidden)],
        "necessary": [str(u) for u in sorted(instance.necessary)],
        "pairs": [
            [str(a), str(b)]
            for a, b in sorted(instance.pairs, key=lambda p: (p[0].sort_key(), p[1].sort_key()))
        ],
        "mode": instance.mode,
    }
    return json.dumps(payload, indent=2) + "\n"


def _parse_vertex_field(raw, context):
    if not isinstance(raw, str):
        raise ValueError("%s: expected a vertex name, got %r" % (context, raw))
    try:
        return parse_vertex(raw)
    except ValueError as exc:
        raise ValueError("%s: %s" % (context, exc)) from None


def _parse_vertex_pairs(raw, what):
    if not isinstance(raw, list):
        raise ValueError("field %r must be a list" % (what,))
    out = []
    for i, item in enumerate(raw):
        if not isinstance(item, list) or len(item) != 2:
            raise ValueError("%s %d must be a [u, v] pair" % (what, i))
        out.append(
            (
                _parse_vertex_field(item[0], "%s %d" % (what, i)),
                _parse_vertex_field(item[1], "%s %d" % (what, i)),
            )
        )
    return out


def instance_from_json(text):
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError("invalid JSON: %s" % (exc,)) from None
    if not isinstance(payload, dict):
        raise ValueError("instance document must be a JSON object")
    for required in ("vertices", "edges", "k"):
        if required not in payload:
            raise ValueError("missing field: %s" % (required,))
    vertices = [
        _parse_vertex_field(x, "vertex %d" % (i,))
        for i, x in enumerate(payload["vertices"])
    ]
    edges = _parse_vertex_pairs(payload["edges"], "edge")
    k = payload["k"]
    if not isinstance(k, int):
        raise ValueError("field 'k' must be an integer")
    graph = Graph(vertices, edges)
    forbidden = [
        _parse_vertex_field(x, "forbidden %d" % (i,))
        for i, x in enumerate(payload.get("forbidden", []))
    ]
    necessary = [
        _parse_vertex_field(x, "necessary %d" % (i,))
        for i, x in enumerate(payload.get("necessary", []))
    ]
    pairs = _parse_vertex_pairs(payload.get("pairs", []), "pair")
    mode = payload.get("mode", "at-most")
    return AllianceInstance(
        graph,
        k=k,
        forbidden=frozenset(forbidden),
        necessary=frozenset(necessary),
        pairs=frozenset(pairs),
        mode=mode,
    )
