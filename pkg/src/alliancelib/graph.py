"""Undirected simple graphs over structured vertex identifiers.

The reductions in this package build gadget vertices on top of other
gadget vertices, so a vertex name has to say which role it plays and
which vertex, edge or pair it was derived from. A flat string cannot
carry that reliably once constructions are stacked, hence VertexId.
"""

import re
from dataclasses import dataclass


# role -> short tag used in the canonical string rendering
_TAGS = {
    "helper-h": "h",
    "edge-copy": "ec",
    "edge-copy-forbidden": "ecf",
    "chain-Y": "y",
    "chain-Y-forbidden": "yf",
    "chain-Z": "z",
    "chain-Z-forbidden": "zf",
    "triangle": "tri",
    "primed": "p",
    "fan-hub": "fh",
    "fan-leaf": "fl",
    "A-chain": "a",
    "A-chain-forbidden": "af",
    "g": "gv",
    "h": "hv",
    "g-forbidden": "gvf",
    "h-forbidden": "hvf",
}
_TAG_TO_DECORATION = {tag: dec for dec, tag in _TAGS.items()}

# decorations whose identity includes a second vertex name
_WITH_PARTNER = frozenset(
    ["edge-copy", "edge-copy-forbidden", "chain-Z", "chain-Z-forbidden", "triangle"]
)
# decorations carrying exactly one index
_ONE_INDEX = frozenset(
    [
        "helper-h",
        "edge-copy",
        "edge-copy-forbidden",
        "chain-Y",
        "chain-Y-forbidden",
        "chain-Z-forbidden",
        "fan-leaf",
        "A-chain",
        "A-chain-forbidden",
    ]
)
# decorations carrying no index ("chain-Z" may carry zero or one: the
# hub vertex of a chain has none, its elements have one)
_NO_INDEX = frozenset(
    ["original", "triangle", "primed", "fan-hub", "g", "h", "g-forbidden", "h-forbidden"]
)

_DECORATION_RANK = {dec: i for i, dec in enumerate(["original"] + sorted(_TAGS))}

_PLAIN_NAME = re.compile(r"[^\s./{}#]+\Z")
_TAIL = re.compile(r"([a-z]+)(\d+(?:_\d+)?)?\Z")


def _is_plain(name):
    return bool(_PLAIN_NAME.match(name))


def _atom(name):
    return name if _is_plain(name) else "{" + name + "}"


@dataclass(frozen=True)
class VertexId:
    """Structured vertex name: base vertex, gadget role, indices, partner.

    base names the vertex this one was derived from; for stacked
    constructions it holds the full rendering of the inner identifier.
    partner is the second vertex of an edge or pair gadget. The
    canonical rendering is base[.partner]/TAGindex, with non-plain
    atoms wrapped in braces, e.g. a.b/ec1 or {b/y3}/a1.
    """

    base: str
    decoration: str = "original"
    indices: tuple = ()
    partner: str = None

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(self.indices))
        if self.decoration != "original" and self.decoration not in _TAGS:
            raise ValueError("unknown vertex decoration: %r" % (self.decoration,))
        if not self.base or any(ch.isspace() for ch in self.base):
            raise ValueError("bad vertex base name: %r" % (self.base,))
        if self.base.count("{") != self.base.count("}"):
            raise ValueError("unbalanced braces in vertex base: %r" % (self.base,))
        if self.decoration == "original" and not _is_plain(self.base):
            raise ValueError(
                "plain vertex name %r may not contain '.', '/', braces or '#'"
                % (self.base,)
            )
        if (self.partner is not None) != (self.decoration in _WITH_PARTNER):
            raise ValueError(
                "decoration %r %s a partner vertex"
                % (self.decoration, "requires" if self.partner is None else "forbids")
            )
        if self.partner is not None and (
            not self.partner or any(ch.isspace() for ch in self.partner)
        ):
            raise ValueError("bad partner name: %r" % (self.partner,))
        if len(self.indices) > 2 or not all(
            isinstance(i, int) and i >= 0 for i in self.indices
        ):
            raise ValueError("indices must be at most two non-negative ints")
        if self.decoration in _ONE_INDEX and len(self.indices) != 1:
            raise ValueError("decoration %r takes exactly one index" % (self.decoration,))
        if self.decoration in _NO_INDEX and self.indices:
            raise ValueError("decoration %r takes no index" % (self.decoration,))

    def render(self):
        if self.decoration == "original":
            return self.base
        left = _atom(self.base)
        if self.partner is not None:
            left += "." + _atom(self.partner)
        tail = _TAGS[self.decoration] + "_".join(str(i) for i in self.indices)
        return left + "/" + tail

    def __str__(self):
        return self.render()

    def sort_key(self):
        return (self.base, _DECORATION_RANK[self.decoration], self.partner or "", self.indices)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __le__(self, other):
        return self.sort_key() <= other.sort_key()

    def __gt__(self, other):
        return self.sort_key() > other.sort_key()

    def __ge__(self, other):
        return self.sort_key() >= other.sort_key()


def _split_top_level(text, sep):
    """Split at sep occurrences that are not inside braces."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth < 0:
                raise ValueError("unbalanced braces in vertex name: %r" % (text,))
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise ValueError("unbalanced braces in vertex name: %r" % (text,))
    parts.append("".join(cur))
    return parts


def _parse_atom(text):
    if text.startswith("{") and text.endswith("}"):
        inner = text[1:-1]
        if not inner:
            raise ValueError("empty braced atom")
        return inner
    if not _is_plain(text):
        raise ValueError("bad vertex atom: %r" % (text,))
    return text


def parse_vertex(text):
    """Parse a canonical rendering back into a VertexId."""
    if not text or any(ch.isspace() for ch in text):
        raise ValueError("bad vertex name: %r" % (text,))
    pieces = _split_top_level(text, "/")
    if len(pieces) == 1:
        return VertexId(_parse_atom_plain_only(text))
    left, tail = "/".join(pieces[:-1]), pieces[-1]
    m = _TAIL.match(tail)
    if not m or m.group(1) not in _TAG_TO_DECORATION:
        raise ValueError("bad vertex role tag in %r" % (text,))
    decoration = _TAG_TO_DECORATION[m.group(1)]
    indices = tuple(int(p) for p in m.group(2).split("_")) if m.group(2) else ()
    atoms = _split_top_level(left, ".")
    if len(atoms) == 1:
        base, partner = _parse_atom(atoms[0]), None
    elif len(atoms) == 2:
        base, partner = _parse_atom(atoms[0]), _parse_atom(atoms[1])
    else:
        raise ValueError("too many '.' separators in %r" % (text,))
    return VertexId(base, decoration, indices, partner)


def _parse_atom_plain_only(text):
    if not _is_plain(text):
        raise ValueError("bad vertex name: %r" % (text,))
    return text


def edge_key(u, v):
    """Canonical unordered representation of an edge."""
    if u == v:
        raise ValueError("self loop at %s" % (u,))
    return (u, v) if u.sort_key() < v.sort_key() else (v, u)


class Graph:
    """Immutable undirected simple graph with deterministic iteration."""

    def __init__(self, vertices, edges=()):
        self.vertices = frozenset(vertices)
        es = set()
        for u, v in edges:
            if u not in self.vertices:
                raise ValueError("edge endpoint %s is not a vertex" % (u,))
            if v not in self.vertices:
                raise ValueError("edge endpoint %s is not a vertex" % (v,))
            es.add(edge_key(u, v))
        self.edges = frozenset(es)
        adj = {v: set() for v in self.vertices}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        self._adj = {v: tuple(sorted(ns)) for v, ns in adj.items()}

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __hash__(self):
        return hash((self.vertices, self.edges))

    def __contains__(self, v):
        return v in self.vertices

    def __repr__(self):
        return "Graph(%d vertices, %d edges)" % (len(self.vertices), len(self.edges))

    def _check(self, v):
        if v not in self.vertices:
            raise ValueError("unknown vertex: %s" % (v,))

    def sorted_vertices(self):
        return sorted(self.vertices)

    def sorted_edges(self):
        return sorted(self.edges, key=lambda e: (e[0].sort_key(), e[1].sort_key()))

    def neighbors(self, v):
        self._check(v)
        return self._adj[v]

    def degree(self, v):
        return len(self.neighbors(v))

    def open_neighborhood(self, v):
        return frozenset(self.neighbors(v))

    def closed_neighborhood(self, v):
        return frozenset(self.neighbors(v)) | {v}

    def has_edge(self, u, v):
        self._check(u)
        self._check(v)
        return edge_key(u, v) in self.edges

    def connected_components(self):
        """Partition of the vertices, ordered by least contained vertex."""
        seen = set()
        comps = []
        for start in self.sorted_vertices():
            if start in seen:
                continue
            comp = {start}
            stack = [start]
            while stack:
                for w in self._adj[stack.pop()]:
                    if w not in comp:
                        comp.add(w)
                        stack.append(w)
            seen |= comp
            comps.append(frozenset(comp))
        return comps

    def induced(self, subset):
        subset = frozenset(subset)
        for v in subset:
            self._check(v)
        edges = [e for e in self.edges if e[0] in subset and e[1] in subset]
        return Graph(subset, edges)


def graph_to_edgelist(g):
    """One edge per line as 'u v'; isolated vertices on their own line."""
    lines = ["%s %s" % (u, v) for u, v in g.sorted_edges()]
    covered = {x for e in g.edges for x in e}
    lines.extend(str(v) for v in g.sorted_vertices() if v not in covered)
    return "\n".join(lines) + ("\n" if lines else "")


def graph_from_edgelist(text):
    vertices = set()
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        try:
            if len(fields) == 1:
                vertices.add(parse_vertex(fields[0]))
            elif len(fields) == 2:
                u, v = parse_vertex(fields[0]), parse_vertex(fields[1])
                vertices.update((u, v))
                edges.append((u, v))
            else:
                raise ValueError("expected 'u v' or a single vertex")
        except ValueError as exc:
            raise ValueError("line %d: %s" % (lineno, exc)) from None
    return Graph(vertices, edges)


def graph_to_dot(g, name="G"):
    out = ["graph %s {" % name]
    for v in g.sorted_vertices():
        out.append('  "%s";' % v)
    for u, v in g.sorted_edges():
        out.append('  "%s" -- "%s";' % (u, v))
    out.append("}")
    return "\n".join(out) + "\n"
