"""Exhaustive solver for alliance instances.

Necessary vertices are fixed in, forbidden vertices are fixed out, and
the determinations propagate through complementary pairs; what is left
over are the free vertices. Each chained pair component collapses to a
single binary choice (which of its two colour classes joins the
solution), so gadget-heavy reduced instances enumerate in a handful of
bits even when they have dozens of free vertices. Candidate evaluation
is vectorised: membership vectors are an affine function of the choice
bits and the defense counts come out of one matrix product per chunk.
"""

from collections import deque
from dataclasses import dataclass

import numpy as np

from .alliance import AllianceInstance

GOALS = ("decide", "minimum", "enumerate-all", "count")

DEFAULT_BUDGET = 22

_CHUNK_CELLS = 1 << 22


class BudgetExceededError(Exception):
    def __init__(self, free_count, budget):
        super().__init__(
            "%d free vertices exceed the enumeration budget of %d"
            % (free_count, budget)
        )
        self.free_count = free_count
        self.budget = budget


@dataclass(frozen=True)
class SolveRequest:
    instance: AllianceInstance
    goal: str
    budget: int = DEFAULT_BUDGET
    propagate: bool = False

    def __post_init__(self):
        if self.goal not in GOALS:
            raise ValueError("goal must be one of %s" % (", ".join(GOALS),))
        if self.budget < 0:
            raise ValueError("budget must be non-negative")


@dataclass(frozen=True)
class SolveResult:
    goal: str
    feasible: bool
    witness: frozenset = None
    size: int = None
    solutions: tuple = None
    count: int = None
    free_count: int = 0


def _set_key(members):
    return (len(members), tuple(x.sort_key() for x in sorted(members)))


def _determine(instance, propagate):
    """Fixpoint of the forced assignments; True is in, False is out.

    Pair propagation is always on. With propagate the defense counting
    rules kick in as well: a vertex that is in and cannot spare any of
    its undetermined neighbors forces them all in, and one that cannot
    reach a majority even with all of them is a dead end.
    """
    partners = {}
    for x, y in instance.pairs:
        partners.setdefault(x, []).append(y)
        partners.setdefault(y, []).append(x)
    status = {}
    queue = deque()
    conflict = False

    def assign(v, value):
        nonlocal conflict
        if v in status:
            if status[v] != value:
                conflict = True
            return
        status[v] = value
        queue.append(v)

    def drain():
        while queue and not conflict:
            v = queue.popleft()
            for p in partners.get(v, ()):
                assign(p, not status[v])

    for v in sorted(instance.necessary):
        assign(v, True)
    for v in sorted(instance.forbidden):
        assign(v, False)
    drain()
    if propagate:
        changed = True
        while changed and not conflict:
            changed = False
            for v in [u for u, value in sorted(status.items()) if value]:
                closed = instance.graph.closed_neighborhood(v)
                inside = sum(1 for u in closed if status.get(u) is True)
                undecided = [u for u in closed if u not in status]
                shortfall = max(0, (len(closed) - 2 * inside + 1) // 2)
                if shortfall > len(undecided):
                    conflict = True
                    break
                if undecided and shortfall == len(undecided):
                    for u in undecided:
                        assign(u, True)
                    drain()
                    changed = True
                if conflict:
                    break
    return status, conflict


def _choice_bits(instance, free):
    """Group the free vertices into binary choices.

    Returns a list of (in-when-set, in-when-clear) vertex tuples, one
    per bit, or None when some pair component has no exactly-one
    assignment at all.
    """
    free_set = set(free)
    adj = {v: [] for v in free}
    for x, y in instance.pairs:
        if x in free_set and y in free_set:
            adj[x].append(y)
            adj[y].append(x)
    bits = []
    color = {}
    for v in free:
        if v in color:
            continue
        if not adj[v]:
            color[v] = True
            bits.append(((v,), ()))
            continue
        component = {v: True}
        stack = [v]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w in component:
                    if component[w] == component[u]:
                        return None
                else:
                    component[w] = not component[u]
                    stack.append(w)
        color.update(component)
        ins = tuple(sorted(u for u, side in component.items() if side))
        outs = tuple(sorted(u for u, side in component.items() if not side))
        bits.append((ins, outs))
    return bits


def _empty_result(goal, free_count):
    solutions = () if goal == "enumerate-all" else None
    count = 0 if goal in ("count", "enumerate-all") else None
    return SolveResult(
        goal=goal,
        feasible=False,
        solutions=solutions,
        count=count,
        free_count=free_count,
    )


def solve(request):
    """Exact enumeration over the free vertices of the instance."""
    instance = request.instance
    goal = request.goal
    status, conflict = _determine(instance, request.propagate)
    free = sorted(v for v in instance.graph.vertices if v not in status)
    if conflict:
        return _empty_result(goal, len(free))
    if len(free) > request.budget:
        raise BudgetExceededError(len(free), request.budget)
    bits = _choice_bits(instance, free)
    if bits is None:
        return _empty_result(goal, len(free))

    vertices = instance.graph.sorted_vertices()
    index = {v: i for i, v in enumerate(vertices)}
    n = len(vertices)
    closed = np.eye(n, dtype=np.float32)
    for u, w in instance.graph.edges:
        closed[index[u], index[w]] = 1.0
        closed[index[w], index[u]] = 1.0
    degrees = closed.sum(axis=1)

    base = np.zeros(n, dtype=np.float32)
    fixed_in = [v for v, value in status.items() if value]
    for v in fixed_in:
        base[index[v]] = 1.0
    width = len(bits)
    shift = np.zeros((n, width), dtype=np.float32)
    for b, (ins, outs) in enumerate(bits):
        for v in outs:
            base[index[v]] += 1.0
            shift[index[v], b] = -1.0
        for v in ins:
            shift[index[v], b] = 1.0
    counts_base = closed @ base
    counts_shift = closed @ shift

    total = 1 << width
    chunk = max(64, min(1 << 14, _CHUNK_CELLS // max(n, 1)))
    fixed_members = sorted(fixed_in)
    best_key = None
    best_set = None
    collected = []
    count = 0
    for lo in range(0, total, chunk):
        masks = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
        t = (
            (masks[None, :] >> np.arange(width, dtype=np.int64)[:, None]) & 1
        ).astype(np.float32)
        member = base[:, None] + shift @ t
        defenders = counts_base[:, None] + counts_shift @ t
        ok = (member < 0.5) | (2.0 * defenders >= degrees[:, None])
        valid = ok.all(axis=0)
        sizes = member.sum(axis=0).round().astype(np.int64)
        if instance.mode == "exact":
            valid &= sizes == instance.k
        else:
            valid &= (sizes >= 1) & (sizes <= instance.k)
        hits = np.nonzero(valid)[0]
        count += len(hits)
        if goal == "count":
            continue
        for j in hits:
            mask = int(masks[j])
            members = list(fixed_members)
            for b, (ins, outs) in enumerate(bits):
                members.extend(ins if mask >> b & 1 else outs)
            candidate = frozenset(members)
            key = _set_key(candidate)
            if goal == "enumerate-all":
                collected.append((key, candidate))
            elif best_key is None or key < best_key:
                best_key = key
                best_set = candidate

    if goal == "count":
        return SolveResult(
            goal=goal, feasible=count > 0, count=count, free_count=len(free)
        )
    if goal == "enumerate-all":
        collected.sort(key=lambda pair: pair[0])
        solutions = tuple(s for _key, s in collected)
        return SolveResult(
            goal=goal,
            feasible=bool(solutions),
            witness=solutions[0] if solutions else None,
            size=len(solutions[0]) if solutions else None,
            solutions=solutions,
            count=len(solutions),
            free_count=len(free),
        )
    if best_set is None:
        return _empty_result(goal, len(free))
    return SolveResult(
        goal=goal,
        feasible=True,
        witness=best_set,
        size=len(best_set),
        free_count=len(free),
    )


def _connected_candidates(graph, limit):
    """Connected induced vertex sets of size at most limit, each one
    exactly once: sets are rooted at their least vertex and extended by
    larger neighbors, with skipped extensions barred from reuse."""
    order = graph.sorted_vertices()
    rank = {v: i for i, v in enumerate(order)}

    def grow(members, frontier, barred):
        yield members
        if len(members) == limit:
            return
        local_barred = set(barred)
        for i, u in enumerate(frontier):
            extra = [
                w
                for w in graph.neighbors(u)
                if rank[w] > rank[members[0]]
                and w not in members
                and w not in local_barred
                and w not in frontier[i + 1:]
            ]
            yield from grow(
                members + (u,), frontier[i + 1:] + extra, local_barred
            )
            local_barred.add(u)

    for v in order:
        frontier = [w for w in graph.neighbors(v) if rank[w] > rank[v]]
        yield from grow((v,), frontier, set())


def solve_connected_pruned(instance, goal="minimum"):
    """Minimum and decision answers from connected candidates only.

    A smallest non-empty defensive alliance is always connected, so for
    plain at-most instances this agrees with full enumeration. Exact
    sizes and constrained variants can have only disconnected answers
    and are rejected.
    """
    if instance.variant != "plain" or instance.mode != "at-most":
        raise ValueError(
            "connected search answers plain at-most instances only, got "
            "variant %s in %s mode" % (instance.variant, instance.mode)
        )
    if goal not in ("decide", "minimum"):
        raise ValueError('goal must be "decide" or "minimum", got %r' % (goal,))
    graph = instance.graph
    best_key = None
    best_set = None
    for members in _connected_candidates(graph, instance.k):
        candidate = set(members)
        defended = all(
            2 * sum(1 for u in graph.closed_neighborhood(v) if u in candidate)
            >= len(graph.closed_neighborhood(v))
            for v in members
        )
        if not defended:
            continue
        key = _set_key(candidate)
        if best_key is None or key < best_key:
            best_key = key
            best_set = frozenset(candidate)
    if best_set is None:
        return SolveResult(
            goal=goal, feasible=False, free_count=len(graph.vertices)
        )
    return SolveResult(
        goal=goal,
        feasible=True,
        witness=best_set,
        size=len(best_set),
        free_count=len(graph.vertices),
    )
