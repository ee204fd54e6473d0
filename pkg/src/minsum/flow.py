"""Min-cost flow with arc lower bounds.

Successive shortest augmenting paths with node potentials: every
iteration runs Dijkstra on reduced costs ``c(u, v) + pi(u) - pi(v)``,
which stay non-negative, then augments along the shortest path. With
integer capacities every augmentation is integral, so the optimum found is
an integral flow.

Lower bounds are removed first by shipping ``l`` units on each bounded arc
up front and balancing the resulting node excesses through a super source
and super sink.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Arc:
    tail: int
    head: int
    capacity: int
    lower_bound: int = 0
    cost: float = 0.0


@dataclass
class FlowNetwork:
    """Directed network that must carry ``required_flow`` from source to sink.

    Parameters
    ----------
    n_nodes : int
    arcs : list of Arc
        Arc order matters: shortest-path ties go to the lowest arc index.
    source, sink : int
    required_flow : int
    """

    n_nodes: int
    arcs: list = field(default_factory=list)
    source: int = 0
    sink: int = 1
    required_flow: int = 0
    notes: list = field(default_factory=list)

    def add_arc(self, tail, head, capacity, lower_bound=0, cost=0.0) -> int:
        self.arcs.append(Arc(int(tail), int(head), int(capacity), int(lower_bound), float(cost)))
        return len(self.arcs) - 1

    def validate(self) -> None:
        if not (0 <= self.source < self.n_nodes and 0 <= self.sink < self.n_nodes):
            raise ValueError("source/sink outside node range")
        if self.required_flow < 0:
            raise ValueError("required_flow must be non-negative")
        for i, a in enumerate(self.arcs):
            if a.tail == a.head:
                raise ValueError(f"arc {i} is a self-loop")
            if not (0 <= a.tail < self.n_nodes and 0 <= a.head < self.n_nodes):
                raise ValueError(f"arc {i} endpoint outside node range")
            if not 0 <= a.lower_bound <= a.capacity:
                raise ValueError(f"arc {i} needs 0 <= lower_bound <= capacity")
            if not (math.isfinite(a.cost) and a.cost >= 0):
                raise ValueError(f"arc {i} cost must be finite and >= 0")

    def dump(self, flow=None) -> str:
        """Arc-list text: a header line, then ``idx tail head cap lb cost [flow]``."""
        lines = [f"# nodes {self.n_nodes} source {self.source} sink {self.sink} required {self.required_flow}"]
        for i, a in enumerate(self.arcs):
            row = f"{i} {a.tail} {a.head} {a.capacity} {a.lower_bound} {a.cost!r}"
            if flow is not None:
                row += f" {int(flow[i])}"
            lines.append(row)
        return "\n".join(lines) + "\n"

    @classmethod
    def parse_dump(cls, text) -> "FlowNetwork":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        head = lines[0].split()
        vals = dict(zip(head[1::2], head[2::2]))
        net = cls(int(vals["nodes"]), [], int(vals["source"]), int(vals["sink"]), int(vals["required"]))
        for ln in lines[1:]:
            _, t, h, cap, lb, cost, *_ = ln.split()
            net.add_arc(int(t), int(h), int(cap), int(lb), float(cost))
        return net


@dataclass
class FlowSolution:
    flow: np.ndarray
    total_cost: float
    feasible: bool
    potentials: np.ndarray | None = None


def eliminate_lower_bounds(net: FlowNetwork):
    """Equivalent network without lower bounds, plus the cost already committed.

    Arc ``i`` of the result corresponds to arc ``i`` of ``net`` with capacity
    ``capacity - lower_bound``; auxiliary arcs follow. Optimum of the
    original equals optimum of the result plus ``offset``.

    Returns
    -------
    (FlowNetwork, float)
        When no arc has a positive lower bound the network is returned
        unchanged with offset 0.
    """
    net.validate()
    if all(a.lower_bound == 0 for a in net.arcs):
        return net, 0.0
    n = net.n_nodes
    supply = np.zeros(n, dtype=np.int64)
    supply[net.source] += net.required_flow
    supply[net.sink] -= net.required_flow
    out = FlowNetwork(n + 2, [], n, n + 1, 0)
    offset = 0.0
    for a in net.arcs:
        out.add_arc(a.tail, a.head, a.capacity - a.lower_bound, 0, a.cost)
        supply[a.tail] -= a.lower_bound
        supply[a.head] += a.lower_bound
        offset += a.lower_bound * a.cost
    for v in range(n):
        if supply[v] > 0:
            out.add_arc(n, v, int(supply[v]), 0, 0.0)
            out.required_flow += int(supply[v])
        elif supply[v] < 0:
            out.add_arc(v, n + 1, int(-supply[v]), 0, 0.0)
    return out, offset


def _ssp(net: FlowNetwork):
    """Successive shortest paths on a network without lower bounds."""
    n = net.n_nodes
    m = len(net.arcs)
    # Residual edge 2a is arc a forward, 2a+1 its reverse.
    to = [0] * (2 * m)
    cap = [0] * (2 * m)
    cost = [0.0] * (2 * m)
    adj = [[] for _ in range(n)]
    for i, a in enumerate(net.arcs):
        to[2 * i], cap[2 * i], cost[2 * i] = a.head, a.capacity, a.cost
        to[2 * i + 1], cap[2 * i + 1], cost[2 * i + 1] = a.tail, 0, -a.cost
        adj[a.tail].append(2 * i)
        adj[a.head].append(2 * i + 1)
    for lst in adj:
        lst.sort()
    pi = [0.0] * n
    s, t = net.source, net.sink
    remaining = net.required_flow
    inf = math.inf
    while remaining > 0:
        dist = [inf] * n
        prev = [-1] * n
        done = [False] * n
        dist[s] = 0.0
        heap = [(0.0, s)]
        while heap:
            d, u = heapq.heappop(heap)
            if done[u]:
                continue
            done[u] = True
            pu = pi[u]
            for e in adj[u]:
                if cap[e] <= 0:
                    continue
                v = to[e]
                if done[v]:
                    continue
                rc = cost[e] + pu - pi[v]
                if rc < 0.0:
                    rc = 0.0  # float noise on zero-reduced-cost edges
                nd = d + rc
                if nd < dist[v]:
                    dist[v] = nd
                    prev[v] = e
                    heapq.heappush(heap, (nd, v))
        if dist[t] == inf:
            return None, pi
        dmax = max(x for x in dist if x < inf)
        for v in range(n):
            pi[v] += dist[v] if dist[v] < inf else dmax
        push = remaining
        v = t
        while v != s:
            e = prev[v]
            push = min(push, cap[e])
            v = to[e ^ 1]
        v = t
        while v != s:
            e = prev[v]
            cap[e] -= push
            cap[e ^ 1] += push
            v = to[e ^ 1]
        remaining -= push
    flow = np.array([cap[2 * i + 1] for i in range(m)], dtype=np.int64)
    return flow, pi


def solve_min_cost_flow(net: FlowNetwork) -> FlowSolution:
    """Integral minimum-cost flow of value ``required_flow``.

    Returns
    -------
    FlowSolution
        ``feasible`` is False (with zero flow and infinite cost) when the
        required value cannot be routed within the bounds.
    """
    net.validate()
    reduced, offset = eliminate_lower_bounds(net)
    m = len(net.arcs)
    flow2, pi = _ssp(reduced)
    if flow2 is None:
        return FlowSolution(np.zeros(m, dtype=np.int64), math.inf, False, None)
    lb = np.array([a.lower_bound for a in net.arcs], dtype=np.int64)
    flow = flow2[:m] + lb
    total = float(sum(a.cost * int(f) for a, f in zip(net.arcs, flow)))
    return FlowSolution(flow, total, True, np.array(pi[: net.n_nodes]))


def check_flow(net: FlowNetwork, sol: FlowSolution, tol=1e-9) -> list:
    """Return a list of violated invariants (empty when the solution is valid).

    Checks integrality, bounds, conservation, the delivered value and, when
    potentials are present, non-negative reduced costs on every residual arc.
    """
    problems = []
    flow = np.asarray(sol.flow)
    if flow.dtype.kind not in "iu":
        problems.append("flow is not integer typed")
    bal = np.zeros(net.n_nodes, dtype=np.int64)
    for i, (a, f) in enumerate(zip(net.arcs, flow)):
        if not a.lower_bound <= f <= a.capacity:
            problems.append(f"arc {i} flow {f} outside [{a.lower_bound}, {a.capacity}]")
        bal[a.tail] -= f
        bal[a.head] += f
    for v in range(net.n_nodes):
        want = -net.required_flow if v == net.source else net.required_flow if v == net.sink else 0
        if net.source == net.sink:
            want = 0
        if bal[v] != want:
            problems.append(f"node {v} imbalance {bal[v]} (expected {want})")
    if sol.potentials is not None:
        pi = sol.potentials
        scale = max([1.0] + [abs(a.cost) for a in net.arcs])
        for i, (a, f) in enumerate(zip(net.arcs, flow)):
            rc = a.cost + pi[a.tail] - pi[a.head]
            if f < a.capacity and rc < -tol * scale:
                problems.append(f"arc {i} forward residual reduced cost {rc}")
            if f > a.lower_bound and -rc < -tol * scale:
                problems.append(f"arc {i} backward residual reduced cost {-rc}")
    return problems
