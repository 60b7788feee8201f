"""Finite simplicial graphs, induced P4 detection and cotrees.

A graph is P4-free exactly when it can be assembled from single vertices by
disjoint unions and joins; the assembly tree is the cotree.  Recognition
here is the plain recursive peel (components, then co-components), which is
quadratic per level but certifies every answer: success yields a cotree that
rebuilds the input, failure yields an induced path on four vertices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import DomainError


class GraphError(DomainError):
    pass


@dataclass(frozen=True)
class SimplicialGraph:
    vertices: tuple[str, ...]
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        vs = tuple(str(v) for v in self.vertices)
        object.__setattr__(self, "vertices", vs)
        if len(set(vs)) != len(vs):
            raise GraphError("duplicate vertex labels")
        known = set(vs)
        es = set()
        for e in self.edges:
            e = frozenset(str(x) for x in e)
            if len(e) != 2:
                raise GraphError(f"loop or malformed edge {sorted(e)}")
            if not e <= known:
                raise GraphError(f"edge {sorted(e)} has an endpoint outside the vertex list")
            es.add(e)
        object.__setattr__(self, "edges", frozenset(es))

    @classmethod
    def build(cls, vertices: Iterable, edges: Iterable[Sequence] = ()) -> "SimplicialGraph":
        """Like the constructor but rejects repeated edges instead of merging them."""
        seen = set()
        for e in edges:
            if len(e) != 2 or e[0] == e[1]:
                raise GraphError(f"loop or malformed edge {list(e)}")
            key = frozenset(map(str, e))
            if key in seen:
                raise GraphError(f"duplicate edge {list(e)}")
            seen.add(key)
        return cls(tuple(vertices), frozenset(seen))

    @classmethod
    def from_json(cls, data: Mapping) -> "SimplicialGraph":
        try:
            return cls.build(data["vertices"], data.get("edges", []))
        except (KeyError, TypeError) as exc:
            raise GraphError(f"malformed graph JSON: {exc}") from exc

    def to_json(self) -> dict:
        order = {v: i for i, v in enumerate(self.vertices)}
        edges = sorted((sorted(e, key=order.__getitem__) for e in self.edges),
                       key=lambda e: (order[e[0]], order[e[1]]))
        return {"vertices": list(self.vertices), "edges": edges}

    def adjacent(self, u, v) -> bool:
        return frozenset((u, v)) in self.edges

    def neighbors(self, v) -> set:
        return {w for e in self.edges if v in e for w in e if w != v}

    def adjacency(self) -> dict:
        adj = {v: set() for v in self.vertices}
        for e in self.edges:
            u, v = tuple(e)
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def induced(self, subset: Iterable) -> "SimplicialGraph":
        keep = set(subset)
        vs = tuple(v for v in self.vertices if v in keep)
        return SimplicialGraph(vs, frozenset(e for e in self.edges if e <= keep))

    def complement(self) -> "SimplicialGraph":
        es = frozenset(frozenset(p) for p in combinations(self.vertices, 2)) - self.edges
        return SimplicialGraph(self.vertices, es)

    def components(self) -> list[tuple[str, ...]]:
        adj = self.adjacency()
        seen, out = set(), []
        for v in self.vertices:
            if v in seen:
                continue
            comp, stack = [], [v]
            seen.add(v)
            while stack:
                x = stack.pop()
                comp.append(x)
                for y in adj[x]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            order = {u: i for i, u in enumerate(self.vertices)}
            out.append(tuple(sorted(comp, key=order.__getitem__)))
        return out


def disjoint_union(g: SimplicialGraph, h: SimplicialGraph) -> SimplicialGraph:
    if set(g.vertices) & set(h.vertices):
        raise GraphError("disjoint union needs disjoint vertex labels")
    return SimplicialGraph(g.vertices + h.vertices, g.edges | h.edges)


def join(g: SimplicialGraph, h: SimplicialGraph) -> SimplicialGraph:
    u = disjoint_union(g, h)
    cross = frozenset(frozenset((x, y)) for x in g.vertices for y in h.vertices)
    return SimplicialGraph(u.vertices, u.edges | cross)


@dataclass(frozen=True)
class P4Witness:
    path: tuple[str, str, str, str]

    def is_valid_for(self, g: SimplicialGraph) -> bool:
        v = self.path
        if len(set(v)) != 4:
            return False
        induced = {frozenset(p) for p in combinations(v, 2)} & g.edges
        return induced == {frozenset((v[0], v[1])), frozenset((v[1], v[2])), frozenset((v[2], v[3]))}

    def to_json(self) -> dict:
        return {"p4": list(self.path)}


@dataclass(frozen=True)
class Cotree:
    kind: str                      # "leaf", "union" or "join"
    vertex: str | None = None
    children: tuple["Cotree", ...] = ()

    def __post_init__(self):
        if self.kind == "leaf":
            if self.vertex is None or self.children:
                raise GraphError("a leaf carries exactly one vertex and no children")
        elif self.kind in ("union", "join"):
            if len(self.children) < 2:
                raise GraphError(f"{self.kind} node needs at least two children")
        else:
            raise GraphError(f"unknown cotree node kind {self.kind!r}")

    def leaves(self) -> list[str]:
        if self.kind == "leaf":
            return [self.vertex]
        return [v for c in self.children for v in c.leaves()]

    def is_canonical(self) -> bool:
        if self.kind == "leaf":
            return True
        return all(c.kind != self.kind and c.is_canonical() for c in self.children)

    def to_json(self) -> dict:
        if self.kind == "leaf":
            return {"kind": "leaf", "vertex": self.vertex}
        return {"kind": self.kind, "children": [c.to_json() for c in self.children]}

    @classmethod
    def from_json(cls, data: Mapping) -> "Cotree":
        if data.get("kind") == "leaf":
            return cls("leaf", vertex=str(data["vertex"]))
        return cls(data["kind"], children=tuple(cls.from_json(c) for c in data["children"]))


def find_induced_p4(g: SimplicialGraph) -> P4Witness | None:
    """Return an induced path ``(v1, v2, v3, v4)`` or ``None`` if ``g`` is P4-free.

    Every induced P4 has a middle edge ``v2 v3``; scanning middle edges in
    vertex order and pairing private neighbours of the two ends is exhaustive.
    """
    adj = g.adjacency()
    order = {v: i for i, v in enumerate(g.vertices)}
    middles = sorted((tuple(sorted(e, key=order.__getitem__)) for e in g.edges),
                     key=lambda e: (order[e[0]], order[e[1]]))
    for v2, v3 in middles:
        left = sorted(adj[v2] - adj[v3] - {v3}, key=order.__getitem__)
        right = sorted(adj[v3] - adj[v2] - {v2}, key=order.__getitem__)
        for v1 in left:
            for v4 in right:
                if v4 not in adj[v1]:
                    return P4Witness((v1, v2, v3, v4))
    return None


def build_cotree(g: SimplicialGraph) -> Cotree | P4Witness:
    """Cotree of ``g`` if it is a cograph, otherwise an induced P4 witness."""
    if not g.vertices:
        raise GraphError("cannot build a cotree of the empty graph")
    return _peel(g)


def _peel(g: SimplicialGraph) -> Cotree | P4Witness:
    if len(g.vertices) == 1:
        return Cotree("leaf", vertex=g.vertices[0])
    comps = g.components()
    kind = "union"
    if len(comps) == 1:
        comps = g.complement().components()
        kind = "join"
        if len(comps) == 1:
            w = find_induced_p4(g)
            if w is None:  # pragma: no cover - connected and co-connected graphs always contain P4
                raise AssertionError("connected, co-connected graph without induced P4")
            return w
    children = []
    for comp in comps:
        sub = _peel(g.induced(comp))
        if isinstance(sub, P4Witness):
            return sub
        children.append(sub)
    return Cotree(kind, children=tuple(children))


def cotree_to_graph(t: Cotree) -> SimplicialGraph:
    if t.kind == "leaf":
        return SimplicialGraph((t.vertex,))
    parts = [cotree_to_graph(c) for c in t.children]
    out = parts[0]
    for p in parts[1:]:
        out = join(out, p) if t.kind == "join" else disjoint_union(out, p)
    return out


def commutation_graph(labels: Sequence, commutes) -> SimplicialGraph:
    """Graph on ``labels`` with an edge exactly where ``commutes`` is true.

    ``commutes`` is a square table indexed by position (list of lists) or a
    mapping ``label -> label -> bool``.  The diagonal is ignored.
    """
    labels = [str(x) for x in labels]
    n = len(labels)

    def entry(i, j):
        if isinstance(commutes, Mapping):
            return bool(commutes[labels[i]][labels[j]])
        return bool(commutes[i][j])

    edges = set()
    for i in range(n):
        for j in range(i + 1, n):
            a, b = entry(i, j), entry(j, i)
            if a != b:
                raise GraphError(f"commutation table not symmetric at ({labels[i]}, {labels[j]})")
            if a:
                edges.add(frozenset((labels[i], labels[j])))
    return SimplicialGraph(tuple(labels), frozenset(edges))


def path_graph(labels: Sequence) -> SimplicialGraph:
    labels = [str(x) for x in labels]
    return SimplicialGraph(tuple(labels), frozenset(frozenset(p) for p in zip(labels, labels[1:])))


def p4_labeling(g: SimplicialGraph) -> dict | None:
    """Map the vertices of a P4 to the roles ``b - d - a - c``.

    Returns ``{"b": ..., "d": ..., "a": ..., "c": ...}`` or ``None`` if ``g``
    is not a path on four vertices.  When the labels already are ``a, b, c, d``
    with edges ``bd, da, ac`` the identity labeling is returned.
    """
    if len(g.vertices) != 4 or len(g.edges) != 3:
        return None
    w = find_induced_p4(g)
    if w is None or set(w.path) != set(g.vertices):
        return None
    roles = dict(zip("bdac", w.path))
    if set(g.vertices) == set("abcd"):
        rev = dict(zip("bdac", reversed(w.path)))
        for cand in (roles, rev):
            if all(cand[k] == k for k in "abcd"):
                return cand
    return roles
