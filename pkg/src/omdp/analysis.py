"""Facet-vertex matrices and structural digraph checks.

A facet-vertex matrix records a program digraph column by column: the
nonzero rows of a column are the facets of that vertex, an entry of -1 means
the edge leaving that facet is directed away from the vertex, +1 that it is
directed toward it.  (The sign convention matches the fundamental-circuit
picture: a source column is -1 on all its facets.)
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field

from omdp.core import GroundSet, OmpDigraph


class MatrixDataError(ValueError):
    """Facet-vertex matrix text that does not describe a digraph."""


@dataclass(frozen=True)
class FacetVertexMatrix:
    """An n-facet by V-vertex sign matrix with d nonzeros per column."""

    d: int
    rows: tuple  # n rows, each a tuple of V entries in {-1, 0, +1}

    def __post_init__(self):
        widths = {len(r) for r in self.rows}
        if len(widths) != 1:
            raise MatrixDataError(f"ragged rows: widths {sorted(widths)}")
        for r in self.rows:
            for e in r:
                if e not in (-1, 0, 1):
                    raise MatrixDataError(f"entry {e!r} not in -1/0/+1")
        for v in range(self.n_vertices):
            support = self.column_support(v)
            if len(support) != self.d:
                raise MatrixDataError(
                    f"column {v} has {len(support)} nonzeros, expected {self.d}"
                )
        supports = [self.column_support(v) for v in range(self.n_vertices)]
        cols = {self.column(v) for v in range(self.n_vertices)}
        if len(cols) != self.n_vertices:
            raise MatrixDataError("duplicate columns")
        if len(set(supports)) != self.n_vertices:
            raise MatrixDataError("two columns name the same vertex")

    @property
    def n_facets(self) -> int:
        return len(self.rows)

    @property
    def n_vertices(self) -> int:
        return len(self.rows[0])

    def column(self, v: int) -> tuple:
        return tuple(r[v] for r in self.rows)

    def column_support(self, v: int) -> tuple:
        """The vertex named by column v, as a sorted facet tuple (1-based)."""
        return tuple(i + 1 for i, r in enumerate(self.rows) if r[v] != 0)

    def entry(self, facet: int, v: int) -> int:
        return self.rows[facet - 1][v]


def parse_facet_vertex_matrix(text: str, d: int) -> FacetVertexMatrix:
    """Parse matrix text; brackets and extra whitespace are tolerated."""
    rows = []
    for raw in text.splitlines():
        line = raw.strip().strip("[]").replace(",", " ")
        if not line:
            continue
        try:
            rows.append(tuple(int(tok) for tok in line.split()))
        except ValueError as exc:
            raise MatrixDataError(f"unreadable row: {raw!r}") from exc
    if not rows:
        raise MatrixDataError("no rows found")
    return FacetVertexMatrix(d, tuple(rows))


def emit_facet_vertex_matrix(matrix: FacetVertexMatrix) -> str:
    """Serialize as space-separated rows, one facet per line."""
    return "\n".join(" ".join(str(e) for e in row) for row in matrix.rows) + "\n"


def digraph_from_matrix(matrix: FacetVertexMatrix, d: int | None = None) -> OmpDigraph:
    """Read the digraph off a facet-vertex matrix.

    Vertices are the column supports; two columns sharing d-1 facets are
    adjacent; the arc leaves the vertex whose entry at its leaving facet is
    -1.  The two endpoint entries of an edge must be antisymmetric.
    """
    if d is not None and d != matrix.d:
        raise MatrixDataError(f"matrix carries d={matrix.d}, asked for d={d}")
    d = matrix.d
    n = matrix.n_facets
    ground = GroundSet(n=n, d=d)
    supports = [matrix.column_support(v) for v in range(matrix.n_vertices)]
    arcs = set()
    for v, w in itertools.combinations(range(matrix.n_vertices), 2):
        sv, sw = set(supports[v]), set(supports[w])
        shared = sv & sw
        if len(shared) != d - 1:
            continue
        fv = (sv - shared).pop()
        fw = (sw - shared).pop()
        ev = matrix.entry(fv, v)
        ew = matrix.entry(fw, w)
        if ev == ew:
            raise MatrixDataError(
                f"columns for {supports[v]} and {supports[w]} orient their "
                f"shared edge inconsistently"
            )
        arcs.add(
            (supports[v], supports[w]) if ev < 0 else (supports[w], supports[v])
        )
    return OmpDigraph(ground, frozenset(supports), frozenset(arcs), bounded=None)


def matrix_from_digraph(digraph: OmpDigraph) -> FacetVertexMatrix:
    """Rebuild the facet-vertex matrix of a digraph with full edge coverage."""
    vertices = sorted(digraph.vertices)
    index = {v: i for i, v in enumerate(vertices)}
    n = digraph.ground.n
    rows = [[0] * len(vertices) for _ in range(n)]
    degree = {v: 0 for v in vertices}
    for a, b in digraph.arcs:
        facet_a = (set(a) - set(b)).pop()
        facet_b = (set(b) - set(a)).pop()
        rows[facet_a - 1][index[a]] = -1
        rows[facet_b - 1][index[b]] = 1
        degree[a] += 1
        degree[b] += 1
    short = [v for v, deg in degree.items() if deg != digraph.ground.d]
    if short:
        raise MatrixDataError(
            f"digraph has vertices without a full edge set: {short[:3]}"
        )
    return FacetVertexMatrix(digraph.ground.d, tuple(tuple(r) for r in rows))


def shortest_monotone_distance(digraph: OmpDigraph, u, v):
    """Directed BFS distance from u to v; None when unreachable."""
    u, v = tuple(sorted(u)), tuple(sorted(v))
    if u not in digraph.vertices or v not in digraph.vertices:
        raise KeyError(f"unknown vertex {u if u not in digraph.vertices else v}")
    out = {w: [] for w in digraph.vertices}
    for a, b in digraph.arcs:
        out[a].append(b)
    dist = {u: 0}
    queue = deque([u])
    while queue:
        w = queue.popleft()
        if w == v:
            return dist[w]
        for x in out[w]:
            if x not in dist:
                dist[x] = dist[w] + 1
                queue.append(x)
    return None


@dataclass
class DigraphReport:
    """Structural facts: acyclicity, per-face extremes, outmaps, distances."""

    acyclic: bool
    bounded: bool | None
    outmap_sizes: dict
    face_count: int
    faces_without_unique_source: list
    faces_without_unique_sink: list
    global_source: tuple | None
    global_sink: tuple | None
    source_sink_distance: int | None
    sweep_source_property: bool | None

    @property
    def every_face_has_unique_extremes(self) -> bool:
        return not self.faces_without_unique_source and not self.faces_without_unique_sink

    def to_json(self) -> str:
        def key(face):
            return ",".join(map(str, face))

        payload = {
            "acyclic": self.acyclic,
            "bounded": self.bounded,
            "outmap_sizes": {key(v): s for v, s in sorted(self.outmap_sizes.items())},
            "face_count": self.face_count,
            "faces_without_unique_source": [
                key(f) for f in self.faces_without_unique_source
            ],
            "faces_without_unique_sink": [
                key(f) for f in self.faces_without_unique_sink
            ],
            "every_face_has_unique_extremes": self.every_face_has_unique_extremes,
            "global_source": key(self.global_source) if self.global_source else None,
            "global_sink": key(self.global_sink) if self.global_sink else None,
            "source_sink_distance": self.source_sink_distance,
            "sweep_source_property": self.sweep_source_property,
        }
        return json.dumps(payload, indent=2)


def _is_acyclic(vertices, out) -> bool:
    indeg = {v: 0 for v in vertices}
    for v in vertices:
        for w in out[v]:
            indeg[w] += 1
    queue = deque([v for v in vertices if indeg[v] == 0])
    seen = 0
    while queue:
        v = queue.popleft()
        seen += 1
        for w in out[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    return seen == len(vertices)


def digraph_checks(digraph: OmpDigraph) -> DigraphReport:
    """Compute the structural report for a digraph.

    Faces are represented by facet subsets of size < d with a nonempty vertex
    set; each must have a unique source and sink for the digraph to come from
    an admissible orientation.  When the digraph is acyclic with a unique
    global source v, the sweep property is verified: every vertex whose only
    possible predecessor is v is the source of its one facet off v.
    """
    vertices = sorted(digraph.vertices)
    d = digraph.ground.d
    out = {v: [] for v in vertices}
    inn = {v: [] for v in vertices}
    for a, b in digraph.arcs:
        out[a].append(b)
        inn[b].append(a)

    faces = set()
    for v in vertices:
        for size in range(0, d):
            faces.update(itertools.combinations(v, size))
    bad_source, bad_sink = [], []
    for face in sorted(faces):
        members = [v for v in vertices if set(face) <= set(v)]
        member_set = set(members)
        sources = [
            v for v in members if not any(a in member_set for a in inn[v])
        ]
        sinks = [
            v for v in members if not any(b in member_set for b in out[v])
        ]
        if len(sources) != 1:
            bad_source.append(face)
        if len(sinks) != 1:
            bad_sink.append(face)

    outmaps = {
        v: len({(set(v) - set(w)).pop() for w in out[v]}) for v in vertices
    }
    acyclic = _is_acyclic(vertices, out)

    global_sources = [v for v in vertices if not inn[v]]
    global_sinks = [v for v in vertices if not out[v]]
    source = global_sources[0] if len(global_sources) == 1 else None
    sink = global_sinks[0] if len(global_sinks) == 1 else None
    distance = (
        shortest_monotone_distance(digraph, source, sink)
        if source and sink
        else None
    )

    sweep = None
    if acyclic and source is not None:
        sweep = True
        for v in vertices:
            if v == source or set(inn[v]) - {source}:
                continue  # cannot be the second vertex of any sweep
            off = set(v) - set(source)
            if len(off) != 1:
                continue
            facet = off.pop()
            members = {w for w in vertices if facet in w}
            face_sources = [
                w for w in members if not any(a in members for a in inn[w])
            ]
            if face_sources != [v]:
                sweep = False
    return DigraphReport(
        acyclic=acyclic,
        bounded=digraph.bounded,
        outmap_sizes=outmaps,
        face_count=len(faces),
        faces_without_unique_source=bad_source,
        faces_without_unique_sink=bad_sink,
        global_source=source,
        global_sink=sink,
        source_sink_distance=distance,
        sweep_source_property=sweep,
    )
