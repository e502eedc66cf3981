"""Combinatorial types of monotone paths between complementary vertices.

A path type is a sequence of d-element vertex labels from the source label
``{1..d}`` to the sink label (the last d facets).  Valid types obey three
local rules: a newly entered facet persists for at least one more step, a
facet just left cannot return immediately, and neighbors of the source/sink
appear only right next to them.  The canonical one-revisit templates for the
campaign cases are embedded as literal data and re-validated by the tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass


@dataclass(frozen=True)
class PathType:
    """A labelled path: ``labels[i]`` is the i-th vertex as an ordered d-tuple."""

    d: int
    n: int
    labels: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(tuple(v) for v in self.labels))

    @property
    def length(self) -> int:
        return len(self.labels) - 1

    def label_sets(self) -> tuple:
        """The vertex labels as sorted tuples; the canonical identity of the path."""
        return tuple(tuple(sorted(v)) for v in self.labels)

    def source_label(self) -> tuple:
        return tuple(sorted(self.labels[0]))

    def sink_label(self) -> tuple:
        return tuple(sorted(self.labels[-1]))


@dataclass(frozen=True)
class PathFamily:
    """A canonical template plus the facet groups whose permutations act on it."""

    name: str
    template: PathType
    source_facets: tuple
    sink_facets: tuple


def _campaign_endpoints(d: int, n: int):
    return tuple(range(1, d + 1)), tuple(range(n - d + 1, n + 1))


def direct_path_types(d: int, n: int | None = None):
    """All (d!)^2 shortest path types from ``{1..d}`` to the last d facets.

    The pair of permutations (p, q) gives the order in which source facets
    leave and sink facets enter; step i replaces p(i) by q(i) in place.
    """
    if n is None:
        n = 2 * d
    source, sink = _campaign_endpoints(d, n)
    out = []
    for p in itertools.permutations(source):
        for q in itertools.permutations(sink):
            labels = [list(source)]
            for leave, enter in zip(p, q):
                nxt = list(labels[-1])
                nxt[nxt.index(leave)] = enter
                labels.append(nxt)
            out.append(PathType(d, n, tuple(tuple(v) for v in labels)))
    return out


# Canonical one-revisit templates, one list per campaign case.  The (5,10)
# length-6 list: the first four revisit a sink facet, the last four are their
# reversals and revisit a source facet.
_TEMPLATES = {
    "sm-5-10-len6": (
        5,
        10,
        [
            [[1, 2, 3, 4, 5], [6, 2, 3, 4, 5], [6, 7, 3, 4, 5], [8, 7, 3, 4, 5],
             [8, 7, 9, 4, 5], [8, 7, 9, 6, 5], [8, 7, 9, 6, 10]],
            [[1, 2, 3, 4, 5], [6, 2, 3, 4, 5], [6, 7, 3, 4, 5], [8, 7, 3, 4, 5],
             [8, 7, 9, 4, 5], [8, 7, 9, 10, 5], [8, 7, 9, 10, 6]],
            [[1, 2, 3, 4, 5], [6, 2, 3, 4, 5], [6, 7, 3, 4, 5], [6, 7, 8, 4, 5],
             [9, 7, 8, 4, 5], [9, 7, 8, 10, 5], [9, 7, 8, 10, 6]],
            [[1, 2, 3, 4, 5], [6, 2, 3, 4, 5], [6, 7, 3, 4, 5], [6, 7, 8, 4, 5],
             [6, 9, 8, 4, 5], [6, 9, 8, 10, 5], [6, 9, 8, 10, 7]],
            [[1, 2, 3, 4, 5], [6, 2, 3, 4, 5], [6, 7, 3, 4, 5], [6, 7, 1, 4, 5],
             [6, 7, 1, 8, 5], [6, 7, 9, 8, 5], [6, 7, 9, 8, 10]],
            [[1, 2, 3, 4, 5], [6, 2, 3, 4, 5], [6, 7, 3, 4, 5], [6, 7, 1, 4, 5],
             [6, 7, 1, 8, 5], [6, 7, 1, 8, 9], [6, 7, 10, 8, 9]],
            [[1, 2, 3, 4, 5], [6, 2, 3, 4, 5], [6, 7, 3, 4, 5], [6, 7, 8, 4, 5],
             [6, 7, 8, 1, 5], [6, 7, 8, 1, 9], [6, 7, 8, 10, 9]],
            [[1, 2, 3, 4, 5], [6, 2, 3, 4, 5], [6, 7, 3, 4, 5], [6, 7, 8, 4, 5],
             [6, 7, 8, 2, 5], [6, 7, 8, 2, 9], [6, 7, 8, 10, 9]],
        ],
    ),
    # length-7 types with the fixed two-step prefix through facets 6 and 7
    "m-5-10-len7": (
        5,
        10,
        [
            [[1, 2, 3, 4, 5], [6, 2, 3, 4, 5]] + suffix
            for suffix in [
                [[6, 7, 3, 4, 5], [6, 7, 8, 4, 5], [6, 7, 8, 1, 5],
                 [6, 7, 8, 1, 2], [6, 7, 8, 9, 2], [6, 7, 8, 9, 10]],
                [[6, 7, 3, 4, 5], [6, 7, 8, 4, 5], [6, 7, 8, 2, 5],
                 [6, 7, 8, 2, 1], [6, 7, 8, 9, 1], [6, 7, 8, 9, 10]],
                [[6, 7, 3, 4, 5], [6, 7, 1, 4, 5], [6, 7, 1, 8, 5],
                 [6, 7, 1, 8, 2], [6, 7, 9, 8, 2], [6, 7, 9, 8, 10]],
                [[6, 7, 3, 4, 5], [6, 7, 1, 4, 5], [6, 7, 1, 8, 5],
                 [6, 7, 2, 8, 5], [6, 7, 2, 8, 9], [6, 7, 10, 8, 9]],
                [[6, 7, 3, 4, 5], [6, 7, 1, 4, 5], [6, 7, 1, 2, 5],
                 [6, 7, 1, 2, 8], [6, 7, 9, 2, 8], [6, 7, 9, 10, 8]],
                [[6, 7, 3, 4, 5], [6, 7, 1, 4, 5], [6, 7, 1, 2, 5],
                 [6, 7, 8, 2, 5], [6, 7, 8, 2, 9], [6, 7, 8, 10, 9]],
                [[6, 7, 3, 4, 5], [6, 7, 1, 4, 5], [6, 7, 1, 2, 5],
                 [6, 7, 1, 2, 8], [6, 7, 1, 9, 8], [6, 7, 10, 9, 8]],
                [[6, 7, 3, 4, 5], [6, 7, 1, 4, 5], [6, 7, 1, 2, 5],
                 [6, 7, 8, 2, 5], [6, 7, 8, 9, 5], [6, 7, 8, 9, 10]],
            ]
        ],
    ),
    "sm-4-9-len5": (
        4,
        9,
        [
            [[1, 2, 3, 4], [5, 2, 3, 4], [5, 6, 3, 4], [5, 6, 7, 4],
             [5, 6, 7, 8], [9, 6, 7, 8]],
            [[1, 2, 3, 4], [5, 2, 3, 4], [5, 6, 3, 4], [5, 6, 7, 4],
             [8, 6, 7, 4], [8, 6, 7, 9]],
            [[1, 2, 3, 4], [5, 2, 3, 4], [5, 6, 3, 4], [7, 6, 3, 4],
             [7, 6, 8, 4], [7, 6, 8, 9]],
            [[1, 2, 3, 4], [6, 2, 3, 4], [6, 5, 3, 4], [6, 5, 7, 4],
             [6, 5, 7, 8], [6, 9, 7, 8]],
            [[1, 2, 3, 4], [6, 2, 3, 4], [6, 5, 3, 4], [6, 5, 7, 4],
             [6, 8, 7, 4], [6, 8, 7, 9]],
            [[1, 2, 3, 4], [6, 2, 3, 4], [6, 7, 3, 4], [6, 7, 5, 4],
             [6, 7, 5, 8], [6, 7, 9, 8]],
            [[1, 2, 3, 4], [6, 2, 3, 4], [6, 7, 3, 4], [8, 7, 3, 4],
             [8, 7, 9, 4], [8, 7, 9, 6]],
            [[1, 2, 3, 4], [6, 2, 3, 4], [6, 7, 3, 4], [6, 7, 1, 4],
             [6, 7, 1, 8], [6, 7, 9, 8]],
        ],
    ),
    # length-6 types staying on facet 6 after the first step
    "sm-4-9-len6": (
        4,
        9,
        [
            [[1, 2, 3, 4]] + rest
            for rest in [
                [[6, 2, 3, 4], [6, 5, 3, 4], [6, 5, 1, 4], [6, 5, 1, 7],
                 [6, 5, 8, 7], [6, 9, 8, 7]],
                [[6, 2, 3, 4], [6, 5, 3, 4], [6, 5, 1, 4], [6, 5, 1, 7],
                 [6, 8, 1, 7], [6, 8, 9, 7]],
                [[6, 2, 3, 4], [6, 5, 3, 4], [6, 5, 1, 4], [6, 7, 1, 4],
                 [6, 7, 8, 4], [6, 7, 8, 9]],
                [[6, 2, 3, 4], [6, 5, 3, 4], [6, 5, 1, 4], [6, 7, 1, 4],
                 [6, 7, 1, 8], [6, 7, 9, 8]],
                [[6, 2, 3, 4], [6, 5, 3, 4], [6, 5, 7, 4], [6, 5, 7, 1],
                 [6, 8, 7, 1], [6, 8, 7, 9]],
                [[6, 2, 3, 4], [6, 5, 3, 4], [6, 5, 7, 4], [6, 1, 7, 4],
                 [6, 1, 7, 8], [6, 9, 7, 8]],
                [[6, 2, 3, 4], [6, 7, 3, 4], [6, 7, 1, 4], [6, 7, 1, 5],
                 [6, 7, 8, 5], [6, 7, 8, 9]],
                [[6, 2, 3, 4], [6, 7, 3, 4], [6, 7, 5, 4], [6, 7, 5, 1],
                 [6, 7, 8, 1], [6, 7, 8, 9]],
            ]
        ],
    ),
}

CASES = tuple(_TEMPLATES)


def revisit_families(case: str):
    """The canonical path families for a campaign case, as transcribed."""
    if case not in _TEMPLATES:
        raise KeyError(f"unknown path case {case!r}; known: {', '.join(CASES)}")
    d, n, templates = _TEMPLATES[case]
    source, sink = _campaign_endpoints(d, n)
    return [
        PathFamily(
            name=f"{case}/family-{i + 1}",
            template=PathType(d, n, tuple(tuple(v) for v in labels)),
            source_facets=source,
            sink_facets=sink,
        )
        for i, labels in enumerate(templates)
    ]


def expand_relabelings(family: PathFamily):
    """All distinct relabelings of a template under the family's symmetry.

    Source facets are permuted among themselves and likewise sink facets;
    duplicates (by label-set sequence) are dropped.
    """
    template = family.template
    seen = {}
    for p in itertools.permutations(family.source_facets):
        src_map = dict(zip(family.source_facets, p))
        for q in itertools.permutations(family.sink_facets):
            mapping = dict(src_map)
            mapping.update(zip(family.sink_facets, q))
            labels = tuple(
                tuple(mapping.get(e, e) for e in v) for v in template.labels
            )
            path = PathType(template.d, template.n, labels)
            seen.setdefault(path.label_sets(), path)
    return list(seen.values())


def validate_path_type(path: PathType):
    """Check a path type against the local rules; returns a list of violations."""
    problems = []
    sets = [frozenset(v) for v in path.labels]
    d, n = path.d, path.n
    for i, v in enumerate(path.labels):
        if len(set(v)) != d or any(not 1 <= e <= n for e in v):
            problems.append(f"label {i} is not a d-subset of the facets: {v}")
            return problems
    if len(set(sets)) != len(sets):
        problems.append("a vertex label repeats")
    for i in range(len(sets) - 1):
        if len(sets[i] & sets[i + 1]) != d - 1:
            problems.append(f"labels {i} and {i + 1} are not adjacent")
    if problems:
        return problems
    k = len(sets) - 1
    for i in range(1, k):
        entered = sets[i] - sets[i - 1]
        left = sets[i - 1] - sets[i]
        if not entered <= sets[i + 1]:
            problems.append(
                f"facet {min(entered)} entered at step {i} leaves immediately"
            )
        if left & sets[i + 1]:
            problems.append(
                f"facet {min(left & sets[i + 1])} re-enters right after leaving"
            )
    source, sink = sets[0], sets[-1]
    for i in range(1, k):
        if len(sets[i] & source) == d - 1 and i != 1:
            problems.append(f"source neighbor at position {i}")
        if len(sets[i] & sink) == d - 1 and i != k - 1:
            problems.append(f"sink neighbor at position {i}")
    return problems


def enumerate_valid_types(d: int, n: int, length: int):
    """Brute-force enumeration of all valid path types of a given length.

    Depth-first over neighbor labels with the local rules enforced on the
    fly; used to cross-check that the embedded template lists are exhaustive.
    """
    source, sink = _campaign_endpoints(d, n)
    facets = set(range(1, n + 1))
    out = []

    def extend(labels):
        depth = len(labels) - 1
        current = labels[-1]
        if depth == length:
            if current == frozenset(sink):
                cand = PathType(d, n, tuple(tuple(sorted(v)) for v in labels))
                if not validate_path_type(cand):
                    out.append(cand)
            return
        for leave in sorted(current):
            base = current - {leave}
            for enter in sorted(facets - current):
                nxt = base | {enter}
                trial = labels + [nxt]
                # prune with the pairwise rules before recursing
                if len(trial) >= 3:
                    i = len(trial) - 2
                    entered = trial[i] - trial[i - 1]
                    if not entered <= trial[i + 1]:
                        continue
                    if (trial[i - 1] - trial[i]) & trial[i + 1]:
                        continue
                if nxt in trial[:-1]:
                    continue
                pos = len(trial) - 1
                if nxt != frozenset(sink):
                    if len(nxt & frozenset(sink)) == d - 1 and pos != length - 1:
                        continue
                    if len(nxt & frozenset(source)) == d - 1 and pos != 1:
                        continue
                elif pos != length:
                    continue
                extend(trial)

    extend([frozenset(source)])
    return out
