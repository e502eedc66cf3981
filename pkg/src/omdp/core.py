"""Oriented matroid program semantics: chirotopes, circuits, cocircuits, digraphs.

A program on ``n`` facets in dimension ``d`` lives on the ground set
``{1, ..., n} | {f, g}`` with ``f = n+1`` (the objective element) and
``g = n+2`` (the element at infinity).  The chirotope is a uniform rank
``r = d+1`` sign function on sorted bases; everything else (circuits,
cocircuits, program vertices, the monotone digraph) is derived from it here
by direct evaluation.  This module is the semantic ground truth that the CNF
encoder is tested against.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb


class MalformedTupleError(ValueError):
    """A tuple fed to a chirotope has the wrong length or out-of-range entries."""


class DegenerateChirotopeError(ValueError):
    """A chirotope value outside {-1, +1} (uniformity is assumed throughout)."""


class DigraphConsistencyError(RuntimeError):
    """Adjacent program vertices disagree about the orientation of their edge."""


@dataclass(frozen=True)
class GroundSet:
    """The indexed ground set of a program with ``n`` facets in dimension ``d``."""

    n: int
    d: int

    def __post_init__(self):
        # d == n is allowed so that small abstract configurations (m = r + 1)
        # can reuse the chirotope machinery; program semantics need d < n.
        if not 0 < self.d <= self.n:
            raise ValueError(f"need 0 < d <= n, got d={self.d}, n={self.n}")

    @property
    def r(self) -> int:
        return self.d + 1

    @property
    def m(self) -> int:
        return self.n + 2

    @property
    def f(self) -> int:
        return self.n + 1

    @property
    def g(self) -> int:
        return self.n + 2

    @property
    def num_bases(self) -> int:
        return comb(self.m, self.r)

    def facets(self) -> range:
        return range(1, self.n + 1)

    def elements(self) -> range:
        return range(1, self.m + 1)

    def bases(self):
        """All sorted bases, in lexicographic order."""
        return itertools.combinations(self.elements(), self.r)


def colex_rank(basis) -> int:
    """Zero-based colexicographic rank of a strictly increasing tuple."""
    return sum(comb(b - 1, i + 1) for i, b in enumerate(basis))


def colex_basis(rank: int, r: int) -> tuple:
    """Inverse of :func:`colex_rank`: the sorted r-tuple with the given rank."""
    out = []
    for i in range(r, 0, -1):
        # largest b with comb(b-1, i) <= rank
        b = i
        while comb(b, i) <= rank:
            b += 1
        out.append(b)
        rank -= comb(b - 1, i)
    out.reverse()
    return tuple(out)


def sort_with_parity(ground: GroundSet, tup) -> tuple:
    """Sort a length-r tuple, returning ``(sorted_tuple, parity)``.

    The parity is the sign of the sorting permutation, or 0 if the tuple has
    a repeated element (the chirotope is alternating, so such tuples evaluate
    to zero).
    """
    tup = tuple(tup)
    if len(tup) != ground.r:
        raise MalformedTupleError(f"expected {ground.r} elements, got {len(tup)}")
    for e in tup:
        if not 1 <= e <= ground.m:
            raise MalformedTupleError(f"element {e} outside 1..{ground.m}")
    inversions = 0
    for i in range(len(tup)):
        for j in range(i + 1, len(tup)):
            if tup[i] == tup[j]:
                return tuple(sorted(tup)), 0
            if tup[i] > tup[j]:
                inversions += 1
    return tuple(sorted(tup)), (-1) ** (inversions & 1)


def _tuple_parity(tup) -> int:
    """Parity of sorting an arbitrary int tuple; 0 on repeats.  No range checks."""
    inversions = 0
    for i in range(len(tup)):
        for j in range(i + 1, len(tup)):
            if tup[i] == tup[j]:
                return 0
            if tup[i] > tup[j]:
                inversions += 1
    return (-1) ** (inversions & 1)


@dataclass(frozen=True)
class Chirotope:
    """A uniform chirotope: one sign in {-1, +1} per sorted basis.

    Signs are stored indexed by colexicographic rank, the same indexing the
    encoder uses for CNF variables, so decoding a SAT model is an
    index-preserving copy.
    """

    ground: GroundSet
    signs: tuple

    def __post_init__(self):
        if len(self.signs) != self.ground.num_bases:
            raise DegenerateChirotopeError(
                f"expected {self.ground.num_bases} basis signs, got {len(self.signs)}"
            )
        for s in self.signs:
            if s not in (-1, 1):
                raise DegenerateChirotopeError(f"basis sign {s!r} not in {{-1, +1}}")

    @classmethod
    def from_mapping(cls, ground: GroundSet, mapping) -> "Chirotope":
        """Build from a {sorted basis tuple: sign} mapping; must be total."""
        signs = [0] * ground.num_bases
        for basis, s in mapping.items():
            signs[colex_rank(basis)] = s
        return cls(ground, tuple(signs))

    @classmethod
    def from_function(cls, ground: GroundSet, fn) -> "Chirotope":
        """Build by evaluating ``fn`` on every sorted basis."""
        return cls.from_mapping(ground, {b: fn(b) for b in ground.bases()})

    @classmethod
    def from_rational_columns(cls, ground: GroundSet, columns) -> "Chirotope":
        """Sign-of-determinant chirotope of a rank-r rational configuration.

        ``columns`` is a sequence of m columns, each of length r; the sign of
        a basis is the sign of the determinant of the corresponding r columns.
        Raises DegenerateChirotopeError if any maximal minor vanishes.
        """
        cols = [tuple(Fraction(x) for x in c) for c in columns]
        if len(cols) != ground.m or any(len(c) != ground.r for c in cols):
            raise ValueError(f"need {ground.m} columns of length {ground.r}")

        def det_sign(basis):
            mat = [list(cols[b - 1]) for b in basis]  # rows = chosen columns
            sign = 1
            k = len(mat)
            for i in range(k):
                piv = next((p for p in range(i, k) if mat[p][i] != 0), None)
                if piv is None:
                    return 0
                if piv != i:
                    mat[i], mat[piv] = mat[piv], mat[i]
                    sign = -sign
                for p in range(i + 1, k):
                    factor = mat[p][i] / mat[i][i]
                    for q in range(i, k):
                        mat[p][q] -= factor * mat[i][q]
                if mat[i][i] < 0:
                    sign = -sign
            return sign

        return cls.from_function(ground, det_sign)

    def sign_of_sorted(self, basis) -> int:
        return self.signs[colex_rank(basis)]


def chi_of(chi: Chirotope, tup) -> int:
    """Evaluate the chirotope on an arbitrary ordered tuple (0 on repeats)."""
    basis, parity = sort_with_parity(chi.ground, tup)
    if parity == 0:
        return 0
    return parity * chi.signs[colex_rank(basis)]


def check_gp3(chi: Chirotope):
    """Brute-force check of the three-term Grassmann-Pluecker sign condition.

    For every (r-2)-subset ``sigma`` and 4-subset ``{x1<x2<x3<x4}`` of its
    complement, the three products
    ``chi(sigma,x1,x2)*chi(sigma,x3,x4)``, ``-chi(sigma,x1,x3)*chi(sigma,x2,x4)``
    and ``chi(sigma,x1,x4)*chi(sigma,x2,x3)`` must take both values +1 and -1.
    Returns the list of violating ``(sigma, quadruple)`` contexts; empty iff
    the sign function is a uniform chirotope.  This is the oracle the CNF
    axiom clauses are validated against, so it deliberately evaluates the
    definition directly.
    """
    g = chi.ground
    elements = list(g.elements())
    violations = []
    for sigma in itertools.combinations(elements, g.r - 2):
        sset = set(sigma)
        rest = [e for e in elements if e not in sset]
        for quad in itertools.combinations(rest, 4):
            x1, x2, x3, x4 = quad
            p1 = chi_of(chi, sigma + (x1, x2)) * chi_of(chi, sigma + (x3, x4))
            p2 = chi_of(chi, sigma + (x1, x3)) * chi_of(chi, sigma + (x2, x4))
            p3 = chi_of(chi, sigma + (x1, x4)) * chi_of(chi, sigma + (x2, x3))
            if p1 == -p2 == p3:
                violations.append((sigma, quad))
    return violations


@dataclass(frozen=True)
class SignVector:
    """A total map from ground-set elements to {-1, 0, +1}."""

    ground: GroundSet
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.ground.m:
            raise ValueError(f"expected {self.ground.m} entries")

    def __getitem__(self, element: int) -> int:
        return self.entries[element - 1]

    def __neg__(self) -> "SignVector":
        return SignVector(self.ground, tuple(-e for e in self.entries))

    def support(self) -> tuple:
        return tuple(e for e in self.ground.elements() if self.entries[e - 1] != 0)

    def zero_set(self) -> tuple:
        return tuple(e for e in self.ground.elements() if self.entries[e - 1] == 0)


def circuit_on_support(chi: Chirotope, support, positive_on: int) -> SignVector:
    """The signed circuit with the given (r+1)-element support.

    On the sorted support ``s_1 < ... < s_{r+1}`` the circuit sign at ``s_i``
    is proportional to ``(-1)^i * chi(support \\ s_i)``; the global sign is
    fixed by making the vector positive on ``positive_on``.
    """
    s = tuple(sorted(support))
    if len(s) != chi.ground.r + 1 or len(set(s)) != len(s):
        raise ValueError(f"support must have {chi.ground.r + 1} distinct elements")
    if positive_on not in s:
        raise ValueError(f"{positive_on} not in support {s}")
    entries = [0] * chi.ground.m
    for i, e in enumerate(s):
        rest = s[:i] + s[i + 1:]
        entries[e - 1] = (-1) ** (i + 1) * chi.sign_of_sorted(rest)
    if entries[positive_on - 1] < 0:
        entries = [-x for x in entries]
    return SignVector(chi.ground, tuple(entries))


def cocircuit_on_zeroset(chi: Chirotope, zeroset, positive_on: int) -> SignVector:
    """The signed cocircuit vanishing exactly on the given (r-1)-set.

    The sign at an element ``e`` outside the zero set is proportional to
    ``chi(e, z_1, ..., z_{r-1})`` with the zero set sorted; the global sign is
    fixed by ``positive_on``.  (With this convention the pivot relation reads
    ``chi(b, Z) = D(a) * D(b) * chi(a, Z)`` -- the variant with an extra minus
    sign fails on three-element supports and on rational configurations, so
    the plus form is used everywhere.)
    """
    z = tuple(sorted(zeroset))
    if len(z) != chi.ground.r - 1 or len(set(z)) != len(z):
        raise ValueError(f"zero set must have {chi.ground.r - 1} distinct elements")
    if positive_on in z:
        raise ValueError(f"{positive_on} lies in the zero set {z}")
    entries = [0] * chi.ground.m
    for e in chi.ground.elements():
        if e not in z:
            entries[e - 1] = chi_of(chi, (e,) + z)
    if entries[positive_on - 1] < 0:
        entries = [-x for x in entries]
    return SignVector(chi.ground, tuple(entries))


def program_vertices(chi: Chirotope) -> set:
    """All d-subsets of the facets whose g-positive cocircuit is facet-positive."""
    g = chi.ground
    vertices = set()
    for v in itertools.combinations(g.facets(), g.d):
        coc = cocircuit_on_zeroset(chi, v, positive_on=g.g)
        if all(coc[j] > 0 for j in g.facets() if j not in v):
            vertices.add(v)
    return vertices


def _is_bounded(chi: Chirotope) -> bool:
    """True iff every facet-positive cocircuit on a d-subset is positive on g."""
    g = chi.ground
    for z in itertools.combinations(g.facets(), g.d):
        zset = set(z)
        outside = [j for j in g.facets() if j not in zset]
        first = chi_of(chi, (outside[0],) + z)
        if any(chi_of(chi, (j,) + z) != first for j in outside[1:]):
            continue  # not a matroid-polytope vertex
        if chi_of(chi, (g.g,) + z) != first:
            return False
    return True


@dataclass(frozen=True)
class OmpDigraph:
    """The monotone digraph of a program: d-subset vertices and oriented arcs.

    ``bounded`` is None when the digraph was read from a facet-vertex matrix,
    which does not determine boundedness.
    """

    ground: GroundSet
    vertices: frozenset
    arcs: frozenset
    bounded: bool | None = None

    def out_neighbors(self, v):
        return [b for a, b in self.arcs if a == v]

    def in_neighbors(self, v):
        return [a for a, b in self.arcs if b == v]


def program_digraph(chi: Chirotope) -> OmpDigraph:
    """Vertices plus arcs oriented by the f-positive circuit at each vertex.

    The arc between adjacent vertices V, V' leaves V iff the circuit with
    support ``V | {f, g}``, normalized positive on f, is negative on the facet
    ``V \\ V'``.  Both endpoints are consulted and must agree.
    """
    g = chi.ground
    vertices = sorted(program_vertices(chi))
    circuits = {
        v: circuit_on_support(chi, v + (g.f, g.g), positive_on=g.f) for v in vertices
    }
    arcs = set()
    for v, w in itertools.combinations(vertices, 2):
        shared = set(v) & set(w)
        if len(shared) != g.d - 1:
            continue
        ev = (set(v) - shared).pop()
        ew = (set(w) - shared).pop()
        v_leaves = circuits[v][ev] < 0
        w_leaves = circuits[w][ew] < 0
        if v_leaves == w_leaves:
            raise DigraphConsistencyError(
                f"vertices {v} and {w} disagree on their shared edge"
            )
        arcs.add((v, w) if v_leaves else (w, v))
    return OmpDigraph(g, frozenset(vertices), frozenset(arcs), _is_bounded(chi))
