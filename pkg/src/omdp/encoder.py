"""CNF compilation of chirotope axioms, orientation facts and path constraints.

One Boolean variable per sorted basis (true = chirotope sign +1), indexed by
colexicographic rank.  The alternating rule is folded into literal polarity,
so a constraint on an arbitrary ordered tuple becomes a literal on the sorted
basis with the sorting permutation's sign multiplied in.  Auxiliary variables
sit above the basis block and are only introduced when negating path
conjunctions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

from omdp.core import GroundSet, _tuple_parity, colex_basis, colex_rank
from omdp.paths import PathType


class DegenerateTupleError(ValueError):
    """No literal exists for a tuple with repeated elements."""


class SolverOutputError(RuntimeError):
    """Solver output did not follow the DIMACS result conventions."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"{message}: {line!r}")
        self.line = line


@dataclass(frozen=True)
class Literal:
    variable: int
    positive: bool

    def to_int(self) -> int:
        return self.variable if self.positive else -self.variable

    def __neg__(self) -> "Literal":
        return Literal(self.variable, not self.positive)


class VarMap:
    """Bijection between sorted bases and CNF variables 1..C(m, r).

    ``next_aux`` is the first free index above the basis block; the condition
    cache bumps it as it defines auxiliary variables.
    """

    def __init__(self, ground: GroundSet):
        self.ground = ground
        self.num_basis_vars = ground.num_bases
        self.next_aux = self.num_basis_vars + 1
        self._rank = {}
        for rank, basis in enumerate(
            itertools.combinations(ground.elements(), ground.r)
        ):
            self._rank[basis] = colex_rank(basis)
        # bases in lex order above; store the colex-indexed inverse
        self._inverse = [None] * self.num_basis_vars
        for basis, rank in self._rank.items():
            self._inverse[rank] = basis

    def var_index(self, basis) -> int:
        basis = tuple(basis)
        try:
            return self._rank[basis] + 1
        except KeyError:
            raise ValueError(f"{basis} is not a sorted basis") from None

    def basis_of(self, var: int) -> tuple:
        if not 1 <= var <= self.num_basis_vars:
            raise ValueError(f"variable {var} is not a basis variable")
        return self._inverse[var - 1]

    def allocate_aux(self) -> int:
        var = self.next_aux
        self.next_aux += 1
        return var


def literal_for(vm: VarMap, tup, desired_sign: int) -> Literal:
    """The literal asserting that the chirotope equals ``desired_sign`` on ``tup``."""
    parity = _tuple_parity(tup)
    if parity == 0:
        raise DegenerateTupleError(f"tuple {tup} has a repeated element")
    var = vm.var_index(tuple(sorted(tup)))
    return Literal(var, desired_sign * parity > 0)


class CnfFormula:
    """A growing clause list with a declared variable count and comments."""

    def __init__(self, variable_count: int, comments=()):
        self.variable_count = variable_count
        self.clauses: list = []
        self.comments: list = list(comments)

    def __len__(self) -> int:
        return len(self.clauses)

    def add_clause(self, lits):
        lits = list(lits)
        if not lits:
            raise ValueError("empty clause")
        for lit in lits:
            if lit == 0 or abs(lit) > self.variable_count:
                raise ValueError(f"literal {lit} outside declared variables")
        self.clauses.append(lits)

    def add_clauses(self, clause_iter):
        for c in clause_iter:
            self.add_clause(c)

    def ensure_variable(self, var: int):
        if var > self.variable_count:
            self.variable_count = var

    def absorb(self, other: "CnfFormula"):
        """Append another formula's clauses (and comments) onto this one."""
        self.ensure_variable(other.variable_count)
        self.clauses.extend(other.clauses)
        self.comments.extend(other.comments)


@dataclass(frozen=True)
class Biconditional:
    """``a == b`` (relation 'equal') or ``a == not b`` (relation 'opposite')."""

    a: Literal
    b: Literal
    relation: str

    def __post_init__(self):
        if self.relation not in ("equal", "opposite"):
            raise ValueError(f"bad relation {self.relation!r}")

    def variable_sign(self) -> int:
        """+1 if the two underlying variables must agree, -1 if differ."""
        s = 1 if self.relation == "equal" else -1
        if not self.a.positive:
            s = -s
        if not self.b.positive:
            s = -s
        return s

    def key(self) -> tuple:
        """Canonical (min var, max var, sign) identity for caching."""
        va, vb = self.a.variable, self.b.variable
        s = self.variable_sign()
        return (va, vb, s) if va <= vb else (vb, va, s)


def relation_clauses(bic: Biconditional):
    """The two 2-literal clauses enforcing a biconditional.

    Degenerate same-variable cases are folded: an always-true relation yields
    no clause, an always-false one yields the two contradictory units.
    """
    va, vb, s = bic.a.variable, bic.b.variable, bic.variable_sign()
    if va == vb:
        return [] if s > 0 else [[va], [-va]]
    if s > 0:
        return [[-va, vb], [va, -vb]]
    return [[va, vb], [-va, -vb]]


def gp3_clauses(vm: VarMap) -> CnfFormula:
    """Axiom clauses: 16 six-literal clauses per three-term sign context.

    For each (r-2)-subset ``sigma`` and each 4-subset of its complement, the
    two all-equal patterns of the three products are forbidden; each pattern
    expands to 8 full sign assignments of the six involved bases, each killed
    by one clause.
    """
    g = vm.ground
    formula = CnfFormula(vm.num_basis_vars)
    elements = list(g.elements())
    pair_slots = ((0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2))
    add = formula.clauses.append  # validated pattern, hot loop
    for sigma in itertools.combinations(elements, g.r - 2):
        sset = set(sigma)
        rest = [e for e in elements if e not in sset]
        for quad in itertools.combinations(rest, 4):
            lits = []
            for i, j, k, l in pair_slots:
                lits.append(literal_for(vm, sigma + (quad[i], quad[j]), 1).to_int())
                lits.append(literal_for(vm, sigma + (quad[k], quad[l]), 1).to_int())
            l1, l2, l3, l4, l5, l6 = lits
            # products (a, b, c) of the three pairs; forbidden: a=+1,b=-1,c=+1
            # and a=-1,b=+1,c=-1
            for a, b, c in ((1, -1, 1), (-1, 1, -1)):
                for s1 in (1, -1):
                    for s3 in (1, -1):
                        for s5 in (1, -1):
                            s2, s4, s6 = a * s1, b * s3, c * s5
                            add([
                                -s1 * l1, -s2 * l2, -s3 * l3,
                                -s4 * l4, -s5 * l5, -s6 * l6,
                            ])
    return formula


def _in_place(tup, old, new) -> tuple:
    out = list(tup)
    out[out.index(old)] = new
    return tuple(out)


def _bic(vm, tup_a, tup_b, sign) -> Biconditional:
    """chi(tup_a) = sign * chi(tup_b), as a biconditional between literals."""
    return Biconditional(
        literal_for(vm, tup_a, 1),
        literal_for(vm, tup_b, 1),
        "equal" if sign > 0 else "opposite",
    )


def vertexness_conditions(vm: VarMap, vertex) -> list:
    """chi(V, k) = chi(V, g) for every facet k off the vertex V."""
    g = vm.ground
    v = tuple(sorted(vertex))
    base = v + (g.g,)
    return [
        _bic(vm, v + (k,), base, 1)
        for k in g.facets()
        if k not in v
    ]


def column_clauses(column, vm: VarMap) -> CnfFormula:
    """The 2n clauses a facet-vertex-matrix column imposes on the chirotope.

    The column's nonzero entries name a vertex V and the signs of its
    f-positive circuit on V.  Each facet off V gives a cocircuit pivot
    equality chi(V,k) = chi(V,g); each facet s of V gives the circuit pivot
    relation chi(V with s replaced by f, g) = -entry(s) * chi(V, g).
    """
    g = vm.ground
    column = list(column)
    if len(column) != g.n or any(e not in (-1, 0, 1) for e in column):
        raise ValueError(f"column must be {g.n} entries in -1/0/+1")
    vertex = tuple(i + 1 for i, e in enumerate(column) if e != 0)
    if len(vertex) != g.d:
        raise ValueError(
            f"column has {len(vertex)} nonzero entries, expected {g.d}"
        )
    formula = CnfFormula(vm.num_basis_vars)
    base = vertex + (g.g,)
    for bic in vertexness_conditions(vm, vertex):
        formula.add_clauses(relation_clauses(bic))
    for s in vertex:
        entry = column[s - 1]
        pivoted = _in_place(vertex, s, g.f) + (g.g,)
        formula.add_clauses(relation_clauses(_bic(vm, pivoted, base, -entry)))
    return formula


def source_sink_clauses(
    vm: VarMap,
    sink,
    source=None,
    orient_source: bool = True,
    anchor: bool = True,
    extended: bool = False,
) -> CnfFormula:
    """Endpoint constraints: vertexness and edge orientation at source/sink.

    Vertexness at an endpoint V is the in-place family
    ``chi(V, f) = chi(V with k->g, f)`` for each facet k of V; orientation is
    ``chi(V, g) = chi(V with k->f, g)`` at the source (every edge leaves) and
    the same with a minus sign at the sink (every edge enters).  ``extended``
    additionally emits the explicit cocircuit positivity equalities
    ``chi(V, k) = chi(V, g)``, which the in-place family is believed, but not
    known, to imply.  The anchor unit pins the first basis to +1, breaking
    the global sign symmetry.
    """
    g = vm.ground
    formula = CnfFormula(vm.num_basis_vars)
    if anchor:
        formula.add_clause([vm.var_index(tuple(range(1, g.r + 1)))])
    if source is not None and set(source) & set(sink):
        raise ValueError("source and sink must be disjoint")

    def endpoint(vertex, orientation_sign, orient):
        v = tuple(sorted(vertex))
        for k in v:
            formula.add_clauses(
                relation_clauses(
                    _bic(vm, v + (g.f,), _in_place(v, k, g.g) + (g.f,), 1)
                )
            )
        if orient:
            for k in v:
                formula.add_clauses(
                    relation_clauses(
                        _bic(
                            vm,
                            v + (g.g,),
                            _in_place(v, k, g.f) + (g.g,),
                            orientation_sign,
                        )
                    )
                )
        if extended:
            for bic in vertexness_conditions(vm, v):
                formula.add_clauses(relation_clauses(bic))

    endpoint(sink, -1, True)
    if source is not None:
        endpoint(source, 1, orient_source)
    return formula


def path_conditions(
    path: PathType, vm: VarMap, include_first_edge: bool = False
) -> list:
    """The biconditional conjunction asserting a path appears, oriented forward.

    Every intermediate label contributes its n-d vertexness equalities; every
    edge after the first contributes the circuit-pivot equality
    ``chi(V with e->f, g) = chi(V, g)`` saying the circuit at V, positive on
    f, is negative on the leaving facet e.  The first edge is implied by the
    source orientation when that is enforced; pass ``include_first_edge`` for
    instances that leave the source unoriented.
    """
    g = vm.ground
    sets = [tuple(sorted(v)) for v in path.labels]
    if len(sets) < 2:
        raise ValueError("path needs at least one edge")
    for i in range(len(sets) - 1):
        if len(set(sets[i]) & set(sets[i + 1])) != g.d - 1:
            raise ValueError(f"labels {i} and {i + 1} are not adjacent")
    for v in sets[1:-1]:
        if v == sets[0] or v == sets[-1]:
            raise ValueError("an interior label repeats an endpoint")
    conditions = []
    for v in sets[1:-1]:
        conditions.extend(vertexness_conditions(vm, v))
    first = 0 if include_first_edge else 1
    for i in range(first, len(sets) - 1):
        v, w = sets[i], sets[i + 1]
        leaving = (set(v) - set(w)).pop()
        base = v + (g.g,)
        pivoted = _in_place(v, leaving, g.f) + (g.g,)
        conditions.append(_bic(vm, pivoted, base, 1))
    return conditions


class ConditionCache:
    """Tseitin indicators for biconditional conditions, shared across paths.

    Each distinct condition gets one auxiliary variable defined by four
    three-literal clauses; the definitions are buffered so the assembled
    formula can place them after the main clause blocks.
    """

    def __init__(self, vm: VarMap):
        self.vm = vm
        self._aux = {}
        self.definition_clauses: list = []

    def aux_for(self, bic: Biconditional) -> int:
        key = bic.key()
        v1, v2, s = key
        if v1 == v2:
            raise ValueError("degenerate condition has no indicator")
        aux = self._aux.get(key)
        if aux is None:
            aux = self.vm.allocate_aux()
            self._aux[key] = aux
            if s > 0:
                self.definition_clauses += [
                    [-aux, -v1, v2], [-aux, v1, -v2],
                    [aux, v1, v2], [aux, -v1, -v2],
                ]
            else:
                self.definition_clauses += [
                    [-aux, -v1, -v2], [-aux, v1, v2],
                    [aux, v1, -v2], [aux, -v1, v2],
                ]
        return aux

    def flush_definitions(self, formula: CnfFormula):
        """Append all buffered definitions; call once after the main blocks."""
        formula.ensure_variable(self.vm.next_aux - 1)
        formula.add_clauses(self.definition_clauses)
        self.definition_clauses = []


def exclude_paths(
    formula: CnfFormula,
    paths,
    vm: VarMap,
    cache: ConditionCache,
    include_first_edge: bool = False,
) -> int:
    """Add one exclusion clause per path type, negating its conjunction.

    The negated conjunction is the disjunction of the negated condition
    indicators.  Returns the number of exclusion clauses added; the cache
    holds the indicator definitions until flushed.
    """
    added = 0
    for path in paths:
        conditions = path_conditions(path, vm, include_first_edge)
        lits = []
        skip = False
        for bic in conditions:
            v1, v2, s = bic.key()
            if v1 == v2:
                if s > 0:
                    continue  # condition always true, no indicator needed
                skip = True  # condition always false: path can never appear
                break
            lits.append(-cache.aux_for(bic))
        if skip:
            continue
        formula.ensure_variable(vm.next_aux - 1)
        formula.add_clause(lits)
        added += 1
    return added


def enforce_path(
    formula: CnfFormula,
    path: PathType,
    vm: VarMap,
    include_first_edge: bool = False,
) -> int:
    """Append the path's conjunction directly as two-literal clauses."""
    added = 0
    for bic in path_conditions(path, vm, include_first_edge):
        clauses = relation_clauses(bic)
        formula.add_clauses(clauses)
        added += len(clauses)
    return added


def emit_dimacs(formula: CnfFormula) -> str:
    """Serialize to DIMACS CNF text."""
    lines = [f"c {c}" for c in formula.comments]
    lines.append(f"p cnf {formula.variable_count} {len(formula.clauses)}")
    for clause in formula.clauses:
        lines.append(" ".join(map(str, clause)) + " 0")
    lines.append("")
    return "\n".join(lines)


def parse_dimacs(text: str) -> CnfFormula:
    """Read DIMACS CNF text back into a formula."""
    formula = None
    pending: list = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[:2] != ["p", "cnf"]:
                raise SolverOutputError("malformed problem line", raw)
            formula = CnfFormula(int(parts[2]))
            continue
        if formula is None:
            raise SolverOutputError("clause before problem line", raw)
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                formula.add_clause(pending)
                pending = []
            else:
                pending.append(lit)
    if pending:
        raise SolverOutputError("unterminated final clause")
    if formula is None:
        raise SolverOutputError("no problem line found")
    return formula


def parse_solution(text: str):
    """Parse solver output: a dict {var: bool} when satisfiable, None when not.

    Expects an ``s SATISFIABLE`` / ``s UNSATISFIABLE`` status line and, for
    sat, ``v`` value lines listing signed variables.
    """
    status = None
    assignment = {}
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("s ") or line == "s":
            verdict = line[1:].strip()
            if verdict == "SATISFIABLE":
                status = "sat"
            elif verdict == "UNSATISFIABLE":
                status = "unsat"
            else:
                raise SolverOutputError("unrecognized status line", raw)
        elif line.startswith("v ") or line == "v":
            for tok in line[1:].split():
                try:
                    lit = int(tok)
                except ValueError:
                    raise SolverOutputError("bad value token", raw) from None
                if lit != 0:
                    assignment[abs(lit)] = lit > 0
    if status is None:
        raise SolverOutputError("no status line in solver output")
    if status == "unsat":
        return None
    return assignment
