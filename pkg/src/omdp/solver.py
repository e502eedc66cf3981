"""SAT solving: an embedded CDCL solver plus an external-process backend.

The embedded solver is a conflict-driven clause-learning solver with watched
literals, first-UIP learning with clause minimization, VSIDS-style branching,
phase saving, Luby restarts and LBD-based learned-clause reduction.  It is
written for correctness and reproducibility: there is no randomized
heuristic, so repeated runs produce identical statistics.  Campaign-scale
instances are better served by pointing OMDP_SOLVER_CMD at a production
solver.
"""

from __future__ import annotations

import heapq
import os
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field

from omdp.core import Chirotope, check_gp3
from omdp.encoder import CnfFormula, SolverOutputError, VarMap, emit_dimacs, parse_solution

ENV_SOLVER_CMD = "OMDP_SOLVER_CMD"


class EncodingConsistencyError(RuntimeError):
    """A decoded model fails the brute-force chirotope check: encoder bug."""


@dataclass(frozen=True)
class SolverConfig:
    backend: str = "embedded"
    external_command: str | None = None
    timeout: float = 3600.0
    parallel_instances: int = 1

    def __post_init__(self):
        if self.backend not in ("embedded", "external"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.parallel_instances < 1:
            raise ValueError("parallel_instances must be >= 1")
        if self.backend == "external":
            cmd = self.resolved_command()
            if cmd is None:
                raise ValueError("external backend needs a command template")
            if cmd.count("{cnf}") != 1:
                raise ValueError("command template must contain {cnf} exactly once")

    def resolved_command(self) -> str | None:
        return os.environ.get(ENV_SOLVER_CMD) or self.external_command


@dataclass
class SolveResult:
    status: str  # sat | unsat | timeout | error
    assignment: dict | None
    wall_time: float
    backend: str
    stats: dict = field(default_factory=dict)
    diagnostics: str = ""


def verify_assignment(formula: CnfFormula, assignment: dict) -> bool:
    """Independent check that every clause has a satisfied literal."""
    for clause in formula.clauses:
        for lit in clause:
            if assignment.get(abs(lit), False) == (lit > 0):
                break
        else:
            return False
    return True


class CdclSolver:
    """Conflict-driven clause learning over int-coded literals.

    Literal coding: variable v becomes 2v (positive) / 2v+1 (negative), so
    negation is ``lit ^ 1`` and the variable is ``lit >> 1``.
    """

    REDUCE_INTERVAL = 2000

    def __init__(self, formula: CnfFormula, time_budget: float | None = None):
        self.nvars = formula.variable_count
        self.time_budget = time_budget
        n = self.nvars
        self.litval = bytearray(2 * n + 2)  # 0 unknown, 1 true, 2 false
        self.level = [0] * (n + 1)
        self.reason = [-1] * (n + 1)
        self.activity = [0.0] * (n + 1)
        self.saved_phase = bytearray(n + 1)  # 1 = last assigned true
        self.trail: list = []
        self.trail_lim: list = []
        self.qhead = 0
        self.clauses: list = []
        self.watches = [[] for _ in range(2 * n + 2)]
        self.bins = [[] for _ in range(2 * n + 2)]
        self.learnt_refs: list = []
        self.lbd: dict = {}
        self.var_inc = 1.0
        self.order = []  # lazy max-activity heap
        self._seen = bytearray(n + 1)
        self.stats = {
            "conflicts": 0, "decisions": 0, "propagations": 0,
            "restarts": 0, "learned": 0, "deleted": 0,
        }
        self._contradiction = False
        self._load(formula)

    # -- construction -------------------------------------------------------

    def _load(self, formula: CnfFormula):
        for clause in formula.clauses:
            seen = set()
            lits = []
            tautology = False
            for dl in clause:
                code = 2 * dl if dl > 0 else -2 * dl + 1
                if code in seen:
                    continue
                if code ^ 1 in seen:
                    tautology = True
                    break
                seen.add(code)
                lits.append(code)
            if tautology:
                continue
            if len(lits) == 1:
                if not self._enqueue(lits[0], -1):
                    self._contradiction = True
                    return
            else:
                self._attach(lits)
        for v in range(1, self.nvars + 1):
            heapq.heappush(self.order, (0.0, v))

    def _attach(self, lits) -> int:
        ref = len(self.clauses)
        self.clauses.append(lits)
        if len(lits) == 2:
            a, b = lits
            self.bins[a ^ 1].append((b, ref))
            self.bins[b ^ 1].append((a, ref))
        else:
            # watch lists are flat [ref0, blocker0, ref1, blocker1, ...]
            self.watches[lits[0]] += (ref, lits[1])
            self.watches[lits[1]] += (ref, lits[0])
        return ref

    # -- assignment ---------------------------------------------------------

    def _enqueue(self, lit: int, reason_ref: int) -> bool:
        val = self.litval[lit]
        if val == 1:
            return True
        if val == 2:
            return False
        self.litval[lit] = 1
        self.litval[lit ^ 1] = 2
        v = lit >> 1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason_ref
        self.saved_phase[v] = 1 - (lit & 1)
        self.trail.append(lit)
        return True

    def _propagate(self) -> int:
        litval = self.litval
        trail = self.trail
        clauses = self.clauses
        watches = self.watches
        bins = self.bins
        level = self.level
        reason = self.reason
        saved = self.saved_phase
        trail_append = trail.append
        current_level = len(self.trail_lim)
        props = 0
        qhead = self.qhead
        conflict = -1
        while qhead < len(trail):
            p = trail[qhead]
            qhead += 1
            props += 1
            f = p ^ 1
            for q, ref in bins[p]:
                val = litval[q]
                if val == 0:
                    litval[q] = 1
                    litval[q ^ 1] = 2
                    v = q >> 1
                    level[v] = current_level
                    reason[v] = ref
                    saved[v] = 1 - (q & 1)
                    trail_append(q)
                elif val == 2:
                    conflict = ref
                    break
            if conflict >= 0:
                break
            ws = watches[f]
            i = j = 0
            nw = len(ws)
            while i < nw:
                ref = ws[i]
                blocker = ws[i + 1]
                if litval[blocker] == 1:
                    ws[j] = ref
                    ws[j + 1] = blocker
                    j += 2
                    i += 2
                    continue
                c = clauses[ref]
                if c is None:
                    i += 2
                    continue
                if c[0] == f:
                    c[0] = c[1]
                    c[1] = f
                first = c[0]
                if litval[first] == 1:
                    ws[j] = ref
                    ws[j + 1] = first
                    j += 2
                    i += 2
                    continue
                moved = False
                for k in range(2, len(c)):
                    ck = c[k]
                    if litval[ck] != 2:
                        c[1] = ck
                        c[k] = f
                        watches[ck] += (ref, first)
                        moved = True
                        break
                if moved:
                    i += 2
                    continue
                if litval[first] == 2:
                    conflict = ref
                    while i < nw:
                        ws[j] = ws[i]
                        ws[j + 1] = ws[i + 1]
                        j += 2
                        i += 2
                    break
                litval[first] = 1
                litval[first ^ 1] = 2
                v = first >> 1
                level[v] = current_level
                reason[v] = ref
                saved[v] = 1 - (first & 1)
                trail_append(first)
                ws[j] = ref
                ws[j + 1] = first
                j += 2
                i += 2
            del ws[j:]
            if conflict >= 0:
                break
        self.qhead = qhead if conflict < 0 else len(trail)
        self.stats["propagations"] += props
        return conflict

    # -- learning -----------------------------------------------------------

    def _bump(self, v: int):
        act = self.activity[v] + self.var_inc
        self.activity[v] = act
        if act > 1e100:
            scale = 1e-100
            for u in range(1, self.nvars + 1):
                self.activity[u] *= scale
            self.var_inc *= scale
            act = self.activity[v]
        heapq.heappush(self.order, (-act, v))

    def _analyze(self, confl: int):
        seen = self._seen
        touched = []
        learnt = [0]
        pathc = 0
        p_lit = -1  # asserted literal of the current reason; -1 = conflict clause
        idx = len(self.trail) - 1
        current = len(self.trail_lim)
        while True:
            for q in self.clauses[confl]:
                if q == p_lit:
                    continue
                v = q >> 1
                if not seen[v] and self.level[v] > 0:
                    seen[v] = 1
                    touched.append(v)
                    self._bump(v)
                    if self.level[v] >= current:
                        pathc += 1
                    else:
                        learnt.append(q)
            while not seen[self.trail[idx] >> 1]:
                idx -= 1
            p_lit = self.trail[idx]
            v = p_lit >> 1
            confl = self.reason[v]
            seen[v] = 0
            idx -= 1
            pathc -= 1
            if pathc == 0:
                break
        learnt[0] = p_lit ^ 1
        # recursive minimization: a literal is redundant if its implication
        # cone, followed through reasons, stays inside the clause
        minimized = [learnt[0]]
        for q in learnt[1:]:
            if self.reason[q >> 1] < 0 or not self._redundant(q, seen, touched):
                minimized.append(q)
        learnt = minimized
        for v in touched:
            seen[v] = 0
        if len(learnt) == 1:
            return learnt, 0
        # move a maximum-level literal into the second slot
        max_i = max(range(1, len(learnt)), key=lambda i: self.level[learnt[i] >> 1])
        learnt[1], learnt[max_i] = learnt[max_i], learnt[1]
        return learnt, self.level[learnt[1] >> 1]

    def _redundant(self, lit: int, seen, touched) -> bool:
        stack = [lit]
        tentative = []
        while stack:
            x = stack.pop()
            xv = x >> 1
            for other in self.clauses[self.reason[xv]]:
                ov = other >> 1
                if ov == xv or seen[ov] or self.level[ov] == 0:
                    continue
                if self.reason[ov] < 0:
                    for v in tentative:
                        seen[v] = 0
                    return False
                seen[ov] = 1
                tentative.append(ov)
                stack.append(other)
        touched.extend(tentative)  # proven marks stay for later queries
        return True

    def _backtrack(self, blevel: int):
        if len(self.trail_lim) <= blevel:
            return
        bound = self.trail_lim[blevel]
        for lit in reversed(self.trail[bound:]):
            self.litval[lit] = 0
            self.litval[lit ^ 1] = 0
            v = lit >> 1
            self.reason[v] = -1
            heapq.heappush(self.order, (-self.activity[v], v))
        del self.trail[bound:]
        del self.trail_lim[blevel:]
        self.qhead = len(self.trail)

    def _reduce_db(self):
        if len(self.learnt_refs) < 100:
            return
        locked = set()
        for lit in self.trail:
            ref = self.reason[lit >> 1]
            if ref >= 0:
                locked.add(ref)
        keep_score = sorted(
            self.learnt_refs,
            key=lambda ref: (self.lbd.get(ref, 99), len(self.clauses[ref])),
        )
        cut = len(keep_score) // 2
        survivors = []
        for pos, ref in enumerate(keep_score):
            clause = self.clauses[ref]
            if (
                pos < cut
                or ref in locked
                or self.lbd.get(ref, 99) <= 2
                or len(clause) == 2
            ):
                survivors.append(ref)
            else:
                self.clauses[ref] = None
                self.lbd.pop(ref, None)
                self.stats["deleted"] += 1
        self.learnt_refs = survivors

    # -- search -------------------------------------------------------------

    def _pick_branch(self) -> int:
        order = self.order
        litval = self.litval
        while order:
            negact, v = heapq.heappop(order)
            if litval[2 * v] == 0:
                # stale activity entries are fine; freshest is pushed on bump
                return 2 * v if self.saved_phase[v] else 2 * v + 1
        return 0

    def solve(self):
        start = time.monotonic()
        deadline = None if self.time_budget is None else start + self.time_budget
        if self._contradiction:
            return "unsat", None, self.stats
        if self._propagate() >= 0:
            return "unsat", None, self.stats
        next_reduce = self.REDUCE_INTERVAL
        reductions = 0
        # glucose-style restarts on exponential LBD averages
        lbd_fast = lbd_slow = 0.0
        since_restart = 0
        stats = self.stats
        while True:
            confl = self._propagate()
            if confl >= 0:
                stats["conflicts"] += 1
                since_restart += 1
                if not self.trail_lim:
                    return "unsat", None, stats
                learnt, blevel = self._analyze(confl)
                self._backtrack(blevel)
                self.var_inc /= 0.95
                if len(learnt) == 1:
                    lbd_val = 1
                    if not self._enqueue(learnt[0], -1):
                        return "unsat", None, stats
                else:
                    ref = self._attach(learnt)
                    self.learnt_refs.append(ref)
                    lbd_val = len({self.level[q >> 1] for q in learnt})
                    self.lbd[ref] = lbd_val
                    self._enqueue(learnt[0], ref)
                stats["learned"] += 1
                lbd_fast += (lbd_val - lbd_fast) / 32.0
                lbd_slow += (lbd_val - lbd_slow) / 8192.0
                if stats["conflicts"] >= next_reduce:
                    reductions += 1
                    next_reduce += self.REDUCE_INTERVAL + 300 * reductions
                    self._reduce_db()
                if stats["conflicts"] % 512 == 0 and deadline is not None:
                    if time.monotonic() > deadline:
                        return "timeout", None, stats
                continue
            if since_restart >= 50 and lbd_fast > 1.25 * lbd_slow:
                since_restart = 0
                lbd_fast = lbd_slow
                stats["restarts"] += 1
                self._backtrack(0)
                continue
            lit = self._pick_branch()
            if lit == 0:
                model = {
                    v: self.litval[2 * v] == 1 for v in range(1, self.nvars + 1)
                }
                return "sat", model, stats
            stats["decisions"] += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(lit, -1)


def _solve_embedded(formula: CnfFormula, config: SolverConfig) -> SolveResult:
    start = time.monotonic()
    solver = CdclSolver(formula, time_budget=config.timeout)
    status, model, stats = solver.solve()
    elapsed = time.monotonic() - start
    if status == "sat" and not verify_assignment(formula, model):
        return SolveResult(
            "error", None, elapsed, "embedded", stats,
            "model failed the independent clause check",
        )
    return SolveResult(status, model, elapsed, "embedded", stats)


def _solve_external(formula: CnfFormula, config: SolverConfig) -> SolveResult:
    command = config.resolved_command()
    start = time.monotonic()
    with tempfile.NamedTemporaryFile(
        "w", suffix=".cnf", prefix="omdp-", delete=False
    ) as handle:
        handle.write(emit_dimacs(formula))
        cnf_path = handle.name
    try:
        argv = shlex.split(command.replace("{cnf}", shlex.quote(cnf_path)))
        try:
            proc = subprocess.run(
                argv, capture_output=True, text=True, timeout=config.timeout
            )
        except subprocess.TimeoutExpired:
            return SolveResult(
                "timeout", None, time.monotonic() - start, command, {}
            )
        except OSError as exc:
            return SolveResult(
                "error", None, time.monotonic() - start, command, {}, str(exc)
            )
        output = proc.stdout
        try:
            assignment = parse_solution(output)
        except SolverOutputError as exc:
            return SolveResult(
                "error", None, time.monotonic() - start, command, {},
                f"{exc}\n--- stdout ---\n{output[-2000:]}"
                f"\n--- stderr ---\n{proc.stderr[-2000:]}",
            )
        elapsed = time.monotonic() - start
        if assignment is None:
            return SolveResult("unsat", None, elapsed, command, {})
        total = {v: assignment.get(v, False) for v in range(1, formula.variable_count + 1)}
        if not verify_assignment(formula, total):
            return SolveResult(
                "error", None, elapsed, command, {},
                "external model failed the independent clause check",
            )
        return SolveResult("sat", total, elapsed, command, {})
    finally:
        os.unlink(cnf_path)


def solve(formula: CnfFormula, config: SolverConfig | None = None) -> SolveResult:
    """Solve a formula with the configured backend.

    Every satisfiable result is re-checked clause by clause before being
    returned, independent of the solver's own bookkeeping.
    """
    config = config or SolverConfig()
    if config.backend == "external":
        return _solve_external(formula, config)
    return _solve_embedded(formula, config)


def decode_model(result: SolveResult, vm: VarMap) -> Chirotope:
    """Turn a sat assignment into a chirotope (basis variable i true = +1).

    Auxiliary variables are ignored.  The decoded chirotope is run through
    the brute-force axiom check; a violation means the axiom clauses and the
    oracle disagree, which is an internal error, not a property of the input.
    """
    if result.status != "sat":
        raise ValueError(f"cannot decode a {result.status} result")
    signs = tuple(
        1 if result.assignment[var] else -1
        for var in range(1, vm.num_basis_vars + 1)
    )
    chi = Chirotope(vm.ground, signs)
    violations = check_gp3(chi)
    if violations:
        raise EncodingConsistencyError(
            f"decoded model violates the sign axioms in {len(violations)} contexts"
        )
    return chi
