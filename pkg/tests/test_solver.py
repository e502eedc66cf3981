import os
import stat
import sys
import textwrap

import pytest

from omdp.core import GroundSet, check_gp3
from omdp.encoder import CnfFormula, VarMap, gp3_clauses, source_sink_clauses
from omdp.solver import (
    CdclSolver,
    EncodingConsistencyError,
    SolveResult,
    SolverConfig,
    decode_model,
    solve,
    verify_assignment,
)


def formula_of(nvars, clauses):
    f = CnfFormula(nvars)
    for c in clauses:
        f.add_clause(c)
    return f


class TestEmbeddedBasics:
    def test_single_unit(self):
        result = solve(formula_of(1, [[1]]))
        assert result.status == "sat"
        assert result.assignment == {1: True}

    def test_contradictory_units(self):
        result = solve(formula_of(1, [[1], [-1]]))
        assert result.status == "unsat"

    def test_empty_formula_total_assignment(self):
        result = solve(formula_of(5, []))
        assert result.status == "sat"
        assert set(result.assignment) == {1, 2, 3, 4, 5}

    def test_small_unsat(self):
        # all eight sign patterns on three variables
        clauses = [
            [a, b, c]
            for a in (1, -1)
            for b in (2, -2)
            for c in (3, -3)
        ]
        assert solve(formula_of(3, clauses)).status == "unsat"

    def test_implication_chain(self):
        n = 200
        clauses = [[-v, v + 1] for v in range(1, n)] + [[1]]
        result = solve(formula_of(n, clauses))
        assert result.status == "sat"
        assert all(result.assignment[v] for v in range(1, n + 1))

    def test_pigeonhole_4_into_3(self):
        # variables p(i,j) = 3*(i-1)+j for pigeon i in hole j
        def var(i, j):
            return 3 * (i - 1) + j

        clauses = [[var(i, j) for j in range(1, 4)] for i in range(1, 5)]
        for j in range(1, 4):
            for i1 in range(1, 5):
                for i2 in range(i1 + 1, 5):
                    clauses.append([-var(i1, j), -var(i2, j)])
        assert solve(formula_of(12, clauses)).status == "unsat"

    def test_verified_assignment(self):
        f = formula_of(4, [[1, 2], [-1, 3], [-3, -2, 4]])
        result = solve(f)
        assert result.status == "sat"
        assert verify_assignment(f, result.assignment)

    def test_determinism(self):
        f = formula_of(
            6, [[1, 2, 3], [-1, -2], [-2, -3], [-1, -3], [4, 5, 6], [-4, -5]]
        )
        r1 = solve(f)
        r2 = solve(f)
        assert r1.stats == r2.stats
        assert r1.assignment == r2.assignment


class TestGp3Solving:
    def test_axioms_plus_anchor_sat_and_decodes(self):
        ground = GroundSet(n=4, d=2)
        vm = VarMap(ground)
        formula = gp3_clauses(vm)
        formula.add_clause([1])
        result = solve(formula)
        assert result.status == "sat"
        chi = decode_model(result, vm)
        assert check_gp3(chi) == []
        assert chi.signs[0] == 1

    def test_decode_requires_sat(self):
        vm = VarMap(GroundSet(n=4, d=2))
        with pytest.raises(ValueError):
            decode_model(SolveResult("unsat", None, 0.0, "embedded"), vm)

    def test_decode_catches_axiom_violation(self):
        vm = VarMap(GroundSet(n=4, d=2))
        # hand-build a non-chirotope assignment: flip chi(1,3,5) only
        assignment = {v: True for v in range(1, vm.num_basis_vars + 1)}
        assignment[vm.var_index((1, 3, 5))] = False
        fake = SolveResult("sat", assignment, 0.0, "embedded")
        with pytest.raises(EncodingConsistencyError):
            decode_model(fake, vm)

    def test_forced_unsat_with_units(self):
        ground = GroundSet(n=4, d=2)
        vm = VarMap(ground)
        formula = gp3_clauses(vm)
        # violate the context sigma=(1), quad=(2,3,4,5) explicitly
        formula.add_clause([vm.var_index((1, 2, 3))])
        formula.add_clause([vm.var_index((1, 4, 5))])
        formula.add_clause([vm.var_index((1, 2, 4))])
        formula.add_clause([-vm.var_index((1, 3, 5))])
        formula.add_clause([vm.var_index((1, 2, 5))])
        formula.add_clause([vm.var_index((1, 3, 4))])
        assert solve(formula).status == "unsat"


class TestConfig:
    def test_bad_backend(self):
        with pytest.raises(ValueError):
            SolverConfig(backend="quantum")

    def test_external_needs_placeholder(self):
        with pytest.raises(ValueError):
            SolverConfig(backend="external", external_command="minisat")

    def test_timeout_positive(self):
        with pytest.raises(ValueError):
            SolverConfig(timeout=0)


@pytest.fixture
def fake_solver(tmp_path):
    """A stand-in external solver script driven by an answer file."""

    def make(answer_text):
        script = tmp_path / "fakesat.py"
        answer = tmp_path / "answer.txt"
        answer.write_text(answer_text)
        script.write_text(
            textwrap.dedent(
                f"""\
                import sys
                sys.stdout.write(open({str(answer)!r}).read())
                """
            )
        )
        return f"{sys.executable} {script} {{cnf}}"

    return make


class TestExternalBackend:
    def test_unsat_roundtrip(self, fake_solver):
        cmd = fake_solver("c fake\ns UNSATISFIABLE\n")
        config = SolverConfig(backend="external", external_command=cmd)
        result = solve(formula_of(2, [[1, 2]]), config)
        assert result.status == "unsat"

    def test_sat_roundtrip_verified(self, fake_solver):
        cmd = fake_solver("s SATISFIABLE\nv 1 -2 0\n")
        config = SolverConfig(backend="external", external_command=cmd)
        result = solve(formula_of(2, [[1, 2]]), config)
        assert result.status == "sat"
        assert result.assignment == {1: True, 2: False}

    def test_lying_solver_caught(self, fake_solver):
        cmd = fake_solver("s SATISFIABLE\nv -1 -2 0\n")
        config = SolverConfig(backend="external", external_command=cmd)
        result = solve(formula_of(2, [[1, 2]]), config)
        assert result.status == "error"
        assert "independent clause check" in result.diagnostics

    def test_garbage_output_is_error(self, fake_solver):
        cmd = fake_solver("segfault lol\n")
        config = SolverConfig(backend="external", external_command=cmd)
        result = solve(formula_of(2, [[1, 2]]), config)
        assert result.status == "error"

    def test_env_override(self, fake_solver, monkeypatch):
        default = fake_solver("s UNSATISFIABLE\n")
        config = SolverConfig(backend="external", external_command=default)
        override = fake_solver("s SATISFIABLE\nv 1 2 0\n")
        monkeypatch.setenv("OMDP_SOLVER_CMD", override)
        result = solve(formula_of(2, [[1, 2]]), config)
        assert result.status == "sat"
