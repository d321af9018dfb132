import json
import subprocess
import sys

import pytest

from pext.cli import main
from pext.problem import SchemaError, parse_problem

QUADRIC = "x1^2 + x2^2 + x3^2"
QUADRIC4 = "x1^2 + x2^2 + x3^2 + x4^2"


@pytest.fixture
def run(tmp_path, capsys):
    counter = iter(range(10**6))

    def _run(*args, doc=None):
        argv = list(args)
        if doc is not None:
            path = tmp_path / f"p{next(counter)}.json"
            path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
            argv += ["--file", str(path)]
        code = main(argv)
        out, err = capsys.readouterr()
        report = json.loads(out) if out.strip().startswith("{") else out
        return code, report, err

    return _run


@pytest.fixture
def recheck(run):
    def _recheck(report):
        code, rep, _ = run("recheck", doc=report)
        return code, rep["witnesses"]["problems"]

    return _recheck


QUAD_BRACKET = {"n": 3, "phi": QUADRIC, "bracket": {"12": "2*x3", "23": "2*x1", "31": "2*x2"}}


# --- check ---------------------------------------------------------------------------


def test_check_quadric_ok(run, recheck):
    code, rep, _ = run("check", doc=QUAD_BRACKET)
    assert code == 0
    assert rep["verdicts"]["hamiltonian"]["ok"] and rep["verdicts"]["jacobi_mod"]["ok"]
    assert set(rep) >= {"command", "inputs", "verdicts", "witnesses", "seed", "elapsed_ms"}
    assert recheck(rep) == (0, [])


def test_check_hamiltonian_failure(run, recheck):
    code, rep, _ = run("check", doc={"n": 3, "phi": QUADRIC, "bracket": {"1,2": "1"}})
    assert code == 1
    ham = rep["verdicts"]["hamiltonian"]
    assert not ham["ok"] and ham["coefficient"] == "-2*x2"
    assert recheck(rep) == (0, [])


def test_check_syntax_error_reports_position(run):
    code, out, err = run("check", doc={"n": 3, "phi": "x1^2 + *x2", "bracket": {"1,2": "1"}})
    assert code == 2
    assert "position 7" in err and "^" in err


@pytest.mark.parametrize(
    "doc",
    [
        "{not json",
        [],
        {"phi": QUADRIC},
        {"n": 3, "phi": QUADRIC, "bogus": 1},
        {"n": 3, "phi": QUADRIC, "bracket": {"1,4": "x1"}},
        {"n": 3, "phi": QUADRIC, "bracket": {"1,2": "x1", "2,1": "x2"}},
        {"n": 3, "phi": QUADRIC, "bracket": {"1-2": "x1"}},
        {"n": 3, "phi": QUADRIC, "bracket": {"1,2": 3}},
    ],
)
def test_check_schema_errors(run, doc):
    code, _, err = run("check", doc=doc)
    assert code == 2 and err


def test_check_precondition_failure(run):
    code, _, err = run("check", doc={"n": 3, "phi": "x1^2 + 1", "bracket": {"1,2": "1"}})
    assert code == 3


def test_missing_file_is_input_error(run):
    assert run("check", "--file", "/nonexistent/p.json")[0] == 2
    assert run("check")[0] == 2


# --- extend ---------------------------------------------------------------------------


def test_extend_quadric_f1(run, recheck):
    code, rep, _ = run("extend", doc={"n": 3, "phi": QUADRIC, "f": "1"})
    assert code == 0
    assert rep["witnesses"]["beta_display"] == "2*x3 d1^d2 + 2*x2 d3^d1 + 2*x1 d2^d3"
    assert rep["verdicts"] == {"is_poisson": True, "casimir": True}
    assert rep["witnesses"]["X3"]["text"] == "d1^d2^d3"
    assert recheck(rep) == (0, [])


def test_extend_a2_from_restricted_bracket(run, recheck):
    from pext.corpus import get_entry
    from pext.extension import extend_dim3
    from pext.polyring import Poly

    phi = get_entry("A2").phi
    beta = extend_dim3(phi, Poly.parse("x1", 3)).beta
    bracket = {f"{i},{j}": str(c) for (i, j), c in beta.items()}
    code, rep, _ = run("extend", doc={"n": 3, "phi": str(phi), "bracket": bracket})
    assert code == 0 and rep["verdicts"]["is_poisson"]
    assert recheck(rep) == (0, [])


def test_extend_non_isolated(run):
    code, _, err = run("extend", doc={"n": 3, "phi": "x1^2*x2", "f": "1"})
    assert code == 3 and "non-isolated singularity" in err


def test_extend_invalid_bracket(run):
    code, rep, _ = run("extend", doc={"n": 3, "phi": QUADRIC, "bracket": {"1,2": "1"}})
    assert code == 1 and not rep["verdicts"]["hamiltonian"]["ok"]


def test_extend_wrong_dimension(run):
    assert run("extend", doc={"n": 4, "phi": QUADRIC4, "f": "1"})[0] == 2
    assert run("extend", doc={"n": 3, "phi": QUADRIC})[0] == 2


# --- decompose ---------------------------------------------------------------------------


def test_decompose_quadric(run, recheck):
    code, rep, _ = run("decompose", "--text", doc=QUAD_BRACKET)
    assert code == 0
    assert "X3: d1^d2^d3" in rep and "X2: 0" in rep
    code, rep, _ = run("decompose", doc=QUAD_BRACKET)
    assert recheck(rep) == (0, [])


def test_decompose_zero_and_failing(run):
    code, rep, _ = run("decompose", doc={"n": 3, "phi": QUADRIC, "bracket": {}})
    assert code == 0 and all(rep["witnesses"][k]["text"] == "0" for k in ("X1", "X2", "X3"))
    code, rep, _ = run("decompose", doc={"n": 3, "phi": QUADRIC, "bracket": {"1,2": "1"}})
    assert code == 1 and "coefficient" in rep["verdicts"]["hamiltonian"]


# --- obstruction ------------------------------------------------------------------------


def test_obstruction_constant_X3(run, recheck):
    doc = {"n": 4, "phi": QUADRIC4, "X3": [{"index": [1, 2, 3], "coeff": "1"}]}
    code, rep, _ = run("obstruction", doc=doc)
    assert code == 0 and rep["verdicts"]["satisfied"]
    assert recheck(rep) == (0, [])


def test_obstruction_unsatisfied(run, recheck):
    doc = {"n": 4, "phi": QUADRIC4, "X3": "x1 d1^d2^d3 + x2 d1^d2^d4"}
    code, rep, _ = run("obstruction", doc=doc)
    assert code == 1
    assert rep["verdicts"]["satisfied_dim4"] is rep["verdicts"]["satisfied_general"] is False
    assert recheck(rep) == (0, [])


def test_obstruction_random_seeded(run, recheck):
    import random

    from pext.randgen import random_multivector

    X3 = random_multivector(random.Random(3), 4, 3, 2)
    code, rep, _ = run("obstruction", doc={"n": 4, "phi": QUADRIC4, "X3": X3.to_literal()})
    assert code in (0, 1)
    assert recheck(rep) == (0, [])


def test_obstruction_wrong_dimension(run):
    doc = {"n": 3, "phi": QUADRIC, "X3": [{"index": [1, 2, 3], "coeff": "1"}]}
    assert run("obstruction", doc=doc)[0] == 2


# --- milnor ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "phi, code, mu",
    [("x1^3 + x2^2 + x3^2", 0, 2), (QUADRIC, 0, 1), ("x1^2*x2", 1, "infinity")],
)
def test_milnor(run, recheck, phi, code, mu):
    got, rep, _ = run("milnor", doc={"n": 3, "phi": phi})
    assert got == code and rep["verdicts"]["milnor_number"] == mu
    assert recheck(rep) == (0, [])


def test_milnor_constant(run):
    assert run("milnor", doc={"n": 3, "phi": "4"})[0] == 3


# --- verify ---------------------------------------------------------------------------


def test_verify_examples(run):
    code, rep, _ = run("verify", "--suite", "koszul-formula", "--seed", "7", "--count", "100")
    assert code == 0 and rep["verdicts"]["passed"] == {"koszul-formula": 100}
    assert "elapsed_ms" not in rep
    assert run("verify", "--suite", "dphi-squared", "--count", "30")[0] == 0
    assert run("verify", "--suite", "no-such-suite")[0] == 2
    assert run("verify")[0] == 2


def test_verify_deterministic(run):
    args = ("verify", "--suite", "all", "--seed", "5", "--count", "3")
    assert run(*args)[1] == run(*args)[1]


def test_verify_replays_counterexample(run, tmp_path):
    import random

    from pext.suites import SUITES, case_to_doc

    case = SUITES["intertwining"].draw(random.Random(1))
    doc = case_to_doc("intertwining", case)
    assert parse_problem(doc).n == case["n"]
    code, rep, _ = run("verify", doc=doc)
    assert code == 0 and rep["verdicts"]["holds"]
    # the suite named in the file decides which identity is replayed
    bad = dict(doc, suite="divergence-transport", A={"kind": "multivector", "degree": 1, "terms": []})
    assert run("verify", doc=bad)[0] == 0
    bad_suite = dict(doc, suite="nope")
    assert run("verify", doc=bad_suite)[0] == 2


# --- corpus ---------------------------------------------------------------------------


def test_corpus_list(run):
    code, rep, _ = run("corpus", "list")
    assert code == 0 and rep["verdicts"]["count"] == 10
    names = [e["name"] for e in rep["witnesses"]["entries"]]
    assert names == ["A1", "A2", "A3", "A4", "D4", "D5", "E6", "E7", "E8", "quadric4"]


def test_corpus_run(run):
    code, rep, _ = run("corpus", "run")
    assert code == 0 and rep["verdicts"]["flagged"] == []
    rows = rep["witnesses"]["entries"]
    assert len(rows) == 9 and all(r["is_poisson"] and r["jacobi_mod"] for r in rows)


def test_corpus_run_flags_injected(run):
    code, rep, _ = run("corpus", "run", doc={"n": 3, "phi": "x1^2*x2", "name": "bad"})
    assert code == 1 and rep["verdicts"]["flagged"] == ["bad"]


def test_corpus_needs_action(run):
    assert run("corpus")[0] == 2
    assert run("corpus", "dance")[0] == 2


# --- experiment and recheck -----------------------------------------------------------------


def test_experiment(run):
    doc = {"n": 4, "phi": QUADRIC4, "X3": "d1^d2^d3"}
    code, rep, _ = run("experiment", doc=doc)
    assert code == 0 and rep["verdicts"]["found"]


def test_recheck_detects_tampering(run, recheck):
    code, rep, _ = run("extend", doc={"n": 3, "phi": QUADRIC, "f": "1"})
    rep["witnesses"]["beta"]["terms"][0]["coeff"] = "3*x3"
    code, problems = recheck(rep)
    assert code == 1 and problems

    code, rep, _ = run("milnor", doc={"n": 3, "phi": QUADRIC})
    rep["verdicts"]["milnor_number"] = 2
    assert recheck(rep)[0] == 1


def test_recheck_rejects_non_report(run):
    assert run("recheck", doc={"n": 3})[0] == 2


# --- misc ---------------------------------------------------------------------------------


def test_text_output(run):
    code, out, _ = run("extend", "--text", doc={"n": 3, "phi": QUADRIC, "f": "1"})
    assert "beta_display: 2*x3 d1^d2 + 2*x2 d3^d1 + 2*x1 d2^d3" in out


def test_usage_error_exit_code(run):
    assert run("frobnicate")[0] == 2
    assert run("check", "--json", "--text")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pext", "corpus", "list", "--text"], capture_output=True, text=True)
    assert proc.returncode == 0 and "count: 10" in proc.stdout


def test_schema_rejects_bad_literal():
    with pytest.raises(SchemaError):
        parse_problem({"n": 3, "X3": [{"index": [1, 2, 9], "coeff": "1"}]})
    with pytest.raises(SchemaError):
        parse_problem({"n": 3, "X3": [{"index": [1, 2], "coeff": "1"}]})
