"""Command-line front end.

Exit codes: 0 success, 1 negative verdict, 2 input or schema error,
3 precondition failure (for instance a non-isolated singularity),
4 internal inconsistency.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Any, Callable

from .corpus import CORPUS, three_variable_entries
from .exterior import Multivector, d_phi
from .extension import (
    BracketData,
    ExtensionError,
    HamiltonianFailure,
    InternalConsistencyError,
    JacobiModFailure,
    NonIsolatedSingularity,
    biderivation_from_bracket,
    casimir_check,
    check_hamiltonian,
    check_jacobi_mod,
    decompose,
    extend_dim3,
    extend_from_bracket_dim3,
    milnor_cached,
    obstruction_dim4,
    obstruction_general,
    search_poisson_X2,
)
from .polyring import DimensionError, Poly, PolySyntaxError
from .problem import (
    ProblemFile,
    SchemaError,
    dump_report,
    load_problem,
    mv_to_json,
    parse_problem,
    recheck_report,
)
from .suites import SUITES, replay, run_suite

__all__ = ["main", "CliError", "COMMANDS"]

OK, NEGATIVE, INPUT_ERROR, PRECONDITION, INTERNAL = 0, 1, 2, 3, 4

# cyclic order of the bivector basis used for display in three variables
CYCLIC3 = ((1, 2), (3, 1), (2, 3))


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _need_file(args) -> ProblemFile:
    if not args.file:
        raise CliError(INPUT_ERROR, f"{args.command} needs --file")
    return load_problem(args.file)


def _need(prob: ProblemFile, *names: str) -> None:
    for name in names:
        attr = "raw_bracket" if name == "bracket" else name
        if getattr(prob, attr) is None:
            raise CliError(INPUT_ERROR, f"problem file lacks field {name!r}")


def _bracket(prob: ProblemFile) -> BracketData:
    _need(prob, "phi", "bracket")
    try:
        return BracketData(prob.n, prob.phi, prob.raw_bracket)
    except ExtensionError as exc:
        raise CliError(PRECONDITION, str(exc)) from None


def _report(command: str, prob: ProblemFile | None, verdicts: dict, witnesses: dict, **extra) -> dict:
    rep = {
        "command": command,
        "inputs": prob.echo() if prob is not None else {},
        "verdicts": verdicts,
        "witnesses": witnesses,
    }
    rep.update(extra)
    return rep


def _display(beta: Multivector) -> str:
    if beta.n == 3 and beta.degree == 2:
        return beta.to_text(CYCLIC3)
    return beta.to_text()


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_check(args) -> tuple[dict, int]:
    prob = _need_file(args)
    data = _bracket(prob)
    beta = biderivation_from_bracket(data)
    ham = check_hamiltonian(beta, data.phi)
    jac = check_jacobi_mod(beta, data.phi)
    rep = _report(
        "check",
        prob,
        {"hamiltonian": ham.to_dict(), "jacobi_mod": jac.to_dict()},
        {"beta": mv_to_json(beta)},
    )
    return rep, OK if ham and jac else NEGATIVE


def cmd_extend(args) -> tuple[dict, int]:
    prob = _need_file(args)
    if prob.n != 3:
        raise CliError(INPUT_ERROR, f"extend works in three variables, got n = {prob.n}")
    _need(prob, "phi")
    witnesses: dict[str, Any] = {}
    if prob.raw_bracket is not None:
        data = _bracket(prob)
        witnesses["input_beta"] = mv_to_json(biderivation_from_bracket(data))
        try:
            res = extend_from_bracket_dim3(data)
        except (HamiltonianFailure, JacobiModFailure) as exc:
            key = "hamiltonian" if isinstance(exc, HamiltonianFailure) else "jacobi_mod"
            return _report("extend", prob, {key: exc.result.to_dict()}, witnesses), NEGATIVE
    elif prob.f is not None:
        res = extend_dim3(prob.phi, prob.f)
    else:
        raise CliError(INPUT_ERROR, "extend needs 'bracket' or 'f'")
    dec = res.decomposition
    casimir = casimir_check(res.beta, prob.phi)
    witnesses.update(
        beta=mv_to_json(res.beta),
        beta_display=_display(res.beta),
        X3=mv_to_json(dec.X3),
        X2=mv_to_json(dec.X2),
        X1=mv_to_json(dec.X1),
    )
    verdicts = {"is_poisson": res.is_poisson, "casimir": casimir}
    return _report("extend", prob, verdicts, witnesses), OK if res.is_poisson and casimir else NEGATIVE


def cmd_decompose(args) -> tuple[dict, int]:
    prob = _need_file(args)
    data = _bracket(prob)
    beta = biderivation_from_bracket(data)
    witnesses: dict[str, Any] = {"beta": mv_to_json(beta)}
    try:
        dec = decompose(beta, data.phi)
    except HamiltonianFailure as exc:
        return _report("decompose", prob, {"hamiltonian": exc.result.to_dict()}, witnesses), NEGATIVE
    witnesses.update(X3=mv_to_json(dec.X3), X2=mv_to_json(dec.X2), X1=mv_to_json(dec.X1))
    verdicts = {"hamiltonian": {"ok": True}, "reassembles": dec.residual_check}
    return _report("decompose", prob, verdicts, witnesses), OK


def cmd_obstruction(args) -> tuple[dict, int]:
    prob = _need_file(args)
    if prob.n != 4:
        raise CliError(INPUT_ERROR, f"obstruction works in four variables, got n = {prob.n}")
    _need(prob, "phi", "X3")
    dim4 = obstruction_dim4(prob.X3, prob.phi)
    general = obstruction_general(prob.X3, prob.phi)
    if dim4.satisfied != general.satisfied:
        raise InternalConsistencyError("obstruction_dim4 and obstruction_general disagree")
    witnesses: dict[str, Any] = {
        "X3": mv_to_json(prob.X3),
        "bracket_term": mv_to_json(dim4.bracket_term),
        "divergence_term": mv_to_json(dim4.divergence_term),
    }
    if dim4.satisfied:
        witnesses.update(Y4=mv_to_json(dim4.Y4), Y5=mv_to_json(dim4.Y5))
    else:
        witnesses.update(remainder=mv_to_json(dim4.remainder), remainder_module=mv_to_json(general.remainder))
    verdicts = {"satisfied": dim4.satisfied, "satisfied_dim4": dim4.satisfied, "satisfied_general": general.satisfied}
    return _report("obstruction", prob, verdicts, witnesses), OK if dim4.satisfied else NEGATIVE


def cmd_milnor(args) -> tuple[dict, int]:
    prob = _need_file(args)
    _need(prob, "phi")
    try:
        data = milnor_cached(prob.phi)
    except ValueError as exc:
        raise CliError(PRECONDITION, str(exc)) from None
    verdicts = {
        "is_isolated": data.is_isolated,
        "milnor_number": data.milnor_number if data.is_isolated else "infinity",
    }
    witnesses = {
        "standard_monomials": [list(e) for e in data.standard_monomials],
        "leading_monomials": [list(e) for e in data.leading_monomials],
    }
    return _report("milnor", prob, verdicts, witnesses), OK if data.is_isolated else NEGATIVE


def cmd_verify(args) -> tuple[dict, int]:
    if args.file:
        # replay a saved counterexample
        with open(args.file, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{args.file}: invalid JSON: {exc.msg}") from None
        prob = parse_problem(doc)
        suite = doc.get("suite") or args.suite
        if suite not in SUITES:
            raise CliError(INPUT_ERROR, f"unknown suite {suite!r}")
        doc = dict(doc, suite=suite)
        holds = replay(doc)
        return _report("verify", prob, {"holds": holds}, {}), OK if holds else NEGATIVE
    if not args.suite:
        raise CliError(INPUT_ERROR, "verify needs --suite NAME (or 'all')")
    names = list(SUITES) if args.suite == "all" else [args.suite]
    for name in names:
        if name not in SUITES:
            raise CliError(INPUT_ERROR, f"unknown suite {name!r}; known: {', '.join(SUITES)}")
    results = [run_suite(name, args.seed, args.count) for name in names]
    failed = sum(r["count"] - r["passed"] for r in results)
    verdicts = {
        "ok": failed == 0,
        "passed": {r["suite"]: r["passed"] for r in results},
        "failed": failed,
    }
    witnesses = {"failures": [f for r in results for f in r["failures"]]}
    rep = {
        "command": "verify",
        "inputs": {"suite": args.suite, "seed": args.seed, "count": args.count},
        "verdicts": verdicts,
        "witnesses": witnesses,
    }
    return rep, OK if failed == 0 else NEGATIVE


def _corpus_row(name: str, phi, expected: int | None) -> dict:
    row: dict[str, Any] = {"name": name, "n": phi.n, "phi": str(phi)}
    try:
        data = milnor_cached(phi)
    except ValueError as exc:
        row.update(flagged=True, reason=str(exc))
        return row
    row["milnor_number"] = data.milnor_number if data.is_isolated else "infinity"
    if not data.is_isolated:
        row.update(flagged=True, reason="non-isolated singularity")
        return row
    problems = []
    if expected is not None and data.milnor_number != expected:
        problems.append(f"Milnor number {data.milnor_number} != expected {expected}")
    if phi.n == 3:
        res = extend_dim3(phi, Poly.one(3))
        jac = check_jacobi_mod(res.beta, phi)
        row.update(is_poisson=res.is_poisson, jacobi_mod=jac.ok, beta=_display(res.beta))
        if not (res.is_poisson and jac.ok):
            problems.append("extension is not Poisson")
    row["flagged"] = bool(problems)
    if problems:
        row["reason"] = "; ".join(problems)
    return row


def cmd_corpus(args) -> tuple[dict, int]:
    action = args.action
    if action == "list":
        entries = [e.to_dict() for e in CORPUS]
        return {"command": "corpus", "inputs": {"action": "list"}, "verdicts": {"count": len(entries)},
                "witnesses": {"entries": entries}}, OK
    if action != "run":
        raise CliError(INPUT_ERROR, "corpus needs an action: list or run")
    rows = [_corpus_row(e.name, e.phi, e.expected_milnor) for e in three_variable_entries()]
    inputs: dict[str, Any] = {"action": "run"}
    if args.file:
        prob = load_problem(args.file)
        _need(prob, "phi")
        inputs["injected"] = prob.echo()
        rows.append(_corpus_row(str(prob.extra.get("name", "injected")), prob.phi, None))
    flagged = [r["name"] for r in rows if r["flagged"]]
    verdicts = {"all_poisson": all(r.get("is_poisson", True) for r in rows if not r["flagged"]), "flagged": flagged}
    rep = {"command": "corpus", "inputs": inputs, "verdicts": verdicts, "witnesses": {"entries": rows}}
    return rep, NEGATIVE if flagged else OK


def cmd_experiment(args) -> tuple[dict, int]:
    prob = _need_file(args)
    _need(prob, "phi", "X3")
    max_degree = prob.extra.get("max_degree", 0)
    if not isinstance(max_degree, int) or max_degree < 0:
        raise SchemaError("'max_degree' must be a non-negative integer")
    hits = search_poisson_X2(prob.X3, prob.phi, max_degree=max_degree, count=args.count, seed=args.seed)
    verdicts = {"found": bool(hits), "hits": len(hits), "conclusive": bool(hits)}
    witnesses = {
        "base": mv_to_json(d_phi(prob.X3, prob.phi)),
        "X2": [mv_to_json(h) for h in hits],
    }
    return _report("experiment", prob, verdicts, witnesses), OK


def cmd_recheck(args) -> tuple[dict, int]:
    if not args.file:
        raise CliError(INPUT_ERROR, "recheck needs --file REPORT")
    with open(args.file, encoding="utf-8") as fh:
        try:
            report = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{args.file}: invalid JSON: {exc.msg}") from None
    if not isinstance(report, dict) or "command" not in report:
        raise SchemaError("not a report: missing 'command'")
    try:
        problems = recheck_report(report)
        if report["command"] == "verify":
            for doc in report.get("witnesses", {}).get("failures", []):
                if replay(doc):
                    problems.append(f"recorded counterexample {doc.get('case')} of {doc['suite']} now holds")
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed report: {exc}") from None
    rep = {
        "command": "recheck",
        "inputs": {"command": report["command"]},
        "verdicts": {"ok": not problems},
        "witnesses": {"problems": problems},
    }
    return rep, OK if not problems else NEGATIVE


COMMANDS: dict[str, Callable] = {
    "check": cmd_check,
    "extend": cmd_extend,
    "decompose": cmd_decompose,
    "obstruction": cmd_obstruction,
    "milnor": cmd_milnor,
    "verify": cmd_verify,
    "corpus": cmd_corpus,
    "experiment": cmd_experiment,
    "recheck": cmd_recheck,
}

# timing would break bit-identical reruns of these
_UNTIMED = {"verify", "recheck", "corpus"}


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _text_value(v: Any) -> str:
    if isinstance(v, dict) and "text" in v and "terms" in v:
        return v["text"]
    if isinstance(v, dict) and "ok" in v:
        return "ok" if v["ok"] else f"FAIL at {v.get('index')}: {v.get('coefficient')} (remainder {v.get('remainder')})"
    if isinstance(v, list) and v and isinstance(v[0], dict) and "text" in v[0]:
        return "; ".join(x["text"] for x in v)
    return json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else str(v)


def render_text(report: dict) -> str:
    lines = [f"command: {report['command']}"]
    for section in ("verdicts", "witnesses"):
        for key, val in sorted(report.get(section, {}).items()):
            lines.append(f"{key}: {_text_value(val)}")
    for key in ("seed", "elapsed_ms"):
        if key in report:
            lines.append(f"{key}: {report[key]}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="pext",
        description="Extend, decompose and certify Poisson brackets on hypersurfaces, exactly over Q.",
    )
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("action", nargs="?", help="corpus action: list or run")
    p.add_argument("--file", help="problem file (or report, for recheck)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--suite", help=f"verify suite: {', '.join(SUITES)} or all")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json")
    fmt.add_argument("--text", dest="fmt", action="store_const", const="text")
    p.set_defaults(fmt="json")
    return p


def run(argv: list[str] | None = None) -> tuple[dict | None, int, str | None]:
    """Execute a command; returns (report, exit code, error message)."""
    args = build_parser().parse_args(argv)
    if args.count < 0:
        return None, INPUT_ERROR, "--count must be non-negative"
    if args.action is not None and args.command != "corpus":
        return None, INPUT_ERROR, f"unexpected argument {args.action!r}"
    start = time.perf_counter()
    try:
        report, code = COMMANDS[args.command](args)
    except CliError as exc:
        return None, exc.code, str(exc)
    except (SchemaError, PolySyntaxError, DimensionError) as exc:
        return None, INPUT_ERROR, str(exc)
    except OSError as exc:
        return None, INPUT_ERROR, f"cannot read {exc.filename}: {exc.strerror}"
    except NonIsolatedSingularity as exc:
        return None, PRECONDITION, str(exc)
    except InternalConsistencyError as exc:
        return None, INTERNAL, f"internal inconsistency: {exc}"
    except ExtensionError as exc:
        return None, PRECONDITION, str(exc)
    report["seed"] = args.seed
    if args.command not in _UNTIMED:
        report["elapsed_ms"] = round((time.perf_counter() - start) * 1000, 3)
    return report, code, None


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    fmt = "text" if "--text" in argv else "json"
    try:
        report, code, error = run(argv)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code or 0) and INPUT_ERROR
    if error is not None:
        print(f"pext: error: {error}", file=sys.stderr)
        if fmt == "json":
            print(dump_report({"error": error, "exit_code": code}))
        return code
    print(render_text(report) if fmt == "text" else dump_report(report))
    return code
