from __future__ import annotations

import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Annotated, Any, Dict, Iterator, List, Optional

import click
import numpy as np
import typer

from .config import RunConfig, Settings, load_env
from .errors import SeqSpaceError, SpecFormatError
from .models import ConditionResult, ParanormReport
from .package import Report, render, write_report
from .sequences import Derived, sample, validate_lambda
from .services import duality, lambda_ops, matrix_class, paranorm
from .services.conditions import TARGET_NAMES
from .specs import parse_exponent, parse_lambda, parse_matrix, parse_seq

logger = logging.getLogger(__name__)

app = typer.Typer(add_completion=False, help="Finite-horizon computations in ℓ(λ,p).")

Horizon = Annotated[int, typer.Option("--N", help="Truncation horizon N")]
ModeOpt = Annotated[str, typer.Option("--mode", help="float or rational")]
FormatOpt = Annotated[str, typer.Option("--format", help="table, json or csv")]
OutOpt = Annotated[Optional[Path], typer.Option("--out", help="Write the output to a file")]
Overrides = Annotated[
    Optional[List[str]],
    typer.Option("--threshold", help="key=value verdict threshold override (repeatable)"),
]
LambdaOpt = Annotated[str, typer.Option("--lambda", help="λ: expression, list:, @file or JSON")]
POpt = Annotated[str, typer.Option("--p", help="Exponent spec; append ;bound=H if not constant")]
QOpt = Annotated[str, typer.Option("--q", help="Target exponent spec (non-decreasing)")]
MatrixOpt = Annotated[str, typer.Option("--A", help="zero, identity, diag:, triangle:, full:")]


@app.callback()
def main_callback(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging on stderr"),
):
    load_env()
    with _input_errors():
        level = "DEBUG" if verbose else Settings.from_env().log_level
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


@contextmanager
def _input_errors() -> Iterator[None]:
    try:
        yield
    except SeqSpaceError as exc:
        logger.debug("input error", exc_info=True)
        typer.echo(f"error: {exc}", err=True)
        raise typer.Exit(code=2)


def _config(command: str, N: int, mode: str, fmt: str, overrides: Optional[List[str]]) -> RunConfig:
    cfg = RunConfig.build(command, N, mode, fmt, overrides or [])
    logger.info("%s: N=%d mode=%s format=%s", command, cfg.N, cfg.mode, cfg.format)
    return cfg


def _emit(report: Report, cfg: RunConfig, out: Optional[Path]) -> None:
    text = render(report, cfg.format)
    if out:
        write_report(text, out)
        typer.echo(f"Report written to {out}")
    else:
        typer.echo(text, nl=False)


def _sequence(title: str, name: str, values: np.ndarray, cfg: RunConfig, **extra: Any) -> Report:
    items = values.tolist()
    payload = {"command": cfg.command, "N": cfg.N, "mode": cfg.mode, name: items, **extra}
    return Report(title, payload, ["n", name], [[n, v] for n, v in enumerate(items)])


def _summary(title: str, payload: Dict[str, Any], fields: Dict[str, Any]) -> Report:
    return Report(title, payload, ["field", "value"], [[k, v] for k, v in fields.items()])


def _paranorm_fields(report: ParanormReport) -> Dict[str, Any]:
    return {
        "N": report.N,
        "partial_sum": report.partial_sum,
        "estimate": report.estimate,
        "term_tail": report.term_tail,
        "M": report.M,
        "mode": report.mode,
        "verdict": report.verdict.tag,
        "rationale": report.verdict.rationale,
    }


def _condition_payload(result: ConditionResult) -> Dict[str, Any]:
    return {
        "id": result.id,
        "N": result.N,
        "verdict": result.verdict,
        "witness_curve": [{"N": c, "value": v} for c, v in result.curve],
        "grid": result.grid,
        "chosen": result.chosen,
        "formula": result.formula,
        "notes": result.notes,
    }


@app.command()
def transform(
    lambda_: LambdaOpt,
    x: str = typer.Option(..., "--x", help="Sequence x"),
    N: Horizon = 1000,
    mode: ModeOpt = "float",
    format: FormatOpt = "table",
    out: OutOpt = None,
    direct: bool = typer.Option(False, help="Sum each row directly instead of the prefix scan"),
    threshold: Overrides = None,
):
    """y = Λx on [0, N]."""
    with _input_errors():
        cfg = _config("transform", N, mode, format, threshold)
        lam, xs = parse_lambda(lambda_), parse_seq(x)
        cfg.check_exact(**{"lambda": lam, "x": xs})
        ys = lambda_ops.lambda_transform(lam, xs, cfg.N, cfg.mode, direct=direct)
        _emit(_sequence("Λ-transform", "y", ys, cfg), cfg, out)


@app.command()
def inverse(
    lambda_: LambdaOpt,
    y: str = typer.Option(..., "--y", help="Sequence y (e.g. @transform.csv)"),
    N: Horizon = 1000,
    mode: ModeOpt = "float",
    format: FormatOpt = "table",
    out: OutOpt = None,
    threshold: Overrides = None,
):
    """x = Λ⁻¹y on [0, N]."""
    with _input_errors():
        cfg = _config("inverse", N, mode, format, threshold)
        lam, ys = parse_lambda(lambda_), parse_seq(y)
        cfg.check_exact(**{"lambda": lam, "y": ys})
        xs = lambda_ops.inverse_transform(lam, ys, cfg.N, cfg.mode)
        _emit(_sequence("Λ-inverse", "x", xs, cfg), cfg, out)


@app.command()
def soperator(
    lambda_: LambdaOpt,
    x: str = typer.Option(..., "--x", help="Sequence x"),
    N: Horizon = 1000,
    mode: ModeOpt = "float",
    format: FormatOpt = "table",
    out: OutOpt = None,
    check: bool = typer.Option(False, help="Report residuals of both S-operator identities"),
    threshold: Overrides = None,
):
    """S(x) on [0, N]."""
    with _input_errors():
        cfg = _config("soperator", N, mode, format, threshold)
        lam, xs = parse_lambda(lambda_), parse_seq(x)
        cfg.check_exact(**{"lambda": lam, "x": xs})
        values = lambda_ops.s_operator(lam, xs, cfg.N, cfg.mode)
        extra = {"residuals": lambda_ops.lemma_residuals(lam, xs, cfg.N, cfg.mode)} if check else {}
        _emit(_sequence("S-operator", "S", values, cfg, **extra), cfg, out)


@app.command("paranorm")
def paranorm_cmd(
    x: str = typer.Option(..., "--x", help="Sequence (x for ℓ(λ,p), y for ℓ(p))"),
    p: POpt = "1",
    lambda_: Annotated[Optional[str], typer.Option("--lambda", help="λ; omit for ℓ(p)")] = None,
    N: Horizon = 1000,
    mode: ModeOpt = "float",
    format: FormatOpt = "table",
    out: OutOpt = None,
    threshold: Overrides = None,
):
    """Truncated paranorm on ℓ(p), or on ℓ(λ,p) when --lambda is given."""
    with _input_errors():
        cfg = _config("paranorm", N, mode, format, threshold)
        xs, exps = parse_seq(x), parse_exponent(p)
        lam = parse_lambda(lambda_) if lambda_ else None
        cfg.check_exact(**{"lambda": lam, "x": xs})
        if lam is None:
            report = paranorm.paranorm_ellp(xs, exps, cfg.N, cfg.mode, cfg.thresholds)
        else:
            report = paranorm.paranorm_lambda(xs, lam, exps, cfg.N, cfg.mode, cfg.thresholds)
        title = "ℓ(λ,p) paranorm" if lam else "ℓ(p) paranorm"
        payload = {"command": "paranorm", "report": report}
        _emit(_summary(title, payload, _paranorm_fields(report)), cfg, out)


@app.command()
def member(
    space: str = typer.Option(..., "--space", help="ellp, ell_lambda or c0_lambda"),
    x: str = typer.Option(..., "--x", help="Sequence x"),
    p: POpt = "1",
    lambda_: Annotated[Optional[str], typer.Option("--lambda", help="λ (not for ellp)")] = None,
    N: Horizon = 1000,
    mode: ModeOpt = "float",
    format: FormatOpt = "table",
    out: OutOpt = None,
    threshold: Overrides = None,
):
    """Membership evidence for x in ℓ(p), ℓ(λ,p) or c₀(λ,p)."""
    with _input_errors():
        cfg = _config("member", N, mode, format, threshold)
        xs = parse_seq(x)
        lam = parse_lambda(lambda_) if lambda_ else None
        cfg.check_exact(**{"lambda": lam, "x": xs})
        target = paranorm.Space(space, parse_exponent(p), lam)  # type: ignore[arg-type]
        result = paranorm.membership_report(xs, target, cfg.N, cfg.mode, cfg.thresholds)
        fields: Dict[str, Any] = {"space": result.space, "N": result.N}
        if result.paranorm is not None:
            fields.update(_paranorm_fields(result.paranorm))
        fields.update(verdict=result.verdict.tag, rationale=result.verdict.rationale)
        payload = {
            "command": "member",
            "space": result.space,
            "N": result.N,
            "verdict": result.verdict,
            "evidence": result.evidence,
            "estimate": result.paranorm.estimate if result.paranorm else None,
            "report": result.paranorm,
        }
        _emit(_summary(f"membership in {space}", payload, fields), cfg, out)


@app.command()
def witness(
    lambda_: LambdaOpt,
    N: Horizon = 10_000,
    mode: ModeOpt = "float",
    format: FormatOpt = "table",
    out: OutOpt = None,
    threshold: Overrides = None,
):
    """The sequence in c₀(λ,p) but not in ℓ(λ,p), with p_n = 1 + 1/(n+1)."""
    with _input_errors():
        cfg = _config("witness", N, mode, format, threshold)
        lam = parse_lambda(lambda_)
        w, p = paranorm.witness_strict_inclusion(lam)
        cfg.check_exact(w=w)
        ys = sample(Derived("lambda", w, lam), cfg.N, cfg.mode)
        floats = np.abs(np.asarray(ys, dtype=np.float64))
        exps = np.asarray(p.values(cfg.N), dtype=np.float64)
        start = cfg.N - cfg.N // 4
        c0, ell = (
            paranorm.membership(w, paranorm.Space(kind, p, lam), cfg.N, cfg.mode, cfg.thresholds)
            for kind in ("c0_lambda", "ell_lambda")
        )
        fields = {
            "p": "1 + 1/(n+1)",
            "Λw": "(n+1)^(-1/p_n)",
            "partial_sum": float((floats**exps).sum()),
            "tail_max": float(floats[start:].max()),
            "c0_lambda": c0.tag,
            "ell_lambda": ell.tag,
        }
        verdicts = {"c0_lambda": c0, "ell_lambda": ell}
        payload = {"command": "witness", "N": cfg.N, **fields, "verdicts": verdicts}
        _emit(_summary("strict inclusion witness", payload, fields), cfg, out)


@app.command()
def thm4(
    x: str = typer.Option(..., "--x", help="Sequence x"),
    lambda_: LambdaOpt = "n+1",
    p: POpt = "2",
    N: Horizon = 1000,
    mode: ModeOpt = "float",
    format: FormatOpt = "table",
    out: OutOpt = None,
    threshold: Overrides = None,
):
    """S-criterion: x ∈ ℓ(λ,p) ∩ ℓ(p) exactly when S(x) ∈ ℓ(p), for p_k ≥ 1."""
    with _input_errors():
        cfg = _config("thm4", N, mode, format, threshold)
        xs, lam = parse_seq(x), parse_lambda(lambda_)
        cfg.check_exact(**{"lambda": lam, "x": xs})
        exps = parse_exponent(p)
        report = paranorm.theorem4_check(xs, lam, exps, cfg.N, cfg.mode, cfg.thresholds)
        fields = {
            "x in ℓ(p)": report.x_in_ellp.verdict.tag,
            "Λx in ℓ(p)": report.lambda_x_in_ellp.verdict.tag,
            "S(x) in ℓ(p)": report.s_x_in_ellp.verdict.tag,
            "forward_violation": report.forward_violation,
            "converse_violation": report.converse_violation,
            "triangle_forward_ok": report.triangle_forward_ok,
            "triangle_converse_ok": report.triangle_converse_ok,
            "consistent": report.consistent,
        }
        payload = {"command": "thm4", "N": cfg.N, "consistent": report.consistent, "report": report}
        _emit(_summary("S-criterion check", payload, fields), cfg, out)


@app.command()
def thm5(
    x: str = typer.Option(..., "--x", help="Sequence x"),
    lambda_: LambdaOpt = "n+1",
    p: POpt = "2",
    N: Horizon = 1000,
    mode: ModeOpt = "float",
    format: FormatOpt = "table",
    out: OutOpt = None,
    threshold: Overrides = None,
):
    """Inclusion between ℓ(λ,p) and the constant-exponent space, for p > 1 or p < 1."""
    with _input_errors():
        cfg = _config("thm5", N, mode, format, threshold)
        xs, lam = parse_seq(x), parse_lambda(lambda_)
        cfg.check_exact(**{"lambda": lam, "x": xs})
        exps = parse_exponent(p)
        report = paranorm.theorem5_check(xs, lam, exps, cfg.N, cfg.mode, cfg.thresholds)
        fields = {
            "case": report.case,
            "settle_index": report.settle_index,
            "compared": report.compared,
            "comparison_violations": report.comparison_violations,
            "vacuous": report.vacuous,
            "base": report.base.verdict.tag,
            "target": report.target.verdict.tag,
            "implication_violated": report.implication_violated,
            "note": report.note,
        }
        _emit(_summary("inclusion check", {"command": "thm5", "report": report}, fields), cfg, out)


@app.command()
def dual(
    which: str = typer.Option(..., "--which", help="alpha, beta or gamma"),
    a: str = typer.Option(..., "--a", help="Sequence a"),
    lambda_: LambdaOpt = "n+1",
    p: POpt = "1",
    x: Annotated[Optional[str], typer.Option("--x", help="Check the dual identities on x")] = None,
    N: Horizon = 1000,
    mode: ModeOpt = "float",
    format: FormatOpt = "table",
    out: OutOpt = None,
    threshold: Overrides = None,
):
    """Evidence for a in the α-, β- or γ-dual of ℓ(λ,p)."""
    with _input_errors():
        cfg = _config("dual", N, mode, format, threshold)
        if which not in duality.WHICH:
            raise SpecFormatError(f"--which must be one of {duality.WHICH}")
        seq_a, lam = parse_seq(a), parse_lambda(lambda_)
        exps = parse_exponent(p)
        report = duality.dual_check(which, seq_a, lam, exps, cfg.N, cfg.thresholds)  # type: ignore
        payload: Dict[str, Any] = {"command": "dual", "report": report}
        if x is not None:
            xs = parse_seq(x)
            cfg.check_exact(**{"lambda": lam, "a": seq_a, "x": xs})
            payload["residuals"] = _dual_residuals(seq_a, lam, xs, cfg)
        rows = [
            [part.name, part.verdict.tag, part.grid_point, part.curve[-1][1]]
            for part in report.parts
        ]
        rows.append(["combined", report.combined.tag, None, None])
        title = f"{which}-dual check"
        _emit(Report(title, payload, ["part", "verdict", "M", "value at N"], rows), cfg, out)


def _dual_residuals(a, lam, x, cfg: RunConfig) -> Dict[str, Any]:
    ys = lambda_ops.lambda_transform(lam, x, cfg.N, cfg.mode)
    products = sample(a, cfg.N, cfg.mode) * sample(x, cfg.N, cfg.mode)
    D = duality.build_D(a, lam)
    B = duality.build_B(a, lam)
    return {
        "D": lambda_ops.max_abs(products - D.apply(ys, cfg.mode), cfg.mode),
        "B": lambda_ops.max_abs(np.cumsum(products) - B.apply(ys, cfg.mode), cfg.mode),
    }


@app.command()
def tilde(
    matrix: MatrixOpt,
    lambda_: LambdaOpt = "n+1",
    x: Annotated[Optional[str], typer.Option("--x", help="Check the identity on x")] = None,
    N: Horizon = 20,
    mode: ModeOpt = "float",
    format: FormatOpt = "table",
    out: OutOpt = None,
    threshold: Overrides = None,
):
    """Nonzero entries of the ã-matrix on [0, N]²."""
    with _input_errors():
        cfg = _config("tilde", N, mode, format, threshold)
        A, lam = parse_matrix(matrix), parse_lambda(lambda_)
        cfg.check_exact(**{"A": A, "lambda": lam})
        T = matrix_class.build_tilde(A, lam, cfg.N, cfg.mode)
        limits, stable, observed = T.column_limits(cfg.thresholds)
        payload: Dict[str, Any] = {
            "command": "tilde",
            "N": cfg.N,
            "mode": cfg.mode,
            "entries": T.values,
            "column_limits": limits,
            "stable": stable,
            "observed": observed,
        }
        if x is not None:
            xs = parse_seq(x)
            cfg.check_exact(x=xs)
            payload["identity_residual"] = T.identity_residual(xs)
        rows = [
            [n, k, T.values[n, k]]
            for n in range(cfg.N + 1)
            for k in range(cfg.N + 1)
            if T.values[n, k] != 0
        ]
        _emit(Report("ã-matrix", payload, ["n", "k", "value"], rows), cfg, out)


@app.command()
def condition(
    cid: str = typer.Option(..., "--id", help="Condition id 4.6 .. 4.21"),
    matrix: MatrixOpt = "zero",
    lambda_: LambdaOpt = "n+1",
    p: POpt = "1",
    q: QOpt = "1",
    N: Horizon = 1000,
    mode: ModeOpt = "float",
    format: FormatOpt = "table",
    out: OutOpt = None,
    threshold: Overrides = None,
):
    """Evaluate one mapping condition on the ã-matrix."""
    with _input_errors():
        cfg = _config("condition", N, mode, format, threshold)
        A, lam = parse_matrix(matrix), parse_lambda(lambda_)
        T = matrix_class.build_tilde(A, lam, cfg.N)
        result = matrix_class.eval_condition(
            cid, T, parse_exponent(p), parse_exponent(q), cfg.N, cfg.thresholds
        )
        payload = {"command": "condition", **_condition_payload(result)}
        title = f"condition {result.id}: {result.verdict.tag.value}"
        _emit(Report(title, payload, ["N", "value"], [list(pt) for pt in result.curve]), cfg, out)


@app.command()
def classify(
    matrix: MatrixOpt,
    target: str = typer.Option(..., "--target", help="lq, c0q, cq or linfq"),
    lambda_: LambdaOpt = "n+1",
    p: POpt = "1",
    q: QOpt = "1",
    probe: Annotated[Optional[str], typer.Option("--probe", help="Report Ax in ℓ(q)")] = None,
    threads: Annotated[Optional[int], typer.Option("--threads", min=1)] = None,
    N: Horizon = 1000,
    mode: ModeOpt = "float",
    format: FormatOpt = "table",
    out: OutOpt = None,
    threshold: Overrides = None,
):
    """Evidence for A ∈ (ℓ(λ,p) : target) from the target's mapping conditions."""
    with _input_errors():
        cfg = _config("classify", N, mode, format, threshold)
        A, lam = parse_matrix(matrix), parse_lambda(lambda_)
        exps_q = parse_exponent(q)
        result = matrix_class.classify(
            A, lam, parse_exponent(p), exps_q, target, cfg.N, cfg.thresholds, threads
        )
        payload: Dict[str, Any] = {
            "command": "classify",
            "target": result.target,
            "space": TARGET_NAMES[result.target],
            "N": result.N,
            "conditions": [_condition_payload(r) for r in result.conditions],
            "combined": result.combined,
        }
        if probe is not None:
            ax = matrix_class.apply_matrix(A, parse_seq(probe), cfg.N)
            payload["probe"] = paranorm.report_from_values(
                ax, exps_q, cfg.N, "float", cfg.thresholds
            )
        rows = [[r.id, r.verdict.tag, r.chosen, r.formula] for r in result.conditions]
        rows.append(["combined", result.combined.tag, None, ""])
        title = f"A in (ℓ(λ,p) : {TARGET_NAMES[result.target]})"
        header = ["condition", "verdict", "grid point", "formula"]
        _emit(Report(title, payload, header, rows), cfg, out)


@app.command()
def validate(
    lambda_: LambdaOpt,
    N: Horizon = 1000,
    mode: ModeOpt = "float",
    format: FormatOpt = "table",
    out: OutOpt = None,
):
    """Positivity and strict increase of λ on [0, N]; exits 2 on a violation."""
    with _input_errors():
        cfg = _config("validate", N, mode, format, None)
        lam = parse_lambda(lambda_)
        cfg.check_exact(**{"lambda": lam})
        report = validate_lambda(lam, cfg.N, cfg.mode)
        fields = {
            "ok": report.ok,
            "horizon": report.horizon,
            "violation": report.violation,
            "index": report.index,
            "growth": report.growth,
            "note": report.note,
        }
        payload = {"command": "validate", "report": report}
        _emit(_summary("λ validation", payload, fields), cfg, out)
    if not report.ok:
        raise typer.Exit(code=2)


def run(argv: Optional[List[str]] = None) -> int:
    """Run the CLI and return its exit code (0 success, 2 input error)."""
    load_env()
    try:
        result = app(args=argv, prog_name="seqspace", standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except click.exceptions.Abort:
        return 1
    return result if isinstance(result, int) else 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
