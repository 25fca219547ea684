"""Maddox's paranorm on ℓ(p), its pull-back to ℓ(λ,p), and inclusion checks."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Optional, Tuple

import numpy as np

from ..config import Thresholds
from ..errors import HypothesisViolated, MixedExponents, SpecFormatError
from ..models import (
    MembershipReport,
    ParanormReport,
    ScalarBoundReport,
    Theorem4Report,
    Theorem5Report,
    Verdict,
)
from ..numeric import Mode, abs_pow, to_float, to_fraction
from ..sequences import (
    ClosedForm,
    Derived,
    ExponentSeq,
    LambdaSeq,
    SeqSpec,
    constant_exponent,
    sample,
)
from ..verdicts import checkpoints, classify_null, classify_series
from .lambda_ops import lambda_transform, s_operator

logger = logging.getLogger(__name__)

SpaceKind = Literal["ellp", "ell_lambda", "c0_lambda"]
SPACE_KINDS: Tuple[str, ...] = ("ellp", "ell_lambda", "c0_lambda")

_REL_TOL = 1e-12


@dataclass(frozen=True)
class Space:
    kind: SpaceKind
    p: ExponentSeq
    lam: Optional[LambdaSeq] = None

    def __post_init__(self):
        if self.kind not in SPACE_KINDS:
            raise SpecFormatError(f"unknown space {self.kind!r}; expected one of {SPACE_KINDS}")
        if self.kind != "ellp" and self.lam is None:
            raise SpecFormatError(f"space {self.kind} needs a lambda sequence")


def _exponents(p: ExponentSeq, N: int, mode: Mode) -> np.ndarray:
    return p.values(N, mode if p.spec.exact() else "float")


def _terms(values: np.ndarray, p: ExponentSeq, N: int, mode: Mode) -> Tuple[np.ndarray, Mode, list]:
    return abs_pow(values, _exponents(p, N, mode), mode)


def _plain(value, mode: Mode):
    return value if mode == "rational" else float(value)


def _estimate(partial_sum, M: Fraction):
    if M == 1:
        return partial_sum
    return float(partial_sum) ** (1.0 / float(M))


def report_from_values(
    values: np.ndarray,
    p: ExponentSeq,
    N: int,
    mode: Mode = "float",
    th: Optional[Thresholds] = None,
) -> ParanormReport:
    """Paranorm report for already sampled y_0..y_N."""
    th = th or Thresholds()
    terms, used, notes = _terms(values, p, N, mode)
    sums = np.cumsum(terms)
    verdict, evidence = classify_series(to_float(terms), th)
    partial_sum = _plain(sums[-1], used)
    return ParanormReport(
        N=N,
        partial_sum=partial_sum,
        estimate=_estimate(partial_sum, p.M),
        term_tail=float(terms[-1]),
        verdict=verdict,
        evidence=evidence,
        M=p.M,
        mode=used,
        curve=[(c, _plain(sums[c], used)) for c in checkpoints(N)],
        notes=notes,
    )


def paranorm_ellp(
    y: SeqSpec, p: ExponentSeq, N: int, mode: Mode = "float", th: Optional[Thresholds] = None
) -> ParanormReport:
    """Partial sums of Σ|y_n|^{p_n}, the estimate P_N^{1/M} and a convergence verdict."""
    if N < 1:
        raise ValueError("horizon must be at least 1")
    return report_from_values(sample(y, N, mode), p, N, mode, th)


def paranorm_lambda(
    x: SeqSpec,
    lam: LambdaSeq,
    p: ExponentSeq,
    N: int,
    mode: Mode = "float",
    th: Optional[Thresholds] = None,
) -> ParanormReport:
    """The ℓ(λ,p) paranorm: the ℓ(p) report of Λx, with the ℓ(p) view of x attached."""
    if N < 1:
        raise ValueError("horizon must be at least 1")
    report = paranorm_ellp(Derived("lambda", x, lam), p, N, mode, th)
    report.x_side = paranorm_ellp(x, p, N, mode, th)
    return report


def truncated_paranorms(values: np.ndarray, p: ExponentSeq, N: int) -> np.ndarray:
    """h_n = (Σ_{k≤n} |v_k|^{p_k})^{1/M} for every n ≤ N, in float."""
    terms, _, _ = _terms(to_float(np.asarray(values[: N + 1])), p, N, "float")
    return np.cumsum(terms) ** (1.0 / float(p.M))


def membership_report(
    x: SeqSpec, space: Space, N: int, mode: Mode = "float", th: Optional[Thresholds] = None
) -> MembershipReport:
    th = th or Thresholds()
    if space.kind == "ellp":
        report = paranorm_ellp(x, space.p, N, mode, th)
        return MembershipReport(space.kind, N, report.verdict, report.evidence, report)
    if space.kind == "ell_lambda":
        report = paranorm_lambda(x, space.lam, space.p, N, mode, th)  # type: ignore[arg-type]
        return MembershipReport(space.kind, N, report.verdict, report.evidence, report)
    ys = lambda_transform(space.lam, x, N, mode)  # type: ignore[arg-type]
    terms, _, _ = _terms(ys, space.p, N, mode)
    verdict, evidence = classify_null(to_float(terms), th)
    return MembershipReport(space.kind, N, verdict, evidence)


def membership(
    x: SeqSpec, space: Space, N: int, mode: Mode = "float", th: Optional[Thresholds] = None
) -> Verdict:
    """Series evidence for the ℓ-type spaces, limit-to-zero evidence for c₀(λ,p)."""
    return membership_report(x, space, N, mode, th).verdict


def witness_strict_inclusion(lam: LambdaSeq) -> Tuple[SeqSpec, ExponentSeq]:
    """x ∈ c₀(λ,p) \\ ℓ(λ,p) with p_n = 1 + 1/(n+1).

    Λx is y_n = (n+1)^{-1/p_n}, so |Λ_n(x)|^{p_n} = 1/(n+1) is harmonic while y_n → 0.
    """
    p = ExponentSeq(ClosedForm("1 + 1/(n+1)"), Fraction(2))
    y = ClosedForm("(n+1)^(-(n+1)/(n+2))")
    return Derived("inverse", y, lam), p


def _first_failure(lhs: np.ndarray, rhs: np.ndarray) -> Optional[int]:
    bad = np.nonzero(lhs > rhs + _REL_TOL * np.maximum(1.0, rhs))[0]
    return int(bad[0]) if bad.size else None


def theorem4_check(
    x: SeqSpec,
    lam: LambdaSeq,
    p: ExponentSeq,
    N: int,
    mode: Mode = "float",
    th: Optional[Thresholds] = None,
) -> Theorem4Report:
    """x ∈ ℓ(λ,p) ∩ ℓ(p) iff S(x) ∈ ℓ(p), checked at the verdict level and by the
    triangle inequalities h(Sx) ≤ h(x) + h(Λx) and h(x) ≤ h(Sx) + h(Λx) at every n ≤ N."""
    exps = to_float(_exponents(p, N, mode))
    low = np.nonzero(exps < 1)[0]
    if low.size:
        k = int(low[0])
        raise HypothesisViolated(f"the S-criterion needs p_k >= 1; p_{k} = {exps[k]}")
    xs = sample(x, N, mode)
    ys = lambda_transform(lam, x, N, mode)
    ss = s_operator(lam, x, N, mode)
    x_rep = report_from_values(xs, p, N, mode, th)
    y_rep = report_from_values(ys, p, N, mode, th)
    s_rep = report_from_values(ss, p, N, mode, th)
    hx, hy, hs = (truncated_paranorms(v, p, N) for v in (xs, ys, ss))
    forward = _first_failure(hs, hx + hy)
    converse = _first_failure(hx, hs + hy)
    failures = [i for i in (forward, converse) if i is not None]
    return Theorem4Report(
        x_in_ellp=x_rep,
        lambda_x_in_ellp=y_rep,
        s_x_in_ellp=s_rep,
        forward_violation=x_rep.verdict.convergent
        and y_rep.verdict.convergent
        and s_rep.verdict.divergent,
        converse_violation=y_rep.verdict.convergent
        and s_rep.verdict.convergent
        and x_rep.verdict.divergent,
        triangle_forward_ok=forward is None,
        triangle_converse_ok=converse is None,
        first_triangle_failure=min(failures) if failures else None,
    )


def theorem5_check(
    x: SeqSpec,
    lam: LambdaSeq,
    p: ExponentSeq,
    N: int,
    mode: Mode = "float",
    th: Optional[Thresholds] = None,
) -> Theorem5Report:
    """Compare ℓ(λ,p) with the constant-exponent space ℓ(λ,1).

    p_n > 1 everywhere: Σ|Λ_n x| < ∞ forces Σ|Λ_n x|^{p_n} < ∞ once |Λ_n x| < 1.
    p_n < 1 everywhere: the reverse.
    """
    exps = to_float(_exponents(p, N, mode))
    if np.all(exps > 1):
        case = "i"
    elif np.all(exps < 1):
        case = "ii"
    else:
        raise MixedExponents("need p_n > 1 for every n or p_n < 1 for every n")
    ys = lambda_transform(lam, x, N, mode)
    mags = np.abs(to_float(ys))
    big = np.nonzero(mags >= 1)[0]
    settle = int(big[-1]) + 1 if big.size else 0
    base = report_from_values(ys, constant_exponent(1), N, mode, th)
    target = report_from_values(ys, p, N, mode, th)
    note = "ℓ_p^λ is read as ℓ(λ,p) with the constant exponent 1"
    if settle > N:
        logger.debug("|Λ_n(x)| never drops below 1 on [0, %d]", N)
        return Theorem5Report(
            case=case,
            settle_index=None,
            comparison_violations=0,
            compared=0,
            vacuous=True,
            base=base,
            target=target,
            implication_violated=False,
            note=note + "; |Λ_n(x)| < 1 never settles, comparison vacuous",
        )
    tail, powered = mags[settle:], mags[settle:] ** exps[settle:]
    if case == "i":
        violations = int(np.count_nonzero(powered > tail * (1 + _REL_TOL)))
        implication = base.verdict.convergent and target.verdict.divergent
    else:
        violations = int(np.count_nonzero(tail > powered * (1 + _REL_TOL)))
        implication = target.verdict.convergent and base.verdict.divergent
    return Theorem5Report(
        case=case,
        settle_index=settle,
        comparison_violations=violations,
        compared=int(tail.size),
        vacuous=False,
        base=base,
        target=target,
        implication_violated=implication,
        note=note,
    )


def scalar_bound_check(
    x: SeqSpec,
    lam: LambdaSeq,
    p: ExponentSeq,
    alpha,
    N: int,
    mode: Mode = "float",
) -> ScalarBoundReport:
    """|α|^{p_n}|Λ_n(x)|^{p_n} ≤ max(1, |α|^M)|Λ_n(x)|^{p_n} for every n ≤ N."""
    a = abs(float(to_fraction(alpha)))
    exps = to_float(_exponents(p, N, mode))
    terms, _, _ = _terms(lambda_transform(lam, x, N, mode), p, N, mode)
    terms = to_float(terms)
    factor = max(1.0, a ** float(p.M))
    lhs = a**exps * terms
    rhs = factor * terms
    bad = np.nonzero(lhs > rhs * (1 + _REL_TOL))[0]
    return ScalarBoundReport(
        alpha=to_fraction(alpha), N=N, bound_factor=factor, violations=[int(i) for i in bad]
    )
