from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple


class VerdictTag(str, Enum):
    CONVERGENT = "ConvergentNumeric"
    DIVERGENT = "DivergentNumeric"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Verdict:
    """Finite-horizon evidence for an infinite statement.

    For sup/boundedness questions CONVERGENT reads as "bounded evidence" and
    DIVERGENT as "growth evidence".
    """

    tag: VerdictTag
    rationale: str
    thresholds: Dict[str, float] = field(default_factory=dict, compare=False)

    @property
    def convergent(self) -> bool:
        return self.tag is VerdictTag.CONVERGENT

    @property
    def divergent(self) -> bool:
        return self.tag is VerdictTag.DIVERGENT


@dataclass(frozen=True)
class LambdaValidation:
    ok: bool
    horizon: int
    violation: Optional[str]  # non_positive | not_increasing
    index: Optional[int]
    note: str
    growth: Optional[float] = None


@dataclass
class ParanormReport:
    N: int
    partial_sum: Any
    estimate: Any
    term_tail: float
    verdict: Verdict
    evidence: Dict[str, Any]
    M: Any
    mode: str
    curve: List[Tuple[int, Any]] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    # ℓ(p) view of x itself; filled by paranorm_lambda only
    x_side: Optional["ParanormReport"] = None

    def measure(self) -> Tuple:
        """Every field except the x-side view, for isometry comparisons."""
        return (
            self.N,
            self.partial_sum,
            self.estimate,
            self.term_tail,
            self.verdict,
            self.evidence,
            self.M,
            self.mode,
            self.curve,
            self.notes,
        )


@dataclass
class MembershipReport:
    space: str
    N: int
    verdict: Verdict
    evidence: Dict[str, Any] = field(default_factory=dict)
    paranorm: Optional[ParanormReport] = None


@dataclass
class Theorem4Report:
    x_in_ellp: ParanormReport
    lambda_x_in_ellp: ParanormReport
    s_x_in_ellp: ParanormReport
    forward_violation: bool
    converse_violation: bool
    triangle_forward_ok: bool
    triangle_converse_ok: bool
    first_triangle_failure: Optional[int] = None

    @property
    def consistent(self) -> bool:
        return not (
            self.forward_violation
            or self.converse_violation
            or not self.triangle_forward_ok
            or not self.triangle_converse_ok
        )


@dataclass
class Theorem5Report:
    case: str  # "i" (p_n > 1) or "ii" (p_n < 1)
    settle_index: Optional[int]
    comparison_violations: int
    compared: int
    vacuous: bool
    base: ParanormReport
    target: ParanormReport
    implication_violated: bool
    note: str = ""


@dataclass
class ScalarBoundReport:
    alpha: Any
    N: int
    bound_factor: float
    violations: List[int] = field(default_factory=list)


@dataclass
class DualPart:
    name: str
    verdict: Verdict
    curve: List[Tuple[int, float]] = field(default_factory=list)
    grid_point: Optional[int] = None
    indices: int = 0


@dataclass
class DualCheckReport:
    which: str
    N: int
    parts: List[DualPart]
    combined: Verdict


@dataclass
class ConditionResult:
    id: str
    N: int
    verdict: Verdict
    curve: List[Tuple[int, float]] = field(default_factory=list)
    grid: List[int] = field(default_factory=list)
    chosen: Optional[int] = None
    formula: str = ""
    notes: List[str] = field(default_factory=list)


@dataclass
class ClassificationResult:
    target: str
    N: int
    conditions: List[ConditionResult]
    combined: Verdict
