"""Catalog of the mapping conditions on the ã-matrix.

Each entry gives the canonical truncated formula that `matrix_class` evaluates next to
the text as printed, and says where the two differ. Notation: ã_nk the ã-matrix,
ã_k = lim_n ã_nk, e_nk = λ_k a_nk / (λ_k − λ_{k−1}), F a finite set of rows,
K1 = {p_k ≤ 1}, K2 = {p_k > 1}, p̀_k = p_k / (p_k − 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Literal, Optional, Tuple

from ..errors import UnsupportedCondition

Quantifier = Literal["none", "exists_M", "exists_L", "forall_L", "forall_L_exists_M"]
Shape = Literal["subset_sup", "subset_sum", "column_sum", "sup", "row_sum", "column_null", "row"]


@dataclass(frozen=True)
class Condition:
    id: str
    formula: str
    printed: str
    quantifier: Quantifier
    shape: Shape
    uses_limits: bool = False
    deviation: Optional[str] = None


CATALOG: Dict[str, Condition] = {
    c.id: c
    for c in (
        Condition(
            "4.6",
            "sup_F sup_{k∈K1} |Σ_{n∈F} ã_nk|^{p_k} < ∞",
            "sup_N sup_{k∈K1} |Σ_{n∈N} ã_nk|^{q_n} < ∞",
            "none",
            "subset_sup",
            deviation="printed exponent q_n sits outside the row sum; read as p_k",
        ),
        Condition(
            "4.7",
            "∃M sup_F Σ_{k∈K2} |Σ_{n∈F} ã_nk M^{-1}|^{p̀_k} < ∞",
            "∃M sup_N Σ_{k∈K2} |Σ_{n∈N} ã_nk M^{-1}|^{p̀_k} < ∞",
            "exists_M",
            "subset_sum",
        ),
        Condition(
            "4.8",
            "∃M sup_k Σ_n |ã_nk M^{-1/p_k}|^{q_n} < ∞",
            "∃M sup_k Σ_n |ã_k M^{-1/p_k}|^{q_n} < ∞",
            "exists_M",
            "column_sum",
            deviation="printed ã_k has no row index inside Σ_n; read as ã_nk",
        ),
        Condition(
            "4.9",
            "lim_n |ã_nk|^{q_n} = 0 for every k",
            "lim_n |ã_nk|^{q_n} = 0 (∀k)",
            "none",
            "column_null",
        ),
        Condition(
            "4.10",
            "∀L sup_n sup_{k∈K1} |ã_nk L^{1/q_n}|^{p_k} < ∞",
            "∀L, sup_n sup_{k∈K1} |ã_nk L^{1/q_n}|^{p_k} < ∞",
            "forall_L",
            "sup",
        ),
        Condition(
            "4.11",
            "∀L ∃M sup_n Σ_{k∈K2} |ã_nk L^{1/q_n} M^{-1}|^{p̀_k} < ∞",
            "∀L, ∃M sup_n Σ_{k∈K2} |ã_k L^{1/q_n} M^{-1}|^{p̀_k} < ∞",
            "forall_L_exists_M",
            "row_sum",
            deviation="printed ã_k has no row index under sup_n; read as ã_nk",
        ),
        Condition(
            "4.12",
            "sup_n sup_{k∈K1} |ã_nk|^{p_k} < ∞",
            "sup_n sup_{k∈K1} |ã_nk|^{p_k} < ∞",
            "none",
            "sup",
        ),
        Condition(
            "4.13",
            "∃M sup_n Σ_{k∈K2} |ã_nk M^{-1}|^{p̀_k} < ∞",
            "∃M sup_n Σ_{k∈K2} |ã_k M^{-1}|^{p̀_k} < ∞",
            "exists_M",
            "row_sum",
            deviation="printed ã_k has no row index under sup_n; read as ã_nk",
        ),
        Condition(
            "4.14",
            "∀L sup_n sup_{k∈K1} (|ã_nk − ã_k| L^{1/q_n})^{p_k} < ∞",
            "∀L, sup_n sup_{k∈K1} (|ã_nk − ã_k| L^{1/q_n})^{p_k} < ∞",
            "forall_L",
            "sup",
            uses_limits=True,
        ),
        Condition(
            "4.15",
            "lim_n |ã_nk − ã_k|^{q_n} = 0 for every k",
            "lim_n |ã_nk − ã_k|^{q_n} = 0, for all k",
            "none",
            "column_null",
            uses_limits=True,
        ),
        Condition(
            "4.16",
            "∀L ∃M sup_n Σ_{k∈K2} (|ã_nk − ã_k| L^{1/q_n} M^{-1})^{p̀_k} < ∞",
            "∀L, ∃M sup_n Σ_{k∈K2} (|ã_nk − ã_k| L^{1/q_n} M^{-1})^{p̀_k}",
            "forall_L_exists_M",
            "row_sum",
            uses_limits=True,
            deviation="printed without '< ∞'; finiteness is implied",
        ),
        Condition(
            "4.17",
            "∃L sup_n sup_{k∈K1} |ã_nk L^{-1/q_n}|^{p_k} < ∞",
            "∃L, sup_n sup_{k∈K1} |ã_nk L^{-1/q_n}|^{p_k} < ∞",
            "exists_L",
            "sup",
        ),
        Condition(
            "4.18",
            "∃L sup_n Σ_{k∈K2} |ã_nk L^{-1/q_n}|^{p̀_k} < ∞",
            "∃L, sup_n Σ_{k∈K2} |ã_nk L^{-1/q_n}|^{p̀_k} < ∞",
            "exists_L",
            "row_sum",
        ),
        Condition(
            "4.19",
            "(e_nk)_k ∈ c0(q) for every n",
            "(λ_k/(λ_k − λ_{k−1}) a_nk)_{k=0}^∞ ∈ c0(q) (∀n)",
            "none",
            "row",
        ),
        Condition(
            "4.20",
            "(e_nk)_k ∈ c(q) for every n",
            "(λ_k/(λ_k − λ_{k−1}) a_nk)_{k=0}^∞ ∈ c(q) (∀n)",
            "none",
            "row",
        ),
        Condition(
            "4.21",
            "(e_nk)_k ∈ ℓ∞(q) for every n",
            "(λ_k/(λ_k − λ_{k−1}) a_nk)_{k=0}^∞ ∈ ℓ∞(q) (∀n)",
            "none",
            "row",
        ),
    )
}

TARGETS: Dict[str, Tuple[str, ...]] = {
    "lq": ("4.6", "4.7", "4.8", "4.19"),
    "c0q": ("4.9", "4.10", "4.11", "4.19"),
    "cq": ("4.12", "4.13", "4.14", "4.15", "4.16", "4.20"),
    "linfq": ("4.17", "4.18", "4.21"),
}

TARGET_NAMES = {"lq": "ℓ(q)", "c0q": "c0(q)", "cq": "c(q)", "linfq": "ℓ∞(q)"}


def get_condition(cid: str) -> Condition:
    key = cid.strip()
    if key not in CATALOG:
        raise UnsupportedCondition(f"unknown condition {cid!r}; expected 4.6 .. 4.21")
    return CATALOG[key]


def conditions_for(target: str) -> Tuple[str, ...]:
    if target not in TARGETS:
        raise UnsupportedCondition(f"unknown target {target!r}; expected one of {tuple(TARGETS)}")
    return TARGETS[target]
