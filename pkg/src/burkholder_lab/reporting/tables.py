"""Tables of constants and check records as pandas frames."""

from __future__ import annotations

import pandas as pd

from burkholder_lab.constants import (
    choi_bracket,
    choi_cp_approx,
    cot_constant,
    csc_constant,
    davis_d1,
    osekowski_cpinf,
    p_star,
    sigma_p,
    weak_dp,
    weak_subordinate_constant,
)
from burkholder_lab.errors import DomainError
from burkholder_lab.models import CheckRecord

# D_p has no known closed form beyond p = 2.
OPEN_WEAK_CONSTANT = "open (2 < p)"

CONSTANT_COLUMNS = [
    "p",
    "p_star",
    "burkholder",
    "cot",
    "csc",
    "davis_d1",
    "weak_subordinate",
    "weak_orthogonal",
    "c_p_inf",
    "choi_approx",
    "choi_lower",
    "choi_upper",
    "sigma",
]

RECORD_COLUMNS = ["suite", "paper_ref", "check", "value", "bound", "pass"]


def constants_row(p: float) -> dict[str, float | str]:
    if not p > 1:
        raise DomainError(f"every exponent must exceed 1, got {p}")
    star = p_star(p)
    lower, upper = choi_bracket(p)
    return {
        "p": p,
        "p_star": star,
        "burkholder": star - 1.0,
        "cot": cot_constant(p),
        "csc": csc_constant(p),
        "davis_d1": davis_d1(),
        "weak_subordinate": weak_subordinate_constant(p),
        "weak_orthogonal": weak_dp(p) if p <= 2.0 else OPEN_WEAK_CONSTANT,
        "c_p_inf": osekowski_cpinf(p),
        "choi_approx": choi_cp_approx(p),
        "choi_lower": lower,
        "choi_upper": upper,
        "sigma": sigma_p(p),
    }


def constants_table(p_list: list[float]) -> pd.DataFrame:
    """One row per exponent, in the order given."""
    return pd.DataFrame([constants_row(p) for p in p_list], columns=CONSTANT_COLUMNS)


def records_table(records: list[CheckRecord]) -> pd.DataFrame:
    rows = [
        {
            "suite": record.suite,
            "paper_ref": record.citation,
            "check": record.check,
            "value": record.value,
            "bound": record.bound,
            "pass": record.passed,
        }
        for record in records
    ]
    return pd.DataFrame(rows, columns=RECORD_COLUMNS)
