"""Lower-bound probes of multiplier norms."""

from __future__ import annotations

import pytest

from burkholder_lab.constants import beurling_ceilings
from burkholder_lab.errors import DomainError
from burkholder_lab.multipliers.probes import operator_ratio_probe
from burkholder_lab.multipliers.symbols import symbol_beurling, symbol_identity
from burkholder_lab.suites import COMPLEX_BEURLING_CEILINGS


def test_beurling_probe_at_two_sees_the_isometry(small_grid):
    report = operator_ratio_probe(symbol_beurling(small_grid), 2.0, trials=6, ceiling=1.0)
    assert report.passed
    assert report.max_ratio == pytest.approx(1.0, abs=1e-2)
    assert set(report.ratios_by_family) == {"bumps", "bandlimited", "lehto"}


def test_beurling_probe_stays_under_the_best_ceiling(small_grid):
    ceilings = beurling_ceilings(4.0)
    ceiling = min(ceilings[k] for k in COMPLEX_BEURLING_CEILINGS if k in ceilings)
    report = operator_ratio_probe(symbol_beurling(small_grid), 4.0, trials=6, ceiling=ceiling)
    assert report.passed
    assert report.max_ratio <= ceiling


def test_probe_results_depend_only_on_the_seed(small_grid):
    m = symbol_beurling(small_grid)
    first = operator_ratio_probe(m, 3.0, trials=4, seed=9)
    second = operator_ratio_probe(m, 3.0, trials=4, seed=9)
    assert first == second


def test_identity_has_ratio_one_on_every_family(small_grid):
    report = operator_ratio_probe(symbol_identity(small_grid), 3.0, trials=3)
    assert report.max_ratio == pytest.approx(1.0, abs=1e-12)
    assert report.passed


@pytest.mark.parametrize(
    "kwargs", [{"families": ("bumps", "spirals")}, {"families": ()}, {"trials": 0}]
)
def test_probe_rejects_bad_arguments(small_grid, kwargs):
    with pytest.raises(DomainError):
        operator_ratio_probe(symbol_beurling(small_grid), 3.0, **kwargs)
