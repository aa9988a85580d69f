"""Shared fixtures: the worked IFS instances used throughout the suite."""

from __future__ import annotations

from fractions import Fraction as F

import pytest

from cantormeasure.ifs import spec_from_ratios
from cantormeasure.measure import build_measure_model
from cantormeasure.overlap import classify_types, incidence_template


def make_pipeline(pairs, **kw):
    spec = spec_from_ratios(pairs, **kw)
    table = classify_types(spec)
    template = incidence_template(table)
    model = build_measure_model(spec, table, template)
    return spec, table, template, model


@pytest.fixture(scope="session")
def cantor():
    """Middle-third Cantor set: {x/3, x/3 + 2/3}; classical open-set case."""
    return make_pipeline([(F(1, 3), 0), (F(1, 3), F(2, 3))])


@pytest.fixture(scope="session")
def two_scale():
    """Three maps of ratio 1/16 with a genuine overlap at the left edge
    (the two-type instance with rho = r = 1/16)."""
    rho = r = F(1, 16)
    return make_pipeline([(rho, 0), (r, rho * (1 - r)), (r, 1 - r)])


@pytest.fixture(scope="session")
def lambda_three_scale():
    """Ratio-threshold scheme instance {x/3, x/9 + 8/27, x/3 + 2/3}."""
    return make_pipeline(
        [(F(1, 3), 0), (F(1, 9), F(8, 27)), (F(1, 3), F(2, 3))], scheme="lambda"
    )


@pytest.fixture(scope="session")
def quarter_touching():
    """Four quarter maps with touching islands: {x/4, x/4+1/4, x/4+3/8, x/4+3/4}."""
    return make_pipeline(
        [(F(1, 4), 0), (F(1, 4), F(1, 4)), (F(1, 4), F(3, 8)), (F(1, 4), F(3, 4))]
    )


@pytest.fixture(scope="session")
def sixth_relaxed():
    """Edge-identity-violating instance at rho = 1/6, run in relaxed mode."""
    rho = F(1, 6)
    return make_pipeline(
        [(rho, 0), (rho, rho * (1 - rho) / (1 + rho)), (rho, 1 - rho)],
        mode="relaxed-b",
    )


@pytest.fixture(scope="session")
def lambda_redundant_cantor():
    """Cantor ternary set written with a redundant middle map {x/3, x/9 + 2/9,
    x/3 + 2/3} under the ratio-threshold scheme; one constitutive interval
    contains another."""
    return make_pipeline(
        [(F(1, 3), 0), (F(1, 9), F(2, 9)), (F(1, 3), F(2, 3))], scheme="lambda"
    )
