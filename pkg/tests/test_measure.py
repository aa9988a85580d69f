"""Dimension solving, the eigenvector, and the normalized island measure.

Expected values are computed with mpmath, independently of the certified
pipeline: the three-scale instance's dimension against the largest root of
its characteristic cubic, the quarter-map instance against its closed form,
and eigenvector coordinates against the measure identities they must satisfy.
"""

from __future__ import annotations

import random
from fractions import Fraction as F

import mpmath
import pytest

from cantormeasure.generation import build_frames, parent_index
from cantormeasure.ifs import spec_from_ratios
from cantormeasure.measure import (
    attach_measures,
    build_measure_model,
    interval_measure,
    is_degenerate,
    solve_dimension,
    spectral_radius,
    template_matrix,
)
from cantormeasure.numerics import CertifiedReal, cr_sum, pow_certified
from cantormeasure.overlap import classify_types, incidence_template

mpmath.mp.dps = 50


def midf(cr) -> float:
    return float(cr.midpoint())


class TestDimension:
    def test_cantor_log3_2(self, cantor):
        _, _, _, model = cantor
        expected = mpmath.log(2) / mpmath.log(3)
        assert abs(midf(model.alpha) - float(expected)) < 1e-12

    def test_lambda_cubic_root(self, lambda_three_scale):
        # dimension = log(largest root of x^3 - 6x^2 + 5x - 1) / log 9,
        # verified by independent polynomial evaluation
        _, _, _, model = lambda_three_scale
        roots = mpmath.polyroots([1, -6, 5, -1])
        largest = max(r.real for r in roots if abs(r.imag) < 1e-30)
        expected = mpmath.log(largest) / mpmath.log(9)
        assert abs(midf(model.alpha) - float(expected)) < 1e-12
        nine_alpha = mpmath.mpf(9) ** mpmath.mpf(midf(model.alpha))
        assert abs(mpmath.polyval([1, -6, 5, -1], nine_alpha)) < 1e-9

    def test_quarter_closed_form(self, quarter_touching):
        _, _, _, model = quarter_touching
        expected = mpmath.log(5 + mpmath.sqrt(5)) / mpmath.log(4) - mpmath.mpf(1) / 2
        assert abs(midf(model.alpha) - float(expected)) < 1e-10

    def test_two_scale_equation(self, two_scale):
        spec, _, _, model = two_scale
        a = mpmath.mpf(midf(model.alpha))
        rho = mpmath.mpf(1) / 16
        resid = rho**a + 2 * rho**a - (rho * rho) ** a - 1
        assert abs(resid) < 1e-10

    def test_general_two_scale_random_pairs(self):
        rng = random.Random(421)
        for _ in range(5):
            rho = F(rng.randint(2, 20), rng.randint(30, 80))
            r = F(rng.randint(2, 20), rng.randint(30, 80))
            if rho + 2 * r - rho * r >= 1:
                continue
            spec = spec_from_ratios([(rho, 0), (r, rho * (1 - r)), (r, 1 - r)])
            table = classify_types(spec)
            model = build_measure_model(spec, table)
            a = mpmath.mpf(midf(model.alpha))
            rr, rf = mpmath.mpf(rho.numerator) / rho.denominator, mpmath.mpf(r.numerator) / r.denominator
            resid = rr**a + 2 * rf**a - (rr * rf) ** a - 1
            assert abs(resid) < 1e-10, (rho, r)

    def test_degenerate_unit_interval(self):
        # rho + 2r - rho*r = 1 forces dimension 1 (the attractor is [0,1])
        rho = F(1, 2)
        r = (1 - rho) / (2 - rho)
        assert rho + 2 * r - rho * r == 1
        spec = spec_from_ratios([(rho, 0), (r, rho * (1 - r)), (r, 1 - r)])
        table = classify_types(spec)
        template = incidence_template(table)
        assert is_degenerate(template)
        model = build_measure_model(spec, table, template)
        assert model.degenerate
        assert model.alpha.contains(1)

    def test_spectral_radius_strictly_decreasing(self, two_scale):
        _, _, template, model = two_scale
        a = model.alpha.midpoint()
        samples = [F(0), a / 2, a, (1 + a) / 2]
        values = [spectral_radius(template_matrix(template, s)) for s in samples]
        for prev, nxt in zip(values, values[1:]):
            assert prev.certainly_gt(nxt)

    def test_osc_moran_equation(self, cantor):
        # single-type case: sum of ratio^alpha = 1
        spec, _, _, model = cantor
        total = cr_sum(pow_certified(s.ratio, model.alpha) for s in spec.maps)
        assert total.contains(1) or abs(midf(total) - 1) < 1e-12


class TestEigenvector:
    def test_single_type_normalization(self, cantor):
        _, _, _, model = cantor
        assert len(model.perron) == 1
        assert model.perron[0].lo == 1 and model.perron[0].hi == 1

    def test_two_scale_coordinate(self, two_scale):
        # a_2 = (1 - 16^-alpha) * (256/31)^alpha, equivalently
        # lambda(I_2) = 1 - r^alpha for the leftmost generation-1 island
        _, table, _, model = two_scale
        a = mpmath.mpf(midf(model.alpha))
        expected = (1 - mpmath.mpf(16) ** (-a)) * (mpmath.mpf(256) / 31) ** a
        assert abs(midf(model.perron[1]) - float(expected)) < 1e-9

    def test_lambda_island_measures(self, lambda_three_scale):
        # lambda(I_2) = 3^-a - 9^-a and lambda(I_3) = 1 - 2*3^-a + 9^-a
        _, table, _, model = lambda_three_scale
        a = mpmath.mpf(midf(model.alpha))
        frames = build_frames(table.spec, 1, _cache=table.frames)
        islands = frames[1].islands
        i2 = next(i for i in islands if i.left == 0)
        i3 = next(i for i in islands if i.left == F(2, 9))
        got2 = midf(model.island_measure(i2))
        got3 = midf(model.island_measure(i3))
        assert abs(got2 - float(3**-a - 9**-a)) < 1e-10
        assert abs(got3 - float(1 - 2 * 3**-a + 9**-a)) < 1e-10

    def test_residual_certified(self, quarter_touching):
        _, _, template, model = quarter_touching
        mat = template_matrix(template, model.alpha)
        for i in range(template.q):
            acc = -model.perron[i]
            for j in range(template.q):
                acc = acc + mat[i][j] * model.perron[j]
            assert abs(float(acc.lo)) < 1e-9 and abs(float(acc.hi)) < 1e-9


class TestIslandMeasure:
    def test_root_island_mass_one(self, two_scale):
        _, table, _, model = two_scale
        frames = build_frames(table.spec, 0, _cache=table.frames)
        assert model.island_measure(frames[0].islands[0]).contains(1)

    def test_mass_conservation_per_frame(self, two_scale, quarter_touching):
        for fix in (two_scale, quarter_touching):
            _, table, _, model = fix
            frames = build_frames(table.spec, 4, _cache=table.frames)
            for k in range(5):
                attach_measures(model, frames[k])
                total = cr_sum(frames[k].island_measures)
                assert abs(midf(total) - 1) < 1e-10

    def test_parent_equals_sum_of_children(self, lambda_three_scale):
        _, table, _, model = lambda_three_scale
        frames = build_frames(table.spec, 3, _cache=table.frames)
        for k in range(1, 4):
            attach_measures(model, frames[k])
            parents = parent_index(frames[k - 1], frames[k])
            sums = [CertifiedReal.exact_int(0)] * frames[k - 1].island_count
            for idx, p in enumerate(parents):
                sums[p] = sums[p] + frames[k].island_measures[idx]
            for isl, total in zip(frames[k - 1].islands, sums):
                assert abs(midf(model.island_measure(isl)) - midf(total)) < 1e-10

    def test_interval_measure_queries(self, two_scale):
        _, table, _, model = two_scale
        frames = build_frames(table.spec, 2, _cache=table.frames)
        fr = frames[1]
        whole = interval_measure(model, fr, F(0), F(1))
        assert whole.contains(1) or abs(midf(whole) - 1) < 1e-12
        single = interval_measure(model, fr, F(15, 16), F(1))
        attach_measures(model, fr)
        assert abs(midf(single) - midf(fr.island_measures[1])) < 1e-12
        # lake spans carry no measure
        lake = interval_measure(model, fr, F(31, 256), F(15, 16))
        assert abs(midf(lake)) < 1e-15

    def test_interval_measure_rejects_non_field_points(self, two_scale):
        _, table, _, model = two_scale
        frames = build_frames(table.spec, 1, _cache=table.frames)
        with pytest.raises(ValueError, match="field points"):
            interval_measure(model, frames[1], F(1, 7), F(1))
