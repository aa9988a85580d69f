"""Overlap-type classification, incidence template, irreducibility."""

from __future__ import annotations

from fractions import Fraction as F

import pytest

from cantormeasure.generation import build_frames
from cantormeasure.ifs import spec_from_ratios
from cantormeasure.overlap import (
    GFTCNotConfirmed,
    IncidenceTemplate,
    check_irreducible,
    classify_types,
    ensure_types,
    incidence_template,
)


class TestClassification:
    def test_open_set_case_single_type(self, cantor):
        _, table, _, _ = cantor
        assert table.q == 1
        assert table.k0 == 0
        assert table.confirmed

    def test_two_scale_types(self, two_scale):
        _, table, _, _ = two_scale
        assert table.q == 2
        assert table.k0 == 1
        rep2 = table.type_of(2).representative
        assert (rep2.left, rep2.right) == (0, F(31, 256))

    def test_lambda_three_types(self, lambda_three_scale):
        _, table, _, _ = lambda_three_scale
        assert table.q == 3

    def test_touching_quarters_three_types(self, quarter_touching):
        _, table, _, _ = quarter_touching
        assert table.q == 3
        assert table.k0 == 2

    def test_k0_minimality_by_scan(self, quarter_touching):
        # k0 really is the last generation bringing a new type
        _, table, _, _ = quarter_touching
        frames = build_frames(table.spec, table.k0 + 1, _cache=table.frames)
        ensure_types(table, table.k0 + 1)
        seen: set[int] = set()
        new_at = []
        for k in range(table.k0 + 2):
            fresh = {i.type_id for i in frames[k].islands} - seen
            if fresh:
                new_at.append(k)
            seen |= fresh
        assert max(new_at) == table.k0
        assert len(seen) == table.q

    def test_not_confirmed_within_budget(self):
        # two half-scale maps overlapping by a third: the relative overlap
        # pattern never recurs, so the budgeted classification must refuse
        spec = spec_from_ratios(
            [(F(1, 2), 0), (F(1, 2), F(1, 3)), (F(1, 6), F(5, 6))]
        )
        with pytest.raises(GFTCNotConfirmed):
            classify_types(spec, max_generations=8)

    def test_type_reconstruction_roundtrip(self, two_scale):
        # virtual expansion of child descriptors reproduces materialized
        # frames exactly (geometry and types)
        _, table, _, _ = two_scale
        build_frames(table.spec, 4, _cache=table.frames)
        ensure_types(table, 4)  # raises on any mismatch


class TestIncidenceTemplate:
    def test_two_scale_entries(self, two_scale):
        # exact entries for the general two-type overlap instance
        spec, table, template, _ = two_scale
        rho = spec.maps[0].ratio
        r = spec.maps[1].ratio
        merged = rho + r - rho * r
        assert template.entries[0][0] == (r,)
        assert template.entries[0][1] == (merged,)
        assert template.entries[1][0] == (r * r / merged,)
        assert tuple(sorted(template.entries[1][1])) == tuple(sorted((rho, r)))

    def test_touching_quarters_zero_entry(self, quarter_touching):
        _, _, template, _ = quarter_touching
        assert template.entries[0][2] == ()
        counts = template.child_counts()
        assert counts[0][2] == 0

    def test_cantor_single_entry(self, cantor):
        _, _, template, _ = cantor
        assert template.entries[0][0] == (F(1, 3), F(1, 3))

    def test_lambda_entries_match_child_counts(self, lambda_three_scale):
        _, table, template, _ = lambda_three_scale
        counts = template.child_counts()
        # child-count matrix of the three-scale ratio-threshold instance
        assert counts == [[1, 2, 1], [1, 3, 1], [1, 3, 2]]


class TestIrreducibility:
    def test_examples_irreducible(self, cantor, two_scale, lambda_three_scale, quarter_touching):
        for fix in (cantor, two_scale, lambda_three_scale, quarter_touching):
            assert check_irreducible(fix[2])

    def test_diagonal_only_reducible(self):
        template = IncidenceTemplate(
            q=2,
            entries=(
                ((F(1, 2),), ()),
                ((), (F(1, 3),)),
            ),
        )
        assert not check_irreducible(template)

    def test_single_type_self_loop(self):
        template = IncidenceTemplate(q=1, entries=(((F(1, 3), F(1, 3)),),))
        assert check_irreducible(template)
