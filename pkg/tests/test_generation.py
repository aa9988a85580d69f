"""Index sets, island/lake construction, frame statistics."""

from __future__ import annotations

from fractions import Fraction as F

import pytest

from cantormeasure.generation import (
    advance_index_set,
    build_frame,
    build_frames,
    frame_stats,
    initial_index_set,
    parent_index,
    total_length_identity,
    FrameTooLarge,
)
from cantormeasure.ifs import spec_from_ratios


class TestIndexSets:
    def test_sigma_first_step(self):
        spec = spec_from_ratios([(F(1, 4), 0), (F(1, 4), F(3, 8)), (F(1, 4), F(3, 4))])
        assert advance_index_set(spec, initial_index_set(), 0) == {(1,), (2,), (3,)}

    def test_sigma_counts(self):
        spec = spec_from_ratios([(F(1, 3), 0), (F(1, 3), F(2, 3))])
        m = initial_index_set()
        for k in range(5):
            m = advance_index_set(spec, m, k)
            assert len(m) == 2 ** (k + 1)

    def test_lambda_threshold_cut(self):
        # ratios (1/3, 1/9, 1/3): threshold at generation 1 is 1/9, so the
        # single-symbol words 1 and 3 extend while 2 is already deep enough
        spec = spec_from_ratios(
            [(F(1, 3), 0), (F(1, 9), F(8, 27)), (F(1, 3), F(2, 3))], scheme="lambda"
        )
        m1 = advance_index_set(spec, initial_index_set(), 0)
        assert m1 == {(1, 1), (1, 2), (1, 3), (2,), (3, 1), (3, 2), (3, 3)}
        # every word ratio obeys rho_i <= rho_min < rho_parent
        for w in m1:
            r = F(1)
            for s in w:
                r *= spec.maps[s - 1].ratio
            assert r <= F(1, 9)


class TestFrames:
    def test_root_frame(self):
        spec = spec_from_ratios([(F(1, 3), 0), (F(1, 3), F(2, 3))])
        fr = build_frame(spec, 0)
        assert fr.island_count == 1
        assert (fr.islands[0].left, fr.islands[0].right) == (0, 1)
        assert not fr.lakes

    def test_two_scale_generation_one(self):
        rho = r = F(1, 16)
        spec = spec_from_ratios([(rho, 0), (r, rho * (1 - r)), (r, 1 - r)])
        fr = build_frame(spec, 1)
        assert [(i.left, i.right) for i in fr.islands] == [
            (F(0), F(31, 256)),
            (F(15, 16), F(1)),
        ]
        assert fr.lakes == [(F(31, 256), F(15, 16))]
        assert not fr.touch_points

    def test_touching_quarters_generation_one(self):
        spec = spec_from_ratios(
            [(F(1, 4), 0), (F(1, 4), F(1, 4)), (F(1, 4), F(3, 8)), (F(1, 4), F(3, 4))]
        )
        fr = build_frame(spec, 1)
        assert [(i.left, i.right) for i in fr.islands] == [
            (F(0), F(1, 4)),
            (F(1, 4), F(5, 8)),
            (F(3, 4), F(1)),
        ]
        assert fr.touch_points == [F(1, 4)]
        assert fr.lakes == [(F(5, 8), F(3, 4))]

    def test_vertices_deduplicated(self):
        # the (1,3) and (2,1)-style collapse at generation 2
        rho = r = F(1, 16)
        spec = spec_from_ratios([(rho, 0), (r, rho * (1 - r)), (r, 1 - r)])
        fr = build_frame(spec, 2)
        assert len(fr.vertices) < 9  # 9 words, fewer distinct maps

    def test_length_identity_and_parents(self):
        rho = r = F(1, 16)
        spec = spec_from_ratios([(rho, 0), (r, rho * (1 - r)), (r, 1 - r)])
        frames = build_frames(spec, 4)
        for fr in frames:
            assert total_length_identity(fr) == 1
        for k in range(1, 5):
            parents = parent_index(frames[k - 1], frames[k])
            assert len(parents) == frames[k].island_count

    def test_deterministic_rebuild(self):
        spec = spec_from_ratios(
            [(F(1, 3), 0), (F(1, 9), F(8, 27)), (F(1, 3), F(2, 3))], scheme="lambda"
        )
        a = build_frames(spec, 3)
        b = build_frames(spec, 3)
        for fa, fb in zip(a, b):
            assert [(i.left, i.right) for i in fa.islands] == [
                (i.left, i.right) for i in fb.islands
            ]

    def test_vertex_cap(self):
        spec = spec_from_ratios([(F(1, 3), 0), (F(1, 3), F(2, 3))])
        with pytest.raises(FrameTooLarge):
            build_frames(spec, 10, vertex_cap=100)


class TestStats:
    def test_two_scale_beta_max_recurrence(self):
        # beta_max(k) = (31/256) * 16^(1-k) for k >= 1
        rho = r = F(1, 16)
        spec = spec_from_ratios([(rho, 0), (r, rho * (1 - r)), (r, 1 - r)])
        frames = build_frames(spec, 4)
        for k in range(1, 5):
            st = frame_stats(frames[k])
            assert st.beta_max == F(31, 256) * F(1, 16) ** (k - 1)

    def test_two_scale_gamma_min_gen2(self):
        rho = r = F(1, 16)
        spec = spec_from_ratios([(rho, 0), (r, rho * (1 - r)), (r, 1 - r)])
        st = frame_stats(build_frame(spec, 2))
        assert st.gamma_min == F(209, 4096)

    def test_lambda_beta_max(self):
        # beta_max(k) = 5 / (27 * 9^(k-1))
        spec = spec_from_ratios(
            [(F(1, 3), 0), (F(1, 9), F(8, 27)), (F(1, 3), F(2, 3))], scheme="lambda"
        )
        frames = build_frames(spec, 3)
        for k in range(1, 4):
            st = frame_stats(frames[k])
            assert st.beta_max == F(5, 27 * 9 ** (k - 1))

    def test_spatial_beta_ordering(self):
        rho = r = F(1, 16)
        spec = spec_from_ratios([(rho, 0), (r, rho * (1 - r)), (r, 1 - r)])
        st = frame_stats(build_frame(spec, 1))
        assert st.beta_first == F(31, 256)  # leftmost, not the smallest
        assert st.beta_last == F(1, 16)
        assert st.beta_min == F(1, 16) and st.beta_max == F(31, 256)

    def test_touching_gamma_zero(self):
        spec = spec_from_ratios(
            [(F(1, 4), 0), (F(1, 4), F(1, 4)), (F(1, 4), F(3, 8)), (F(1, 4), F(3, 4))]
        )
        st = frame_stats(build_frame(spec, 1))
        assert st.gamma_min == 0
        assert st.gamma_min_pos == F(1, 8)
