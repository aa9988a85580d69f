"""Spec parsing, validation and exact word composition."""

from __future__ import annotations

import json
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cantormeasure.ifs import (
    AffineMap,
    SpecError,
    compose_word,
    parse_spec,
    spec_from_ratios,
)


def cfg(maps, **extra):
    doc = {"maps": [{"rho": r, "b": b} for r, b in maps]}
    doc.update(extra)
    return json.dumps(doc)


class TestParse:
    def test_cantor_ternary(self):
        spec = parse_spec(cfg([("1/3", "0"), ("1/3", "2/3")]))
        assert spec.m == 2
        assert spec.maps[0].ratio == F(1, 3)
        assert spec.maps[1].offset == F(2, 3)
        assert spec.scheme == "sigma" and spec.mode == "standard"

    def test_quarter_maps(self):
        spec = parse_spec(
            cfg([("1/4", "0"), ("1/4", "1/4"), ("1/4", "3/8"), ("1/4", "3/4")])
        )
        assert spec.m == 4

    def test_ratio_out_of_range(self):
        with pytest.raises(SpecError, match="contraction ratio out of range"):
            parse_spec(cfg([("1", "0"), ("1/3", "2/3")]))

    def test_negative_ratio_rejected(self):
        with pytest.raises(SpecError, match="orientation-reversing"):
            parse_spec(cfg([("-1/3", "1/3"), ("1/3", "2/3")]))

    def test_image_escapes(self):
        with pytest.raises(SpecError, match="escapes"):
            parse_spec(cfg([("1/3", "0"), ("1/2", "2/3")]))

    def test_edges_pinned(self):
        with pytest.raises(SpecError, match="fix 0"):
            parse_spec(cfg([("1/3", "1/100"), ("1/3", "2/3")]))
        with pytest.raises(SpecError, match="fix 1"):
            parse_spec(cfg([("1/3", "0"), ("1/3", "3/5")]))

    def test_malformed(self):
        with pytest.raises(SpecError):
            parse_spec("{not json")
        with pytest.raises(SpecError):
            parse_spec(json.dumps({"maps": []}))
        with pytest.raises(SpecError):
            parse_spec(json.dumps({"maps": [{"rho": "1/3"}]}))

    def test_unsorted_input_resorted(self):
        spec = parse_spec(cfg([("1/3", "2/3"), ("1/3", "0")]))
        assert spec.maps[0].offset == 0
        assert spec.input_order == (1, 0)

    def test_lambda_scheme_and_tolerances(self):
        spec = parse_spec(
            cfg([("1/3", "0"), ("1/3", "2/3")], scheme="lambda", alpha_tol=1e-10)
        )
        assert spec.scheme == "lambda"
        assert spec.alpha_tol == 1e-10


class TestCompose:
    def test_cantor_word(self):
        spec = spec_from_ratios([(F(1, 3), 0), (F(1, 3), F(2, 3))])
        m = compose_word(spec, (1, 2))
        assert m.ratio == F(1, 9) and m.offset == F(2, 9)

    def test_empty_word_is_identity(self):
        spec = spec_from_ratios([(F(1, 3), 0), (F(1, 3), F(2, 3))])
        m = compose_word(spec, ())
        assert m == AffineMap.identity()

    def test_three_scale_overlap_identity(self):
        # composition collapse: the (1,3,3) and (2,1) words act identically
        spec = spec_from_ratios(
            [(F(1, 3), 0), (F(1, 9), F(8, 27)), (F(1, 3), F(2, 3))], scheme="lambda"
        )
        assert compose_word(spec, (1, 3, 3)) == compose_word(spec, (2, 1))

    def test_out_of_range_symbol(self):
        spec = spec_from_ratios([(F(1, 3), 0), (F(1, 3), F(2, 3))])
        with pytest.raises(SpecError):
            compose_word(spec, (3,))

    @given(
        st.lists(st.integers(1, 3), max_size=6),
        st.lists(st.integers(1, 3), max_size=6),
    )
    @settings(max_examples=50)
    def test_concatenation_is_composition(self, w1, w2):
        rho = r = F(1, 16)
        spec = spec_from_ratios([(rho, 0), (r, rho * (1 - r)), (r, 1 - r)])
        left = compose_word(spec, tuple(w1) + tuple(w2))
        right = compose_word(spec, tuple(w1)).compose(compose_word(spec, tuple(w2)))
        assert left == right

    @given(st.lists(st.integers(1, 2), max_size=8))
    def test_ratio_is_product(self, w):
        spec = spec_from_ratios([(F(1, 3), 0), (F(1, 5), F(4, 5))])
        m = compose_word(spec, tuple(w))
        expected = F(1)
        for s in w:
            expected *= spec.maps[s - 1].ratio
        assert m.ratio == expected
