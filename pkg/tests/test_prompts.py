import pytest
from hypothesis import given, settings, strategies as st

from g2m.prompts import (ColorMapping, build_prompt, extract_mapping, max_tokens)


def test_prompt_contains_required_output_line():
    text = build_prompt(2, 2, {"White": 0, "Red": 1})
    assert "Return ONLY a Python list of lists (e.g., [[0, 1], [2, 0]])." in text
    assert "Do not use markdown, code blocks, or explanations." in text
    assert "Transcribe the 2 x 2 pixel grid" in text
    assert "exactly 2 rows and 2 columns" in text


def test_mapping_serialized_sorted_by_value():
    text = build_prompt(3, 3, {"Blue": 2, "White": 0, "Red": 1})
    assert "Color Mapping: {White: 0, Red: 1, Blue: 2}" in text


def test_minimal_substitution():
    text = build_prompt(1, 1, {"White": 0})
    assert "1 x 1 pixel grid" in text
    assert "Color Mapping: {White: 0}" in text
    assert "exactly 1 rows and 1 columns" in text


def test_prompt_is_idempotent_and_injective():
    a1 = build_prompt(2, 2, {"White": 0, "Red": 1})
    a2 = build_prompt(2, 2, {"Red": 1, "White": 0})
    assert a1 == a2
    others = [build_prompt(2, 3, {"White": 0, "Red": 1}),
              build_prompt(3, 2, {"White": 0, "Red": 1}),
              build_prompt(2, 2, {"White": 0, "Blue": 1})]
    assert len({a1, *others}) == 4


def test_mapping_roundtrips_out_of_prompt():
    mapping = ColorMapping.from_palette(5)
    text = build_prompt(4, 4, mapping)
    assert extract_mapping(text).pairs == mapping.pairs


def test_invalid_mappings_rejected():
    with pytest.raises(ValueError):
        build_prompt(2, 2, {})
    with pytest.raises(ValueError):
        ColorMapping((("White", 0), ("Red", 2)))  # gap
    with pytest.raises(ValueError):
        ColorMapping((("White", 0), ("White", 1)))


def test_build_prompt_rejects_bad_dims():
    with pytest.raises(ValueError):
        build_prompt(0, 2, {"White": 0})


def test_token_budget_spot_values():
    assert max_tokens(12, 12) == 866
    assert max_tokens(32, 32) == 2048
    assert max_tokens(1, 1) == 74


@given(h=st.integers(1, 64), w=st.integers(1, 64))
@settings(max_examples=100, deadline=None)
def test_token_budget_monotone_and_capped(h, w):
    base = max_tokens(h, w)
    assert base == min(h * w * 4 + h * 20 + 50, 2048)
    assert base <= 2048
    if h < 64:
        assert max_tokens(h + 1, w) >= base
    if w < 64:
        assert max_tokens(h, w + 1) >= base
