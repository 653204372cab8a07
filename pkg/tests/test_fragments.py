"""Segment extraction patterns and normalized fragment removal."""

import pytest
from hypothesis import given, strategies as st

from patenteb.errors import FragmentIsWholeText
from patenteb.fragments import (
    contains_normalized,
    extract_segments,
    first_sentence,
    normalize_text,
    remove_fragment,
)


class TestExtractSegments:
    def test_pattern_1(self):
        seg = extract_segments("PROBLEM TO BE SOLVED: X SOLUTION: Y")
        assert (seg.problem, seg.solution, seg.matched_pattern) == ("X", "Y", 1)

    def test_pattern_2(self):
        seg = extract_segments("PROBLEM: cold joints SOLUTION: preheating")
        assert (seg.problem, seg.solution, seg.matched_pattern) == ("cold joints", "preheating", 2)

    def test_pattern_3(self):
        seg = extract_segments("PURPOSE: lighter frame CONSTITUTION: hollow struts")
        assert (seg.problem, seg.solution, seg.matched_pattern) == (
            "lighter frame",
            "hollow struts",
            3,
        )

    def test_pattern_4(self):
        seg = extract_segments("[problem] noisy fan [solution] rubber mounts")
        assert (seg.problem, seg.solution, seg.matched_pattern) == (
            "noisy fan",
            "rubber mounts",
            4,
        )

    def test_pattern_5_field_substance_effect(self):
        seg = extract_segments("FIELD: a, b SUBSTANCE: S EFFECT: E1. E2.")
        assert seg.matched_pattern == 5
        assert seg.field == "b"  # final comma-separated value
        assert seg.substance == "S"
        assert seg.effect == "E1."  # first sentence only

    def test_pattern_6(self):
        seg = extract_segments("SOLUTION: W EFFECT: faster cure. cheaper too.")
        assert (seg.solution, seg.effect, seg.matched_pattern) == ("W", "faster cure.", 6)

    def test_pattern_7_standalone_solution(self):
        seg = extract_segments("Z SOLUTION: W")
        assert (seg.problem, seg.solution, seg.matched_pattern) == ("Z", "W", 7)

    def test_pattern_1_beats_2(self):
        seg = extract_segments("PROBLEM TO BE SOLVED: x PROBLEM: y SOLUTION: z")
        assert seg.matched_pattern == 1

    def test_selected_drawing_stripped(self):
        seg = extract_segments("PROBLEM: X SOLUTION: Y SELECTED DRAWING: Figure 3")
        assert seg.solution == "Y"

    def test_selected_drawing_only_yields_empty(self):
        seg = extract_segments("SELECTED DRAWING: Figure 3")
        assert seg.is_empty()

    def test_no_match(self):
        assert extract_segments("plain text with no markers").is_empty()

    def test_empty_abstract(self):
        assert extract_segments("").is_empty()

    def test_lowercase_markers_do_not_match(self):
        assert extract_segments("problem: x solution: y").is_empty()


class TestFirstSentence:
    def test_period_space(self):
        assert first_sentence("E1. E2.") == "E1."

    def test_decimal_not_boundary(self):
        assert first_sentence("rate of 1.5 per cycle. next.") == "rate of 1.5 per cycle."

    def test_no_boundary(self):
        assert first_sentence("no boundary here") == "no boundary here"


class TestRemoveFragment:
    def test_exact_prefix_removal_trims_separator(self):
        assert remove_fragment("T [SEP] A", "T") == "A"

    def test_absent_fragment_unchanged(self):
        assert remove_fragment("A [SEP] B", "zzz") == "A [SEP] B"

    def test_case_and_space_insensitive(self):
        assert remove_fragment("The  Quick FOX jumps", "the quick fox") == "jumps"

    def test_all_occurrences_removed(self):
        out = remove_fragment("x marker y marker z", "marker")
        assert out == "x y z"

    def test_whole_text_raises(self):
        with pytest.raises(FragmentIsWholeText):
            remove_fragment("only this", "ONLY  THIS")

    def test_idempotent(self):
        once = remove_fragment("alpha beta gamma beta", "beta")
        assert remove_fragment(once, "beta") == once

    def test_guarantee_no_normalized_substring(self):
        out = remove_fragment("aa bb aa bb cc", "bb")
        assert "bb" not in normalize_text(out)

    def test_overlap_recursion(self):
        # removing the inner occurrence exposes a new one; the loop catches it
        out = remove_fragment("b b a a b", "b a")
        assert not contains_normalized(out, "b a")

    @given(
        st.lists(
            st.text(alphabet="abcXYZ", min_size=1, max_size=4), min_size=3, max_size=12
        ),
        st.data(),
    )
    def test_random_case_space_perturbations(self, tokens, data):
        text = " ".join(tokens)
        start = data.draw(st.integers(0, len(tokens) - 1))
        end = data.draw(st.integers(start + 1, len(tokens)))
        fragment_tokens = tokens[start:end]
        # perturb case and spacing arbitrarily
        perturbed = "  ".join(
            t.upper() if data.draw(st.booleans()) else t.lower() for t in fragment_tokens
        )
        try:
            out = remove_fragment(text, perturbed)
        except FragmentIsWholeText:
            return
        assert normalize_text(perturbed) not in normalize_text(out)


class TestNormalize:
    def test_casefold_and_collapse(self):
        assert normalize_text("  A\t\nB  c ") == "a b c"

    def test_contains_normalized(self):
        assert contains_normalized("The Quick  Fox", "quick fox")
        assert not contains_normalized("The Quick Fox", "slow fox")
