"""Abstract segment extraction and deterministic fragment removal.

Seven marker patterns split an abstract into problem / solution / effect /
field / substance segments; removal filters a fragment out of a target text
after case folding and whitespace collapsing so that asymmetric-retrieval
targets never leak their query fragment.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import SEPARATOR
from .errors import FragmentIsWholeText

_SELECTED_DRAWING = "SELECTED DRAWING"
_SENTENCE_ENDS = ".!?"


@dataclass(frozen=True)
class SegmentSet:
    problem: str | None = None
    solution: str | None = None
    effect: str | None = None
    field: str | None = None
    substance: str | None = None
    matched_pattern: int | None = None

    def get(self, name: str) -> str | None:
        return getattr(self, name)

    def is_empty(self) -> bool:
        return self.matched_pattern is None


def _strip_selected_drawing(text: str) -> str:
    idx = text.find(_SELECTED_DRAWING)
    return text[:idx] if idx >= 0 else text


def first_sentence(text: str) -> str:
    """Truncate at the first '.', '!' or '?' followed by whitespace or end."""
    for i, ch in enumerate(text):
        if ch in _SENTENCE_ENDS and (i + 1 == len(text) or text[i + 1].isspace()):
            return text[: i + 1]
    return text


def _last_comma_value(text: str) -> str:
    return text.split(",")[-1].strip()


def _two_marker(text: str, first: str, second: str) -> tuple[str, str] | None:
    i = text.find(first)
    if i < 0:
        return None
    j = text.find(second, i + len(first))
    if j < 0:
        return None
    return text[i + len(first) : j].strip(), text[j + len(second) :].strip()


def _three_marker(text: str) -> tuple[str, str, str] | None:
    i = text.find("FIELD:")
    if i < 0:
        return None
    j = text.find("SUBSTANCE:", i + len("FIELD:"))
    if j < 0:
        return None
    k = text.find("EFFECT:", j + len("SUBSTANCE:"))
    if k < 0:
        return None
    return (
        text[i + len("FIELD:") : j].strip(),
        text[j + len("SUBSTANCE:") : k].strip(),
        text[k + len("EFFECT:") :].strip(),
    )


def extract_segments(abstract: str) -> SegmentSet:
    """Try the seven patterns in order; first pattern yielding a non-empty
    segment wins. No match returns an empty SegmentSet."""
    text = _strip_selected_drawing(abstract).strip()
    if not text:
        return SegmentSet()

    two_marker_patterns = (
        (1, "PROBLEM TO BE SOLVED:", "SOLUTION:"),
        (2, "PROBLEM:", "SOLUTION:"),
        (3, "PURPOSE:", "CONSTITUTION:"),
        (4, "[problem]", "[solution]"),
    )
    for number, first, second in two_marker_patterns:
        got = _two_marker(text, first, second)
        if got is not None:
            problem, solution = got
            if problem or solution:
                return SegmentSet(
                    problem=problem or None,
                    solution=solution or None,
                    matched_pattern=number,
                )

    got3 = _three_marker(text)
    if got3 is not None:
        field, substance, effect = got3
        field = _last_comma_value(field)
        effect = first_sentence(effect)
        if field or substance or effect:
            return SegmentSet(
                field=field or None,
                substance=substance or None,
                effect=effect or None,
                matched_pattern=5,
            )

    got6 = _two_marker(text, "SOLUTION:", "EFFECT:")
    if got6 is not None:
        solution, effect = got6
        effect = first_sentence(effect)
        if solution or effect:
            return SegmentSet(solution=solution or None, effect=effect or None, matched_pattern=6)

    i = text.find("SOLUTION:")
    if i >= 0:
        problem = text[:i].strip()
        solution = text[i + len("SOLUTION:") :].strip()
        if problem or solution:
            return SegmentSet(problem=problem or None, solution=solution or None, matched_pattern=7)

    return SegmentSet()


def _fold_with_spans(text: str) -> tuple[str, list[int], list[int]]:
    """Casefold and collapse whitespace, keeping original [start, end) spans
    per folded character (casefold may expand one char into several)."""
    folded: list[str] = []
    origin: list[int] = []
    for i, ch in enumerate(text):
        for fc in ch.casefold():
            folded.append(fc)
            origin.append(i)
    out: list[str] = []
    starts: list[int] = []
    ends: list[int] = []
    i, n = 0, len(folded)
    while i < n:
        if folded[i].isspace():
            j = i
            while j < n and folded[j].isspace():
                j += 1
            out.append(" ")
            starts.append(origin[i])
            ends.append(origin[j - 1] + 1)
            i = j
        else:
            out.append(folded[i])
            starts.append(origin[i])
            ends.append(origin[i] + 1)
            i += 1
    return "".join(out), starts, ends


def normalize_text(text: str) -> str:
    """Case fold, collapse whitespace runs, strip.

    Equivalent to the span-tracking fold (casefold is context-free and
    str.split shares isspace semantics), but runs at C speed for the
    scan-heavy callers."""
    return " ".join(text.casefold().split())


def _cleanup(text: str) -> str:
    """Collapse whitespace and drop dangling separator tokens."""
    tokens = text.split()
    cleaned: list[str] = []
    for tok in tokens:
        if tok == SEPARATOR and (not cleaned or cleaned[-1] == SEPARATOR):
            continue
        cleaned.append(tok)
    while cleaned and cleaned[-1] == SEPARATOR:
        cleaned.pop()
    return " ".join(cleaned)


def contains_normalized(target: str, fragment: str) -> bool:
    frag = normalize_text(fragment)
    return bool(frag) and frag in normalize_text(target)


def remove_fragment(target_text: str, fragment: str) -> str:
    """Remove every normalized occurrence of ``fragment`` from the target.

    Occurrences are located case-insensitively with whitespace runs treated
    as single spaces; the surviving text keeps its original casing. The
    normalized fragment is guaranteed absent from the normalized result.
    """
    frag = normalize_text(fragment)
    if not frag:
        raise ValueError("fragment must be non-empty")
    text = target_text
    while True:
        folded, starts, ends = _fold_with_spans(text)
        idx = folded.find(frag)
        if idx < 0:
            break
        a = starts[idx]
        b = ends[idx + len(frag) - 1]
        text = text[:a] + " " + text[b:]
    result = _cleanup(text)
    if not result:
        raise FragmentIsWholeText(fragment)
    return result
