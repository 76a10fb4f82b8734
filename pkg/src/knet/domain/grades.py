"""Letter-grade scale and course-title normalization.

The scale is the conventional Turkish university banding. A guide must
have passed a course with at least CC (the unconditional pass) to be
eligible to mentor it, so the band table below is load-bearing for
matching, not just for display.
"""

from __future__ import annotations

import unicodedata
from enum import Enum

from ..errors import ValidationError


class LetterGrade(str, Enum):
    AA = "AA"
    BA = "BA"
    BB = "BB"
    CB = "CB"
    CC = "CC"
    DC = "DC"
    DD = "DD"
    FD = "FD"
    FF = "FF"


# Worst to best; index is the comparison rank.
LETTER_ORDER: tuple[LetterGrade, ...] = (
    LetterGrade.FF,
    LetterGrade.FD,
    LetterGrade.DD,
    LetterGrade.DC,
    LetterGrade.CC,
    LetterGrade.CB,
    LetterGrade.BB,
    LetterGrade.BA,
    LetterGrade.AA,
)

# Lower bound of each band, scanned from the top: score >= bound wins.
GRADE_BANDS: tuple[tuple[float, LetterGrade], ...] = (
    (90.0, LetterGrade.AA),
    (85.0, LetterGrade.BA),
    (80.0, LetterGrade.BB),
    (73.0, LetterGrade.CB),
    (65.0, LetterGrade.CC),
    (58.0, LetterGrade.DC),
    (50.0, LetterGrade.DD),
    (40.0, LetterGrade.FD),
    (0.0, LetterGrade.FF),
)

PASSING_LETTER = LetterGrade.CC


def map_score_to_letter(score: float) -> LetterGrade:
    """Map a 0..100 score onto the letter scale."""
    if not isinstance(score, (int, float)) or isinstance(score, bool):
        raise ValidationError(f"score must be a number, got {type(score).__name__}")
    if not 0 <= score <= 100:
        raise ValidationError(f"score must be within [0, 100], got {score}")
    for bound, letter in GRADE_BANDS:
        if score >= bound:
            return letter
    raise AssertionError("unreachable: band table covers [0, 100]")


def letter_rank(letter: LetterGrade) -> int:
    return LETTER_ORDER.index(letter)


def letter_lower_bound(letter: LetterGrade) -> float:
    """Lowest score in a letter's band; used when only a letter is known."""
    for bound, candidate in GRADE_BANDS:
        if candidate is letter:
            return bound
    raise ValidationError(f"unknown letter grade {letter!r}")


# Turkish has two capital I forms: dotted İ lowers to i, dotless I to ı.
# str.casefold() is locale-blind (İ becomes i plus a combining dot), so the
# pairs are folded by hand before the generic fold.
_TURKISH_I = str.maketrans({"İ": "i", "I": "ı"})


def normalize_course_title(title: str) -> str:
    """Normalized key used to match transcripts against course titles.

    Case-folded (Turkish dotted/dotless I aware), trimmed, internal
    whitespace collapsed; NFC first so visually identical titles compare
    equal.
    """
    folded = unicodedata.normalize("NFC", title).translate(_TURKISH_I).casefold()
    return " ".join(folded.split())
