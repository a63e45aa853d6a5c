from ._core import (
    InputError,
    IntegrityError,
    LexError,
    NumericalError,
    abstract,
    bleu4,
    classify_assert,
    edit_distance,
    lex,
    mine,
    split_lexemes,
    tap_id,
    unabstract,
)

__all__ = [
    "InputError",
    "IntegrityError",
    "LexError",
    "NumericalError",
    "abstract",
    "bleu4",
    "classify_assert",
    "edit_distance",
    "lex",
    "mine",
    "split_lexemes",
    "tap_id",
    "unabstract",
]
