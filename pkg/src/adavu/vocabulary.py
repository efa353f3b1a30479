"""Bol (rhythm syllable) vocabulary.

Kept outside :mod:`adavu.ontology` because the event model needs it too and
must not import the registry machinery.
"""

from __future__ import annotations

STICK_BEAT = "StickBeat"

BOLS: tuple[str, ...] = (
    "a", "da", "dha", "dhat", "dhi", "dhin", "dhit", "ding", "e", "gadu", "gin",
    "ha", "hat", "hi", "jag", "jham", "ka", "ki", "ku", "na", "ri", "ta",
    "tak", "tam", "tan", "tat", "tei", "tom", "tta", "ya", "yum",
)

BOL_TOKENS = frozenset(BOLS) | {STICK_BEAT}


def is_bol(name: str) -> bool:
    return name in BOL_TOKENS


def split_bols(text: str | None) -> tuple[str, ...]:
    """Split an annotation cell like ``"tei yum"`` into tokens.

    ``""``, ``"No Bol"`` and ``"[B]"`` all mean a beat without a vocalized bol.
    """
    if text is None:
        return ()
    cleaned = text.strip().strip("[]").strip()
    if not cleaned or cleaned.lower() in {"no bol", "nobol", "b", "-"}:
        return ()
    return tuple(cleaned.split())
