"""Non-fatal findings collected while processing a stream.

Operations that can partially succeed (an onset off the beat grid, an
incomplete final bar, a beat with no posture) take an optional
``diagnostics`` list and append to it. Every diagnostic is also logged so
the CLI can mirror it on stderr.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

logger = logging.getLogger("adavu")


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    ref: int | str | None = None

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "ref": self.ref}


def emit(sink: list[Diagnostic] | None, code: str, message: str, ref=None) -> Diagnostic:
    diag = Diagnostic(code, message, ref)
    logger.warning("%s: %s", code, message)
    if sink is not None:
        sink.append(diag)
    return diag
