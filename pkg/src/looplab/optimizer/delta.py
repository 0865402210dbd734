"""Parsing optimizer replies into artifact deltas.

The reply protocol is fenced per-slot replacement blocks::

    ```slot select_action
    <new body>
    ```

Anything outside the blocks is treated as the rationale. A reply with no
blocks does not parse (the caller decides whether to retry).
"""

from __future__ import annotations

import re

from ..artifacts.model import ArtifactDelta
from ..errors import OptimizerError

_BLOCK_RE = re.compile(
    r"```slot[ \t]+([A-Za-z_][A-Za-z0-9_]*)[ \t]*\n(.*?)```",
    re.DOTALL,
)

REPLY_FORMAT_INSTRUCTION = (
    "Reply with one fenced block per slot you want to change, using the "
    "exact form:\n"
    "```slot <slot_name>\n"
    "<replacement body>\n"
    "```\n"
    "Only slot bodies may change. Reply with no blocks to keep the current "
    "system unchanged."
)


def parse_delta_reply(reply: str) -> ArtifactDelta:
    """Extract per-slot replacement blocks; raises when none are found and
    the reply is not an explicit no-change."""
    matches = list(_BLOCK_RE.finditer(reply))
    rationale = _BLOCK_RE.sub("", reply).strip()
    if not matches:
        if rationale and "no change" in rationale.lower():
            return ArtifactDelta(replacements={}, rationale=rationale)
        raise OptimizerError("reply contains no fenced slot blocks")
    replacements = {}
    for m in matches:
        name = m.group(1)
        body = m.group(2)
        if body.endswith("\n"):
            body = body[:-1]
        replacements[name] = body
    return ArtifactDelta(replacements=replacements, rationale=rationale)


def format_delta(delta: ArtifactDelta) -> str:
    """Inverse of :func:`parse_delta_reply`, used for logging."""
    parts = []
    if delta.rationale:
        parts.append(delta.rationale)
    for name in delta.replacements:
        parts.append(f"```slot {name}\n{delta.replacements[name]}\n```")
    return "\n\n".join(parts) if parts else "No change."
