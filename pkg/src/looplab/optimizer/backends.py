"""Optimizer backends: scripted hill climber, HTTP chat backend, no-op.

Backends implement ``propose(ctx) -> ArtifactDelta``. Deterministic
backends are reproducible under a fixed seed; the HTTP backend retries
transient failures with bounded exponential backoff and logs every
request/response pair for audit.
"""

from __future__ import annotations

import json
import os
import random
import time
from pathlib import Path
from typing import Callable, Optional

import requests

from ..artifacts.catalog import Catalog
from ..artifacts.model import ArtifactDelta
from ..errors import OptimizerError, RetriableOptimizerError
from .context import LearningContext
from .delta import REPLY_FORMAT_INSTRUCTION, parse_delta_reply


class NullBackend:
    """Always proposes the empty delta; useful for accounting-only runs."""

    def propose(self, ctx: LearningContext) -> ArtifactDelta:
        return ArtifactDelta(replacements={}, rationale="No change.")


def flatten_params(per_slot: dict[str, dict]) -> dict[str, object]:
    """{"slot": {"param": v}} -> {"slot.param": v}."""
    flat = {}
    for slot in per_slot:
        for param, value in per_slot[slot].items():
            flat[f"{slot}.{param}"] = value
    return flat


def _freeze(flat: dict) -> tuple:
    return tuple(sorted(flat.items()))


class ScriptedHillClimbBackend:
    """Deterministic hill climber over a slot-body catalog.

    Neighbors of the current parameterization differ in exactly one
    parameter. Unexplored neighbors (no remembered score) are tried first
    in seeded order; once all are remembered, the best-scoring neighbor is
    proposed if it beats the current score, ties broken by lowest parameter
    index then lowest value index. A local optimum yields an empty delta.
    """

    def __init__(self, catalog: Catalog, seed: int = 0):
        self.catalog = catalog
        self._rng = random.Random(seed)
        self.last_proposed_params: Optional[dict] = None

    def _neighbors(self, current: dict[str, dict]) -> list[tuple[int, int, dict]]:
        """(param_index, value_index, per-slot assignment) in declaration order."""
        out = []
        for p_idx, (slot, param) in enumerate(self.catalog.flat_params()):
            for v_idx, value in enumerate(param.values):
                if value == current[slot][param.name]:
                    continue
                assignment = {s: dict(a) for s, a in current.items()}
                assignment[slot][param.name] = value
                out.append((p_idx, v_idx, assignment))
        return out

    def propose(self, ctx: LearningContext) -> ArtifactDelta:
        current = self.catalog.parameterization(ctx.artifact)
        current_key = _freeze(flatten_params(current))

        remembered: dict[tuple, float] = {}
        for entry in ctx.memory:
            if entry.params is not None:
                remembered[_freeze(entry.params)] = entry.score

        neighbors = self._neighbors(current)
        unexplored = [
            (p, v, a) for p, v, a in neighbors
            if _freeze(flatten_params(a)) not in remembered
        ]
        if unexplored:
            pick = unexplored[self._rng.randrange(len(unexplored))][2]
        else:
            current_score = remembered.get(current_key, float("-inf"))
            best = None
            best_score = float("-inf")
            for p_idx, v_idx, assignment in neighbors:
                score = remembered[_freeze(flatten_params(assignment))]
                if score > best_score:
                    best, best_score = assignment, score
            if best is None or best_score <= current_score:
                self.last_proposed_params = flatten_params(current)
                return ArtifactDelta(replacements={}, rationale="At a local optimum; no change.")
            pick = best

        replacements = {}
        changes = []
        for slot_name, assignment in pick.items():
            if assignment != current[slot_name]:
                template = self.catalog.template_for(slot_name)
                replacements[slot_name] = template.render(assignment)
                for param, value in assignment.items():
                    if current[slot_name][param] != value:
                        changes.append(f"{slot_name}.{param}={value}")
        self.last_proposed_params = flatten_params(pick)
        return ArtifactDelta(replacements=replacements,
                             rationale="Set " + ", ".join(sorted(changes)))


class HttpLLMBackend:
    """Chat-completions-style HTTP backend.

    Sends the rendered context as the user message with the reply-format
    instruction as the system message; parses fenced per-slot blocks into a
    delta. Transport errors and 5xx responses are retried with exponential
    backoff; an unparseable reply earns exactly one reformat retry.
    """

    def __init__(self, base_url: str, model: str,
                 api_key_env: str = "LOOPLAB_API_KEY",
                 temperature: float = 0.0,
                 max_attempts: int = 3,
                 backoff_base: float = 1.0,
                 timeout: float = 60.0,
                 log_dir: Optional[str] = None,
                 session: Optional[requests.Session] = None,
                 sleep: Callable[[float], None] = time.sleep):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key_env = api_key_env
        self.temperature = temperature
        self.max_attempts = max_attempts
        self.backoff_base = backoff_base
        self.timeout = timeout
        self.log_dir = Path(log_dir) if log_dir else None
        self.session = session or requests.Session()
        self._sleep = sleep
        self._call_index = 0
        self.last_attempts = 0

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(self.api_key_env, "")
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def _log(self, name: str, payload: str) -> None:
        if self.log_dir is None:
            return
        self.log_dir.mkdir(parents=True, exist_ok=True)
        (self.log_dir / name).write_text(payload, encoding="utf-8")

    def _complete(self, system: str, user: str) -> str:
        self._call_index += 1
        body = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
            "temperature": self.temperature,
        }
        body_text = json.dumps(body, indent=2)
        self._log(f"request_{self._call_index:03d}.json", body_text)
        url = f"{self.base_url}/chat/completions"
        attempts = 0
        last_error = None
        while attempts < self.max_attempts:
            attempts += 1
            self.last_attempts = attempts
            try:
                resp = self.session.post(url, data=body_text.encode("utf-8"),
                                         headers=self._headers(), timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = f"transport error: {exc}"
            else:
                if resp.status_code < 500:
                    self._log(f"response_{self._call_index:03d}.json", resp.text)
                    if resp.status_code != 200:
                        raise OptimizerError(
                            f"backend returned HTTP {resp.status_code}: {resp.text[:200]}")
                    try:
                        return resp.json()["choices"][0]["message"]["content"]
                    except (ValueError, KeyError, IndexError) as exc:
                        raise OptimizerError(f"malformed backend response: {exc}") from exc
                last_error = f"HTTP {resp.status_code}"
            if attempts < self.max_attempts:
                self._sleep(self.backoff_base * (2 ** (attempts - 1)))
        raise RetriableOptimizerError(
            f"backend failed after {attempts} attempts ({last_error})")

    def propose(self, ctx: LearningContext) -> ArtifactDelta:
        content = self._complete(REPLY_FORMAT_INSTRUCTION, ctx.text)
        try:
            return parse_delta_reply(content)
        except OptimizerError:
            pass
        reformat = (
            REPLY_FORMAT_INSTRUCTION
            + "\nYour previous reply did not contain any fenced slot blocks. "
              "Reply again using the required format."
        )
        content = self._complete(reformat, ctx.text)
        try:
            return parse_delta_reply(content)
        except OptimizerError as exc:
            raise OptimizerError(
                "backend reply unparseable after one reformat retry") from exc
