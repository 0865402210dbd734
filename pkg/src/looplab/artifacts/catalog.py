"""Parameterized slot-body catalogs for the scripted optimizer.

A catalog pins each editable slot to a body template with a small set of
named, enumerated parameters. Any catalog-conforming body can be mapped
back to its parameter assignment by exhaustive matching, which is what lets
the scripted hill climber treat artifact edits as moves in a finite
parameter space.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Optional

from ..errors import OptimizerError
from .model import Artifact, Slot


@dataclass(frozen=True)
class CatalogParam:
    name: str
    values: tuple


@dataclass(frozen=True)
class SlotTemplate:
    """Body template for one slot; placeholders are ``{param_name}``."""

    slot: str
    params: tuple[CatalogParam, ...]
    template: str

    def render(self, assignment: Mapping[str, object]) -> str:
        return self.template.format(**{p.name: assignment[p.name] for p in self.params})

    def match(self, body: str) -> Optional[dict]:
        """Recover the assignment whose rendering equals ``body``, if any."""
        names = [p.name for p in self.params]
        for combo in itertools.product(*(p.values for p in self.params)):
            assignment = dict(zip(names, combo))
            if self.render(assignment) == body:
                return assignment
        return None


@dataclass(frozen=True)
class Catalog:
    templates: tuple[SlotTemplate, ...]

    def template_for(self, slot: str) -> SlotTemplate:
        for t in self.templates:
            if t.slot == slot:
                return t
        raise OptimizerError(f"catalog has no template for slot {slot!r}")

    def parameterization(self, artifact: Artifact) -> dict[str, dict]:
        """Per-slot assignments for every editable slot; errors when a body
        is not a catalog instance."""
        result = {}
        for slot in artifact.editable_slots():
            template = self.template_for(slot.name)
            assignment = template.match(slot.body)
            if assignment is None:
                raise OptimizerError(
                    f"slot {slot.name!r} body is not an instance of its catalog template")
            result[slot.name] = assignment
        return result

    def flat_params(self) -> list[tuple[str, CatalogParam]]:
        """(slot, param) pairs in declaration order."""
        return [(t.slot, p) for t in self.templates for p in t.params]


# --- Pong margin catalog ---------------------------------------------------

_PONG_PREDICT_TEMPLATE = """\
if 'Ball' not in obs:
    return None
ball = obs['Ball']
if {project} == 0:
    return ball['y']
if ball['dx'] <= 0:
    return ball['y']
t = (140 - ball['x']) / ball['dx']
y = ball['y'] + ball['dy'] * t
bounces = 0
while (y < 30 or y > 190) and bounces < 6:
    if y < 30:
        y = 60 - y
    if y > 190:
        y = 380 - y
    bounces = bounces + 1
return y"""

_PONG_SELECT_TEMPLATE = """\
if predicted_ball_y is None or 'Player' not in obs:
    return 0
if {use_margin} == 0:
    return choice([2, 3])
paddle_center = obs['Player']['y'] + obs['Player']['h'] / 2
if paddle_center > predicted_ball_y + {margin}:
    return 2
if paddle_center < predicted_ball_y - {margin}:
    return 3
return 0"""


def pong_margin_catalog() -> Catalog:
    """Margin-parameter catalog over the two Pong slots."""
    return Catalog(templates=(
        SlotTemplate(
            slot="predict_ball_trajectory",
            params=(CatalogParam("project", (0, 1)),),
            template=_PONG_PREDICT_TEMPLATE,
        ),
        SlotTemplate(
            slot="select_action",
            params=(
                CatalogParam("use_margin", (0, 1)),
                CatalogParam("margin", (0, 2, 4, 8)),
            ),
            template=_PONG_SELECT_TEMPLATE,
        ),
    ))


def pong_catalog_artifact(assignment: Optional[Mapping[str, Mapping[str, object]]] = None) -> Artifact:
    """Pong artifact whose slot bodies are catalog instances.

    The default assignment reproduces the unoptimized behavior: no
    trajectory projection, random paddle movement.
    """
    from .init_schemes import init_many_function

    catalog = pong_margin_catalog()
    base = init_many_function("pong")
    assignment = assignment or {
        "predict_ball_trajectory": {"project": 0},
        "select_action": {"use_margin": 0, "margin": 0},
    }
    slots = []
    for slot in base.slots:
        template = catalog.template_for(slot.name)
        body = template.render(assignment[slot.name])
        slots.append(Slot(slot.name, slot.params, slot.returns,
                          slot.documentation, body, slot.editable))
    return Artifact(tuple(slots), base.wiring, base.input_var)
