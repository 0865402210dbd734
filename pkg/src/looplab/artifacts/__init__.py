from .dialect import parse_body, run_body, DialectRunner
from .model import (
    Artifact,
    ArtifactDelta,
    Slot,
    WiringCall,
    apply_delta,
    execute,
    load_artifact,
    save_artifact,
    serialize_value,
)
from .init_schemes import init_one_function, init_many_function, task_background
from .catalog import (
    Catalog,
    CatalogParam,
    SlotTemplate,
    pong_catalog_artifact,
    pong_margin_catalog,
)

__all__ = [
    "Artifact",
    "ArtifactDelta",
    "Catalog",
    "CatalogParam",
    "DialectRunner",
    "Slot",
    "SlotTemplate",
    "WiringCall",
    "apply_delta",
    "execute",
    "init_many_function",
    "init_one_function",
    "load_artifact",
    "parse_body",
    "pong_catalog_artifact",
    "pong_margin_catalog",
    "run_body",
    "save_artifact",
    "serialize_value",
    "task_background",
]
