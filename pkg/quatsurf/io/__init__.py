"""Run configuration, mesh export and diagnostics files."""

from .config import (
    RunConfig,
    SectionConfig,
    SurfaceConfig,
    TransformStep,
    config_digest,
    config_from_dict,
    load_config,
    parse_spectral,
)
from .diagnostics import schema_digest, to_jsonable, write_json
from .mesh import (
    MeshOutput,
    mesh_from_field,
    project,
    read_obj,
    vertex_digest,
    write_obj,
    write_ply,
)

__all__ = [
    "MeshOutput",
    "RunConfig",
    "SectionConfig",
    "SurfaceConfig",
    "TransformStep",
    "config_digest",
    "config_from_dict",
    "load_config",
    "mesh_from_field",
    "parse_spectral",
    "project",
    "read_obj",
    "schema_digest",
    "to_jsonable",
    "vertex_digest",
    "write_json",
    "write_obj",
    "write_ply",
]
