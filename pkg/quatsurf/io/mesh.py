"""Quad meshes of sampled surfaces: R^4 -> R^3 projections, OBJ/PLY text output.

Coordinates are written with 17 significant digits so a re-read mesh
reproduces the vertices bit for bit.
"""

import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np

from ..core.quaternion import qnorm
from ..surfaces.grid import DomainGrid
from ..surfaces.immersion import ImmersionField

logger = logging.getLogger(__name__)

PROJECTIONS = ("drop_real", "drop_i", "drop_j", "drop_k", "stereographic")
_KEEP = {
    "drop_real": [1, 2, 3],
    "drop_i": [0, 2, 3],
    "drop_j": [0, 1, 3],
    "drop_k": [0, 1, 2],
}

FLAG_SINGULAR = 1
FLAG_NONFINITE = 2


def project(
    values: np.ndarray, mode: str = "drop_real", radius: Optional[float] = None
) -> np.ndarray:
    """Map quaternion points (..., 4) to R^3.

    ``stereographic`` projects the sphere of radius ``radius`` (default: the
    mean norm) from the point ``radius`` on the real axis onto Im H.
    """
    values = np.asarray(values, dtype=float)
    if mode in _KEEP:
        return values[..., _KEEP[mode]]
    if mode != "stereographic":
        raise ValueError(f"unknown projection {mode!r}; expected one of {PROJECTIONS}")
    if radius is None:
        norms = qnorm(values)
        radius = float(np.mean(norms[np.isfinite(norms)]))
    with np.errstate(divide="ignore", invalid="ignore"):
        return radius * values[..., 1:] / (radius - values[..., 0:1])


@dataclass
class MeshOutput:
    """Vertices, quad faces (0-based), per-vertex flags and a provenance header."""

    vertices: np.ndarray
    faces: np.ndarray
    flags: np.ndarray
    header: Dict[str, str] = field(default_factory=dict)

    def validate(self) -> None:
        """Raises ValueError for non-finite coordinates or out-of-range face indices."""
        if not np.all(np.isfinite(self.vertices)):
            raise ValueError("mesh has non-finite vertex coordinates")
        if self.faces.size and (self.faces.min() < 0 or self.faces.max() >= len(self.vertices)):
            raise ValueError("mesh face index out of range")


def grid_faces(grid: DomainGrid) -> np.ndarray:
    """Quads over the node lattice, closed across y for periodic grids."""
    nx, ny = grid.nx, grid.ny
    rows = ny if grid.periodic_y else ny - 1
    i, j = np.meshgrid(np.arange(nx - 1), np.arange(rows), indexing="ij")
    i, j = i.ravel(), j.ravel()
    j1 = (j + 1) % ny
    return np.stack([i * ny + j, (i + 1) * ny + j, (i + 1) * ny + j1, i * ny + j1], axis=-1)


def mesh_from_values(
    grid: DomainGrid,
    values: np.ndarray,
    projection: str = "drop_real",
    singular: Optional[np.ndarray] = None,
    header: Optional[Dict[str, str]] = None,
    radius: Optional[float] = None,
) -> MeshOutput:
    """Project node values and build the quad mesh.

    Non-finite vertices (poles of a transform) are zeroed and flagged, and
    the faces touching them are dropped.
    """
    points = project(values, projection, radius).reshape(-1, 3)
    flags = np.zeros(len(points), dtype=np.int64)
    if singular is not None:
        flags[np.asarray(singular, dtype=bool).ravel()] |= FLAG_SINGULAR
    bad = ~np.all(np.isfinite(points), axis=-1)
    flags[bad] |= FLAG_NONFINITE
    points = np.where(bad[:, None], 0.0, points)
    faces = grid_faces(grid)
    if bad.any():
        faces = faces[~bad[faces].any(axis=-1)]
        logger.warning("%d non-finite vertices dropped from the mesh", int(bad.sum()))
    mesh = MeshOutput(vertices=points, faces=faces, flags=flags, header=dict(header or {}))
    mesh.validate()
    return mesh


def mesh_from_field(
    surface: ImmersionField,
    projection: str = "drop_real",
    singular: Optional[np.ndarray] = None,
    header: Optional[Dict[str, str]] = None,
    radius: Optional[float] = None,
) -> MeshOutput:
    head = {"surface": surface.name, "projection": projection}
    head.update(header or {})
    return mesh_from_values(surface.grid, surface.values, projection, singular, head, radius)


def _fmt(v: float) -> str:
    return "%.17g" % v


def write_obj(mesh: MeshOutput, path: Union[str, Path]) -> Path:
    """OBJ with ``# key: value`` header lines and ``# flag index value`` records."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# {key}: {value}" for key, value in sorted(mesh.header.items())]
    lines += [f"# flag {k} {int(mesh.flags[k])}" for k in np.flatnonzero(mesh.flags)]
    lines += ["v " + " ".join(_fmt(c) for c in v) for v in mesh.vertices]
    lines += ["f " + " ".join(str(int(k) + 1) for k in face) for face in mesh.faces]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.debug("wrote %s (%d vertices, %d faces)", path, len(mesh.vertices), len(mesh.faces))
    return path


def write_ply(mesh: MeshOutput, path: Union[str, Path]) -> Path:
    """ASCII PLY with a per-vertex ``flag`` property."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["ply", "format ascii 1.0"]
    lines += [f"comment {key}: {value}" for key, value in sorted(mesh.header.items())]
    lines += [
        f"element vertex {len(mesh.vertices)}",
        "property double x",
        "property double y",
        "property double z",
        "property int flag",
        f"element face {len(mesh.faces)}",
        "property list uchar int vertex_indices",
        "end_header",
    ]
    lines += [
        " ".join(_fmt(c) for c in v) + f" {int(flag)}" for v, flag in zip(mesh.vertices, mesh.flags)
    ]
    lines += [f"{len(face)} " + " ".join(str(int(k)) for k in face) for face in mesh.faces]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_obj(path: Union[str, Path]) -> MeshOutput:
    """Read an OBJ written by :func:`write_obj`."""
    header: Dict[str, str] = {}
    flag_records = []
    vertices, faces = [], []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("# flag "):
            _, _, index, value = line.split()
            flag_records.append((int(index), int(value)))
        elif line.startswith("# ") and ": " in line:
            key, value = line[2:].split(": ", 1)
            header[key] = value
        elif line.startswith("v "):
            vertices.append([float(c) for c in line.split()[1:4]])
        elif line.startswith("f "):
            faces.append([int(tok.split("/")[0]) - 1 for tok in line.split()[1:]])
    flags = np.zeros(len(vertices), dtype=np.int64)
    for index, value in flag_records:
        flags[index] = value
    return MeshOutput(
        vertices=np.array(vertices, dtype=float).reshape(-1, 3),
        faces=np.array(faces, dtype=np.int64) if faces else np.zeros((0, 4), dtype=np.int64),
        flags=flags,
        header=header,
    )


def file_digest(path: Union[str, Path]) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def vertex_digest(mesh: MeshOutput, decimals: int = 9) -> str:
    """sha256 of the rounded vertices, faces and flags; the header is not hashed."""
    digest = hashlib.sha256()
    vertices = np.round(np.asarray(mesh.vertices, dtype=float), decimals) + 0.0
    digest.update(np.ascontiguousarray(vertices).tobytes())
    digest.update(np.ascontiguousarray(mesh.faces, dtype=np.int64).tobytes())
    digest.update(np.ascontiguousarray(mesh.flags, dtype=np.int64).tobytes())
    return digest.hexdigest()
