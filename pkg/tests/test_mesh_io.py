import json

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from quatsurf.io.diagnostics import dumps, key_paths, schema_digest, to_jsonable, write_json
from quatsurf.io.mesh import (
    FLAG_NONFINITE,
    FLAG_SINGULAR,
    MeshOutput,
    grid_faces,
    mesh_from_field,
    mesh_from_values,
    project,
    read_obj,
    vertex_digest,
    write_obj,
    write_ply,
)
from quatsurf.surfaces.grid import DomainGrid


def test_projections():
    q = np.array([1.0, 2.0, 3.0, 4.0])
    assert_array_equal(project(q, "drop_real"), [2.0, 3.0, 4.0])
    assert_array_equal(project(q, "drop_j"), [1.0, 2.0, 4.0])
    with pytest.raises(ValueError):
        project(q, "isometric")


def test_stereographic_projection():
    # the south pole of the unit sphere goes to the origin
    q = np.array([[-1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]])
    out = project(q, "stereographic", radius=1.0)
    assert_allclose(out, [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])


def test_faces_close_periodic_grids():
    periodic = DomainGrid.periodic(0.0, 1.0, 8, 8)
    open_ = DomainGrid.rectangle(0.0, 1.0, 0.0, 1.0, 8, 8)
    assert grid_faces(periodic).shape == (7 * 8, 4)
    assert grid_faces(open_).shape == (7 * 7, 4)
    assert grid_faces(periodic).max() == 8 * 8 - 1


def test_obj_round_trip(tmp_path, cylinder):
    singular = np.zeros(cylinder.grid.shape, dtype=bool)
    singular[3, 4] = True
    mesh = mesh_from_field(cylinder, singular=singular, header={"config_sha256": "abc"})
    path = write_obj(mesh, tmp_path / "sub" / "cyl.obj")
    back = read_obj(path)
    assert_array_equal(back.vertices, mesh.vertices)
    assert_array_equal(back.faces, mesh.faces)
    assert_array_equal(back.flags, mesh.flags)
    assert back.flags[3 * cylinder.grid.ny + 4] == FLAG_SINGULAR
    assert back.header["surface"] == cylinder.name
    assert back.header["config_sha256"] == "abc"


def test_nonfinite_vertices_are_dropped(grid):
    values = np.ones(grid.shape + (4,))
    values[5, 5] = np.inf
    mesh = mesh_from_values(grid, values)
    index = 5 * grid.ny + 5
    assert mesh.flags[index] & FLAG_NONFINITE
    assert_array_equal(mesh.vertices[index], np.zeros(3))
    assert not np.any(mesh.faces == index)
    assert len(mesh.faces) == len(grid_faces(grid)) - 4


def test_ply_header(tmp_path, cylinder):
    path = write_ply(mesh_from_field(cylinder), tmp_path / "cyl.ply")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "ply"
    assert f"element vertex {cylinder.grid.nx * cylinder.grid.ny}" in lines
    assert "property int flag" in lines


def test_jsonable_values(tmp_path):
    data = {"z": 1 + 2j, "bad": float("nan"), "big": np.inf, "arr": np.arange(3), "ok": np.bool_(1)}
    assert to_jsonable(data) == {
        "z": [1.0, 2.0], "bad": "nan", "big": "inf", "arr": [0, 1, 2], "ok": True
    }
    path = write_json(data, tmp_path / "d.json")
    assert json.loads(path.read_text(encoding="utf-8"))["z"] == [1.0, 2.0]
    assert dumps(data).endswith("\n")


def test_schema_digest_ignores_values():
    first = {"checks": [{"name": "a", "value": 1.0}], "passed": True}
    second = {"checks": [{"name": "b", "value": 2.0}, {"name": "c", "value": 0.0}], "passed": False}
    assert key_paths(first) == ["checks", "checks[].name", "checks[].value", "passed"]
    assert schema_digest(first) == schema_digest(second)
    assert schema_digest(first) != schema_digest({"passed": True})


def test_vertex_digest_ignores_header(tmp_path, cylinder):
    mesh = mesh_from_field(cylinder, "drop_real", header={"config_sha256": "abc"})
    digest = vertex_digest(mesh)
    assert vertex_digest(read_obj(write_obj(mesh, tmp_path / "c.obj"))) == digest
    relabeled = MeshOutput(mesh.vertices.copy(), mesh.faces, mesh.flags, {"other": "x"})
    assert vertex_digest(relabeled) == digest
    moved = MeshOutput(mesh.vertices + 1e-6, mesh.faces, mesh.flags)
    assert vertex_digest(moved) != digest
    no_faces, flags = np.zeros((0, 4), dtype=np.int64), np.zeros(1, dtype=np.int64)
    signed = MeshOutput(np.array([[0.0, -0.0, 1.0]]), no_faces, flags)
    unsigned = MeshOutput(np.array([[0.0, 0.0, 1.0]]), no_faces, flags)
    assert vertex_digest(signed) == vertex_digest(unsigned)
