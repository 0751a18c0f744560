"""
Tests for OBJ/PLY reading and writing and vertex mask files.
"""

import numpy as np
import pytest

from core.errors import MeshError, MeshFormatError, MeshWriteError
from core.mask import VertexMask
from core.mesh import TriangleMesh
from core.mesh_io import (
    MeshFileType,
    MeshFormatFactory,
    ObjFormat,
    PlyFormat,
    fan_triangulate,
    load_mesh,
    read_mask,
    save_mesh,
)
from core.shapes import jittered


def test_fan_triangulate():
    assert fan_triangulate([4, 5, 6, 7]) == [(4, 5, 6), (4, 6, 7)]


class TestObj:
    def test_write_read_is_bit_identical(self, tmp_path, cube3):
        mesh = jittered(cube3, 0.01, seed=3)
        path = tmp_path / "cube.obj"
        save_mesh(mesh, path)
        loaded = load_mesh(path)
        np.testing.assert_array_equal(loaded.vertices, mesh.vertices)
        np.testing.assert_array_equal(loaded.triangles, mesh.triangles)

    def test_texture_normal_tokens_and_quads(self, tmp_path):
        path = tmp_path / "quad.obj"
        path.write_text(
            "# a square\n"
            "o square\n"
            "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n"
            "vt 0 0\nvn 0 0 1\n"
            "f 1/1/1 2/1/1 3/1/1 4/1/1\n"
        )
        mesh = load_mesh(path)
        np.testing.assert_array_equal(mesh.triangles, [[0, 1, 2], [0, 2, 3]])

    def test_negative_indices(self, tmp_path):
        path = tmp_path / "relative.obj"
        path.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n")
        mesh = load_mesh(path)
        np.testing.assert_array_equal(mesh.triangles, [[0, 1, 2]])

    def test_bad_token_reports_line(self, tmp_path):
        path = tmp_path / "bad.obj"
        path.write_text("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 two 3\n")
        with pytest.raises(MeshFormatError) as info:
            load_mesh(path)
        assert info.value.line == 4

    def test_no_faces(self, tmp_path):
        path = tmp_path / "points.obj"
        path.write_text("v 0 0 0\n")
        with pytest.raises(MeshFormatError):
            load_mesh(path)

    def test_invariants_checked_on_load(self, tmp_path):
        path = tmp_path / "flat.obj"
        path.write_text("v 0 0 0\nv 1 0 0\nv 2 0 0\nf 1 2 3\n")
        with pytest.raises(MeshError):
            load_mesh(path)

    def test_non_finite_vertices_are_not_written(self, tmp_path):
        mesh = TriangleMesh([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 2]])
        broken = mesh.with_vertices([[0, 0, 0], [1, 0, 0], [0, np.nan, 0]])
        with pytest.raises(MeshWriteError):
            ObjFormat().write(broken, tmp_path / "broken.obj")


class TestPly:
    def test_binary_write_read_is_bit_identical(self, tmp_path, cube3):
        mesh = jittered(cube3, 0.01, seed=4)
        path = tmp_path / "cube.ply"
        save_mesh(mesh, path)
        loaded = load_mesh(path)
        np.testing.assert_array_equal(loaded.vertices, mesh.vertices)
        np.testing.assert_array_equal(loaded.triangles, mesh.triangles)

    def test_ascii(self, tmp_path):
        path = tmp_path / "square.ply"
        path.write_text(
            "ply\n"
            "format ascii 1.0\n"
            "comment two triangles\n"
            "element vertex 4\n"
            "property float x\nproperty float y\nproperty float z\n"
            "element face 1\n"
            "property list uchar int vertex_indices\n"
            "end_header\n"
            "0 0 0\n1 0 0\n1 1 0\n0 1 0\n"
            "4 0 1 2 3\n"
        )
        mesh = PlyFormat().read(path)
        assert mesh.n_vertices == 4
        np.testing.assert_array_equal(mesh.triangles, [[0, 1, 2], [0, 2, 3]])

    def test_big_endian(self, tmp_path):
        vertices = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=">f4")
        header = (
            "ply\nformat binary_big_endian 1.0\n"
            "element vertex 3\nproperty float x\nproperty float y\nproperty float z\n"
            "element face 1\nproperty list uchar int vertex_indices\nend_header\n"
        ).encode("ascii")
        face = np.array([3], dtype="u1").tobytes() + np.array([0, 1, 2], dtype=">i4").tobytes()
        path = tmp_path / "tri.ply"
        path.write_bytes(header + vertices.tobytes() + face)
        mesh = load_mesh(path)
        np.testing.assert_array_equal(mesh.vertices, [[0, 0, 0], [1, 0, 0], [0, 1, 0]])

    @pytest.mark.parametrize(
        "header, line",
        [
            ("ply\nformat ascii 1.0\nelement vertex three\nproperty float x\nend_header\n", 3),
            ("ply\nformat ascii 1.0\nelement vertex\nend_header\n", 3),
            ("ply\nformat\nelement vertex 3\nend_header\n", 2),
        ],
        ids=["count-not-a-number", "count-missing", "format-missing"],
    )
    def test_malformed_header_reports_line(self, tmp_path, header, line):
        path = tmp_path / "bad.ply"
        path.write_text(header)
        with pytest.raises(MeshFormatError) as info:
            load_mesh(path)
        assert info.value.line == line

    def test_not_a_ply(self, tmp_path):
        path = tmp_path / "fake.ply"
        path.write_text("solid nothing\n")
        with pytest.raises(MeshFormatError):
            load_mesh(path)


class TestFactory:
    def test_infers_format_from_suffix(self):
        assert isinstance(MeshFormatFactory.for_path("a.OBJ"), ObjFormat)
        assert isinstance(MeshFormatFactory.for_path("a.ply"), PlyFormat)

    def test_explicit_format_wins(self):
        assert isinstance(MeshFormatFactory.for_path("mesh.dat", "ply"), PlyFormat)

    def test_unknown_suffix(self):
        with pytest.raises(MeshFormatError):
            MeshFormatFactory.for_path("mesh.stl")

    def test_available_formats(self):
        assert set(MeshFormatFactory.get_available_formats()) == {MeshFileType.OBJ, MeshFileType.PLY}


class TestMaskFiles:
    def test_write_read(self, tmp_path, cube3):
        mask = VertexMask([5, 1, 3], cube3.n_vertices)
        path = tmp_path / "free.txt"
        mask.to_file(path)
        assert VertexMask.from_file(path, cube3.n_vertices).free == frozenset({1, 3, 5})

    def test_out_of_range(self, tmp_path):
        path = tmp_path / "free.txt"
        path.write_text("# free\n0\n8\n")
        with pytest.raises(MeshFormatError):
            read_mask(path, 8)

    def test_bad_line(self, tmp_path):
        path = tmp_path / "free.txt"
        path.write_text("1\nx\n")
        with pytest.raises(MeshFormatError) as info:
            read_mask(path)
        assert info.value.line == 2
