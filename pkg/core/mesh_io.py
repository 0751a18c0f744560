"""
Mesh file formats for NormalTV.

This module implements readers and writers for ASCII OBJ and PLY (ASCII or
binary in, binary little-endian out) behind a common MeshFormat interface,
plus the plain-text vertex mask format used by the inpainting commands.
"""

import enum
import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from core.errors import MeshFormatError, MeshWriteError
from core.mesh import AREA_FLOOR, TriangleMesh

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class MeshFileType(enum.Enum):
    """Supported mesh file formats."""
    OBJ = "obj"
    PLY = "ply"


def fan_triangulate(polygon: Sequence[int]) -> List[Tuple[int, int, int]]:
    """Split a polygon into triangles sharing its first vertex."""
    return [(polygon[0], polygon[i], polygon[i + 1]) for i in range(1, len(polygon) - 1)]


def _check_writable(mesh: TriangleMesh):
    if not np.all(np.isfinite(mesh.vertices)):
        bad = int(np.flatnonzero(~np.all(np.isfinite(mesh.vertices), axis=1))[0])
        raise MeshWriteError(f"Vertex {bad} has non-finite coordinates {mesh.vertices[bad].tolist()}")


class MeshFormat(ABC):
    """
    Abstract base class for mesh file formats.

    Readers must preserve vertex order and triangle order from the file;
    polygons are fan-triangulated from their first vertex.
    """

    @abstractmethod
    def read(self, path: PathLike, area_floor: float = AREA_FLOOR) -> TriangleMesh:
        """
        Parse a mesh file.

        Args:
            path: File to read
            area_floor: Area floor of the returned mesh

        Returns:
            TriangleMesh: Validated mesh

        Raises:
            MeshFormatError: If the file does not parse
            MeshError: If the parsed mesh violates a mesh invariant
        """
        pass

    @abstractmethod
    def write(self, mesh: TriangleMesh, path: PathLike) -> None:
        """
        Write a mesh so that reading it back reproduces it bit-identically.

        Raises:
            MeshWriteError: If a vertex coordinate is not finite
        """
        pass


class ObjFormat(MeshFormat):
    """
    Wavefront OBJ, ``v`` and ``f`` records only.

    Face tokens may carry texture/normal references (``7/1/3``) and negative
    (relative) indices; everything other than ``v`` and ``f`` is ignored.
    """

    def read(self, path: PathLike, area_floor: float = AREA_FLOOR) -> TriangleMesh:
        vertices: List[List[float]] = []
        triangles: List[Tuple[int, int, int]] = []
        with open(path, "r") as handle:
            for lineno, line in enumerate(handle, start=1):
                fields = line.split()
                if not fields or fields[0].startswith("#"):
                    continue
                if fields[0] == "v":
                    if len(fields) < 4:
                        raise MeshFormatError("vertex record needs three coordinates", str(path), lineno)
                    try:
                        vertices.append([float(value) for value in fields[1:4]])
                    except ValueError as exc:
                        raise MeshFormatError(f"bad vertex coordinate: {exc}", str(path), lineno) from exc
                elif fields[0] == "f":
                    polygon = [self._parse_index(token, len(vertices), path, lineno) for token in fields[1:]]
                    if len(polygon) < 3:
                        raise MeshFormatError("face record needs at least three vertices", str(path), lineno)
                    triangles.extend(fan_triangulate(polygon))

        if not triangles:
            raise MeshFormatError("no faces found", str(path))
        logger.debug("Read %d vertices and %d triangles from %s", len(vertices), len(triangles), path)
        return TriangleMesh(vertices, triangles, area_floor=area_floor)

    @staticmethod
    def _parse_index(token: str, n_read: int, path: PathLike, lineno: int) -> int:
        try:
            index = int(token.split("/")[0])
        except ValueError as exc:
            raise MeshFormatError(f"bad face index {token!r}", str(path), lineno) from exc
        if index > 0:
            return index - 1
        if index < 0:
            return n_read + index
        raise MeshFormatError("face index 0 is not valid in OBJ", str(path), lineno)

    def write(self, mesh: TriangleMesh, path: PathLike) -> None:
        _check_writable(mesh)
        lines = ["# NormalTV mesh"]
        lines.extend(f"v {x:.17g} {y:.17g} {z:.17g}" for x, y, z in mesh.vertices)
        lines.extend(f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.triangles)
        with open(path, "w") as handle:
            handle.write("\n".join(lines))
            handle.write("\n")
        logger.debug("Wrote %d vertices and %d triangles to %s", mesh.n_vertices, mesh.n_triangles, path)


_PLY_TYPES: Dict[str, str] = {
    "char": "i1", "int8": "i1",
    "uchar": "u1", "uint8": "u1",
    "short": "i2", "int16": "i2",
    "ushort": "u2", "uint16": "u2",
    "int": "i4", "int32": "i4",
    "uint": "u4", "uint32": "u4",
    "float": "f4", "float32": "f4",
    "double": "f8", "float64": "f8",
}


class _PlyElement:
    def __init__(self, name: str, count: int):
        self.name = name
        self.count = count
        # (name, type) for scalars, (name, (count_type, item_type)) for lists
        self.properties: List[Tuple[str, Union[str, Tuple[str, str]]]] = []

    @property
    def has_lists(self) -> bool:
        return any(isinstance(kind, tuple) for _, kind in self.properties)


class PlyFormat(MeshFormat):
    """
    Stanford PLY. Reads ASCII and binary files; writes binary little-endian
    with float64 ``x, y, z`` and an ``int32`` ``vertex_indices`` list.
    """

    def read(self, path: PathLike, area_floor: float = AREA_FLOOR) -> TriangleMesh:
        with open(path, "rb") as handle:
            data = handle.read()
        encoding, elements, body = self._parse_header(data, path)

        if encoding == "ascii":
            tables = self._read_ascii(body.decode("ascii", errors="replace"), elements, path)
        else:
            byte_order = "<" if encoding == "binary_little_endian" else ">"
            tables = self._read_binary(body, elements, byte_order, path)

        if "vertex" not in tables or "face" not in tables:
            raise MeshFormatError("PLY file needs vertex and face elements", str(path))
        vertices = tables["vertex"]
        triangles = [tri for polygon in tables["face"] for tri in fan_triangulate(polygon)]
        if not triangles:
            raise MeshFormatError("no faces found", str(path))
        return TriangleMesh(vertices, triangles, area_floor=area_floor)

    @staticmethod
    def _parse_header(data: bytes, path: PathLike):
        marker = b"end_header"
        end = data.find(marker)
        if not data.startswith(b"ply") or end < 0:
            raise MeshFormatError("not a PLY file", str(path))
        newline = data.find(b"\n", end)
        body = data[newline + 1:] if newline >= 0 else b""

        encoding: Optional[str] = None
        elements: List[_PlyElement] = []
        for lineno, raw in enumerate(data[:end].decode("ascii", errors="replace").splitlines(), start=1):
            fields = raw.split()
            if not fields or fields[0] in ("ply", "comment", "obj_info"):
                continue
            if fields[0] == "format":
                if len(fields) < 2:
                    raise MeshFormatError(f"bad format line {raw!r}", str(path), lineno)
                encoding = fields[1]
                if encoding not in ("ascii", "binary_little_endian", "binary_big_endian"):
                    raise MeshFormatError(f"unknown PLY format {encoding!r}", str(path), lineno)
            elif fields[0] == "element":
                try:
                    elements.append(_PlyElement(fields[1], int(fields[2])))
                except (ValueError, IndexError) as exc:
                    raise MeshFormatError(f"bad element line {raw!r}", str(path), lineno) from exc
            elif fields[0] == "property":
                if not elements:
                    raise MeshFormatError("property before any element", str(path), lineno)
                try:
                    if fields[1] == "list":
                        kind = (_PLY_TYPES[fields[2]], _PLY_TYPES[fields[3]])
                        elements[-1].properties.append((fields[4], kind))
                    else:
                        elements[-1].properties.append((fields[2], _PLY_TYPES[fields[1]]))
                except (KeyError, IndexError) as exc:
                    raise MeshFormatError(f"bad property line {raw!r}", str(path), lineno) from exc
        if encoding is None:
            raise MeshFormatError("missing format line", str(path))
        return encoding, elements, body

    def _read_ascii(self, text: str, elements: List[_PlyElement], path: PathLike):
        lines = iter(line for line in text.splitlines() if line.strip())
        tables = {}
        for element in elements:
            rows = []
            for _ in range(element.count):
                try:
                    tokens = next(lines).split()
                except StopIteration as exc:
                    raise MeshFormatError(f"truncated {element.name} data", str(path)) from exc
                rows.append(self._ascii_row(tokens, element, path))
            tables[element.name] = self._collect(element, rows, path)
        return tables

    @staticmethod
    def _ascii_row(tokens: List[str], element: _PlyElement, path: PathLike) -> Dict[str, object]:
        row: Dict[str, object] = {}
        position = 0
        try:
            for name, kind in element.properties:
                if isinstance(kind, tuple):
                    count = int(tokens[position])
                    row[name] = [int(token) for token in tokens[position + 1:position + 1 + count]]
                    position += 1 + count
                else:
                    row[name] = float(tokens[position])
                    position += 1
        except (ValueError, IndexError) as exc:
            raise MeshFormatError(f"bad {element.name} record: {' '.join(tokens)}", str(path)) from exc
        return row

    def _read_binary(self, body: bytes, elements: List[_PlyElement], byte_order: str, path: PathLike):
        tables = {}
        offset = 0
        for element in elements:
            if not element.has_lists:
                dtype = np.dtype([(name, byte_order + kind) for name, kind in element.properties])
                try:
                    records = np.frombuffer(body, dtype=dtype, count=element.count, offset=offset)
                except ValueError as exc:
                    raise MeshFormatError(f"truncated {element.name} data", str(path)) from exc
                offset += dtype.itemsize * element.count
                if element.name == "vertex" and all(c in records.dtype.names for c in "xyz"):
                    tables["vertex"] = np.column_stack([records[c] for c in "xyz"]).astype(np.float64)
                    continue
                rows = [{name: records[name][i] for name, _ in element.properties} for i in range(element.count)]
            else:
                rows, offset = self._binary_list_rows(body, offset, element, byte_order, path)
            tables[element.name] = self._collect(element, rows, path)
        return tables

    @staticmethod
    def _binary_list_rows(body: bytes, offset: int, element: _PlyElement, byte_order: str, path: PathLike):
        rows = []
        try:
            for _ in range(element.count):
                row: Dict[str, object] = {}
                for name, kind in element.properties:
                    if isinstance(kind, tuple):
                        count_type = np.dtype(byte_order + kind[0])
                        item_type = np.dtype(byte_order + kind[1])
                        count = int(np.frombuffer(body, dtype=count_type, count=1, offset=offset)[0])
                        offset += count_type.itemsize
                        row[name] = np.frombuffer(body, dtype=item_type, count=count, offset=offset).tolist()
                        offset += item_type.itemsize * count
                    else:
                        scalar_type = np.dtype(byte_order + kind)
                        row[name] = np.frombuffer(body, dtype=scalar_type, count=1, offset=offset)[0]
                        offset += scalar_type.itemsize
                rows.append(row)
        except ValueError as exc:
            raise MeshFormatError(f"truncated {element.name} data", str(path)) from exc
        return rows, offset

    @staticmethod
    def _collect(element: _PlyElement, rows: List[Dict[str, object]], path: PathLike):
        if element.name == "vertex":
            try:
                return np.array([[row["x"], row["y"], row["z"]] for row in rows], dtype=np.float64)
            except KeyError as exc:
                raise MeshFormatError("vertex element needs x, y, z properties", str(path)) from exc
        if element.name == "face":
            key = next((name for name in ("vertex_indices", "vertex_index") if rows and name in rows[0]), None)
            if rows and key is None:
                raise MeshFormatError("face element needs a vertex_indices list", str(path))
            polygons = [[int(v) for v in row[key]] for row in rows] if rows else []
            for polygon in polygons:
                if len(polygon) < 3:
                    raise MeshFormatError("face with fewer than three vertices", str(path))
            return polygons
        return rows

    def write(self, mesh: TriangleMesh, path: PathLike) -> None:
        _check_writable(mesh)
        header = "\n".join([
            "ply",
            "format binary_little_endian 1.0",
            "comment NormalTV mesh",
            f"element vertex {mesh.n_vertices}",
            "property double x",
            "property double y",
            "property double z",
            f"element face {mesh.n_triangles}",
            "property list uchar int vertex_indices",
            "end_header",
        ]) + "\n"
        faces = np.empty(mesh.n_triangles, dtype=[("count", "u1"), ("indices", "<i4", (3,))])
        faces["count"] = 3
        faces["indices"] = mesh.triangles
        with open(path, "wb") as handle:
            handle.write(header.encode("ascii"))
            handle.write(mesh.vertices.astype("<f8").tobytes())
            handle.write(faces.tobytes())


class MeshFormatFactory:
    """
    Factory for mesh format handlers.

    Provides a centralized way to pick a reader/writer from an explicit
    format or from a file suffix.
    """

    _formats = {
        MeshFileType.OBJ: ObjFormat,
        MeshFileType.PLY: PlyFormat,
    }

    @classmethod
    def create(cls, file_type: MeshFileType) -> MeshFormat:
        """
        Create a handler for the given format.

        Raises:
            MeshFormatError: If the format is not supported
        """
        format_class = cls._formats.get(file_type)
        if not format_class:
            raise MeshFormatError(f"Unsupported mesh format: {file_type}")
        return format_class()

    @classmethod
    def for_path(cls, path: PathLike, file_type: Optional[Union[MeshFileType, str]] = None) -> MeshFormat:
        if file_type is None:
            suffix = Path(path).suffix.lower().lstrip(".")
            try:
                file_type = MeshFileType(suffix)
            except ValueError as exc:
                raise MeshFormatError(f"Cannot infer mesh format from suffix {suffix!r}", str(path)) from exc
        elif isinstance(file_type, str):
            try:
                file_type = MeshFileType(file_type.lower())
            except ValueError as exc:
                raise MeshFormatError(f"Unsupported mesh format: {file_type!r}", str(path)) from exc
        return cls.create(file_type)

    @classmethod
    def get_available_formats(cls) -> List[MeshFileType]:
        return list(cls._formats.keys())


def load_mesh(
    path: PathLike,
    file_type: Optional[Union[MeshFileType, str]] = None,
    area_floor: float = AREA_FLOOR,
) -> TriangleMesh:
    """
    Load a mesh, inferring the format from the suffix when not given.

    Returns:
        TriangleMesh: Mesh satisfying all invariants, file order preserved
    """
    mesh = MeshFormatFactory.for_path(path, file_type).read(path, area_floor=area_floor)
    logger.info("Loaded %s from %s", mesh, path)
    return mesh


def save_mesh(mesh: TriangleMesh, path: PathLike, file_type: Optional[Union[MeshFileType, str]] = None) -> None:
    """Write a mesh; the format is inferred from the suffix when not given."""
    MeshFormatFactory.for_path(path, file_type).write(mesh, path)
    logger.info("Saved %s to %s", mesh, path)


def read_mask(path: PathLike, n_vertices: Optional[int] = None) -> np.ndarray:
    """
    Read a vertex mask file: one 0-based vertex index per line, ``#`` comments.

    Returns:
        np.ndarray: Sorted unique indices

    Raises:
        MeshFormatError: On a malformed line or an index out of range
    """
    indices = []
    with open(path, "r") as handle:
        for lineno, line in enumerate(handle, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                index = int(text)
            except ValueError as exc:
                raise MeshFormatError(f"bad vertex index {text!r}", str(path), lineno) from exc
            if index < 0 or (n_vertices is not None and index >= n_vertices):
                raise MeshFormatError(f"vertex index {index} out of range", str(path), lineno)
            indices.append(index)
    return np.unique(np.asarray(indices, dtype=np.int64))


def write_mask(indices: Iterable[int], path: PathLike) -> None:
    with open(path, "w") as handle:
        handle.write("# free vertex indices (0-based)\n")
        for index in sorted(int(i) for i in indices):
            handle.write(f"{index}\n")

