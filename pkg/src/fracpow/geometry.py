"""Structured triangulations of the quarter unit disk.

Meshes are built from concentric rings of vertices with angular
resolution proportional to radius, triangulated band by band with a
two-pointer merge, and refined by doubling the ring count.  Boundary
edges carry one of three labels: the bottom radius (x2 = 0), the left
radius (x1 = 0), and the circular arc.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .errors import MeshFormatError, MeshValidationError, ParameterError

_ARC_TOL = 1e-12
_LEVEL_RINGS = {1: 8, 2: 16, 3: 32}


class BoundaryLabel(str, enum.Enum):
    BOTTOM = "G1"   # segment on x2 = 0
    LEFT = "G2"     # segment on x1 = 0
    ARC = "G3"      # circular arc x1^2 + x2^2 = 1


@dataclass(frozen=True, eq=False)
class Mesh:
    """Triangulation with labelled boundary edges.

    vertices: (n, 2) float array; triangles: (t, 3) int array with
    counterclockwise orientation; boundary_edges: (e, 2) int array;
    boundary_labels: length-e list of BoundaryLabel.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    boundary_labels: tuple

    @property
    def n_vertices(self):
        return self.vertices.shape[0]

    @property
    def n_triangles(self):
        return self.triangles.shape[0]

    def signed_areas(self):
        p = self.vertices[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def edges_with_label(self, label):
        idx = [i for i, lab in enumerate(self.boundary_labels) if lab is label]
        return self.boundary_edges[idx]


def quarter_disk_mesh(level):
    """Quarter-disk triangulation at refinement level 1, 2 or 3.

    Ring i of n_r carries 3i+1 vertices; refinement doubles n_r, which
    roughly quadruples the cell count.
    """
    if level not in _LEVEL_RINGS:
        raise ParameterError(f"level must be one of {sorted(_LEVEL_RINGS)}, got {level}")
    n_r = _LEVEL_RINGS[level]

    ring_start = []
    verts = []
    for i in range(n_r + 1):
        ring_start.append(len(verts))
        if i == 0:
            verts.append((0.0, 0.0))
            continue
        r = i / n_r
        m = 3 * i
        for j in range(m + 1):
            theta = 0.5 * np.pi * j / m
            if j == 0:
                verts.append((r, 0.0))
            elif j == m:
                verts.append((0.0, r))
            else:
                verts.append((r * np.cos(theta), r * np.sin(theta)))
    vertices = np.array(verts)

    triangles = []
    for i in range(1, n_r + 1):
        inner = list(range(ring_start[i - 1], ring_start[i]))
        outer = list(range(ring_start[i], ring_start[i] + 3 * i + 1))
        ang_in = np.linspace(0.0, 1.0, len(inner)) if len(inner) > 1 else np.zeros(1)
        ang_out = np.linspace(0.0, 1.0, len(outer))
        a = b = 0
        while a < len(inner) - 1 or b < len(outer) - 1:
            if a < len(inner) - 1 and (b == len(outer) - 1 or ang_in[a + 1] <= ang_out[b + 1]):
                triangles.append((inner[a], outer[b], inner[a + 1]))
                a += 1
            else:
                triangles.append((inner[a], outer[b], outer[b + 1]))
                b += 1
    triangles = np.array(triangles, dtype=int)

    edges, labels = _label_boundary(vertices, _boundary_edges_of(triangles))
    mesh = Mesh(
        vertices=vertices,
        triangles=triangles,
        boundary_edges=edges,
        boundary_labels=labels,
    )
    validate_mesh(mesh)
    return mesh


def _boundary_edges_of(triangles):
    count = {}
    for tri in triangles:
        for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            key = (min(a, b), max(a, b))
            count[key] = count.get(key, 0) + 1
    return sorted(key for key, c in count.items() if c == 1)


def _label_boundary(vertices, edges):
    labels = []
    out = []
    for a, b in edges:
        pa, pb = vertices[a], vertices[b]
        on_arc = (
            abs(pa[0] ** 2 + pa[1] ** 2 - 1.0) <= _ARC_TOL
            and abs(pb[0] ** 2 + pb[1] ** 2 - 1.0) <= _ARC_TOL
        )
        if on_arc:
            labels.append(BoundaryLabel.ARC)
        elif abs(pa[1]) <= _ARC_TOL and abs(pb[1]) <= _ARC_TOL:
            labels.append(BoundaryLabel.BOTTOM)
        elif abs(pa[0]) <= _ARC_TOL and abs(pb[0]) <= _ARC_TOL:
            labels.append(BoundaryLabel.LEFT)
        else:
            raise MeshValidationError(
                f"boundary edge ({a}, {b}) lies on no labelled segment"
            )
        out.append((a, b))
    return np.array(out, dtype=int), tuple(labels)


def validate_mesh(mesh):
    """Check the structural invariants; raise MeshValidationError naming
    the first violated one."""
    v = mesh.vertices
    if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
        raise MeshValidationError("vertex array must be (n, 2) with n >= 3")
    if np.any(v[:, 0] < -_ARC_TOL) or np.any(v[:, 1] < -_ARC_TOL):
        raise MeshValidationError("vertex outside the first quadrant")
    if np.any(v[:, 0] ** 2 + v[:, 1] ** 2 > 1.0 + _ARC_TOL):
        raise MeshValidationError("vertex outside the unit disk")
    tri = mesh.triangles
    if np.any(tri < 0) or np.any(tri >= v.shape[0]):
        raise MeshValidationError("triangle index out of range")
    areas = mesh.signed_areas()
    if np.any(areas <= 0.0):
        bad = int(np.argmin(areas))
        raise MeshValidationError(f"negative area in triangle {bad}")

    # conformity: interior edges in exactly two triangles, boundary in one,
    # and the listed boundary edges are exactly the single-triangle ones
    boundary = _boundary_edges_of(tri)
    listed = sorted((min(a, b), max(a, b)) for a, b in mesh.boundary_edges)
    if boundary != listed:
        raise MeshValidationError("boundary edge list does not match triangulation")
    count = {}
    for t in tri:
        for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            key = (min(a, b), max(a, b))
            count[key] = count.get(key, 0) + 1
    if any(c > 2 for c in count.values()):
        raise MeshValidationError("edge shared by more than two triangles")

    # boundary edges close into loops: every touched vertex has degree 2
    degree = {}
    for a, b in mesh.boundary_edges:
        degree[a] = degree.get(a, 0) + 1
        degree[b] = degree.get(b, 0) + 1
    if any(d != 2 for d in degree.values()):
        raise MeshValidationError("boundary edges do not form closed loops")

    # labels sit on their segments
    for (a, b), lab in zip(mesh.boundary_edges, mesh.boundary_labels):
        for p in (v[a], v[b]):
            if lab is BoundaryLabel.BOTTOM and abs(p[1]) > _ARC_TOL:
                raise MeshValidationError("bottom-labelled edge off x2 = 0")
            if lab is BoundaryLabel.LEFT and abs(p[0]) > _ARC_TOL:
                raise MeshValidationError("left-labelled edge off x1 = 0")
            if lab is BoundaryLabel.ARC and abs(p[0] ** 2 + p[1] ** 2 - 1.0) > _ARC_TOL:
                raise MeshValidationError("arc-labelled edge off the unit circle")


def write_mesh(mesh, path):
    """Write the plain-text format; coordinates keep 17 significant digits
    so a read round-trips exactly."""
    lines = [
        f"vertices {mesh.n_vertices} triangles {mesh.n_triangles} "
        f"edges {len(mesh.boundary_edges)}"
    ]
    for x, y in mesh.vertices:
        lines.append(f"{x:.17g} {y:.17g}")
    for a, b, c in mesh.triangles:
        lines.append(f"{a} {b} {c}")
    for (a, b), lab in zip(mesh.boundary_edges, mesh.boundary_labels):
        lines.append(f"{a} {b} {lab.value}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_mesh(path):
    """Parse and validate a mesh file written by write_mesh."""
    with open(path) as fh:
        raw = fh.read().splitlines()
    if not raw:
        raise MeshFormatError("empty mesh file", line=1)
    header = raw[0].split()
    if len(header) != 6 or header[0] != "vertices" or header[2] != "triangles" or header[4] != "edges":
        raise MeshFormatError("malformed header", line=1)
    try:
        n_v, n_t, n_e = int(header[1]), int(header[3]), int(header[5])
    except ValueError:
        raise MeshFormatError("non-integer counts in header", line=1) from None
    if len(raw) < 1 + n_v + n_t + n_e:
        raise MeshFormatError("file truncated", line=len(raw) + 1)

    def parse(line_no, tokens, kinds):
        parts = raw[line_no - 1].split()
        if len(parts) != tokens:
            raise MeshFormatError(f"expected {tokens} fields", line=line_no)
        try:
            return [kind(p) for kind, p in zip(kinds, parts)]
        except ValueError:
            raise MeshFormatError("unparseable field", line=line_no) from None

    vertices = np.array(
        [parse(2 + i, 2, (float, float)) for i in range(n_v)], dtype=float
    )
    triangles = np.array(
        [parse(2 + n_v + i, 3, (int, int, int)) for i in range(n_t)], dtype=int
    )
    edges = []
    labels = []
    tokens = {lab.value: lab for lab in BoundaryLabel}
    for i in range(n_e):
        line_no = 2 + n_v + n_t + i
        a, b, tok = parse(line_no, 3, (int, int, str))
        if tok not in tokens:
            raise MeshFormatError(f"unknown boundary label {tok!r}", line=line_no)
        edges.append((a, b))
        labels.append(tokens[tok])
    mesh = Mesh(
        vertices=vertices,
        triangles=triangles,
        boundary_edges=np.array(edges, dtype=int).reshape(n_e, 2),
        boundary_labels=tuple(labels),
    )
    validate_mesh(mesh)
    return mesh
