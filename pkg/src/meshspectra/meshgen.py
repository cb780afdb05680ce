"""Graded 1D node families and tensor-product simplicial meshes of the unit square/cube.

Node sets live on [0, 1] and encode a grading family (uniform, Shishkin,
Bakhvalov-type, power-graded, or a single thin slab).  Tensor meshes split every
grid rectangle into two triangles (2D) or every grid box into six tetrahedra via
the Kuhn subdivision (3D), which keeps the mesh conforming.  patch_stats collects
the geometric quantities the eigenvalue estimators consume: per-node patch
volumes, the smallest cell, the max cells-per-vertex count M and the max volume
ratio H between cells whose closures intersect.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, replace

import numpy as np


class MeshFamily(enum.Enum):
    UNIFORM = "uniform"
    SHISHKIN = "shishkin"
    BAKHVALOV = "bakhvalov"
    POWER = "power"
    SINGLE_LAYER = "single_layer"


class LayerPosition(enum.Enum):
    BOUNDARY = "boundary"
    INTERNAL = "internal"


# families whose node formulas index the fine half by i <= n/2
_HALF_INDEXED = (MeshFamily.SHISHKIN, MeshFamily.BAKHVALOV, MeshFamily.POWER)


@dataclass(frozen=True)
class GradingParams:
    """Parameters selecting one 1D grading.

    n counts intervals per direction.  eps is the layer width parameter for the
    layer-adapted families, beta the exponent of the power grading, c_sigma the
    transition constant of the Shishkin/Bakhvalov constructions.
    """

    family: MeshFamily
    n: int
    eps: float = 0.05
    beta: float = 3.0
    c_sigma: float = 1.0
    layer_position: LayerPosition = LayerPosition.BOUNDARY

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need at least 2 intervals per direction, got n={self.n}")
        if self.family is not MeshFamily.UNIFORM and self.n % 2 != 0:
            raise ValueError(
                f"{self.family.value} grading indexes half the intervals; n must be even, got {self.n}"
            )
        if not 0.0 < self.eps < 1.0:
            raise ValueError(f"layer parameter eps must lie in (0, 1), got {self.eps}")
        if self.beta < 1.0:
            raise ValueError(f"grading exponent beta must be >= 1, got {self.beta}")
        if self.c_sigma <= 0.0:
            raise ValueError(f"transition constant c_sigma must be positive, got {self.c_sigma}")
        if self.layer_position is LayerPosition.INTERNAL and self.family not in (
            MeshFamily.SHISHKIN,
            MeshFamily.BAKHVALOV,
        ):
            raise ValueError("internal layer placement only applies to shishkin/bakhvalov gradings")


@dataclass(frozen=True)
class NodeSet1D:
    """Strictly increasing grid on [0, 1], endpoints included exactly."""

    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.ascontiguousarray(self.nodes, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("node set needs at least the two endpoints")
        if nodes[0] != 0.0 or nodes[-1] != 1.0:
            raise ValueError("node set must span [0, 1] with exact endpoints")
        if not np.all(np.diff(nodes) > 0.0):
            raise ValueError("nodes must be strictly increasing")

    def __len__(self) -> int:
        return int(self.nodes.size)

    @property
    def steps(self) -> np.ndarray:
        return np.diff(self.nodes)


def uniform_nodes(n: int) -> NodeSet1D:
    """Equidistant nodes i/n, i = 0..n."""
    if n < 2:
        raise ValueError(f"need at least 2 intervals, got n={n}")
    return NodeSet1D(np.linspace(0.0, 1.0, n + 1))


def shishkin_nodes(p: GradingParams) -> NodeSet1D:
    """Piecewise-equidistant layer mesh: n/2 fine steps on [0, tau/2], n/2 coarse to 1.

    The transition tau = min(1, 2*c_sigma*eps*ln n) clamps to 1 for large eps,
    in which case the node set degenerates to the uniform one (not an error).
    """
    if p.family is not MeshFamily.SHISHKIN:
        raise ValueError(f"expected shishkin params, got {p.family.value}")
    if p.n < 4:
        raise ValueError(f"shishkin grading needs n >= 4, got {p.n}")
    tau = min(1.0, 2.0 * p.c_sigma * p.eps * math.log(p.n))
    half = p.n // 2
    fine = tau * (np.arange(half + 1) / p.n)
    coarse = np.linspace(tau / 2.0, 1.0, half + 1)
    return NodeSet1D(np.concatenate([fine, coarse[1:]]))


def bakhvalov_nodes(p: GradingParams) -> NodeSet1D:
    """Logarithmically graded layer mesh with a smooth fine-to-coarse transition.

    Fine nodes x_i = -c_sigma*eps*ln(1 - 2(1-eps)*i/n) for i = 0..n/2; the
    remaining n/2 steps split [x_{n/2}, 1] equidistantly.  The ln argument stays
    positive because 2(1-eps)*(i/n) <= 1-eps < 1.
    """
    if p.family is not MeshFamily.BAKHVALOV:
        raise ValueError(f"expected bakhvalov params, got {p.family.value}")
    half = p.n // 2
    i = np.arange(half + 1)
    fine = -p.c_sigma * p.eps * np.log1p(-2.0 * (1.0 - p.eps) * i / p.n)
    fine[0] = 0.0  # -0.0 from the i=0 evaluation
    if fine[-1] >= 1.0:
        raise ValueError(
            f"fine region reaches the far boundary (transition {fine[-1]:.4g} >= 1); "
            f"reduce c_sigma*eps"
        )
    coarse = np.linspace(fine[-1], 1.0, half + 1)
    return NodeSet1D(np.concatenate([fine, coarse[1:]]))


def power_nodes(p: GradingParams) -> NodeSet1D:
    """Symmetric power grading: x_i = (2i/n)^beta / 2 up to the midpoint, reflected above."""
    if p.family is not MeshFamily.POWER:
        raise ValueError(f"expected power params, got {p.family.value}")
    half = p.n // 2
    lower = 0.5 * (2.0 * np.arange(half + 1) / p.n) ** p.beta
    upper = (1.0 - lower[:-1])[::-1]  # exact reflection, not re-evaluation
    return NodeSet1D(np.concatenate([lower, upper]))


def single_layer_nodes(p: GradingParams) -> NodeSet1D:
    """Uniform grid plus one extra node at 1/2 + eps/n: a single slab of relative width eps."""
    if p.family is not MeshFamily.SINGLE_LAYER:
        raise ValueError(f"expected single_layer params, got {p.family.value}")
    # eps < 1 strictly keeps the inserted node off the neighbor node 1/2 + 1/n
    base = np.linspace(0.0, 1.0, p.n + 1)
    mid = p.n // 2
    extra = 0.5 + p.eps / p.n
    return NodeSet1D(np.concatenate([base[: mid + 1], [extra], base[mid + 1 :]]))


def internalize(ns: NodeSet1D) -> NodeSet1D:
    """Move a boundary layer at 0 to the domain center.

    Maps the input set through (1-x)/2 (reversed) and (1+x)/2 and drops the
    duplicate midpoint, so a fine region adjacent to 0 becomes a fine region
    centered at 1/2 with all steps halved.  Output has 2*(len-1)+1 nodes.
    """
    nodes = ns.nodes
    left = ((1.0 - nodes) / 2.0)[::-1]
    right = (1.0 + nodes) / 2.0
    return NodeSet1D(np.concatenate([left, right[1:]]))


def graded_nodes(p: GradingParams) -> NodeSet1D:
    """Dispatch to the family's node builder, applying internal-layer placement if set."""
    if p.layer_position is LayerPosition.INTERNAL:
        # build the boundary-layer set at half resolution, then mirror to the
        # center: the result has exactly p.n intervals again
        if p.n % 4 != 0:
            raise ValueError(f"internal layer placement needs n divisible by 4, got {p.n}")
        base = replace(p, n=p.n // 2, layer_position=LayerPosition.BOUNDARY)
        builder = shishkin_nodes if p.family is MeshFamily.SHISHKIN else bakhvalov_nodes
        return internalize(builder(base))
    if p.family is MeshFamily.UNIFORM:
        return uniform_nodes(p.n)
    if p.family is MeshFamily.SHISHKIN:
        return shishkin_nodes(p)
    if p.family is MeshFamily.BAKHVALOV:
        return bakhvalov_nodes(p)
    if p.family is MeshFamily.POWER:
        return power_nodes(p)
    return single_layer_nodes(p)


@dataclass(frozen=True)
class SimplicialMesh:
    """Conforming simplicial mesh of the unit square/cube.

    vertices is (n_vertices, dim); cells holds dim+1 vertex indices per simplex
    with positive orientation.  boundary_mask flags vertices on the domain
    boundary; free_index maps a non-boundary vertex to its matrix row (-1 on the
    boundary).  Instances are immutable and shareable.
    """

    dim: int
    vertices: np.ndarray
    cells: np.ndarray
    boundary_mask: np.ndarray
    free_index: np.ndarray

    @property
    def n_vertices(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def n_cells(self) -> int:
        return int(self.cells.shape[0])

    @property
    def n_free(self) -> int:
        return int(np.count_nonzero(~self.boundary_mask))


@dataclass(frozen=True)
class PatchStats:
    """Geometric statistics of one mesh.

    patch_volumes[i] is the volume of the patch of free vertex i (union of cells
    whose closure contains it), indexed by matrix row.  m_const is the max number
    of cells sharing any single vertex; h_const the max volume ratio between two
    cells whose closures intersect.
    """

    patch_volumes: np.ndarray
    omega_min: float
    k_min: float
    m_const: int
    h_const: float
    n_free: int
    n_cells: int
    domain_volume: float


def _free_index(boundary_mask: np.ndarray) -> np.ndarray:
    free = np.full(boundary_mask.size, -1, dtype=np.int64)
    free[~boundary_mask] = np.arange(np.count_nonzero(~boundary_mask))
    return free


def tensor_mesh_2d(nx: NodeSet1D, ny: NodeSet1D) -> SimplicialMesh:
    """Product mesh of the unit square, every rectangle split along its
    lower-left to upper-right diagonal.

    Vertex (i, j) gets index i*len(ny) + j.  The two triangles of rectangle
    (i, j) are (v00, v10, v11) and (v00, v11, v01), both counterclockwise.
    """
    x, y = nx.nodes, ny.nodes
    mx, my = x.size, y.size
    vertices = np.column_stack([np.repeat(x, my), np.tile(y, mx)])

    ii, jj = np.meshgrid(np.arange(mx), np.arange(my), indexing="ij")
    boundary = (ii == 0) | (ii == mx - 1) | (jj == 0) | (jj == my - 1)
    boundary_mask = boundary.ravel()

    ri, rj = np.meshgrid(np.arange(mx - 1), np.arange(my - 1), indexing="ij")
    v00 = (ri * my + rj).ravel()
    v10 = v00 + my
    v01 = v00 + 1
    v11 = v10 + 1
    tri1 = np.column_stack([v00, v10, v11])
    tri2 = np.column_stack([v00, v11, v01])
    cells = np.empty((2 * v00.size, 3), dtype=np.int64)
    cells[0::2] = tri1
    cells[1::2] = tri2

    return SimplicialMesh(
        dim=2,
        vertices=vertices,
        cells=cells,
        boundary_mask=boundary_mask,
        free_index=_free_index(boundary_mask),
    )


# Kuhn subdivision: one tetrahedron per axis permutation, all sharing the main
# diagonal of the box.  Odd permutations get their last two vertices swapped to
# keep a positive orientation.
_KUHN_PERMS = (
    ((0, 1, 2), False),
    ((1, 2, 0), False),
    ((2, 0, 1), False),
    ((0, 2, 1), True),
    ((2, 1, 0), True),
    ((1, 0, 2), True),
)


def tensor_mesh_3d(nx: NodeSet1D, ny: NodeSet1D, nz: NodeSet1D) -> SimplicialMesh:
    """Product mesh of the unit cube; every box is Kuhn-subdivided into 6 tets.

    The same subdivision pattern in every box makes the mesh conforming: faces
    of neighboring boxes carry matching triangulations.
    """
    x, y, z = nx.nodes, ny.nodes, nz.nodes
    mx, my, mz = x.size, y.size, z.size
    xi, yi, zi = np.meshgrid(x, y, z, indexing="ij")
    vertices = np.column_stack([xi.ravel(), yi.ravel(), zi.ravel()])

    ii, jj, kk = np.meshgrid(np.arange(mx), np.arange(my), np.arange(mz), indexing="ij")
    boundary = (
        (ii == 0) | (ii == mx - 1) | (jj == 0) | (jj == my - 1) | (kk == 0) | (kk == mz - 1)
    )
    boundary_mask = boundary.ravel()

    bi, bj, bk = np.meshgrid(
        np.arange(mx - 1), np.arange(my - 1), np.arange(mz - 1), indexing="ij"
    )
    base = ((bi * my + bj) * mz + bk).ravel()
    stride = np.array([my * mz, mz, 1], dtype=np.int64)

    n_boxes = base.size
    cells = np.empty((6 * n_boxes, 4), dtype=np.int64)
    for t, (perm, swap) in enumerate(_KUHN_PERMS):
        c0 = base
        c1 = c0 + stride[perm[0]]
        c2 = c1 + stride[perm[1]]
        c3 = c2 + stride[perm[2]]
        tet = (c0, c2, c1, c3) if swap else (c0, c1, c2, c3)
        cells[t::6] = np.column_stack(tet)

    return SimplicialMesh(
        dim=3,
        vertices=vertices,
        cells=cells,
        boundary_mask=boundary_mask,
        free_index=_free_index(boundary_mask),
    )


def build_mesh(dim: int, p: GradingParams) -> SimplicialMesh:
    """Mesh of the unit square/cube under the grading policy of the family.

    Shishkin/Bakhvalov/power gradings apply to every direction (product meshes);
    the single-layer family grades x only and keeps the other directions uniform.
    """
    if dim not in (2, 3):
        raise ValueError(f"dim must be 2 or 3, got {dim}")
    graded = graded_nodes(p)
    if p.family is MeshFamily.SINGLE_LAYER:
        rest = uniform_nodes(p.n)
        sets = [graded] + [rest] * (dim - 1)
    else:
        sets = [graded] * dim
    return tensor_mesh_2d(*sets) if dim == 2 else tensor_mesh_3d(*sets)


def cell_volumes(mesh: SimplicialMesh) -> np.ndarray:
    """Signed cell volumes; positive for the orientation the builders guarantee."""
    pts = mesh.vertices[mesh.cells]
    e = pts[:, 1:, :] - pts[:, :1, :]
    if mesh.dim == 2:
        det = e[:, 0, 0] * e[:, 1, 1] - e[:, 0, 1] * e[:, 1, 0]
        return det / 2.0
    det = np.einsum("ci,ci->c", e[:, 0], np.cross(e[:, 1], e[:, 2]))
    return det / 6.0


def patch_stats(mesh: SimplicialMesh) -> PatchStats:
    """Collect patch volumes and the mesh constants the bound formulas use.

    omega_min ranges over free vertices only (the values entering the bounds);
    m_const and h_const range over all vertices/cells.  Two cells' closures
    intersect exactly when they share a vertex in a conforming mesh, so H is the
    max over vertices of the incident max/min volume ratio.
    """
    if mesh.n_free == 0:
        raise ValueError("mesh has no free vertices; nothing to bound")
    vols = cell_volumes(mesh)
    nv = mesh.n_vertices
    corner = mesh.cells.ravel()
    vrep = np.repeat(vols, mesh.dim + 1)

    patch_all = np.zeros(nv)
    np.add.at(patch_all, corner, vrep)
    counts = np.bincount(corner, minlength=nv)

    vmax = np.full(nv, -np.inf)
    vmin = np.full(nv, np.inf)
    np.maximum.at(vmax, corner, vrep)
    np.minimum.at(vmin, corner, vrep)
    touched = counts > 0
    h_const = float(np.max(vmax[touched] / vmin[touched]))

    patch_free = patch_all[~mesh.boundary_mask]
    return PatchStats(
        patch_volumes=patch_free,
        omega_min=float(patch_free.min()),
        k_min=float(vols.min()),
        m_const=int(counts.max()),
        h_const=h_const,
        n_free=mesh.n_free,
        n_cells=mesh.n_cells,
        domain_volume=float(vols.sum()),
    )


def check_conforming(mesh: SimplicialMesh) -> None:
    """Raise if any codimension-1 face is shared by more than two cells, or a
    once-counted face is not a boundary face.  Intended for small meshes."""
    faces = Counter()
    for cell in mesh.cells:
        for drop in range(mesh.dim + 1):
            face = tuple(sorted(v for k, v in enumerate(cell) if k != drop))
            faces[face] += 1
    for face, count in faces.items():
        if count > 2:
            raise ValueError(f"face {face} shared by {count} cells")
        if count == 1 and not all(mesh.boundary_mask[v] for v in face):
            raise ValueError(f"interior face {face} belongs to only one cell")


def export_mesh_text(mesh: SimplicialMesh, path) -> None:
    """Plain-text dump: 'dim n_vertices n_cells' header, vertex lines, 0-based cell lines."""
    lines = [f"{mesh.dim} {mesh.n_vertices} {mesh.n_cells}"]
    for v in mesh.vertices:
        lines.append(" ".join(format(c, ".17g") for c in v))
    for cell in mesh.cells:
        lines.append(" ".join(str(int(i)) for i in cell))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
