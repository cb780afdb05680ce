"""P1 stiffness matrix assembly for the Dirichlet diffusion problem.

Assembles A_ij = integral of grad(phi_i) . D grad(phi_j) over the free vertices
of a simplicial mesh, with homogeneous Dirichlet conditions imposed by
eliminating boundary rows and columns.  Gradients of the P1 hat functions are
constant on each cell, so the local matrix is |K| * G^T D G with G the matrix of
barycentric-coordinate gradients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .meshgen import SimplicialMesh


@dataclass(frozen=True)
class DiffusionTensor:
    """Constant symmetric positive definite coefficient matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"coefficient matrix must be square, got shape {m.shape}")
        if np.max(np.abs(m - m.T)) > 1e-14 * max(1.0, np.max(np.abs(m))):
            raise ValueError("coefficient matrix must be symmetric")
        if np.linalg.eigvalsh(m)[0] <= 0.0:
            raise ValueError("coefficient matrix must be positive definite")

    @staticmethod
    def identity(dim: int) -> "DiffusionTensor":
        return DiffusionTensor(np.eye(dim))


@dataclass(frozen=True)
class SparseSPD:
    """Symmetric positive definite matrix over free vertices, CSR storage.

    Symmetry holds exactly: assembly fills the upper triangle and mirrors it.
    """

    matrix: sp.csr_matrix

    def __post_init__(self):
        m = self.matrix
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"matrix must be square, got shape {m.shape}")
        if np.any(m.diagonal() <= 0.0):
            raise ValueError("diagonal entries must be strictly positive")

    @property
    def n(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def nnz(self) -> int:
        return int(self.matrix.nnz)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ x

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal()

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def scaled(self, c: float) -> "SparseSPD":
        if c <= 0.0:
            raise ValueError("scale factor must be positive")
        return SparseSPD(self.matrix * c)


def local_stiffness(simplex_vertices: np.ndarray, D: DiffusionTensor) -> np.ndarray:
    """Element stiffness matrix of one simplex.

    Parameters
    ----------
    simplex_vertices : (d+1, d) array
        Vertex coordinates.
    D : DiffusionTensor
        Constant coefficient matrix, d x d.

    Returns
    -------
    (d+1, d+1) symmetric positive semidefinite matrix with zero row sums
    (constants lie in the kernel of the gradient).
    """
    pts = np.asarray(simplex_vertices, dtype=float)
    d = pts.shape[1]
    if pts.shape != (d + 1, d):
        raise ValueError(f"expected {d + 1} vertices of dimension {d}, got shape {pts.shape}")
    edges = (pts[1:] - pts[0]).T  # columns are edge vectors from vertex 0
    det = np.linalg.det(edges)
    scale = float(np.prod(np.linalg.norm(edges, axis=0)))
    if scale == 0.0 or abs(det) < 1e-14 * scale:
        raise ValueError(f"degenerate simplex (det {det:.3g} vs edge scale {scale:.3g})")
    grads = np.empty((d, d + 1))
    grads[:, 1:] = np.linalg.inv(edges).T
    grads[:, 0] = -grads[:, 1:].sum(axis=1)
    vol = abs(det) / math.factorial(d)
    k = vol * grads.T @ D.matrix @ grads
    return 0.5 * (k + k.T)  # exact symmetry so the mirrored assembly is bit-identical


def assemble(mesh: SimplicialMesh, D: DiffusionTensor | None = None) -> SparseSPD:
    """Assemble the stiffness matrix over free vertices.

    Boundary rows/columns are eliminated (homogeneous Dirichlet): only pairs of
    free vertices are scattered.  Only upper-triangle entries (by global row)
    are accumulated; the transpose is mirrored afterwards, which makes the
    matrix exactly symmetric.

    Parameters
    ----------
    mesh : SimplicialMesh
    D : DiffusionTensor, optional
        Defaults to the identity (Laplacian).

    Returns
    -------
    SparseSPD of dimension mesh.n_free.
    """
    if D is None:
        D = DiffusionTensor.identity(mesh.dim)
    n = mesh.n_free
    if n == 0:
        raise ValueError("mesh has no free vertices; the Dirichlet system is empty")
    d = mesh.dim
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    for cell in mesh.cells:
        k = local_stiffness(mesh.vertices[cell], D)
        gi = mesh.free_index[cell]
        for a in range(d + 1):
            ia = gi[a]
            if ia < 0:
                continue
            for b in range(d + 1):
                ib = gi[b]
                if ib < ia:  # lower triangle comes from the mirror
                    continue
                rows.append(ia)
                cols.append(ib)
                vals.append(k[a, b])
    upper = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    full = upper + sp.triu(upper, k=1).T
    return SparseSPD(full.tocsr())


def export_matrix_text(A: SparseSPD, path) -> None:
    """Coordinate-format dump 'i j value', 0-based, upper triangle only."""
    coo = sp.triu(A.matrix, k=0).tocoo()
    order = np.lexsort((coo.col, coo.row))
    lines = [
        f"{coo.row[t]} {coo.col[t]} {format(coo.data[t], '.17g')}" for t in order
    ]
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + ("\n" if lines else ""))
