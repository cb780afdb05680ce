"""Shared brute-force oracles: slow, independent recomputations of the mesh
statistics, used to cross-check the vectorized implementations."""

from __future__ import annotations

import numpy as np

from meshspectra import SimplicialMesh, cell_volumes


def brute_patch_volumes(mesh: SimplicialMesh) -> np.ndarray:
    """Per-vertex patch volumes over ALL vertices, accumulated cell by cell."""
    vols = cell_volumes(mesh)
    patches = np.zeros(mesh.n_vertices)
    for c, cell in enumerate(mesh.cells):
        for v in cell:
            patches[v] += vols[c]
    return patches


def brute_h_const(mesh: SimplicialMesh) -> float:
    """All-pairs max volume ratio between cells sharing at least one vertex."""
    vols = cell_volumes(mesh)
    sets = [set(int(v) for v in cell) for cell in mesh.cells]
    h = 1.0
    for a in range(len(sets)):
        for b in range(a + 1, len(sets)):
            if sets[a] & sets[b]:
                h = max(h, vols[a] / vols[b], vols[b] / vols[a])
    return float(h)


def brute_m_const(mesh: SimplicialMesh) -> int:
    counts = {}
    for cell in mesh.cells:
        for v in cell:
            counts[int(v)] = counts.get(int(v), 0) + 1
    return max(counts.values())
