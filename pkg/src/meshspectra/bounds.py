"""Calibrated lower-bound estimators for the smallest stiffness eigenvalue.

Three families of estimates, all driven by mesh geometry alone:

* "new"  - patch-volume bound; 2D uses N and the smallest patch through a
  log factor, 3D uses the (-1/2)-power sum of all free-vertex patches.
* "gm"   - the same shapes weighted by the mesh constants M (max cells per
  vertex) and H (max volume ratio of touching cells).
* "khx"  - element-volume analog running over cells instead of patches.

Each bound carries an unknown multiplicative constant; `calibrate` fixes it
so that the estimate reproduces the exact eigenvalue on one uniform
reference mesh per dimension, after which the estimators can be compared
across families and sizes on equal footing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .meshgen import (
    GradingParams,
    MeshFamily,
    PatchStats,
    build_mesh,
    cell_volumes,
    patch_stats,
)

# pinned per-dimension reference sizes (intervals per direction)
DEFAULT_REFERENCE_INTERVALS = {2: 64, 3: 12}


@dataclass(frozen=True)
class Calibration:
    """Per-dimension multiplicative constants, one per estimator family."""

    dim: int
    c_new: float
    c_gm: float
    c_khx: float
    n_ref: int

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {self.dim}")
        for name in ("c_new", "c_gm", "c_khx"):
            c = getattr(self, name)
            if not (c > 0.0 and math.isfinite(c)):
                raise ValueError(f"{name} must be positive and finite, got {c!r}")
        if self.n_ref < 2:
            raise ValueError(f"n_ref must be >= 2, got {self.n_ref}")


@dataclass(frozen=True)
class BoundReport:
    """One mesh's exact eigenvalue next to all three calibrated estimates."""

    n_free: int
    lambda_exact: float
    lambda_new: float
    lambda_gm: float
    lambda_khx: float
    stats: PatchStats

    def __post_init__(self):
        for name in ("lambda_exact", "lambda_new", "lambda_gm", "lambda_khx"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")


def holder_mean(values, p: float) -> float:
    """Power mean M_p(values) = ((1/n) sum v_i^p)^(1/p) for nonzero p."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("holder_mean needs at least one value")
    if np.any(v <= 0.0):
        raise ValueError("holder_mean is defined for positive values only")
    if p == 0.0:
        raise ValueError("p must be nonzero")
    return float(np.mean(v**p) ** (1.0 / p))


def _check_dim(dim: int, cal: Calibration) -> None:
    if dim not in (2, 3):
        raise ValueError(f"dim must be 2 or 3, got {dim}")
    if cal.dim != dim:
        raise ValueError(f"calibration is for dim={cal.dim}, mesh has dim={dim}")


def _kernel_new(stats: PatchStats, dim: int) -> float:
    if dim == 2:
        n = stats.n_free
        return 1.0 / (n * (1.0 + abs(math.log(n * stats.omega_min))))
    s = float(np.sum(stats.patch_volumes**-0.5))
    return s ** (-2.0 / 3.0)


def _kernel_gm(stats: PatchStats, dim: int) -> float:
    mh = stats.m_const * stats.h_const
    if dim == 2:
        n = stats.n_free
        return 1.0 / (n * (1.0 + abs(math.log(n * stats.omega_min / mh))))
    s = float(np.sum(stats.patch_volumes**-0.5))
    return mh ** (-1.0 / 3.0) * s ** (-2.0 / 3.0)


def _kernel_khx(volumes, dim: int) -> float:
    v = np.asarray(volumes, dtype=float)
    if v.size == 0 or np.any(v <= 0.0):
        raise ValueError("cell volumes must be a nonempty positive array")
    if dim == 2:
        n_ele = v.size
        return 1.0 / (n_ele * (1.0 + abs(math.log(n_ele * float(v.min())))))
    s = float(np.sum(v**-0.5))
    return s ** (-2.0 / 3.0)


def estimate_new(stats: PatchStats, dim: int, cal: Calibration) -> float:
    """Patch-volume estimate; in 2D only N and the smallest patch enter."""
    _check_dim(dim, cal)
    return cal.c_new * _kernel_new(stats, dim)


def estimate_gm(stats: PatchStats, dim: int, cal: Calibration) -> float:
    """Patch-volume estimate penalized by the mesh constants M and H."""
    _check_dim(dim, cal)
    return cal.c_gm * _kernel_gm(stats, dim)


def estimate_khx(volumes, dim: int, cal: Calibration) -> float:
    """Element-volume estimate over all cells (N_ele = cell count)."""
    _check_dim(dim, cal)
    return cal.c_khx * _kernel_khx(volumes, dim)


def geo_form(stats: PatchStats, dim: int = 3) -> float:
    """Average-patch form of the 3D kernel.

    Rescales every patch by the mean patch size w = d*|domain|/N and combines
    them through a Hölder mean.  On the unit domain this is algebraically the
    same number as the raw (-1/2)-power-sum kernel; keeping both forms gives a
    cross-check routed through independent code paths.
    """
    if dim != 3:
        raise ValueError("the average-patch form is implemented for dim=3 only")
    d = float(dim)
    n = stats.n_free
    omega_tilde = d * stats.domain_volume / n
    mean = holder_mean(stats.patch_volumes / omega_tilde, 1.0 - d / 2.0)
    return mean ** (1.0 - 2.0 / d) * d ** ((d - 2.0) / d) / n


def calibrate(dim: int, n_ref: int | None = None, exact: float | None = None) -> Calibration:
    """Fix the estimator constants on one uniform reference mesh.

    `exact` is the smallest stiffness eigenvalue of the uniform mesh with
    n_ref intervals per direction (computed by the caller with the spectra
    module); each constant is set so its estimator returns exactly `exact`
    on that mesh.
    """
    if dim not in (2, 3):
        raise ValueError(f"dim must be 2 or 3, got {dim}")
    if n_ref is None:
        n_ref = DEFAULT_REFERENCE_INTERVALS[dim]
    if exact is None or not (exact > 0.0 and math.isfinite(exact)):
        raise ValueError(f"exact must be a positive finite eigenvalue, got {exact!r}")
    mesh = build_mesh(dim, GradingParams(MeshFamily.UNIFORM, n_ref))
    stats = patch_stats(mesh)
    vols = cell_volumes(mesh)
    return Calibration(
        dim=dim,
        c_new=exact / _kernel_new(stats, dim),
        c_gm=exact / _kernel_gm(stats, dim),
        c_khx=exact / _kernel_khx(vols, dim),
        n_ref=n_ref,
    )
