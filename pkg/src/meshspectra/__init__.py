"""Mesh-spectral laboratory: graded simplicial meshes of the unit square/cube,
P1 stiffness assembly, exact smallest eigenvalues, and calibrated geometric
lower-bound estimates."""

from .bounds import (
    DEFAULT_REFERENCE_INTERVALS,
    BoundReport,
    Calibration,
    calibrate,
    estimate_gm,
    estimate_khx,
    estimate_new,
    geo_form,
    holder_mean,
)
from .fem import DiffusionTensor, SparseSPD, assemble, export_matrix_text, local_stiffness
from .harness import (
    FIXTURES,
    SweepAxis,
    SweepRow,
    SweepSpec,
    analyze_mesh,
    calibration_for,
    emit_csv,
    emit_svg_loglog,
    run_sweep,
)
from .meshgen import (
    GradingParams,
    LayerPosition,
    MeshFamily,
    NodeSet1D,
    PatchStats,
    SimplicialMesh,
    build_mesh,
    cell_volumes,
    check_conforming,
    export_mesh_text,
    graded_nodes,
    patch_stats,
    tensor_mesh_2d,
    tensor_mesh_3d,
)
from .spectra import ConvergenceError, EigenResult, cg_solve, lambda_min_dense, lambda_min_sparse

__all__ = [
    "BoundReport",
    "Calibration",
    "ConvergenceError",
    "DEFAULT_REFERENCE_INTERVALS",
    "DiffusionTensor",
    "EigenResult",
    "FIXTURES",
    "GradingParams",
    "LayerPosition",
    "MeshFamily",
    "NodeSet1D",
    "PatchStats",
    "SimplicialMesh",
    "SparseSPD",
    "SweepAxis",
    "SweepRow",
    "SweepSpec",
    "analyze_mesh",
    "assemble",
    "build_mesh",
    "calibrate",
    "calibration_for",
    "cell_volumes",
    "cg_solve",
    "check_conforming",
    "emit_csv",
    "emit_svg_loglog",
    "estimate_gm",
    "estimate_khx",
    "estimate_new",
    "export_matrix_text",
    "export_mesh_text",
    "geo_form",
    "graded_nodes",
    "holder_mean",
    "lambda_min_dense",
    "lambda_min_sparse",
    "local_stiffness",
    "patch_stats",
    "run_sweep",
    "tensor_mesh_2d",
    "tensor_mesh_3d",
]

__version__ = "0.1.0"
