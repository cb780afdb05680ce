import dataclasses
import math

import numpy as np
import pytest

from meshspectra import (
    Calibration,
    GradingParams,
    MeshFamily,
    PatchStats,
    assemble,
    build_mesh,
    calibrate,
    cell_volumes,
    estimate_gm,
    estimate_khx,
    estimate_new,
    geo_form,
    holder_mean,
    lambda_min_sparse,
    patch_stats,
)


def make_stats(patch_volumes, n_cells=None, m_const=6, h_const=1.0, k_min=None):
    pv = np.asarray(patch_volumes, dtype=float)
    return PatchStats(
        patch_volumes=pv,
        omega_min=float(pv.min()),
        k_min=float(pv.min()) / 3.0 if k_min is None else k_min,
        m_const=m_const,
        h_const=h_const,
        n_free=pv.size,
        n_cells=pv.size * 2 if n_cells is None else n_cells,
        domain_volume=1.0,
    )


CAL2 = Calibration(dim=2, c_new=1.0, c_gm=1.0, c_khx=1.0, n_ref=64)
CAL3 = Calibration(dim=3, c_new=1.0, c_gm=1.0, c_khx=1.0, n_ref=12)


# -------------------------------------------------------------- power means


def test_holder_mean_hand_values():
    assert math.isclose(holder_mean([1.0, 2.0, 3.0], 1.0), 2.0, rel_tol=1e-15)
    assert math.isclose(holder_mean([1.0, 2.0], -1.0), 4.0 / 3.0, rel_tol=1e-15)
    assert math.isclose(holder_mean([4.0, 4.0, 4.0], -0.5), 4.0, rel_tol=1e-14)
    assert math.isclose(holder_mean([2.0, 8.0], 2.0), math.sqrt(34.0), rel_tol=1e-15)


def test_holder_mean_errors():
    with pytest.raises(ValueError):
        holder_mean([], 1.0)
    with pytest.raises(ValueError):
        holder_mean([1.0, -2.0], 1.0)
    with pytest.raises(ValueError):
        holder_mean([1.0, 0.0], -1.0)
    with pytest.raises(ValueError):
        holder_mean([1.0, 2.0], 0.0)


def test_holder_mean_monotone_in_p():
    rng = np.random.default_rng(3)
    for _ in range(10):
        vals = rng.uniform(0.1, 5.0, size=12)
        means = [holder_mean(vals, p) for p in (-2.0, -1.0, -0.5, 0.5, 1.0, 2.0)]
        assert all(a <= b + 1e-12 for a, b in zip(means, means[1:]))


# ------------------------------------------------------------------ kernels


def test_estimate_new_2d_hand_value():
    # N*omega_min = 1 kills the log, leaving c/N
    st = make_stats([0.25, 0.3, 0.5, 0.7], m_const=6)
    assert math.isclose(estimate_new(st, 2, CAL2), 0.25, rel_tol=1e-15)
    cal = dataclasses.replace(CAL2, c_new=7.0)
    assert math.isclose(estimate_new(st, 2, cal), 7.0 * 0.25, rel_tol=1e-15)


def test_estimate_new_2d_log_penalty():
    st = make_stats([0.25 * math.exp(-1.0), 0.3, 0.5, 0.7])
    assert math.isclose(estimate_new(st, 2, CAL2), 0.25 / 2.0, rel_tol=1e-14)


def test_estimate_new_3d_equal_patches():
    # equal patches w: (N w^-1/2)^(-2/3) = N^(-2/3) w^(1/3)
    w = 0.015625
    st = make_stats([w] * 8)
    assert math.isclose(estimate_new(st, 3, CAL3), 8.0 ** (-2.0 / 3.0) * w ** (1.0 / 3.0), rel_tol=1e-14)


def test_estimate_gm_2d_hand_value():
    # N*omega_min/(M*H) = 1 kills the log
    st = make_stats([1.5, 2.0], m_const=6, h_const=0.5)
    assert math.isclose(estimate_gm(st, 2, CAL2), 0.5, rel_tol=1e-15)


def test_estimate_gm_3d_prefactor():
    w = 0.125
    st = make_stats([w] * 4, m_const=24, h_const=2.0)
    expect = 48.0 ** (-1.0 / 3.0) * (4.0 / math.sqrt(w)) ** (-2.0 / 3.0)
    assert math.isclose(estimate_gm(st, 3, CAL3), expect, rel_tol=1e-14)


def test_estimate_khx_hand_values():
    assert math.isclose(estimate_khx([0.25, 0.3, 0.4, 0.6], 2, CAL2), 0.25, rel_tol=1e-15)
    vols = [0.125] * 8
    expect = (8.0 / math.sqrt(0.125)) ** (-2.0 / 3.0)
    assert math.isclose(estimate_khx(vols, 3, CAL3), expect, rel_tol=1e-14)
    with pytest.raises(ValueError):
        estimate_khx([], 2, CAL2)
    with pytest.raises(ValueError):
        estimate_khx([0.1, -0.1], 2, CAL2)


def test_new_2d_ignores_nonminimal_patches():
    st = make_stats([0.25, 0.3, 0.5, 0.7])
    bumped = dataclasses.replace(st, patch_volumes=np.array([0.25, 0.6, 0.5, 0.7]))
    assert estimate_new(st, 2, CAL2) == estimate_new(bumped, 2, CAL2)


def test_dim_mismatch_rejected():
    st = make_stats([0.25, 0.5])
    with pytest.raises(ValueError):
        estimate_new(st, 3, CAL2)
    with pytest.raises(ValueError):
        estimate_gm(st, 2, CAL3)
    with pytest.raises(ValueError):
        estimate_khx([0.1], 4, CAL2)


def test_estimates_linear_in_calibration():
    st = make_stats([0.1, 0.2, 0.3])
    doubled = Calibration(dim=2, c_new=2.0, c_gm=2.0, c_khx=2.0, n_ref=64)
    assert estimate_new(st, 2, doubled) == 2.0 * estimate_new(st, 2, CAL2)
    assert estimate_gm(st, 2, doubled) == 2.0 * estimate_gm(st, 2, CAL2)
    assert estimate_khx([0.3, 0.4], 2, doubled) == 2.0 * estimate_khx([0.3, 0.4], 2, CAL2)


# ------------------------------------------------------------- average form


def test_geo_form_matches_kernel_on_synthetic_stats():
    rng = np.random.default_rng(17)
    for _ in range(20):
        pv = rng.uniform(0.001, 0.1, size=rng.integers(3, 40))
        st = make_stats(pv)
        direct = float(np.sum(pv**-0.5)) ** (-2.0 / 3.0)
        assert math.isclose(geo_form(st, 3), direct, rel_tol=1e-12)


def test_geo_form_matches_kernel_on_meshes():
    for p in (GradingParams(MeshFamily.UNIFORM, 4), GradingParams(MeshFamily.POWER, 4, beta=2.0)):
        st = patch_stats(build_mesh(3, p))
        assert math.isclose(geo_form(st, 3), estimate_new(st, 3, CAL3), rel_tol=1e-12)


def test_geo_form_rejects_2d():
    with pytest.raises(ValueError):
        geo_form(make_stats([0.25, 0.5]), 2)


# -------------------------------------------------------------- calibration


def test_calibration_validation():
    with pytest.raises(ValueError):
        Calibration(dim=4, c_new=1.0, c_gm=1.0, c_khx=1.0, n_ref=64)
    with pytest.raises(ValueError):
        Calibration(dim=2, c_new=-1.0, c_gm=1.0, c_khx=1.0, n_ref=64)
    with pytest.raises(ValueError):
        Calibration(dim=2, c_new=1.0, c_gm=math.inf, c_khx=1.0, n_ref=64)
    with pytest.raises(ValueError):
        Calibration(dim=2, c_new=1.0, c_gm=1.0, c_khx=1.0, n_ref=1)


def test_calibrate_input_validation():
    with pytest.raises(ValueError):
        calibrate(4)
    with pytest.raises(ValueError):
        calibrate(2, n_ref=8, exact=-2.0)


def test_calibration_fixed_point_2d():
    n_ref = 8
    mesh = build_mesh(2, GradingParams(MeshFamily.UNIFORM, n_ref))
    exact = lambda_min_sparse(assemble(mesh), tol=1e-10).lambda_min
    cal = calibrate(2, n_ref=n_ref, exact=exact)
    st = patch_stats(mesh)
    assert math.isclose(estimate_new(st, 2, cal), exact, rel_tol=1e-12)
    assert math.isclose(estimate_gm(st, 2, cal), exact, rel_tol=1e-12)
    assert math.isclose(estimate_khx(cell_volumes(mesh), 2, cal), exact, rel_tol=1e-12)


def test_calibration_fixed_point_3d():
    n_ref = 4
    mesh = build_mesh(3, GradingParams(MeshFamily.UNIFORM, n_ref))
    exact = lambda_min_sparse(assemble(mesh), tol=1e-10).lambda_min
    cal = calibrate(3, n_ref=n_ref, exact=exact)
    st = patch_stats(mesh)
    assert math.isclose(estimate_new(st, 3, cal), exact, rel_tol=1e-12)
    assert math.isclose(estimate_gm(st, 3, cal), exact, rel_tol=1e-12)
    assert math.isclose(estimate_khx(cell_volumes(mesh), 3, cal), exact, rel_tol=1e-12)


def test_calibrate_supplied_exact_short_circuits_solve():
    cal = calibrate(2, n_ref=8, exact=1.0)
    cal2 = calibrate(2, n_ref=8, exact=2.0)
    assert math.isclose(cal2.c_new, 2.0 * cal.c_new, rel_tol=1e-15)
    assert cal.n_ref == 8 and cal.dim == 2


def test_recalibration_stability():
    from meshspectra import calibration_for

    a = calibration_for(2, n_ref=16)
    b = calibration_for(2, n_ref=32)
    for ca, cb in ((a.c_new, b.c_new), (a.c_gm, b.c_gm), (a.c_khx, b.c_khx)):
        assert 0.5 < ca / cb < 2.0


def test_default_reference_sizes():
    cal = calibrate(3, n_ref=None, exact=1.0)
    assert cal.n_ref == 12


# ------------------------------------------------------------- whole meshes


def test_relabeling_invariance():
    from meshspectra import SimplicialMesh

    mesh = build_mesh(2, GradingParams(MeshFamily.SHISHKIN, 8, eps=0.1))
    rng = np.random.default_rng(41)
    perm = rng.permutation(mesh.n_cells)
    shuffled = SimplicialMesh(
        dim=2,
        vertices=mesh.vertices,
        cells=mesh.cells[perm],
        boundary_mask=mesh.boundary_mask,
        free_index=mesh.free_index,
    )
    st0, st1 = patch_stats(mesh), patch_stats(shuffled)
    from meshspectra import calibration_for

    cal = calibration_for(2, n_ref=8)
    assert estimate_new(st0, 2, cal) == estimate_new(st1, 2, cal)
    assert estimate_gm(st0, 2, cal) == estimate_gm(st1, 2, cal)
    v0, v1 = cell_volumes(mesh), cell_volumes(shuffled)
    assert math.isclose(
        estimate_khx(v0, 2, cal), estimate_khx(v1, 2, cal), rel_tol=1e-14
    )


def test_uniform_family_tracks_exact():
    from meshspectra import calibration_for

    cal = calibration_for(2, n_ref=16)
    for n in (8, 16, 32):
        mesh = build_mesh(2, GradingParams(MeshFamily.UNIFORM, n))
        st = patch_stats(mesh)
        exact = lambda_min_sparse(assemble(mesh), tol=1e-10).lambda_min
        for est in (
            estimate_new(st, 2, cal),
            estimate_gm(st, 2, cal),
            estimate_khx(cell_volumes(mesh), 2, cal),
        ):
            assert 0.5 * exact <= est <= 2.0 * exact


def test_bound_report_validation():
    from meshspectra import BoundReport

    st = make_stats([0.25, 0.5])
    with pytest.raises(ValueError):
        BoundReport(
            n_free=2,
            lambda_exact=0.0,
            lambda_new=1.0,
            lambda_gm=1.0,
            lambda_khx=1.0,
            stats=st,
        )
    r = BoundReport(
        n_free=2, lambda_exact=2.0, lambda_new=1.0, lambda_gm=1.0, lambda_khx=1.0, stats=st
    )
    assert r.lambda_exact == 2.0
