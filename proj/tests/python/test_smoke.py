"""End-to-end smoke tests of the python bindings."""

import numpy as np
import pytest

import mpsaw


def test_mesh_builders_and_properties():
    m = mpsaw.build_cartesian(2, 4)
    assert m.dim == 2
    assert m.n_cells == 16
    assert m.n_vertices == 25
    assert m.n_faces == 40
    assert not m.all_simplex()
    centers = np.asarray(m.cell_centers)
    assert centers.shape == (16, 2)
    assert np.all((centers > 0) & (centers < 1))
    assert np.isclose(np.asarray(m.cell_volumes).sum(), 1.0)

    t = mpsaw.build_simplex(3, 2)
    assert t.n_cells == 48
    assert t.all_simplex()
    assert "cells=48" in repr(t)


def test_perturb_is_deterministic_and_interface_freezing():
    base = mpsaw.build_cartesian(2, 8)
    a = mpsaw.perturb(base, 0.3, seed=7)
    b = mpsaw.perturb(base, 0.3, seed=7)
    c = mpsaw.perturb(base, 0.3, seed=8)
    assert mpsaw.mesh_hash(a) == mpsaw.mesh_hash(b)
    assert mpsaw.mesh_hash(a) != mpsaw.mesh_hash(c)
    assert mpsaw.mesh_hash(a) != mpsaw.mesh_hash(base)
    frozen = mpsaw.perturb(base, 0.3, seed=7, freeze_interface=True)
    assert mpsaw.mesh_hash(frozen) != mpsaw.mesh_hash(a)


def test_mesh_file_round_trip(tmp_path):
    m = mpsaw.perturb(mpsaw.build_simplex(2, 3), 0.2, seed=5)
    path = str(tmp_path / "m.msh")
    mpsaw.write_mesh(m, path)
    r = mpsaw.read_mesh(path)
    assert mpsaw.mesh_hash(r) == mpsaw.mesh_hash(m)
    with pytest.raises(mpsaw.IoError):
        mpsaw.read_mesh(str(tmp_path / "absent.msh"))


def test_solve_errors_shrink_under_refinement():
    coarse = mpsaw.solve_manufactured(mpsaw.build_cartesian(2, 4), audit=True)
    fine = mpsaw.solve_manufactured(mpsaw.build_cartesian(2, 8), audit=True)
    assert coarse.u.shape == (16, 2)
    assert fine.tractions.shape == (144, 2)
    assert coarse.residual < 1e-10
    assert 0 < fine.eps_d < coarse.eps_d
    assert 0 < fine.eps_pi < coarse.eps_pi
    assert fine.min_theta > 0
    assert np.isfinite(fine.mean_ang_mom)


def test_solve_rejects_unknown_options():
    m = mpsaw.build_cartesian(2, 4)
    with pytest.raises(mpsaw.ConfigError):
        mpsaw.solve_manufactured(m, method="bogus")
    with pytest.raises(mpsaw.ConfigError):
        mpsaw.solve_manufactured(m, averaging="diagonal")


def test_run_study_from_config_text():
    res = mpsaw.run_study(
        "mpsaw-config 1\n"
        "[grid]\n"
        "levels = 4 8 16\n"
        "[run]\n"
        "audit = false\n"
    )
    assert len(res.curves) == 1
    curve = res.curves[0]
    assert curve.method == "mpsa-w"
    assert [lv.level for lv in curve.levels] == [4, 8, 16]
    errs = [lv.eps_d for lv in curve.levels]
    assert errs[2] < errs[1] < errs[0]
    assert curve.rate_d_fit > 1.0
    assert "cartesian" in curve.label()


def test_presets_exposed():
    names = mpsaw.preset_names()
    assert len(names) == 7
    assert all(mpsaw.preset_text(n).startswith("mpsaw-config 1") for n in names)
