import numpy as np
import pytest
from scipy.special import j1

from invsource.frequency import FrequencyGrid
from invsource.geometry import Ball, Disk, GeometryError, Peanut
from invsource.oracles import direct_symmetry_residual
from invsource.quadrature import QuadratureError, QuadratureSpec
from invsource.source import SQRT_2PI, SourceModel, constant_amplitude, quadratic_amplitude
from invsource.synthesis import (FarField, NearField, SynthesisError, far_field, inject_noise,
                                 near_field, synthesize_dataset, time_domain_far_field)


def test_base_grid_samples(base_grid, peanut_pair):
    ds = peanut_pair[0]
    assert len(ds.values) == 31
    n = np.arange(1, 17)
    expected = np.sort(np.concatenate([-(n[:-1] - 0.5), n - 0.5])) * np.pi / 6
    np.testing.assert_allclose(ds.wavenumbers, expected, rtol=0, atol=1e-14)


def test_ball_k0_volume():
    T = 0.7
    model = SourceModel(Ball(), constant_amplitude(), 0.0, T)
    val = far_field(model, (1.0, 0.0, 0.0), 0.0)
    assert val == pytest.approx(T * (4 * np.pi / 3) / SQRT_2PI, rel=1e-12)


def test_unit_disk_closed_form():
    # int_disk exp(-i k y1) dy = 2 pi J1(k) / k; time factor (e^{ik} - 1) / (ik sqrt(2 pi))
    model = SourceModel(Disk(), constant_amplitude(), 0.0, 1.0)
    k = np.pi / 6
    exact = 2 * np.pi * j1(k) / k * np.expm1(1j * k) / (1j * k * SQRT_2PI)
    assert abs(far_field(model, (1.0, 0.0), k) - exact) <= 1e-6 * abs(exact)


def test_newtonian_potential_of_ball():
    T = 0.5
    model = SourceModel(Ball(), constant_amplitude(), 0.0, T)
    for x in [(3.0, 0.0, 0.0), (0.0, -2.0, 1.5)]:
        exact = T / SQRT_2PI / (3 * np.linalg.norm(x))
        assert abs(near_field(model, x, 0.0) - exact) <= 1e-4 * exact


def test_near_field_refinement():
    model = SourceModel(Ball(), quadratic_amplitude(), 0.0, 0.5)
    x, k = (3.0, 0.0, 0.0), 4.0
    ref = near_field(model, x, k, QuadratureSpec("fitted", 32, 64))
    errs = [abs(near_field(model, x, k, QuadratureSpec("fitted", n, 64)) - ref) for n in (3, 6)]
    assert errs[0] / errs[1] >= 4.0


def test_far_field_second_order_midpoint():
    model = SourceModel(Disk(), constant_amplitude(), 0.0, 1.0)
    k = np.pi / 6
    exact = 2 * np.pi * j1(k) / k * np.expm1(1j * k) / (1j * k * SQRT_2PI)
    # the fitted rule converges faster than any power; compare two resolutions
    errs = [abs(far_field(model, (1.0, 0.0), k, QuadratureSpec("fitted", n, 64)) - exact) for n in (4, 8)]
    assert errs[0] / max(errs[1], 1e-300) >= 4.0


def test_near_field_receiver_inside():
    model = SourceModel(Ball(), constant_amplitude(), 0.0, 1.0)
    with pytest.raises(GeometryError):
        near_field(model, (0.2, 0.0, 0.0), 1.0)


def test_near_field_needs_3d(disk_model):
    with pytest.raises(SynthesisError):
        near_field(disk_model, (3.0, 0.0), 1.0)


def test_degenerate_quadrature():
    with pytest.raises(QuadratureError):
        QuadratureSpec("fitted", 0, 16)


def test_conjugate_fill_equals_direct(peanut_model, base_grid, peanut_pair):
    ds = peanut_pair[0]
    assert max(r for _, r in ds.symmetry_residuals()) <= 1e-12
    k = ds.wavenumbers[ds.wavenumbers > 0]
    assert direct_symmetry_residual(peanut_model, ds.mode, k) <= 1e-12
    direct = far_field(peanut_model, (1.0, 0.0), ds.wavenumbers[ds.wavenumbers < 0])
    np.testing.assert_allclose(ds.values[ds.wavenumbers < 0], direct, rtol=1e-12)


def test_near_dataset_symmetry(base_grid):
    model = SourceModel(Ball(), quadratic_amplitude(), 0.0, 0.5)
    ds = synthesize_dataset(model, NearField((3.0, 0.0, 0.0)), base_grid, QuadratureSpec("fitted", 8, 16))
    assert len(ds.values) == 31
    assert max(r for _, r in ds.symmetry_residuals()) <= 1e-12
    assert ds.manifest["observation"] == {"mode": "near", "receiver": [3.0, 0.0, 0.0]}


def test_asymmetric_band_integrates_all():
    model = SourceModel(Disk(), constant_amplitude(), 0.0, 1.0)
    grid = FrequencyGrid(1.0, 3.0, 4)
    ds = synthesize_dataset(model, FarField((1.0, 0.0)), grid)
    np.testing.assert_allclose(ds.values, far_field(model, (1.0, 0.0), ds.wavenumbers), rtol=1e-14)


def test_threads_do_not_change_values(peanut_model, base_grid):
    a = synthesize_dataset(peanut_model, FarField((0.6, 0.8)), base_grid, threads=1)
    b = synthesize_dataset(peanut_model, FarField((0.6, 0.8)), base_grid, threads=4)
    assert np.array_equal(a.values, b.values)


def test_manifest_content(peanut_model, peanut_pair):
    m = peanut_pair[0].manifest
    assert m["model_hash"] == peanut_model.hash()
    assert m["grid"] == {"k_min": -8 * np.pi / 3, "k_max": 8 * np.pi / 3, "N": 16}
    assert set(m) >= {"model", "quadrature", "observation"}


def test_noise(peanut_pair):
    ds = peanut_pair[0]
    same = inject_noise(ds, 0.0, seed=1)
    assert np.array_equal(same.values, ds.values)
    a, b = inject_noise(ds, 0.01, seed=7), inject_noise(ds, 0.01, seed=7)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, inject_noise(ds, 0.01, seed=8).values)
    assert max(r for _, r in a.symmetry_residuals()) <= 1e-15
    rel = np.abs(a.values - ds.values) / np.abs(ds.values)
    assert 1e-4 < np.median(rel) < 0.05
    assert a.manifest["noise"] == {"level": 0.01, "seed": 7}
    with pytest.raises(SynthesisError):
        inject_noise(ds, -1.0)


def test_time_domain_zero_outside():
    model = SourceModel(Peanut(), quadratic_amplitude(), 0.0, 1.0)
    d = (1.0, 0.0)
    ext = model.shape.support_extent(d)
    t = np.array([model.t_min - ext.hi - 0.01, model.t_max - ext.lo + 0.01])
    assert np.all(time_domain_far_field(model, d, t) == 0.0)


def test_time_domain_disk_chord_area():
    # slab -0.5 <= y1 <= 0.5 of the unit disk: area 2 (a sqrt(1 - a^2) + asin a), a = 0.5
    model = SourceModel(Disk(), constant_amplitude(), 0.0, 1.0)
    a = 0.5
    exact = 2 * (a * np.sqrt(1 - a * a) + np.arcsin(a)) / (4 * np.pi)
    assert time_domain_far_field(model, (1.0, 0.0), 0.5) == pytest.approx(exact, rel=1e-10)
    assert exact == pytest.approx(0.1522494, abs=1e-7)


def test_time_domain_ball_slice():
    # S = 1 on the unit ball, [0, T] with T large: every slab contributes; value |B|/(4 pi)
    model = SourceModel(Ball(), constant_amplitude(), 0.0, 5.0)
    assert time_domain_far_field(model, (0.0, 0.0, 1.0), 2.5) == pytest.approx(1 / 3, rel=1e-10)
