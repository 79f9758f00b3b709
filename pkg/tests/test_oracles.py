import numpy as np
import pytest

from invsource import oracles
from invsource.geometry import Disk, Peanut
from invsource.probes import ProbeSpec, Regime
from invsource.source import SourceModel, constant_amplitude, quadratic_amplitude
from invsource.synthesis import FarField


def test_check_result_line():
    r = oracles.CheckResult("x", 0.5, 1.0, "a=1")
    assert r.passed and r.line() == "CHECK x PASS value=5.000e-01 bound=1.000e+00 a=1"
    assert not oracles.CheckResult("x", np.inf, 1.0).passed


def test_symmetric_band():
    k = oracles.symmetric_band(2.0, 0.5)
    assert k[len(k) // 2] == 0.0 and np.allclose(k, -k[::-1])


def test_inverse_ft_gaussian():
    # the transform of exp(-k^2 / 2) is exp(-t^2 / 2)
    k = oracles.symmetric_band(20.0, 0.01)
    t = np.linspace(-2, 2, 5)
    got = oracles.inverse_ft(k, np.exp(-k ** 2 / 2), t).real
    np.testing.assert_allclose(got, np.exp(-t ** 2 / 2), atol=1e-12)


def test_truncated_box_matches_numerical_transform():
    spec = oracles.default_probe()
    k = oracles.symmetric_band(10.0, 0.005)
    t = np.linspace(-2, 2, 41)
    from invsource.probes import far_probe
    num = oracles.inverse_ft(k, far_probe(spec, k), t).real
    np.testing.assert_allclose(num, oracles.probe_box_truncated(spec, t, 10.0), atol=1e-4)


@pytest.mark.parametrize("regime,eta,known", [(Regime.TMAX_UNKNOWN, 1.0, 0.0), (Regime.TMIN_UNKNOWN, 0.5, 2.0)])
def test_probe_ft_box(regime, eta, known):
    spec = ProbeSpec(regime, eta, known, FarField((0.6, 0.8)), (0.3, -0.2))
    assert oracles.probe_ft_check(spec).passed


def test_time_domain_and_support():
    model = SourceModel(Disk(), constant_amplitude(), 0.0, 1.0)
    assert oracles.time_domain_check(model, (1.0, 0.0)).value <= 0.02
    r = oracles.ft_support_check(SourceModel(Peanut(), quadratic_amplitude(), 0.0, 1.0), (0.6, 0.8))
    assert r.passed and r.value == 0.0


def test_symmetry_check_names_k(peanut_pair):
    ds = peanut_pair[0]
    assert oracles.symmetry_check(ds).passed
    vals = ds.values.copy()
    vals[3] = -vals[3]
    from dataclasses import replace
    r = oracles.symmetry_check(replace(ds, values=vals))
    assert not r.passed and f"worst_k={-ds.wavenumbers[3]:.17g}" in r.detail


def test_factorization_check(peanut_model, base_grid, peanut_pair):
    r = oracles.factorization_check(peanut_model, peanut_pair[0].mode, base_grid, peanut_pair[0])
    assert r.passed and "ratio=" in r.detail
