import numpy as np
import pytest

from invsource.config import ConfigError, parse_config, parse_number, parse_vectors
from invsource.geometry import Union
from invsource.probes import Regime

BASE = """
[source]
t_min = 0
t_max = 1
[shape]
kind = Peanut
[observations]
directions = 1 0
"""


def test_parse_number():
    assert parse_number("8*pi/3") == pytest.approx(8 * np.pi / 3, rel=1e-15)
    assert parse_number("-2**3 + sqrt(4)") == -6.0
    assert parse_number("4.5*cos(5*pi/16)") == pytest.approx(4.5 * np.cos(5 * np.pi / 16))
    for bad in ("__import__('os')", "x", "1; 2", "open"):
        with pytest.raises(ConfigError):
            parse_number(bad)


def test_parse_vectors():
    assert parse_vectors("1 0; 0 1") == [(1.0, 0.0), (0.0, 1.0)]


def test_defaults():
    cfg = parse_config(BASE)
    g = cfg.band.grid()
    assert g.n == 16 and g.K == pytest.approx(8 * np.pi / 3) and g.k_c == 0
    assert cfg.imaging.eta == 0.1 and cfg.imaging.delta == 3e-3
    assert cfg.source.regime is Regime.TMAX_UNKNOWN and cfg.source.known == 0
    assert [m.direction for m in cfg.observations.all(2)] == [(1.0, 0.0), (-1.0, 0.0)]


def test_angles_complete_pairs():
    cfg = parse_config(BASE.replace("directions = 1 0", "angles = 8"))
    obs = cfg.observations.all(2)
    assert len(obs) == 16
    np.testing.assert_allclose(obs[2].vector, (np.cos(np.pi / 8), np.sin(np.pi / 8)))


def test_union_shape():
    text = BASE.replace("kind = Peanut", "kind = Peanut\ncenter = 3 3")
    cfg = parse_config(text + "[shape.second]\nkind = Kite\ncenter = -3 -3\n")
    assert isinstance(cfg.model().shape, Union)


@pytest.mark.parametrize("extra,msg", [
    ("[source]\nfoo = 1\n", "unknown key"),
    ("[imaging]\ndelta = 2\n", "delta"),
    ("[bogus]\na = 1\n", "unknown section"),
    ("[observations]\nmode = sideways\n", "mode"),
    ("[source]\nunknown = t_mid\n", "unknown"),
    ("[quadrature]\nn = 0\n", "quadrature"),
    ("[shape]\nr = abc\n", "shape"),
])
def test_rejections(extra, msg):
    text = BASE
    for sec in ("[source]", "[observations]", "[shape]"):
        if extra.startswith(sec):
            text = text.replace(sec + "\n", extra)
            break
    else:
        text = text + extra
    with pytest.raises(ConfigError, match=msg):
        parse_config(text)


def test_bad_period_rejected():
    with pytest.raises(ConfigError):
        parse_config(BASE.replace("t_max = 1", "t_max = 0"))


def test_tmin_regime():
    cfg = parse_config(BASE.replace("t_max = 1", "t_max = 1\nunknown = t_min"))
    assert cfg.source.regime is Regime.TMIN_UNKNOWN and cfg.source.known == 1.0
