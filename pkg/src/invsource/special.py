"""Small special functions that stay finite at the origin."""
import numpy as np
from scipy.special import j1, spherical_jn


def sinc(u):
    """``sin(u) / u`` with the value 1 at ``u = 0``."""
    return np.sinc(np.asarray(u) / np.pi)


def window_average(k, a: float, b: float):
    """``(1/(b-a)) * int_a^b exp(i k t) dt`` evaluated as ``exp(i k m) sinc(k h)``."""
    k = np.asarray(k, dtype=float)
    m, h = 0.5 * (a + b), 0.5 * (b - a)
    return np.exp(1j * k * m) * sinc(k * h)


_SMALL = 1e-4


def disk_average(u):
    """Average of ``exp(i k e.z)`` over a disk of radius ``eps``: ``2 J1(u)/u``, ``u = k eps``."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < _SMALL
    safe = np.where(small, 1.0, u)
    # Taylor branch avoids 0/0 and underflow near the origin (error O(u^4))
    return np.where(small, 1.0 - u ** 2 / 8, 2 * j1(safe) / safe)


def ball_average(u):
    """Average of ``exp(i k e.z)`` over a 3D ball: ``3 (sin u - u cos u) / u^3``."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < _SMALL
    safe = np.where(small, 1.0, u)
    return np.where(small, 1.0 - u ** 2 / 10, 3 * spherical_jn(1, safe) / safe)
