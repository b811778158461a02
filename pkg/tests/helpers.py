"""Small builders shared by the test modules."""
import numpy as np

from sylvuniq.model import GeneralEquation, GeneralSystem, PeriodicSystem, UnknownRef
from sylvuniq.numeric import match_spectra


def scalar_eq(a, b, c, d, left, right, lconj=False, rconj=False, e=None):
    """``a x_left b - c x_right d = e`` with 1x1 coefficients."""
    m = lambda z: np.array([[z]], dtype=complex)
    return GeneralEquation(m(a), m(b), m(c), m(d), UnknownRef(left, lconj),
                           UnknownRef(right, rconj), None if e is None else m(e))


def scalar_system(*eqs):
    return GeneralSystem(1, 1, list(eqs))


def scalar_periodic(A, B, C, D, conj=False):
    wrap = lambda xs: [np.array([[z]], dtype=complex) for z in xs]
    return PeriodicSystem(wrap(A), wrap(B), wrap(C), wrap(D), conj)


def gauss(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_periodic(rng, m, n, r, conj=False):
    return PeriodicSystem([gauss(rng, (m, m)) for _ in range(r)],
                          [gauss(rng, (n, n)) for _ in range(r)],
                          [gauss(rng, (m, m)) for _ in range(r)],
                          [gauss(rng, (n, n)) for _ in range(r)], conj)


def max_pair_distance(s1, s2):
    d = match_spectra(s1, s2)
    return float(np.max(d, initial=0.0))
