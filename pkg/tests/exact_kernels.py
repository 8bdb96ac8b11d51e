"""Closed-form propagators used as oracles for quadratic Hamiltonians."""

import cmath
import math


def free_kernel(q_i, q_f, t, m=1.0, hbar=1.0):
    pref = cmath.sqrt(m / (2j * math.pi * hbar * t))
    return pref * cmath.exp(1j * m * (q_f - q_i) ** 2 / (2 * hbar * t))


def harmonic_kernel(q_i, q_f, t, m=1.0, omega=1.0, hbar=1.0):
    """Mehler kernel continued past the focal points.

    Each half period adds ``-pi/2`` to the phase (the Feynman-Soriau rule).
    """
    s = math.sin(omega * t)
    c = math.cos(omega * t)
    n_half = math.floor(omega * t / math.pi)
    mag = math.sqrt(m * omega / (2 * math.pi * hbar * abs(s)))
    action = m * omega / (2 * s) * ((q_i**2 + q_f**2) * c - 2 * q_i * q_f)
    phase = action / hbar - math.pi / 4 - n_half * math.pi / 2
    return mag * cmath.exp(1j * phase)


def harmonic_momentum(q_i, q_f, t, m=1.0, omega=1.0):
    return m * omega * (q_f - q_i * math.cos(omega * t)) / math.sin(omega * t)
