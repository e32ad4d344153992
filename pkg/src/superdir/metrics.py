"""Power accounting, directivity, gain, realized gain and efficiency aggregation.

Two independent routes to the radiated power are maintained: the quadratic
form over the real part of the impedance matrix (fast, used everywhere), and
the sphere integral of the exact per-element radiation intensity (slow, the
oracle the fast path is validated against).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .constants import ETA0
from .geometry import (DipoleArray, Direction, Excitation, array_response,
                       currents_of, element_factor, radiation_intensity)
from .network import NetworkMatrices, active_reflection
from .numerics import gauss_legendre, solve_complex_linear


@dataclass(frozen=True)
class RadiationReport:
    """Radiation and matching figures of an array at one direction.

    dB quantities are dBi. realized_gain_dbi is NaN when the mismatch
    efficiency is not positive; the diagnostics list says why.
    """

    direction: Direction
    directivity_dbi: float
    gain_dbi: float
    realized_gain_dbi: float
    radiation_efficiency: float
    mismatch_efficiency: float
    total_efficiency: float
    active_reflection: np.ndarray
    p_rad: float
    p_loss: float
    p_in: float
    diagnostics: tuple = field(default_factory=tuple)


def _to_dbi(linear: float) -> float:
    return 10.0 * math.log10(linear) if linear > 0 else float("-inf")


def radiated_power(net: NetworkMatrices, excitation) -> float:
    """Radiated power 0.5 * i^H Re{Z} i from the lossless impedance matrix, W."""
    i = currents_of(excitation)
    p = 0.5 * float(np.real(i.conj() @ net.z.real @ i))
    floor = 1e-8 * float(np.sum(np.abs(i) ** 2)) * float(np.linalg.norm(net.z))
    if p < -floor:
        warnings.warn(f"radiated power {p:.3e} W is negative beyond numerical tolerance",
                      RuntimeWarning, stacklevel=2)
    return p


def quadrature_radiated_power(array: DipoleArray, excitation,
                              polar_order: int = 64, azimuth_samples: int = 128) -> float:
    """Radiated power by integrating the exact intensity over the sphere, W.

    Gauss-Legendre in cos(theta) times periodic trapezoid in phi. This is the
    independent oracle for radiated_power: it never touches the impedance
    matrix, only the sinusoidal-current far field with each element's own
    pattern.
    """
    currents = currents_of(excitation)
    rule = gauss_legendre(polar_order)
    theta = np.arccos(rule.nodes)
    phi = 2.0 * math.pi * np.arange(azimuth_samples) / azimuth_samples
    k = array.wavenumber
    sin_theta = np.sin(theta)
    proj = sin_theta[:, None] * np.cos(phi)[None, :]
    fld = np.zeros((polar_order, azimuth_samples), dtype=complex)
    for x, l, cur in zip(array.positions, array.lengths, currents):
        g = element_factor(theta, l, array.wavelength) / math.sin(math.pi * l / array.wavelength)
        fld += (g * cur)[:, None] * np.exp(-1j * k * x * proj)
    intensity = ETA0 / (8.0 * math.pi**2) * np.abs(fld) ** 2
    return float(np.sum(intensity * rule.weights[:, None]) * (2.0 * math.pi / azimuth_samples))


def input_power(net: NetworkMatrices, excitation):
    """(p_in, p_loss, p_rad) in watts; p_in = p_loss + p_rad by construction."""
    i = currents_of(excitation)
    p_rad = radiated_power(net, i)
    p_loss = 0.5 * net.r_loss * float(np.sum(np.abs(i) ** 2))
    return p_rad + p_loss, p_loss, p_rad


def directivity(array: DipoleArray, net: NetworkMatrices, excitation,
                direction: Direction, per_element: bool = False) -> float:
    """Directivity 4 pi U / P_rad at one direction, dBi."""
    _, _, p_rad = input_power(net, excitation)
    if not p_rad > 0:
        raise ValueError("degenerate excitation: radiated power is not positive")
    u = radiation_intensity(array, excitation, direction, per_element)
    return _to_dbi(4.0 * math.pi * u / p_rad)


def gain(array: DipoleArray, net: NetworkMatrices, excitation,
         direction: Direction, per_element: bool = False) -> float:
    """Gain 4 pi U / P_in at one direction, dBi."""
    p_in, _, _ = input_power(net, excitation)
    if not p_in > 0:
        raise ValueError("degenerate excitation: input power is not positive")
    u = radiation_intensity(array, excitation, direction, per_element)
    return _to_dbi(4.0 * math.pi * u / p_in)


def mismatch_efficiency(gamma: np.ndarray, excitation, z_ref: float = 50.0) -> float:
    """Scalar reflection efficiency from per-port active reflections.

    Power-weighted aggregation over excited ports: sum of
    |I_n|^2 / sum |I_m|^2 * (1 - |gamma_n|^2). May come out negative when
    active reflections exceed unity; callers decide how to surface that.
    z_ref is accepted for interface symmetry with the scattering build; the
    current-power weighting does not depend on it.
    """
    del z_ref
    currents = currents_of(excitation)
    gamma = np.asarray(gamma, dtype=complex)
    excited = np.abs(currents) > 0
    if not np.any(excited):
        raise ValueError("all ports unexcited")
    weights = np.abs(currents[excited]) ** 2
    weights = weights / np.sum(weights)
    return float(np.sum(weights * (1.0 - np.abs(gamma[excited]) ** 2)))


def realized_gain(array: DipoleArray, net: NetworkMatrices, excitation,
                  direction: Direction, per_element: bool = False) -> RadiationReport:
    """Full radiation report at one direction.

    Realized gain is gain plus 10 log10 of the mismatch efficiency; a
    non-positive mismatch efficiency yields NaN realized gain plus a
    diagnostic instead of a crash, since the optimizer must be able to walk
    through such regions.
    """
    currents = currents_of(excitation)
    p_in, p_loss, p_rad = input_power(net, currents)
    if not p_in > 0:
        raise ValueError("degenerate excitation: input power is not positive")
    u = radiation_intensity(array, currents, direction, per_element)
    d_lin = 4.0 * math.pi * u / p_rad
    g_lin = 4.0 * math.pi * u / p_in
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        gamma = active_reflection(net.s, currents)
    e_ref = mismatch_efficiency(gamma, currents, net.z_ref)
    rad_eff = p_rad / p_in
    diagnostics = []
    finite = np.isfinite(gamma)
    if np.any(np.abs(gamma[finite]) > 1.0):
        ports = np.nonzero(np.abs(np.where(finite, gamma, 0)) > 1.0)[0].tolist()
        diagnostics.append(f"active reflection exceeds unity on ports {ports}")
    if e_ref > 0:
        rg_dbi = _to_dbi(g_lin * e_ref)
    else:
        rg_dbi = float("nan")
        diagnostics.append("mismatch efficiency is not positive: realized gain undefined")
    return RadiationReport(
        direction=direction,
        directivity_dbi=_to_dbi(d_lin),
        gain_dbi=_to_dbi(g_lin),
        realized_gain_dbi=rg_dbi,
        radiation_efficiency=rad_eff,
        mismatch_efficiency=e_ref,
        total_efficiency=rad_eff * e_ref,
        active_reflection=gamma,
        p_rad=p_rad,
        p_loss=p_loss,
        p_in=p_in,
        diagnostics=tuple(diagnostics),
    )


def max_directivity_excitation(net: NetworkMatrices, direction: Direction,
                               array: DipoleArray):
    """Feed currents maximizing directivity toward the given direction.

    Maximizes |a^T i|^2 / (i^H Re{Z} i), whose stationary point is
    Re{Z} i = conj(a); the result is normalized so the largest current
    magnitude is 1. Uses the lossless impedance matrix.
    """
    a = array_response(array, direction)
    i = solve_complex_linear(net.z.real.astype(complex), np.conj(a))
    i = i / np.max(np.abs(i))
    return Excitation(currents=i)
