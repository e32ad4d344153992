"""Impedance matrices, conductor loss, scattering conversion, active reflections.

Self and mutual impedances come from the induced-EMF method for parallel,
side-by-side, center-aligned thin dipoles with sinusoidal current
distributions, referred to the terminal currents. Two independent evaluation
paths are provided and cross-checked in the test suite:

* direct numerical integration of the exact near-field kernel, with a sinh
  substitution around each kernel center so the 1/R near-singularity is
  absorbed into the variable change (accurate down to separation = wire
  radius, which is how self impedance is obtained), and

* a closed form in sine/cosine integrals, obtained by reducing each kernel
  term to complex exponential integrals E1(jx) = -Ci(x) + j(Si(x) - pi/2).

The closed form is exact for arbitrary length pairs but is dispatched as the
equal-length fast path; unequal lengths go through the quadrature route.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .constants import C0, ETA0, MU0
from .geometry import DipoleArray, currents_of
from .numerics import cos_integral, gauss_legendre, sin_integral, solve_complex_linear

_EMF_ORDER = 48
_EMF_RULE = gauss_legendre(_EMF_ORDER)

_LENGTH_TOL = 1e-12


@dataclass(frozen=True)
class NetworkMatrices:
    """Port-level description of the array.

    z is the lossless impedance matrix in ohms; r_loss the scalar series
    loss resistance applied identically to every port; s the scattering
    matrix of the lossy network at reference impedance z_ref.
    """

    z: np.ndarray
    r_loss: float
    s: np.ndarray
    z_ref: float

    @property
    def n_ports(self) -> int:
        return self.z.shape[0]

    @property
    def z_input(self) -> np.ndarray:
        """Impedance matrix seen by the feed lines: lossless part plus loss diagonal."""
        return self.z + self.r_loss * np.eye(self.n_ports)


def _validate_pair(length_m: float, length_n: float, separation: float,
                   wavelength: float) -> None:
    if separation <= 0:
        raise ValueError(f"separation must be positive, got {separation}")
    for l in (length_m, length_n):
        if not 0 < l < wavelength:
            raise ValueError(f"dipole length must lie in (0, wavelength), got {l}")


def _emf_prefactor(k: float, ha: float, hb: float) -> complex:
    return 1j * ETA0 / (4.0 * math.pi * math.sin(k * ha) * math.sin(k * hb))


def mutual_impedance_integral(length_m: float, length_n: float, separation: float,
                              wavelength: float, order: int = _EMF_ORDER) -> complex:
    """Mutual impedance by quadrature of the induced-EMF kernel.

    The field of the longer dipole is integrated against the current of the
    shorter one so the kernel centers never fall inside the integration
    interval; the roles are interchangeable by reciprocity and fixing them
    makes the function symmetric in its length arguments by construction.
    """
    _validate_pair(length_m, length_n, separation, wavelength)
    vals = _impedance_integral_batch(
        np.array([length_m]), np.array([length_n]), np.array([separation]),
        wavelength, order)
    return complex(vals[0])


def _impedance_integral_batch(lengths_m, lengths_n, separations, wavelength: float,
                              order: int = _EMF_ORDER) -> np.ndarray:
    """Vectorized EMF integral over many (length, length, separation) triples."""
    rule = _EMF_RULE if order == _EMF_ORDER else gauss_legendre(order)
    u, w = rule.nodes, rule.weights
    k = 2.0 * math.pi / wavelength
    la = np.maximum(lengths_m, lengths_n)
    lb = np.minimum(lengths_m, lengths_n)
    d = np.asarray(separations, dtype=float)
    ha, hb = la / 2.0, lb / 2.0
    zeros = np.zeros_like(ha)
    # kernel centers: the two tips of the source dipole and its feed point
    centers = np.stack([ha, -ha, zeros])                       # (3, m)
    coeffs = np.stack([np.ones_like(ha), np.ones_like(ha), -2.0 * np.cos(k * ha)])
    starts = np.stack([-hb, zeros])                            # (2, m), split at the |z| kink
    stops = np.stack([zeros, hb])
    t_lo = np.arcsinh((starts[None, :, :] - centers[:, None, :]) / d)
    t_hi = np.arcsinh((stops[None, :, :] - centers[:, None, :]) / d)
    mid = 0.5 * (t_lo + t_hi)
    half = 0.5 * (t_hi - t_lo)
    t = mid[..., None] + half[..., None] * u                   # (3, 2, m, Q)
    z = centers[:, None, :, None] + d[None, None, :, None] * np.sinh(t)
    r = d[None, None, :, None] * np.cosh(t)
    current = np.sin(k * (hb[None, None, :, None] - np.abs(z)))
    pieces = np.sum(w * current * np.exp(-1j * k * r), axis=-1) * half
    total = np.sum(coeffs[:, None, :] * pieces, axis=(0, 1))
    return _emf_prefactor_vec(k, ha, hb) * total


def _emf_prefactor_vec(k: float, ha, hb):
    return 1j * ETA0 / (4.0 * math.pi * np.sin(k * ha) * np.sin(k * hb))


def _e1_imag_axis(x: np.ndarray) -> np.ndarray:
    """E1(j x) for real x > 0 in terms of Si and Ci."""
    return -cos_integral(x) + 1j * (sin_integral(x) - math.pi / 2.0)


def mutual_impedance_closed_form(length_m: float, length_n: float, separation: float,
                                 wavelength: float) -> complex:
    """Induced-EMF impedance in closed form via sine/cosine integrals.

    Each kernel term integrates to a pair of exponential integrals under the
    substitutions v = R - (z - z0) and w = R + (z - z0); the piecewise
    sinusoidal current contributes four complex exponentials per half
    interval. Exact for arbitrary length pairs.
    """
    _validate_pair(length_m, length_n, separation, wavelength)
    k = 2.0 * math.pi / wavelength
    la, lb = max(length_m, length_n), min(length_m, length_n)
    ha, hb, d = la / 2.0, lb / 2.0, separation
    centers = (ha, -ha, 0.0)
    coeffs = (1.0, 1.0, -2.0 * math.cos(k * ha))

    def radial(t):
        return math.hypot(d, t)

    halves = ((-hb, 0.0, False), (0.0, hb, True))
    # arguments of E1 for every (center, half-interval, sign) combination
    args = []
    for z0 in centers:
        for a, b, _ in halves:
            ap, bp = a - z0, b - z0
            args.append(radial(bp) - bp)   # sign +1, upper limit
            args.append(radial(ap) - ap)   # sign +1, lower limit
            args.append(radial(ap) + ap)   # sign -1, lower limit
            args.append(radial(bp) + bp)   # sign -1, upper limit
    e1 = _e1_imag_axis(k * np.asarray(args))

    total = 0.0 + 0.0j
    idx = 0
    for z0, c in zip(centers, coeffs):
        piece = 0.0 + 0.0j
        for _, _, upper in halves:
            j_plus = np.exp(1j * k * z0) * (e1[idx] - e1[idx + 1])
            j_minus = np.exp(-1j * k * z0) * (e1[idx + 2] - e1[idx + 3])
            idx += 4
            # sin(k(hb - |z|)) expanded into exponentials: on the upper half
            # exp(+jk hb) pairs with the -sign exponential, on the lower half
            # with the +sign one.
            if upper:
                piece += np.exp(1j * k * hb) * j_minus - np.exp(-1j * k * hb) * j_plus
            else:
                piece += np.exp(1j * k * hb) * j_plus - np.exp(-1j * k * hb) * j_minus
        total += c * piece / 2j
    return complex(_emf_prefactor(k, ha, hb) * total)


def mutual_impedance(length_m: float, length_n: float, separation: float,
                     wavelength: float) -> complex:
    """Mutual impedance between two parallel side-by-side dipoles (ohms).

    Equal-length pairs take the closed-form fast path; unequal lengths are
    integrated numerically. The two paths agree to well below 0.1 ohm.
    """
    if abs(length_m - length_n) <= _LENGTH_TOL * max(length_m, length_n):
        return mutual_impedance_closed_form(length_m, length_n, separation, wavelength)
    return mutual_impedance_integral(length_m, length_n, separation, wavelength)


def self_impedance(length: float, wire_radius: float, wavelength: float) -> complex:
    """Self impedance of a thin dipole: the mutual impedance at separation = wire radius."""
    if not 0 < wire_radius < length:
        raise ValueError(f"wire_radius must lie in (0, length), got {wire_radius}")
    return mutual_impedance(length, length, wire_radius, wavelength)


def impedance_matrix(array: DipoleArray) -> np.ndarray:
    """Lossless terminal impedance matrix of the array (symmetric, complex N x N)."""
    n = array.n_elements
    iu, ju = np.triu_indices(n)
    d = np.abs(array.positions[ju] - array.positions[iu])
    d[iu == ju] = array.wire_radius
    vals = _impedance_integral_batch(array.lengths[iu], array.lengths[ju], d,
                                     array.wavelength)
    z = np.zeros((n, n), dtype=complex)
    z[iu, ju] = vals
    z[ju, iu] = vals
    return z


def loss_resistance(length: float, wire_radius: float, wavelength: float,
                    conductivity: float) -> float:
    """Skin-effect series loss resistance of one dipole arm pair, ohms.

    Surface resistance sqrt(pi f mu0 / sigma) spread over the wire
    circumference, uniform-current form (one scalar multiplies the squared
    current norm in the loss power).
    """
    if not conductivity > 0:
        raise ValueError(f"conductivity must be positive, got {conductivity}")
    surface = math.sqrt(math.pi * (C0 / wavelength) * MU0 / conductivity)
    return surface * length / (2.0 * math.pi * wire_radius)


def z_to_s(z: np.ndarray, z_ref: float) -> np.ndarray:
    """Impedance to scattering matrix, identical real reference on every port."""
    z = np.asarray(z, dtype=complex)
    n = z.shape[0]
    eye = np.eye(n)
    return solve_complex_linear(z + z_ref * eye, z - z_ref * eye)


def s_to_z(s: np.ndarray, z_ref: float) -> np.ndarray:
    """Scattering back to impedance; inverse of z_to_s."""
    s = np.asarray(s, dtype=complex)
    n = s.shape[0]
    eye = np.eye(n)
    return z_ref * solve_complex_linear(eye - s, eye + s)


def build_network(array: DipoleArray, z_ref: float = 50.0) -> NetworkMatrices:
    """Assemble impedance, loss and scattering matrices for an array.

    The scalar loss resistance is evaluated at the mean element length,
    matching the single-scalar loss model; the scattering matrix describes
    the lossy network, which is what the feed lines see.
    """
    z = impedance_matrix(array)
    r_loss = loss_resistance(array.mean_length, array.wire_radius,
                             array.wavelength, array.conductivity)
    s = z_to_s(z + r_loss * np.eye(array.n_elements), z_ref)
    return NetworkMatrices(z=z, r_loss=r_loss, s=s, z_ref=z_ref)


def active_reflection(s: np.ndarray, excitation) -> np.ndarray:
    """Per-port reflection under simultaneous excitation.

    Component n is sum_m S[n, m] I_m / I_n. Ports with zero current are
    unexcited and reported as NaN; downstream efficiency aggregation skips
    them. Magnitudes above 1 are possible for super-directive feeds and are
    deliberately not clamped.
    """
    currents = currents_of(excitation)
    s = np.asarray(s, dtype=complex)
    excited = np.abs(currents) > 0
    if not np.any(excited):
        raise ValueError("all ports unexcited: active reflection undefined")
    gamma = np.full(currents.shape, np.nan + 1j * np.nan)
    forward = s @ currents
    gamma[excited] = forward[excited] / currents[excited]
    if np.any(np.abs(gamma[excited]) > 1.0):
        warnings.warn("active reflection magnitude exceeds unity on at least one port",
                      RuntimeWarning, stacklevel=2)
    return gamma
