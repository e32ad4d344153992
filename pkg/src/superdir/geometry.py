"""Array geometry, element factor, array response and radiation intensity.

Model: N parallel dipoles, z-oriented, centers on the x-axis, thin wires
carrying sinusoidal current distributions. Currents everywhere in the toolkit
are the terminal (feed-point) currents; the element coefficient therefore
includes the 1/sin(k*l/2) terminal normalization so that the sphere integral
of the radiation intensity and the quadratic form over the impedance matrix
are two routes to the same radiated power.

All angles are radians. Degrees exist only at the CLI boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import ETA0

_INTENSITY_PREF = ETA0 / (8.0 * math.pi**2)


@dataclass(frozen=True)
class DipoleArray:
    """Geometry of a linear dipole array.

    positions are element-center x-coordinates in meters, strictly
    increasing; lengths are the full dipole lengths in meters.
    """

    wavelength: float
    positions: np.ndarray
    lengths: np.ndarray
    wire_radius: float
    conductivity: float = 5.8e7

    def __post_init__(self):
        positions = np.atleast_1d(np.asarray(self.positions, dtype=float))
        lengths = np.atleast_1d(np.asarray(self.lengths, dtype=float))
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "lengths", lengths)
        if not self.wavelength > 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")
        if not self.wire_radius > 0:
            raise ValueError(f"wire_radius must be positive, got {self.wire_radius}")
        if not self.conductivity > 0:
            raise ValueError(f"conductivity must be positive, got {self.conductivity}")
        if positions.ndim != 1 or lengths.shape != positions.shape:
            raise ValueError("positions and lengths must be 1-D and the same size")
        if positions.size == 0:
            raise ValueError("array must contain at least one element")
        gaps = np.diff(positions)
        if np.any(gaps <= 0):
            raise ValueError("positions must be strictly increasing")
        if np.any(gaps < 2 * self.wire_radius):
            raise ValueError("adjacent elements overlap (gap below one wire diameter)")
        if np.any(lengths <= 0) or np.any(lengths >= self.wavelength):
            raise ValueError("element lengths must lie in (0, wavelength)")
        if self.wire_radius >= np.min(lengths) / 50.0:
            raise ValueError("wire_radius violates the thin-wire assumption (>= length/50)")

    @property
    def n_elements(self) -> int:
        return self.positions.size

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def mean_length(self) -> float:
        return float(np.mean(self.lengths))

    def translated(self, offset: float) -> "DipoleArray":
        """Same array shifted rigidly along x."""
        return DipoleArray(self.wavelength, self.positions + offset, self.lengths,
                           self.wire_radius, self.conductivity)


@dataclass(frozen=True)
class Excitation:
    """Complex terminal feed currents, one per element."""

    currents: np.ndarray

    def __post_init__(self):
        currents = np.atleast_1d(np.asarray(self.currents, dtype=complex))
        object.__setattr__(self, "currents", currents)
        if currents.ndim != 1 or currents.size == 0:
            raise ValueError("currents must be a non-empty 1-D vector")
        if not np.any(np.abs(currents) > 0):
            raise ValueError("at least one current must be nonzero")

    @property
    def n_ports(self) -> int:
        return self.currents.size


@dataclass(frozen=True)
class Direction:
    """Observation direction: polar angle theta from +z, azimuth phi from +x."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        object.__setattr__(self, "phi", float(self.phi) % (2.0 * math.pi))


END_FIRE = Direction(theta=math.pi / 2, phi=0.0)
BROADSIDE = Direction(theta=math.pi / 2, phi=math.pi / 2)


def currents_of(excitation) -> np.ndarray:
    """Accept an Excitation or a bare current vector."""
    if isinstance(excitation, Excitation):
        return excitation.currents
    return np.atleast_1d(np.asarray(excitation, dtype=complex))


def element_factor(theta, length: float, wavelength: float):
    """Normalized dipole pattern [cos(kl/2 cos t) - cos(kl/2)] / sin t.

    Vectorized over theta. The removable 0/0 at theta in {0, pi} is defined
    as the limit value 0.
    """
    theta = np.asarray(theta, dtype=float)
    kl2 = math.pi * length / wavelength
    st = np.sin(theta)
    num = np.cos(kl2 * np.cos(theta)) - math.cos(kl2)
    out = np.divide(num, st, out=np.zeros_like(num), where=st != 0.0)
    return out if out.ndim else float(out)


def _terminal_coefficient(theta, length: float, wavelength: float):
    """Element pattern per unit terminal current: F(theta)/sin(kl/2)."""
    return element_factor(theta, length, wavelength) / math.sin(math.pi * length / wavelength)


def array_response(array: DipoleArray, direction: Direction) -> np.ndarray:
    """Far-field response vector, component n = exp(-j k x_n sin(theta) cos(phi))."""
    k = array.wavenumber
    u = math.sin(direction.theta) * math.cos(direction.phi)
    return np.exp(-1j * k * array.positions * u)


def field_sum(array: DipoleArray, excitation, direction: Direction,
              per_element: bool = False):
    """Complex pattern sum at one direction.

    per_element=False uses a single shared element coefficient evaluated at
    the mean element length (the model under which all elements share one
    pattern); per_element=True weights each term with its own element's
    coefficient, which is the exact sinusoidal-current field and the form the
    radiated-power oracle integrates.
    """
    currents = currents_of(excitation)
    a = array_response(array, direction)
    if per_element:
        g = np.array([_terminal_coefficient(direction.theta, l, array.wavelength)
                      for l in array.lengths])
        return complex(np.sum(g * a * currents))
    g = _terminal_coefficient(direction.theta, array.mean_length, array.wavelength)
    return complex(g * np.sum(a * currents))


def radiation_intensity(array: DipoleArray, excitation, direction: Direction,
                        per_element: bool = False) -> float:
    """Radiation intensity U(theta, phi) in W/sr for the given feed currents."""
    return _INTENSITY_PREF * abs(field_sum(array, excitation, direction, per_element)) ** 2


def pattern_cut(array: DipoleArray, excitation, plane: str, samples: int,
                fixed_phi: float = 0.0, per_element: bool = False):
    """Uniformly sampled intensity cut.

    plane="azimuth": theta = pi/2, phi in [0, 2pi) (endpoint excluded, the
    cut is periodic). plane="elevation": phi fixed, theta in [0, pi]
    inclusive. Returns a list of (angle, intensity) pairs.
    """
    if samples < 2:
        raise ValueError(f"samples must be >= 2, got {samples}")
    if plane == "azimuth":
        angles = 2.0 * math.pi * np.arange(samples) / samples
        dirs = [Direction(math.pi / 2, a) for a in angles]
    elif plane == "elevation":
        angles = math.pi * np.arange(samples) / (samples - 1)
        dirs = [Direction(a, fixed_phi) for a in angles]
    else:
        raise ValueError(f"plane must be 'azimuth' or 'elevation', got {plane!r}")
    return [(float(a), radiation_intensity(array, excitation, d, per_element))
            for a, d in zip(angles, dirs)]
