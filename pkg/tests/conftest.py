"""Shared fixtures: the published four-element reference design and helpers."""

import numpy as np
import pytest

from superdir import DeConfig, DipoleArray, Excitation

WAVELENGTH = 30.33e-3
WIRE_RADIUS = WAVELENGTH / 2000.0

REFERENCE_POSITIONS_MM = np.array([-16.13, -6.24, 5.78, 16.13])
REFERENCE_AMPLITUDES = np.array([0.95, 1.0, 0.96, 0.75])
REFERENCE_PHASES_DEG = np.array([52.47, -156.37, 0.0, 149.11])
REFERENCE_LENGTHS_LAMBDA = np.array([0.44, 0.45, 0.45, 0.48])


@pytest.fixture(scope="session")
def reference_array():
    return DipoleArray(
        wavelength=WAVELENGTH,
        positions=REFERENCE_POSITIONS_MM * 1e-3,
        lengths=REFERENCE_LENGTHS_LAMBDA * WAVELENGTH,
        wire_radius=WIRE_RADIUS,
    )


@pytest.fixture(scope="session")
def reference_excitation():
    currents = REFERENCE_AMPLITUDES * np.exp(1j * np.deg2rad(REFERENCE_PHASES_DEG))
    return Excitation(currents=currents)


@pytest.fixture(scope="session")
def reference_config():
    return DeConfig(wavelength=WAVELENGTH)


def random_valid_array(rng, n=None, wavelength=WAVELENGTH):
    """A random geometry satisfying the array invariants, for property tests."""
    if n is None:
        n = int(rng.integers(2, 7))
    while True:
        positions = np.sort(rng.uniform(-0.6, 0.6, n)) * wavelength
        if np.all(np.diff(positions) > 0.02 * wavelength):
            break
    lengths = rng.uniform(0.35, 0.5, n) * wavelength
    return DipoleArray(wavelength, positions, lengths, wavelength / 2000.0)


def random_excitation(rng, n):
    currents = rng.normal(size=n) + 1j * rng.normal(size=n)
    while not np.any(np.abs(currents) > 0):
        currents = rng.normal(size=n) + 1j * rng.normal(size=n)
    return Excitation(currents=currents)
