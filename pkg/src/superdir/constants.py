"""Physical constants shared across the toolkit."""

import math

C0 = 299792458.0
"""Speed of light in vacuum, m/s."""

MU0 = 4.0e-7 * math.pi
"""Vacuum permeability, H/m."""

ETA0 = 376.730313668
"""Free-space wave impedance, ohms.

The exact value is used everywhere instead of the 120*pi approximation so
that field-side and circuit-side power computations agree well below the
tolerances of the cross-validation suite (the difference is 0.05%).
"""
