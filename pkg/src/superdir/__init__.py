"""Super-directive linear dipole array design toolkit.

Workflow: describe a dipole array and its feed currents, build the coupled
network matrices, evaluate directivity/gain/realized gain with full mutual
coupling and conductor loss, search for high-realized-gain designs with
differential evolution, and study subarray replications of the result.
"""

from .constants import C0, ETA0, MU0
from .geometry import (BROADSIDE, END_FIRE, DipoleArray, Direction, Excitation,
                       array_response, element_factor, pattern_cut,
                       radiation_intensity)
from .metrics import (RadiationReport, directivity, gain, input_power,
                      max_directivity_excitation, mismatch_efficiency,
                      quadrature_radiated_power, radiated_power, realized_gain)
from .network import (NetworkMatrices, active_reflection, build_network,
                      impedance_matrix, loss_resistance, mutual_impedance,
                      mutual_impedance_closed_form, mutual_impedance_integral,
                      s_to_z, self_impedance, z_to_s)
from .numerics import (QuadratureRule, SingularMatrixError, cos_integral,
                       gauss_legendre, sin_integral, solve_complex_linear)
from .optimizer import (DeConfig, DeResult, cost, cost_from_realized_gain,
                        crossover_bin, decode, default_bounds, encode,
                        evaluate_genome, genome_length, mutate_best_1, optimize)
from .subarray import (SubarrayConfig, SubarrayReport, compose,
                       group_factorization, subarray_input_power, subarray_report)

__version__ = "0.1.0"

__all__ = [
    "BROADSIDE", "C0", "DeConfig", "DeResult", "DipoleArray", "Direction",
    "END_FIRE", "ETA0", "Excitation", "MU0", "NetworkMatrices",
    "QuadratureRule", "RadiationReport", "SingularMatrixError",
    "SubarrayConfig", "SubarrayReport", "active_reflection", "array_response",
    "build_network", "compose", "cos_integral", "cost",
    "cost_from_realized_gain", "crossover_bin", "decode", "default_bounds",
    "directivity", "element_factor", "encode", "evaluate_genome", "gain",
    "gauss_legendre", "genome_length", "group_factorization",
    "impedance_matrix", "input_power", "loss_resistance",
    "max_directivity_excitation", "mismatch_efficiency", "mutate_best_1",
    "mutual_impedance", "mutual_impedance_closed_form",
    "mutual_impedance_integral", "optimize", "pattern_cut",
    "quadrature_radiated_power", "radiated_power", "radiation_intensity",
    "realized_gain", "s_to_z", "self_impedance", "sin_integral",
    "solve_complex_linear", "subarray_input_power", "subarray_report",
    "z_to_s",
]
