"""DE/best/1/bin search for high realized gain.

The genome packs, in order: N element positions (m), N element lengths (m),
N-1 current amplitudes and N-1 current phases (rad). One amplitude gene is
eliminated by fixing the reference element's amplitude to 1, one phase gene
by fixing the phase reference element to 0; the two reference indices may
differ.

Randomness comes from Philox counter streams keyed as
(seed; counter = [0, 0, iteration, member]), iteration 0 being population
init. Every member's draws in a given iteration are independent of scheduling
order, so results are bit-reproducible no matter how evaluations are batched.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .geometry import END_FIRE, DipoleArray, Direction, Excitation
from .metrics import (RadiationReport, input_power, mismatch_efficiency,
                      radiation_intensity, realized_gain)
from .network import active_reflection, build_network

INFEASIBLE_PENALTY = 1.0e3


def default_bounds(n_elements: int, wavelength: float) -> np.ndarray:
    """Per-gene (lo, hi) rows: positions within +-0.6 wavelengths, lengths
    0.35..0.5 wavelengths, amplitudes 0.05..1, phases -pi..pi."""
    n = n_elements
    lo = np.concatenate([
        np.full(n, -0.6 * wavelength),
        np.full(n, 0.35 * wavelength),
        np.full(n - 1, 0.05),
        np.full(n - 1, -math.pi),
    ])
    hi = np.concatenate([
        np.full(n, 0.6 * wavelength),
        np.full(n, 0.50 * wavelength),
        np.full(n - 1, 1.0),
        np.full(n - 1, math.pi),
    ])
    return np.column_stack([lo, hi])


@dataclass
class DeConfig:
    """Optimization settings plus the physical context genomes decode into."""

    population: int = 150
    crossover: float = 0.9
    mutation: float = 0.8
    max_iterations: int = 250
    seed: int = 1
    target_realized_gain_dbi: float = 9.16
    bounds: Optional[np.ndarray] = None
    wavelength: float = 30.33e-3
    wire_radius: Optional[float] = None          # defaults to wavelength / 2000
    conductivity: float = 5.8e7
    z_ref: float = 50.0
    direction: Direction = field(default_factory=lambda: END_FIRE)
    amplitude_reference: Optional[int] = None    # defaults to (N-1)//2
    phase_reference: Optional[int] = None        # defaults to N//2

    def validate(self, n_elements: int) -> None:
        if self.population < 4:
            raise ValueError(f"population must be >= 4, got {self.population}")
        if not 0.0 <= self.crossover <= 1.0:
            raise ValueError(f"crossover must lie in [0, 1], got {self.crossover}")
        if not 0.0 < self.mutation <= 2.0:
            raise ValueError(f"mutation must lie in (0, 2], got {self.mutation}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.wavelength <= 0:
            raise ValueError("wavelength must be positive")
        b = self.resolved_bounds(n_elements)
        if b.shape != (genome_length(n_elements), 2):
            raise ValueError(f"bounds must have shape ({genome_length(n_elements)}, 2)")
        if np.any(b[:, 0] >= b[:, 1]):
            raise ValueError("every gene needs lo < hi bounds")

    def resolved_bounds(self, n_elements: int) -> np.ndarray:
        if self.bounds is not None:
            return np.asarray(self.bounds, dtype=float)
        return default_bounds(n_elements, self.wavelength)

    def resolved_wire_radius(self) -> float:
        return self.wavelength / 2000.0 if self.wire_radius is None else self.wire_radius

    def references(self, n_elements: int):
        amp = (n_elements - 1) // 2 if self.amplitude_reference is None else self.amplitude_reference
        ph = n_elements // 2 if self.phase_reference is None else self.phase_reference
        return amp, ph


@dataclass(frozen=True)
class DeResult:
    best_genome: np.ndarray
    best_cost: float
    cost_trace: list
    achieved_report: Optional[RadiationReport]
    iterations_run: int


def genome_length(n_elements: int) -> int:
    return 4 * n_elements - 2


def member_rng(seed: int, iteration: int, member: int) -> np.random.Generator:
    """Philox stream for one (iteration, member) pair under a run seed."""
    bitgen = np.random.Philox(key=np.uint64(seed),
                              counter=[0, 0, np.uint64(iteration), np.uint64(member)])
    return np.random.Generator(bitgen)


def decode(genome: np.ndarray, cfg: DeConfig):
    """Genome -> (DipoleArray | None, Excitation, feasible).

    Elements are sorted by position (lengths and currents travel with their
    element); the array slot is None with feasible=False when the sorted
    geometry violates the overlap or thin-wire constraints.
    """
    genome = np.asarray(genome, dtype=float)
    n = (genome.size + 2) // 4
    if genome.size != genome_length(n):
        raise ValueError(f"genome length {genome.size} does not match 4N-2 layout")
    amp_ref, ph_ref = cfg.references(n)
    positions = genome[:n]
    lengths = genome[n:2 * n]
    amplitudes = np.insert(genome[2 * n:3 * n - 1], amp_ref, 1.0)
    phases = np.insert(genome[3 * n - 1:], ph_ref, 0.0)
    currents = amplitudes * np.exp(1j * phases)

    order = np.argsort(positions, kind="stable")
    positions = positions[order]
    lengths = lengths[order]
    excitation = Excitation(currents=currents[order])
    try:
        array = DipoleArray(cfg.wavelength, positions, lengths,
                            cfg.resolved_wire_radius(), cfg.conductivity)
    except ValueError:
        return None, excitation, False
    return array, excitation, True


def encode(array: DipoleArray, excitation: Excitation, cfg: DeConfig) -> np.ndarray:
    """Inverse of decode, for designs given in element order.

    The currents are renormalized to the reference convention (unit amplitude
    at the amplitude reference, zero phase at the phase reference), which is
    a global scale and rotation and leaves every radiation quantity alone.
    """
    n = array.n_elements
    amp_ref, ph_ref = cfg.references(n)
    currents = excitation.currents / np.abs(excitation.currents[amp_ref])
    currents = currents * np.exp(-1j * np.angle(currents[ph_ref]))
    return np.concatenate([
        array.positions,
        array.lengths,
        np.delete(np.abs(currents), amp_ref),
        np.delete(np.angle(currents), ph_ref),
    ])


def _gated_shortfall_cost(target_linear: float, achieved_linear: float) -> float:
    """Squared shortfall in linear realized gain, zero at or above target."""
    shortfall = target_linear - achieved_linear
    return shortfall * shortfall if shortfall > 0 else 0.0


def cost_from_realized_gain(achieved_dbi: float, target_dbi: float) -> float:
    """Cost of a feasible design given its realized gain in dBi."""
    return _gated_shortfall_cost(10.0 ** (target_dbi / 10.0), 10.0 ** (achieved_dbi / 10.0))


def evaluate_genome(genome: np.ndarray, cfg: DeConfig, want_report: bool = True):
    """(cost, report) for one genome.

    Feasible genomes pay the gated squared shortfall of linear realized gain
    against the target. Geometry violations and negative mismatch efficiency
    pay the shortfall plus a fixed penalty, with the achieved value taken as
    0 and the (negative) linear realized gain respectively, so the search
    still sees a slope toward feasibility. want_report=False skips assembling
    the RadiationReport in the optimizer's inner loop.
    """
    target_linear = 10.0 ** (cfg.target_realized_gain_dbi / 10.0)
    array, excitation, feasible = decode(genome, cfg)
    if not feasible:
        return _gated_shortfall_cost(target_linear, 0.0) + INFEASIBLE_PENALTY, None
    net = build_network(array, cfg.z_ref)
    currents = excitation.currents
    p_in, _, _ = input_power(net, currents)
    u = radiation_intensity(array, currents, cfg.direction)
    g_lin = 4.0 * math.pi * u / p_in
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        gamma = active_reflection(net.s, currents)
    e_ref = mismatch_efficiency(gamma, currents, cfg.z_ref)
    achieved_linear = g_lin * e_ref
    if e_ref < 0:
        return _gated_shortfall_cost(target_linear, achieved_linear) + INFEASIBLE_PENALTY, None
    value = _gated_shortfall_cost(target_linear, achieved_linear)
    if not want_report:
        return value, None
    return value, realized_gain(array, net, excitation, cfg.direction)


def cost(genome: np.ndarray, cfg: DeConfig) -> float:
    """Cost of one genome under the config's target and physical context."""
    return evaluate_genome(genome, cfg, want_report=False)[0]


def mutate_best_1(population: np.ndarray, best_index: int, f: float,
                  rng: np.random.Generator, bounds: Optional[np.ndarray] = None,
                  partners=None) -> np.ndarray:
    """best/1 mutant: x_best + F (x_r1 - x_r2), clamped to bounds.

    r1, r2 are distinct indices drawn without replacement from the population
    excluding the best member; pass partners=(r1, r2) to pin them (tests).
    """
    population = np.asarray(population, dtype=float)
    if population.shape[0] < 4:
        raise ValueError("best/1/bin needs a population of at least 4")
    if partners is None:
        candidates = np.delete(np.arange(population.shape[0]), best_index)
        r1, r2 = rng.choice(candidates, size=2, replace=False)
    else:
        r1, r2 = partners
    mutant = population[best_index] + f * (population[r1] - population[r2])
    if bounds is not None:
        mutant = np.clip(mutant, bounds[:, 0], bounds[:, 1])
    return mutant


def crossover_bin(target: np.ndarray, mutant: np.ndarray, cr: float,
                  rng: np.random.Generator) -> np.ndarray:
    """Binomial crossover with the forced j_rand gene from the mutant."""
    target = np.asarray(target, dtype=float)
    mutant = np.asarray(mutant, dtype=float)
    if target.shape != mutant.shape:
        raise ValueError("target and mutant genomes must have equal length")
    j_rand = int(rng.integers(target.size))
    take = rng.random(target.size) < cr
    take[j_rand] = True
    return np.where(take, mutant, target)


def optimize(cfg: DeConfig, n_elements: int,
             on_iteration: Optional[Callable] = None) -> DeResult:
    """Run DE/best/1/bin until the cost hits zero or iterations run out.

    Selection is greedy with ties resolved for the trial vector; population
    updates are synchronous (every trial is built against the same population
    snapshot), which together with the per-member RNG streams makes runs
    deterministic for a fixed seed.
    """
    cfg.validate(n_elements)
    bounds = cfg.resolved_bounds(n_elements)
    lo, hi = bounds[:, 0], bounds[:, 1]
    n_genes = genome_length(n_elements)
    np_size = cfg.population

    population = np.empty((np_size, n_genes))
    for j in range(np_size):
        population[j] = lo + (hi - lo) * member_rng(cfg.seed, 0, j).random(n_genes)
    costs = np.array([cost(population[j], cfg) for j in range(np_size)])

    trace = [(0, float(np.min(costs)))]
    iterations_run = 0
    for iteration in range(1, cfg.max_iterations + 1):
        if np.min(costs) == 0.0:
            break
        iterations_run = iteration
        best = int(np.argmin(costs))
        next_population = population.copy()
        next_costs = costs.copy()
        for j in range(np_size):
            rng = member_rng(cfg.seed, iteration, j)
            mutant = mutate_best_1(population, best, cfg.mutation, rng, bounds)
            trial = crossover_bin(population[j], mutant, cfg.crossover, rng)
            trial_cost = cost(trial, cfg)
            if trial_cost <= costs[j]:
                next_population[j] = trial
                next_costs[j] = trial_cost
        population, costs = next_population, next_costs
        trace.append((iteration, float(np.min(costs))))
        if on_iteration is not None:
            on_iteration(iteration, population.copy(), costs.copy())

    best = int(np.argmin(costs))
    _, report = evaluate_genome(population[best], cfg)
    return DeResult(
        best_genome=population[best].copy(),
        best_cost=float(costs[best]),
        cost_trace=trace,
        achieved_report=report,
        iterations_run=iterations_run,
    )
