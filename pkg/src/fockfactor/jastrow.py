"""Closed-form ground states in first quantization: log-wavefunctions,
drifts, local energies, and the identities that certify them.

Three families are covered, each with an exactly known ground-state
energy:

* SutherlandGround: periodic inverse-square-sine gas on a circle, pair
  wavefunction prod |sin(pi (x_j - x_k) / length)|^beta, kinetic
  coefficient 1, energy (pi beta / length)^2 N (N^2 - 1) / 3;
* OscillatorGround: independent particles in a harmonic trap in m
  dimensions, Gaussian ground state, kinetic coefficient 1/2, energy
  (N / 2) tr(omega);
* RationalGround: inverse-square pair repulsion on the line with pair
  wavefunction prod |x_j - x_k|^beta and zero ground-state energy (no
  confinement, the local energy vanishes identically).

The local energy is E(x) = -kappa (lap log psi + |grad log psi|^2) + V(x)
and is position-independent exactly on these states, which is what the
checks exploit: closeness of local_energy to groundstate_energy at random
admissible configurations certifies drift, Laplacian, and potential
together.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import ShapeError, SingularityError, UnsupportedModelError
from .factorized import Cotangent, kernel_eval


@dataclass(frozen=True)
class SutherlandGround:
    beta: float
    length: float
    particle_count: int

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.length <= 0:
            raise ValueError("length must be positive")
        if self.particle_count < 1:
            raise ValueError("need at least one particle")


class OscillatorGround:
    """Harmonic trap with a symmetric positive frequency matrix omega
    (a scalar is promoted to one dimension)."""

    def __init__(self, omega, particle_count):
        omega = np.atleast_2d(np.asarray(omega, dtype=float))
        if omega.shape[0] != omega.shape[1]:
            raise ShapeError("omega must be square, got %r" % (omega.shape,))
        if not np.allclose(omega, omega.T, atol=1e-12):
            raise ValueError("omega must be symmetric")
        if particle_count < 1:
            raise ValueError("need at least one particle")
        self.omega = omega
        self.particle_count = int(particle_count)

    @property
    def ndim(self):
        return self.omega.shape[0]


@dataclass(frozen=True)
class RationalGround:
    beta: float
    particle_count: int

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.particle_count < 1:
            raise ValueError("need at least one particle")


def kinetic_coefficient(state):
    """Coefficient kappa of -lap in the Hamiltonian convention of the
    family: 1/2 for the trap, 1 for the pair gases."""
    if isinstance(state, OscillatorGround):
        return 0.5
    if isinstance(state, (SutherlandGround, RationalGround)):
        return 1.0
    raise UnsupportedModelError("unknown ground-state family %r" % (state,))


def _default_min_sep(state):
    if isinstance(state, SutherlandGround):
        return 1e-6 * state.length
    return 1e-6


def _as_positions(state, positions):
    pos = np.asarray(positions, dtype=float)
    if isinstance(state, OscillatorGround):
        if pos.ndim == 1:
            pos = pos.reshape(-1, 1)
        if pos.shape != (state.particle_count, state.ndim):
            raise ShapeError("expected %d x %d positions, got %r"
                             % (state.particle_count, state.ndim, pos.shape))
        return pos
    if pos.shape != (state.particle_count,):
        raise ShapeError("expected %d positions, got %r"
                         % (state.particle_count, pos.shape))
    return pos


def _circle_distance(u, length):
    d = abs(u) % length
    return min(d, length - d)


def _check_separation(state, pos, min_sep):
    if isinstance(state, OscillatorGround):
        return
    if min_sep is None:
        min_sep = _default_min_sep(state)
    n = len(pos)
    for j in range(n):
        for k in range(j + 1, n):
            if isinstance(state, SutherlandGround):
                d = _circle_distance(pos[j] - pos[k], state.length)
            else:
                d = abs(pos[j] - pos[k])
            if d < min_sep:
                raise SingularityError(
                    "particles %d and %d are %.3e apart, below %.3e"
                    % (j, k, d, min_sep))


def log_psi(state, positions, min_sep=None):
    """log |ground state| at a configuration (additive constants dropped)."""
    pos = _as_positions(state, positions)
    _check_separation(state, pos, min_sep)
    if isinstance(state, SutherlandGround):
        total = 0.0
        for j in range(state.particle_count):
            for k in range(j + 1, state.particle_count):
                total += state.beta * math.log(abs(math.sin(
                    math.pi * (pos[j] - pos[k]) / state.length)))
        return total
    if isinstance(state, OscillatorGround):
        return -0.5 * float(np.sum(pos * (pos @ state.omega)))
    if isinstance(state, RationalGround):
        total = 0.0
        for j in range(state.particle_count):
            for k in range(j + 1, state.particle_count):
                total += state.beta * math.log(abs(pos[j] - pos[k]))
        return total
    raise UnsupportedModelError("unknown ground-state family %r" % (state,))


def drift(state, positions, min_sep=None):
    """Gradient of log_psi, shaped like the positions."""
    pos = _as_positions(state, positions)
    _check_separation(state, pos, min_sep)
    if isinstance(state, SutherlandGround):
        out = np.zeros_like(pos)
        coeff = state.beta * math.pi / state.length
        for j in range(state.particle_count):
            acc = 0.0
            for k in range(state.particle_count):
                if k != j:
                    acc += 1.0 / math.tan(
                        math.pi * (pos[j] - pos[k]) / state.length)
            out[j] = coeff * acc
        return out
    if isinstance(state, OscillatorGround):
        return -(pos @ state.omega)
    if isinstance(state, RationalGround):
        out = np.zeros_like(pos)
        for j in range(state.particle_count):
            out[j] = state.beta * sum(
                1.0 / (pos[j] - pos[k])
                for k in range(state.particle_count) if k != j)
        return out
    raise UnsupportedModelError("unknown ground-state family %r" % (state,))


def laplacian_log_psi(state, positions, min_sep=None):
    """Sum over all particle coordinates of the second derivatives of
    log_psi."""
    pos = _as_positions(state, positions)
    _check_separation(state, pos, min_sep)
    if isinstance(state, SutherlandGround):
        coeff = state.beta * (math.pi / state.length) ** 2
        total = 0.0
        for j in range(state.particle_count):
            for k in range(state.particle_count):
                if k != j:
                    total -= coeff / math.sin(
                        math.pi * (pos[j] - pos[k]) / state.length) ** 2
        return total
    if isinstance(state, OscillatorGround):
        return -state.particle_count * float(np.trace(state.omega))
    if isinstance(state, RationalGround):
        total = 0.0
        for j in range(state.particle_count):
            for k in range(state.particle_count):
                if k != j:
                    total -= state.beta / (pos[j] - pos[k]) ** 2
        return total
    raise UnsupportedModelError("unknown ground-state family %r" % (state,))


def potential(state, positions, min_sep=None):
    """The model potential the family is the ground state of."""
    pos = _as_positions(state, positions)
    _check_separation(state, pos, min_sep)
    if isinstance(state, SutherlandGround):
        pref = state.beta * (state.beta - 1) * (math.pi / state.length) ** 2
        total = 0.0
        for j in range(state.particle_count):
            for k in range(state.particle_count):
                if k != j:
                    total += pref / math.sin(
                        math.pi * (pos[j] - pos[k]) / state.length) ** 2
        return total
    if isinstance(state, OscillatorGround):
        omega_sq = state.omega @ state.omega
        return 0.5 * float(np.sum(pos * (pos @ omega_sq)))
    if isinstance(state, RationalGround):
        pref = state.beta * (state.beta - 1)
        total = 0.0
        for j in range(state.particle_count):
            for k in range(state.particle_count):
                if k != j:
                    total += pref / (pos[j] - pos[k]) ** 2
        return total
    raise UnsupportedModelError("unknown ground-state family %r" % (state,))


def local_energy(state, positions, min_sep=None):
    """(H psi) / psi at a configuration; constant on the exact ground
    state, equal to groundstate_energy."""
    pos = _as_positions(state, positions)
    _check_separation(state, pos, min_sep)
    kappa = kinetic_coefficient(state)
    grad = drift(state, pos, min_sep=min_sep)
    lap = laplacian_log_psi(state, pos, min_sep=min_sep)
    return (-kappa * (lap + float(np.sum(np.asarray(grad) ** 2)))
            + potential(state, pos, min_sep=min_sep))


def groundstate_energy(state):
    """Closed-form ground-state energy of the family."""
    if isinstance(state, SutherlandGround):
        n = state.particle_count
        return (math.pi * state.beta / state.length) ** 2 \
            * n * (n ** 2 - 1) / 3
    if isinstance(state, OscillatorGround):
        return 0.5 * state.particle_count * float(np.trace(state.omega))
    if isinstance(state, RationalGround):
        return 0.0
    raise UnsupportedModelError("unknown ground-state family %r" % (state,))


def dunkl_apply(state, positions, min_sep=None):
    """Residual of the covariant annihilation per particle: the analytic
    drift minus the drift accumulated through the pair kernel.

    Only the periodic inverse-square-sine family carries the cotangent
    kernel; other families raise UnsupportedModelError.
    """
    if not isinstance(state, SutherlandGround):
        raise UnsupportedModelError(
            "covariant-derivative check is defined for the periodic "
            "inverse-square family only")
    pos = _as_positions(state, positions)
    _check_separation(state, pos, min_sep)
    kernel = Cotangent(state.beta, state.length)
    analytic = drift(state, pos, min_sep=min_sep)
    out = np.zeros_like(analytic)
    for j in range(state.particle_count):
        acc = 0.0
        for k in range(state.particle_count):
            if k != j:
                acc += kernel_eval(kernel, pos[j], pos[k])
        out[j] = analytic[j] - acc
    return out


# --------------------------------------------------------------------------
# finite-difference certifications
# --------------------------------------------------------------------------

def finite_diff_drift_check(state, positions, step=1e-5, min_sep=None):
    """Max deviation of the analytic drift from a central finite
    difference of log_psi, relative to max(1, |drift|)."""
    pos = _as_positions(state, positions)
    analytic = np.asarray(drift(state, pos, min_sep=min_sep))
    flat = pos.reshape(-1)
    fd = np.zeros_like(flat)
    for idx in range(flat.size):
        bumped = flat.copy()
        bumped[idx] += step
        plus = log_psi(state, bumped.reshape(pos.shape), min_sep=min_sep)
        bumped[idx] -= 2 * step
        minus = log_psi(state, bumped.reshape(pos.shape), min_sep=min_sep)
        fd[idx] = (plus - minus) / (2 * step)
    scale = max(1.0, float(np.abs(analytic).max()))
    return float(np.abs(fd - analytic.reshape(-1)).max()) / scale


def finite_diff_laplacian_check(state, positions, step=1e-3, min_sep=None):
    """Max deviation of laplacian_log_psi from the five-point second
    difference summed over coordinates, relative to max(1, |value|)."""
    pos = _as_positions(state, positions)
    analytic = laplacian_log_psi(state, pos, min_sep=min_sep)
    flat = pos.reshape(-1)
    center = log_psi(state, pos, min_sep=min_sep)
    total = 0.0
    for idx in range(flat.size):
        values = {}
        for offset in (-2, -1, 1, 2):
            bumped = flat.copy()
            bumped[idx] += offset * step
            values[offset] = log_psi(state, bumped.reshape(pos.shape),
                                     min_sep=min_sep)
        total += (-values[2] + 16 * values[1] - 30 * center
                  + 16 * values[-1] - values[-2]) / (12 * step ** 2)
    scale = max(1.0, abs(analytic))
    return abs(total - analytic) / scale


def random_admissible(state, rng, min_sep=None, max_tries=1000):
    """Draw a configuration respecting the family's separation floor."""
    if isinstance(state, OscillatorGround):
        return rng.standard_normal((state.particle_count, state.ndim))
    if min_sep is None:
        min_sep = _default_min_sep(state)
    for _ in range(max_tries):
        if isinstance(state, SutherlandGround):
            pos = rng.uniform(0.0, state.length, state.particle_count)
        else:
            pos = rng.uniform(-1.0, 1.0, state.particle_count)
        try:
            _check_separation(state, pos, min_sep)
        except SingularityError:
            continue
        return pos
    raise SingularityError("could not draw an admissible configuration in "
                           "%d tries" % max_tries)


# --------------------------------------------------------------------------
# thermodynamic limit
# --------------------------------------------------------------------------

def thermodynamic_density(beta, particle_count, length):
    """Rescaled density (pi beta)^(2/3) N / length under which the
    periodic gas's energy density closes into a cubic law."""
    return (math.pi * beta) ** (2.0 / 3.0) * particle_count / length


def thermodynamic_energy_density(rho_bar):
    """Limiting energy per unit length: rho_bar^3 / 3."""
    return rho_bar ** 3 / 3.0


def energy_density(state):
    """Finite-N energy per unit length of the periodic gas, written in
    the rescaled density: rho_bar^3 (1 - 1/N^2) / 3 exactly."""
    if not isinstance(state, SutherlandGround):
        raise UnsupportedModelError("energy density is defined for the "
                                    "periodic inverse-square family")
    return groundstate_energy(state) / state.length


# --------------------------------------------------------------------------
# batch interface
# --------------------------------------------------------------------------

def positions_from_csv(path, state):
    """Read one configuration per row (N * ndim columns) from a CSV file."""
    ndim = state.ndim if isinstance(state, OscillatorGround) else 1
    expected = state.particle_count * ndim
    configs = []
    with open(path, newline="") as handle:
        for row in csv.reader(handle):
            if not row or row[0].lstrip().startswith("#"):
                continue
            values = [float(cell) for cell in row]
            if len(values) != expected:
                raise ShapeError("row has %d values, expected %d"
                                 % (len(values), expected))
            pos = np.asarray(values)
            if ndim > 1:
                pos = pos.reshape(state.particle_count, ndim)
            configs.append(pos)
    return configs


def local_energy_csv(state, in_path, out_path, min_sep=None):
    """Evaluate the local energy for every configuration row of in_path
    and write index,local_energy rows to out_path. Returns the energies."""
    configs = positions_from_csv(in_path, state)
    energies = [local_energy(state, pos, min_sep=min_sep) for pos in configs]
    with open(out_path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["index", "local_energy"])
        for idx, energy in enumerate(energies):
            writer.writerow([idx, "%.17g" % energy])
    return energies
