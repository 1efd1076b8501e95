"""Named verification suites behind the command-line interface.

Every suite gates only statements that hold for a correct implementation
at finite spacing: exact lattice identities, fitted convergence orders,
positivity margins, and Monte Carlo agreement within stated error bars.
Quantities that genuinely do not converge at finite spacing (entrywise
commutator norms, hierarchy commutators, ground-state annihilation for
step and linear drifts) are recorded with infinite tolerance instead of
being gated; the acceptance tests confront them with the stricter
contract directly.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from . import algebra, factorized, jastrow, measure
from .lattice import (LatticeGrid, build_sector, kinetic_matrix,
                      central_kinetic_gram, number_operator)
from .algebra import ConvergenceRecord, entrywise_max
from .report import gated_check, recorded_check


@dataclass
class SuiteResult:
    suite: str
    checks: list
    convergence: list = field(default_factory=list)

    @property
    def passed(self):
        return all(check.passed for check in self.checks)


def _take(params, key, default, caster):
    value = params.pop(key, default)
    try:
        return caster(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError("parameter %r: %s" % (key, exc)) from exc


def _int_list(value):
    return tuple(int(v) for v in value)


def _grid_ladder(value):
    sizes = _int_list(value)
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValueError("grid ladder must be strictly increasing")
    return sizes


def _float_list(value):
    return tuple(float(v) for v in value)


def _finish_params(suite, params):
    if params:
        raise ConfigError("unknown parameters for suite %r: %s"
                          % (suite, ", ".join(sorted(params))))


def _timed(fn):
    start = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - start


def _order_gate(name, record, threshold):
    """Gate a fitted convergence order from below."""
    order = record.fitted_order
    margin = threshold - (order if not math.isinf(order) else 1e9)
    return gated_check(
        name, "fitted order >= %.3g on ladder %s" % (threshold,
                                                     list(record.spacings)),
        residual=margin, tolerance=0.0, order=order,
        details={"residuals": list(record.residuals),
                 "spacings": list(record.spacings),
                 **record.details})


def _monotone_gate(name, relation, values):
    """Gate that a residual ladder strictly decreases."""
    steps = [values[i + 1] - values[i] for i in range(len(values) - 1)]
    return gated_check(name, relation, residual=max(steps), tolerance=0.0,
                       details={"values": list(values)})


def _psd_gate(name, ground):
    return gated_check(
        name, "lam_min >= -1e-10 |H| (Gram positivity)",
        residual=-ground.lam_min, tolerance=1e-10 * ground.operator_norm,
        details={"lam_min": ground.lam_min, "norm": ground.operator_norm,
                 "dimension": ground.dimension, "method": ground.method})


def _annihilation_record(name, ground, gate):
    """Ground-state annihilation clause; gated only where the model has
    an exact lattice zero mode."""
    if ground.annihilation_max is None:
        return recorded_check(
            name + " skipped", "max_i |C_i ground| (dimension %d too large "
            "for a dense certificate)" % ground.dimension, residual=0.0)
    if gate:
        return gated_check(
            name, "max_i |C_i ground| <= 1e-5 |H|^(1/2)",
            residual=ground.annihilation_max,
            tolerance=ground.annihilation_threshold,
            details={"lam_min": ground.lam_min})
    return recorded_check(
        name, "max_i |C_i ground| against 1e-5 |H|^(1/2) = %.3e"
        % ground.annihilation_threshold,
        residual=ground.annihilation_max,
        details={"lam_min": ground.lam_min,
                 "threshold": ground.annihilation_threshold})


# --------------------------------------------------------------------------
# suite runners
# --------------------------------------------------------------------------

def run_current_algebra(params, seed):
    grid_sizes = _take(params, "grid_sizes", (16, 32, 64), _grid_ladder)
    length = _take(params, "length", 1.0, float)
    particle_count = _take(params, "particle_count", 2, int)
    threshold = _take(params, "order_threshold", 1.5, float)
    _finish_params("current-algebra", params)
    if len(grid_sizes) < 2:
        raise ConfigError("grid_sizes needs at least two entries")

    records, elapsed = _timed(lambda: algebra.check_current_algebra(
        grid_sizes=grid_sizes, length=length,
        particle_count=particle_count))
    checks = []
    for key, label in (("current_density", "current-density bracket"),
                       ("current_current", "current-current bracket")):
        record = records[key]
        check = _order_gate("%s weak order" % label, record, threshold)
        check.wall_time = elapsed / 2
        checks.append(check)
        checks.append(recorded_check(
            "%s entrywise defect" % label,
            "entrywise norms of the bracket defect stay O(1); only the "
            "weak bilinears converge",
            residual=record.details["entrywise_max"][-1],
            details={"ladder": list(record.details["entrywise_max"])}))
    return SuiteResult("current-algebra", checks,
                       convergence=[records["current_density"],
                                    records["current_current"]])


def run_normal_ordering(params, seed):
    n_sites = _take(params, "n_sites", 6, int)
    particle_count = _take(params, "particle_count", 3, int)
    spacing = _take(params, "spacing", 1.0 / 6, float)
    _finish_params("normal-ordering", params)

    sector = build_sector(LatticeGrid(n_sites, spacing), particle_count)
    residuals, elapsed = _timed(lambda: algebra.check_normal_ordering(sector))
    relations = {
        "pair_identity": "n_i n_j = :n_i n_j: + delta_ij n_i",
        "triple_identity": "triple product reduces to ordered parts plus "
                           "coincidence corrections",
        "smeared_identity": "rho(f) rho(g) = :rho(f) rho(g): + rho(f g)",
    }
    checks = []
    for key, relation in relations.items():
        checks.append(gated_check(
            "normal ordering %s" % key.replace("_", " "), relation,
            residual=residuals[key], tolerance=1e-12,
            wall_time=elapsed / 3))
    return SuiteResult("normal-ordering", checks)


def run_oscillatory(params, seed):
    grid_sizes = _take(params, "grid_sizes", (32, 64, 128), _grid_ladder)
    length = _take(params, "length", 20.0, float)
    omega = _take(params, "omega", 1.0, float)
    _finish_params("oscillatory", params)
    if omega <= 0:
        raise ConfigError("omega must be positive")

    checks = []
    errors = []
    spacings = []
    for n in grid_sizes:
        grid = LatticeGrid.from_length(n, length)
        spec = factorized.ModelSpec(factorized.Oscillatory(omega), grid, 1)
        ham = factorized.model_hamiltonian(spec, kinetic="forward")
        solved = factorized.eigensolve(ham, n_eigenvalues=1)
        errors.append(abs(solved.eigenvalues[0] - omega / 2))
        spacings.append(grid.spacing)
    checks.append(gated_check(
        "trap ground energy at finest grid",
        "lam_0 -> omega/2 within 1e-2 at the finest grid",
        residual=errors[-1] / (omega / 2), tolerance=1e-2,
        details={"errors": errors, "grid_sizes": list(grid_sizes)}))
    checks.append(_monotone_gate(
        "trap ground energy ladder decreases",
        "absolute energy error decreases along the grid ladder", errors))
    ladder = ConvergenceRecord(
        label="trap ground energy", spacings=tuple(spacings),
        residuals=tuple(errors),
        fitted_order=algebra.fit_order(spacings, errors))
    checks.append(_order_gate("trap energy order", ladder, 1.5))

    rng = np.random.Generator(np.random.Philox(seed))
    worst = 0.0
    for npart in (1, 2, 4):
        for dim in (1, 2):
            base = rng.uniform(0.5, 1.5, (dim, dim))
            freq = base @ base.T + dim * np.eye(dim)
            state = jastrow.OscillatorGround(freq, npart)
            expected = jastrow.groundstate_energy(state)
            for _ in range(20):
                pos = jastrow.random_admissible(state, rng)
                value = jastrow.local_energy(state, pos)
                worst = max(worst, abs(value - expected) / abs(expected))
    checks.append(gated_check(
        "trap local energy is constant",
        "local energy == (N/2) tr omega at random configurations",
        residual=worst, tolerance=1e-10))

    grid = LatticeGrid.from_length(grid_sizes[-1], length)
    spec = factorized.ModelSpec(factorized.Oscillatory(omega), grid, 1)
    ground = factorized.groundstate_check(spec)
    checks.append(_psd_gate("factorized trap positivity", ground))
    checks.append(_annihilation_record(
        "trap ground-state annihilation", ground, gate=True))

    sector = build_sector(grid, 1)
    kin = kinetic_matrix(sector).toarray()
    computed = np.sort(np.linalg.eigvalsh(kin))
    k = np.arange(grid.n_sites)
    expected = np.sort((1 - np.cos(2 * np.pi * k / grid.n_sites))
                       / grid.spacing ** 2)
    checks.append(gated_check(
        "forward kinetic spectrum",
        "single-particle kinetic eigenvalues equal "
        "(1 - cos(2 pi k / n)) / h^2",
        residual=float(np.abs(computed - expected).max() / expected.max()),
        tolerance=1e-12))
    return SuiteResult("oscillatory", checks, convergence=[ladder])


def run_generalized_oscillatory(params, seed):
    grid_sizes = _take(params, "grid_sizes", (16, 32, 64), _grid_ladder)
    length = _take(params, "length", 1.0, float)
    omega_bar = _take(params, "omega_bar", 0.8, float)
    particle_count = _take(params, "particle_count", 2, int)
    threshold = _take(params, "order_threshold", 1.0, float)
    _finish_params("generalized-oscillatory", params)

    base_grid = LatticeGrid.from_length(grid_sizes[0], length)
    variant = factorized.GeneralizedOscillatory(omega_bar)
    spec = factorized.ModelSpec(variant, base_grid, particle_count)
    record, elapsed = _timed(lambda: factorized.check_equivalence(
        spec, grid_sizes=grid_sizes))
    order_check = _order_gate("pair-trap equivalence order", record,
                              threshold)
    order_check.wall_time = elapsed
    checks = [order_check]

    sector = build_sector(base_grid, particle_count)
    zero_spec = factorized.ModelSpec(factorized.GeneralizedOscillatory(0.0),
                                     base_grid, particle_count)
    free_gap = entrywise_max(
        0.5 * factorized.hhat_matrix(sector, factorized.model_drift(zero_spec))
        - 0.5 * central_kinetic_gram(sector))
    checks.append(gated_check(
        "zero-coupling reduction",
        "omega_bar = 0 factorized form equals the central kinetic Gram "
        "entrywise", residual=free_gap, tolerance=1e-13))

    ground = factorized.groundstate_check(spec)
    checks.append(_psd_gate("pair-trap positivity", ground))
    checks.append(_annihilation_record(
        "pair-trap ground-state annihilation", ground, gate=False))
    return SuiteResult("generalized-oscillatory", checks,
                       convergence=[record])


def run_cms(params, seed):
    grid_sizes = _take(params, "grid_sizes", (16, 32, 64), _grid_ladder)
    length = _take(params, "length", 1.0, float)
    beta = _take(params, "beta", 2.0, float)
    particle_count = _take(params, "particle_count", 2, int)
    threshold = _take(params, "order_threshold", 1.0, float)
    _finish_params("cms", params)
    if length <= 0:
        raise ConfigError("length must be positive")
    if beta <= 0:
        raise ConfigError("beta must be positive")

    variant = factorized.CalogeroSutherland(beta)
    base_grid = LatticeGrid.from_length(grid_sizes[0], length)
    spec = factorized.ModelSpec(variant, base_grid, particle_count)
    record, elapsed = _timed(lambda: factorized.check_equivalence(
        spec, grid_sizes=grid_sizes))
    order_check = _order_gate("inverse-square equivalence order", record,
                              threshold)
    order_check.wall_time = elapsed
    checks = [order_check]

    state = jastrow.SutherlandGround(beta, length, particle_count)
    target = jastrow.groundstate_energy(state)
    rel_errors = []
    for n in grid_sizes:
        grid = LatticeGrid.from_length(n, length)
        spec_n = factorized.ModelSpec(variant, grid, particle_count)
        ham = factorized.model_hamiltonian(spec_n, kinetic="forward")
        solved = factorized.eigensolve(ham, n_eigenvalues=1)
        rel_errors.append((solved.eigenvalues[0] - target) / target)
    checks.append(gated_check(
        "model ground energy approaches the closed form",
        "lam_0 within 2 percent of the closed-form energy at the finest "
        "grid, from below",
        residual=abs(rel_errors[-1]), tolerance=2e-2,
        details={"rel_errors": rel_errors, "target": target}))
    checks.append(_monotone_gate(
        "model ground energy error decreases",
        "magnitude of the relative energy error decreases along the ladder",
        [abs(e) for e in rel_errors]))

    rng = np.random.Generator(np.random.Philox(seed))
    worst = 0.0
    for _ in range(25):
        pos = jastrow.random_admissible(state, rng)
        worst = max(worst, float(np.abs(
            jastrow.dunkl_apply(state, pos)).max()))
    checks.append(gated_check(
        "drift kernel matches the analytic drift",
        "kernel-accumulated drift equals grad log psi at random "
        "configurations", residual=worst, tolerance=1e-10))

    ground = factorized.groundstate_check(spec)
    checks.append(_psd_gate("inverse-square positivity", ground))
    checks.append(_annihilation_record(
        "inverse-square ground-state annihilation", ground, gate=True))
    return SuiteResult("cms", checks, convergence=[record])


def run_delta_gas(params, seed):
    grid_sizes = _take(params, "grid_sizes", (16, 32, 64), _grid_ladder)
    length = _take(params, "length", 1.0, float)
    beta = _take(params, "beta", 1.0, float)
    particle_count = _take(params, "particle_count", 2, int)
    threshold = _take(params, "order_threshold", 1.0, float)
    _finish_params("delta-gas", params)

    variant = factorized.DeltaGas(beta)
    base_grid = LatticeGrid.from_length(grid_sizes[0], length)
    spec = factorized.ModelSpec(variant, base_grid, particle_count)
    derived, elapsed = _timed(lambda: factorized.check_equivalence(
        spec, grid_sizes=grid_sizes))
    order_check = _order_gate(
        "contact equivalence order (derived counterterm)", derived,
        threshold)
    order_check.wall_time = elapsed
    checks = [order_check]

    npart = particle_count
    cubic = factorized.check_equivalence(
        spec, grid_sizes=grid_sizes,
        shift_override=beta ** 2 * npart ** 3 / 3)
    checks.append(recorded_check(
        "contact equivalence with cubic-in-N shift",
        "the N^3/3 shift leaves a plateau instead of a convergent ladder",
        residual=cubic.residuals[-1], order=cubic.fitted_order,
        details={"residuals": list(cubic.residuals),
                 "spacings": list(cubic.spacings)}))

    sector = build_sector(base_grid, particle_count)
    zero_spec = factorized.ModelSpec(factorized.DeltaGas(0.0), base_grid,
                                     particle_count)
    free_gap = entrywise_max(
        factorized.hhat_matrix(sector, factorized.model_drift(zero_spec))
        - central_kinetic_gram(sector))
    checks.append(gated_check(
        "zero-coupling reduction",
        "beta = 0 factorized form equals the central kinetic Gram "
        "entrywise", residual=free_gap, tolerance=1e-13))
    model_gap = entrywise_max(
        factorized.model_hamiltonian(zero_spec, kinetic="forward")
        - 2.0 * kinetic_matrix(sector))
    checks.append(gated_check(
        "zero-coupling model reduction",
        "beta = 0 model Hamiltonian is exactly twice the halved forward "
        "Gram", residual=model_gap, tolerance=1e-14))

    ground = factorized.groundstate_check(spec)
    checks.append(_psd_gate("contact positivity", ground))
    checks.append(_annihilation_record(
        "contact ground-state annihilation", ground, gate=False))
    return SuiteResult("delta-gas", checks, convergence=[derived, cubic])


def run_coulomb(params, seed):
    n_sites = _take(params, "n_sites", 64, int)
    length = _take(params, "length", 1.0, float)
    alpha = _take(params, "alpha", 1.0, float)
    epsilons = _take(params, "epsilons", (0.2, 0.1, 0.05), _float_list)
    particle_count = _take(params, "particle_count", 2, int)
    _finish_params("coulomb", params)

    checks = []
    rng = np.random.Generator(np.random.Philox(seed))
    fd_worst = 0.0
    for eps in epsilons:
        kernel = factorized.CoulombS(alpha, eps)
        for u in np.concatenate([rng.uniform(0.2, 1.5, 8),
                                 -rng.uniform(0.2, 1.5, 8)]):
            step = 1e-6
            fd = (factorized.kernel_eval(kernel, u + step, 0.0)
                  - factorized.kernel_eval(kernel, u - step, 0.0)) / (2 * step)
            expected = alpha * abs(u) ** (eps - 1)
            fd_worst = max(fd_worst, abs(fd - expected) / abs(expected))
    checks.append(gated_check(
        "drift kernel derivative identity",
        "d/du of the odd power-law drift equals alpha |u|^(epsilon-1)",
        residual=fd_worst, tolerance=1e-6))

    grid = LatticeGrid.from_length(n_sites, length)
    spec = factorized.ModelSpec(factorized.CoulombType(alpha, epsilons[0]),
                                grid, particle_count)
    record, elapsed = _timed(lambda: factorized.check_equivalence(
        spec, epsilons=epsilons))
    mono = _monotone_gate(
        "regulator ladder decreases",
        "equivalence residual relative to the factorized scale decreases "
        "as the regulator closes", record.residuals)
    mono.wall_time = elapsed
    checks.append(mono)
    checks.append(recorded_check(
        "regulator ladder absolute residuals",
        "absolute equivalence defect grows with the diverging counterterm",
        residual=record.details["absolute"][-1],
        details={"absolute": list(record.details["absolute"]),
                 "epsilons": list(record.spacings)}))

    worst = 0.0
    for size in (3, 4, 5):
        for _ in range(10):
            pts = rng.uniform(0.0, length, size)
            while np.abs(np.subtract.outer(pts, pts)
                         + np.eye(size)).min() < 1e-3:
                pts = rng.uniform(0.0, length, size)
            worst = max(worst, factorized.coulomb_drift_square_identity(
                alpha, epsilons[-1], pts))
    checks.append(gated_check(
        "ternary cross-term identity",
        "squared drift sum splits into pair and symmetrized triple parts",
        residual=worst, tolerance=1e-12))

    ground = factorized.groundstate_check(spec)
    checks.append(_psd_gate("power-law positivity", ground))
    checks.append(_annihilation_record(
        "power-law ground-state annihilation", ground, gate=False))
    return SuiteResult("coulomb", checks, convergence=[record])


def run_hierarchy(params, seed):
    n_sites = _take(params, "n_sites", 6, int)
    length = _take(params, "length", 1.0, float)
    beta = _take(params, "beta", 1.0, float)
    particle_count = _take(params, "particle_count", 3, int)
    powers = _take(params, "powers", (1, 2, 3), _int_list)
    _finish_params("hierarchy", params)

    grid = LatticeGrid.from_length(n_sites, length)
    sector = build_sector(grid, particle_count)
    spec = factorized.ModelSpec(factorized.DeltaGas(beta), grid,
                                particle_count)
    drift = factorized.model_drift(spec)

    checks = []
    base = factorized.hhat_matrix(sector, drift)
    first = factorized.hierarchy_matrix(sector, drift, 1)
    checks.append(gated_check(
        "first member equals the Gram form",
        "power-1 hierarchy member reproduces the factorized Hamiltonian",
        residual=entrywise_max(first - base), tolerance=1e-13))

    number = number_operator(sector)
    herm_worst = 0.0
    comm_worst = 0.0
    members = {}
    for p in powers:
        member = factorized.hierarchy_matrix(sector, drift, p)
        members[p] = member
        herm_worst = max(herm_worst, entrywise_max(member - member.getH()))
        scale = max(entrywise_max(member), 1.0)
        comm_worst = max(comm_worst, entrywise_max(
            member @ number - number @ member) / scale)
    checks.append(gated_check(
        "members are Hermitian",
        "each hierarchy member equals its adjoint entrywise",
        residual=herm_worst, tolerance=1e-13))
    checks.append(gated_check(
        "members conserve particle number",
        "[H^(p), N] = 0 for every assembled member",
        residual=comm_worst, tolerance=1e-12))

    summary, elapsed = _timed(lambda: factorized.check_hierarchy_commutation(
        sector, drift, powers=powers))
    checks.append(gated_check(
        "same-site commutators vanish",
        "[M_i, M_i] = 0 exactly", residual=summary["same_site_rel_max"],
        tolerance=1e-14, wall_time=elapsed))
    worst_global = max(summary["global_rel"].values())
    checks.append(recorded_check(
        "global member commutators",
        "relative [H^(p), H^(q)] magnitudes at this spacing",
        residual=worst_global, details=summary["global_rel"]))
    checks.append(recorded_check(
        "far-pair local commutators",
        "relative [M_i, M_j] over periodic site distance > 2",
        residual=summary["far_pair_rel_max"],
        details={"adjacent": summary["adjacent_pair_rel_max"]}))
    return SuiteResult("hierarchy", checks)


def run_jastrow(params, seed):
    configs = _take(params, "configurations", 100, int)
    _finish_params("jastrow", params)
    rng = np.random.Generator(np.random.Philox(seed))
    checks = []

    worst = 0.0
    for npart, beta, length in ((2, 1.0, math.pi), (3, 2.0, 2 * math.pi),
                                (5, 0.5, 1.0)):
        state = jastrow.SutherlandGround(beta, length, npart)
        target = jastrow.groundstate_energy(state)
        for _ in range(configs):
            pos = jastrow.random_admissible(state, rng)
            value = jastrow.local_energy(state, pos)
            worst = max(worst, abs(value - target) / abs(target))
    checks.append(gated_check(
        "periodic gas local energy is constant",
        "local energy equals the closed-form energy at random admissible "
        "configurations", residual=worst, tolerance=1e-9))

    state = jastrow.SutherlandGround(2.0, 1.0, 3)
    dunkl_worst = max(float(np.abs(jastrow.dunkl_apply(
        state, jastrow.random_admissible(state, rng))).max())
        for _ in range(25))
    checks.append(gated_check(
        "covariant annihilation of the periodic ground state",
        "analytic drift equals the kernel-accumulated drift",
        residual=dunkl_worst, tolerance=1e-10))

    rational_worst = 0.0
    for npart in (2, 3, 4):
        rational = jastrow.RationalGround(1.5, npart)
        for _ in range(configs // 2):
            pos = jastrow.random_admissible(rational, rng)
            scale = max(1.0, abs(jastrow.potential(rational, pos)))
            rational_worst = max(rational_worst, abs(
                jastrow.local_energy(rational, pos)) / scale)
    checks.append(gated_check(
        "line gas local energy vanishes",
        "inverse-square pair state on the line has identically zero local "
        "energy, measured against the potential scale",
        residual=rational_worst, tolerance=1e-11))

    fd_drift = fd_lap = 0.0
    for family in (jastrow.SutherlandGround(1.5, 2.0, 3),
                   jastrow.RationalGround(1.2, 3),
                   jastrow.OscillatorGround([[2.0, 0.3], [0.3, 1.0]], 2)):
        pos = jastrow.random_admissible(family, rng)
        fd_drift = max(fd_drift, jastrow.finite_diff_drift_check(family, pos))
        fd_lap = max(fd_lap, jastrow.finite_diff_laplacian_check(family, pos))
    checks.append(gated_check(
        "drift matches finite differences",
        "analytic gradient of log psi within 1e-6 of central differences",
        residual=fd_drift, tolerance=1e-6))
    checks.append(gated_check(
        "curvature matches finite differences",
        "analytic Laplacian of log psi within 1e-5 of five-point "
        "differences", residual=fd_lap, tolerance=1e-5))

    doubled = jastrow.SutherlandGround(2.0, 2.0, 3)
    halved_base = jastrow.SutherlandGround(2.0, 1.0, 3)
    homogeneity = abs(jastrow.groundstate_energy(doubled)
                      - jastrow.groundstate_energy(halved_base) / 4) \
        / jastrow.groundstate_energy(halved_base)
    checks.append(gated_check(
        "energy scales as inverse length squared",
        "doubling the circle quarters the closed-form energy",
        residual=homogeneity, tolerance=1e-14))

    npart = 10_000
    beta = 1.0
    length = (math.pi * beta) ** (2.0 / 3.0) * npart
    big = jastrow.SutherlandGround(beta, length, npart)
    rho_bar = jastrow.thermodynamic_density(beta, npart, length)
    limit = jastrow.thermodynamic_energy_density(rho_bar)
    finite = jastrow.energy_density(big)
    checks.append(gated_check(
        "energy density approaches the cubic law",
        "E/length -> rho_bar^3 / 3 with a 1/N^2 finite-size defect",
        residual=abs(finite - limit) / limit, tolerance=1e-4,
        details={"rho_bar": rho_bar, "defect": 1.0 / npart ** 2}))
    return SuiteResult("jastrow", checks)


def run_poisson_functional(params, seed):
    intensity = _take(params, "intensity", 1.3, float)
    box_low = _take(params, "box_low", 0.0, float)
    box_high = _take(params, "box_high", 2.0, float)
    n_samples = _take(params, "n_samples", 100_000, int)
    params.pop("draws", None)
    _finish_params("poisson-functional", params)
    if intensity <= 0:
        raise ConfigError("intensity must be positive")
    if box_high <= box_low:
        raise ConfigError("box_high must exceed box_low")

    ensemble = measure.PoissonEnsemble(intensity, (box_low, box_high), seed)
    span = box_high - box_low
    xs = np.linspace(box_low, box_high, 129)

    def grid_of(fn):
        return measure.TestFunctionGrid(xs, fn(xs))

    functions = {
        "sine": grid_of(lambda x: np.sin(2 * np.pi * (x - box_low) / span)),
        "constant pi": grid_of(lambda x: np.full_like(x, math.pi)),
        "ramp": grid_of(lambda x: 0.8 * (x - box_low) / span),
        "gaussian bump": grid_of(lambda x: 1.5 * np.exp(
            -((x - box_low - 0.5 * span) / (0.15 * span)) ** 2)),
        "two lobes": grid_of(lambda x: 0.6 * np.sin(
            4 * np.pi * (x - box_low) / span) + 0.4),
    }

    checks = []
    zero = grid_of(lambda x: np.zeros_like(x))
    l_zero = measure.characteristic_functional_mc(ensemble, zero,
                                                  n_samples=n_samples)
    checks.append(gated_check(
        "functional at zero",
        "L(0) = 1 exactly (no sampling noise enters)",
        residual=abs(l_zero.mean - 1.0), tolerance=0.0))

    worst_sigma = 0.0
    worst_modulus = 0.0
    per_function = {}
    for name, fn in functions.items():
        closed = measure.poisson_closed_form(ensemble, fn)
        estimate = measure.characteristic_functional_mc(
            ensemble, fn, n_samples=n_samples)
        pull = abs(estimate.mean - closed) / max(3 * estimate.std_error,
                                                 1e-300)
        worst_sigma = max(worst_sigma, pull)
        worst_modulus = max(worst_modulus, abs(closed) - 1.0,
                            abs(estimate.mean) - 1.0)
        per_function[name] = {"closed": closed, "mc": estimate.mean,
                              "std_error": estimate.std_error}
    checks.append(gated_check(
        "sampled functional matches the closed form",
        "Monte Carlo L(f) within three standard errors of the closed form "
        "for every test function",
        residual=worst_sigma, tolerance=1.0,
        details=per_function))
    checks.append(gated_check(
        "functional stays inside the unit disc",
        "|L(f)| <= 1 for every test function",
        residual=worst_modulus, tolerance=1e-12))

    moment_fn = functions["gaussian bump"]
    worst_moment = 0.0
    moment_details = {}
    for order in (1, 2, 3, 4):
        estimate = measure.normal_ordered_moment_mc(
            ensemble, moment_fn, order, n_samples=n_samples)
        expected = measure.factorial_moment_closed_form(
            ensemble, moment_fn, order)
        pull = abs(estimate.mean - expected) / max(3 * estimate.std_error,
                                                   1e-300)
        worst_moment = max(worst_moment, pull)
        moment_details[str(order)] = {
            "mc": estimate.mean.real, "expected": expected,
            "std_error": estimate.std_error}
    checks.append(gated_check(
        "factorial moments match the power law",
        "order-n ordered moments within three standard errors of "
        "(intensity * integral f)^n for n <= 4",
        residual=worst_moment, tolerance=1.0, details=moment_details))

    gram_fns = [functions["sine"], functions["ramp"],
                functions["gaussian bump"], functions["two lobes"], zero]
    closed_gram = measure.positive_definiteness_check(ensemble, gram_fns,
                                                      method="closed")
    checks.append(gated_check(
        "closed-form Gram positivity",
        "smallest eigenvalue of L(f_j - f_k) stays above -1e-9",
        residual=-closed_gram["lam_min"], tolerance=1e-9))
    mc_gram = measure.positive_definiteness_check(
        ensemble, gram_fns, method="mc", n_samples=max(2000, n_samples // 5))
    checks.append(gated_check(
        "sampled Gram positivity",
        "smallest eigenvalue of the sampled Gram stays above five standard "
        "errors", residual=-mc_gram["lam_min"],
        tolerance=5 * mc_gram["max_std_error"]))

    base = measure.oscillator_matrix_element(1.0)
    expected = math.sqrt(math.pi) / (2 * math.pi)
    checks.append(gated_check(
        "Gaussian quadrature normalization",
        "flat-phase matrix element equals sqrt(pi) / (2 pi) at unit "
        "frequency", residual=abs(base - expected) / expected,
        tolerance=1e-10))
    k1, k2 = 0.7, -0.3
    shifted = measure.oscillator_matrix_element(
        1.0, lambda x: k1 * x, lambda x: k2 * x)
    target = math.exp(-(k1 + k2) ** 2 / 4) * math.sqrt(math.pi) \
        / (2 * math.pi)
    checks.append(gated_check(
        "Gaussian quadrature with linear phases",
        "linear phases produce the shifted Gaussian closed form",
        residual=abs(shifted - target) / target, tolerance=1e-10))
    return SuiteResult("poisson-functional", checks)


SUITES = {
    "current-algebra": run_current_algebra,
    "normal-ordering": run_normal_ordering,
    "oscillatory": run_oscillatory,
    "generalized-oscillatory": run_generalized_oscillatory,
    "cms": run_cms,
    "delta-gas": run_delta_gas,
    "coulomb": run_coulomb,
    "hierarchy": run_hierarchy,
    "jastrow": run_jastrow,
    "poisson-functional": run_poisson_functional,
}


def run_suite(name, params=None, seed=0):
    """Run one registered suite on a copy of the given parameters."""
    if name not in SUITES:
        raise ConfigError("unknown suite %r; registered suites: %s"
                          % (name, ", ".join(sorted(SUITES))))
    return SUITES[name](dict(params or {}), seed)
