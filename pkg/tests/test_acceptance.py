"""Acceptance gate: one test per contract criterion.

Each test prints a single verdict line ``acceptance NN <label>: PASS/FAIL``
followed by supporting measurements, then asserts the verdict. Three
criteria are known to fail and are kept failing on purpose, with the
measured magnitudes printed in full:

* 04: the cubic-in-N counterterm for the contact gas leaves a plateau
  instead of a convergent equivalence ladder (the occupancy-derived
  counterterm does converge, order about 1.7, printed for contrast);
* 05: hierarchy commutators for the step-drift kernel are of order 1e-2
  at n = 6 and do not approach the 1e-9/1e-10 bounds, and the
  adjacent-pair residuals grow rather than converge under refinement;
* 06: the dense ground vectors of the step-drift and linear-pair-drift
  Hamiltonians are not annihilated by the factorizing operators at desk
  spacings (residuals 0.89 and 0.34 against thresholds of order 1e-4);
  the trap, the free gas, and the periodic inverse-square gas do pass
  the same clause.

Weakening tolerances until these pass would hide real, reproducible
finite-spacing behavior, so they stay red.
"""

import math

import numpy as np

from fockfactor.lattice import (LatticeGrid, build_sector, kinetic_matrix,
                                number_operator, permanent, permanent_naive,
                                symmetrized_inner,
                                symmetrized_inner_bruteforce)
from fockfactor import algebra, factorized as fz, jastrow as jw, measure as ms
from fockfactor.algebra import entrywise_max


def _verdict(num, label, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    suffix = " (%s)" % detail if detail else ""
    print("acceptance %02d %s: %s%s" % (num, label, status, suffix))
    return ok


def test_01_exact_lattice_identities():
    worst = 0.0
    for n_sites in (4, 6, 8):
        sector = build_sector(LatticeGrid.from_length(n_sites, 1.0), 3)
        worst = max(worst,
                    algebra.canonical_commutator_residual(sector),
                    algebra.density_commutation_residual(sector),
                    algebra.ladder_density_residual(sector),
                    algebra.k_stencil_residual(sector),
                    algebra.k_decomposition_residual(sector),
                    max(algebra.check_normal_ordering(sector).values()))

    grid = LatticeGrid.from_length(8, 1.0)
    sector = build_sector(grid, 2)
    total = number_operator(sector)
    variants = [fz.Oscillatory(1.0), fz.GeneralizedOscillatory(0.8),
                fz.CalogeroSutherland(2.0), fz.DeltaGas(1.0),
                fz.CoulombType(1.0, 0.2)]
    for variant in variants:
        spec = fz.ModelSpec(variant, grid, 2)
        drift = fz.model_drift(spec)
        assembled = [fz.factorized_hamiltonian(spec),
                     fz.model_hamiltonian(spec, kinetic="forward"),
                     fz.model_hamiltonian(spec, kinetic="central"),
                     fz.hierarchy_matrix(sector, drift, 2)]
        for ham in assembled:
            scale = max(entrywise_max(ham), 1.0)
            worst = max(worst, entrywise_max(
                ham @ total - total @ ham) / scale)

    ok = worst <= 1e-12
    assert _verdict(1, "exact lattice identities", ok,
                    "worst residual %.2e vs 1e-12" % worst)


def test_02_closed_form_pair_state_energy():
    worst_rel = 0.0
    worst_dunkl = 0.0
    rng = np.random.Generator(np.random.Philox(2024))
    for particles, beta, length in ((2, 1.0, math.pi), (3, 2.0, 2 * math.pi),
                                    (5, 0.5, 1.0)):
        state = jw.SutherlandGround(beta, length, particles)
        target = jw.groundstate_energy(state)
        for _ in range(100):
            pos = jw.random_admissible(state, rng)
            value = jw.local_energy(state, pos)
            worst_rel = max(worst_rel, abs(value - target) / target)
            worst_dunkl = max(worst_dunkl, float(np.abs(
                jw.dunkl_apply(state, pos)).max()))
    ok = worst_rel <= 1e-9 and worst_dunkl <= 1e-10
    assert _verdict(2, "closed-form pair-state energy", ok,
                    "local rel %.2e vs 1e-9, annihilation %.2e vs 1e-10"
                    % (worst_rel, worst_dunkl))


def test_03_trap_ground_energy():
    errors = []
    for n in (32, 64, 128):
        grid = LatticeGrid.from_length(n, 20.0)
        spec = fz.ModelSpec(fz.Oscillatory(1.0), grid, 1)
        ham = fz.model_hamiltonian(spec, kinetic="forward")
        errors.append(abs(fz.eigensolve(ham, n_eigenvalues=1).eigenvalues[0]
                          - 0.5))
    ladder_ok = errors[-1] <= 1e-2 and all(
        b < a for a, b in zip(errors, errors[1:]))

    rng = np.random.Generator(np.random.Philox(33))
    worst_local = 0.0
    for particles in (1, 2, 3, 4):
        for ndim in (1, 2):
            base = rng.uniform(0.5, 1.5, (ndim, ndim))
            omega = base @ base.T + ndim * np.eye(ndim)
            state = jw.OscillatorGround(omega, particles)
            expected = particles / 2.0 * np.trace(omega)
            for _ in range(25):
                pos = jw.random_admissible(state, rng)
                worst_local = max(worst_local, abs(
                    jw.local_energy(state, pos) - expected) / expected)
    local_ok = worst_local <= 1e-10

    ok = ladder_ok and local_ok
    assert _verdict(3, "trap ground energy", ok,
                    "errors %s, local rel %.2e"
                    % (["%.2e" % e for e in errors], worst_local))


def test_04_factorized_equivalences():
    particles = 2
    grid = LatticeGrid.from_length(16, 1.0)
    sizes = (16, 32, 64)

    gen = fz.check_equivalence(
        fz.ModelSpec(fz.GeneralizedOscillatory(0.8), grid, particles),
        grid_sizes=sizes)
    cms = fz.check_equivalence(
        fz.ModelSpec(fz.CalogeroSutherland(2.0), grid, particles),
        grid_sizes=sizes)
    spec_delta = fz.ModelSpec(fz.DeltaGas(1.0), grid, particles)
    stated_shift = 1.0 ** 2 * particles ** 3 / 3
    delta_stated = fz.check_equivalence(spec_delta, grid_sizes=sizes,
                                        shift_override=stated_shift)
    zero = fz.check_equivalence(
        fz.ModelSpec(fz.GeneralizedOscillatory(0.0), grid, particles),
        grid_sizes=sizes)
    zero_exact = all(r == 0.0 for r in zero.residuals)

    ok = (gen.fitted_order >= 1.0 and cms.fitted_order >= 1.0
          and delta_stated.fitted_order >= 1.0 and zero_exact)
    verdict = _verdict(
        4, "factorized equivalences", ok,
        "pair-trap order %.2f, inverse-square order %.2f, contact order "
        "%.2f with the stated cubic shift, zero-coupling exact %s"
        % (gen.fitted_order, cms.fitted_order, delta_stated.fitted_order,
           zero_exact))
    if not ok:
        print("  contact ladder with shift +b^2 N^3/3 = %+.4f: %s "
              "(plateau, fitted order %.2f)"
              % (stated_shift, ["%.3e" % r for r in delta_stated.residuals],
                 delta_stated.fitted_order))
        flipped = fz.check_equivalence(spec_delta, grid_sizes=sizes,
                                       shift_override=-stated_shift)
        print("  sign-flipped shift %+.4f: %s (fitted order %.2f)"
              % (-stated_shift, ["%.3e" % r for r in flipped.residuals],
                 flipped.fitted_order))
        derived = fz.check_equivalence(spec_delta, grid_sizes=sizes)
        print("  occupancy-derived counterterm %s: %s (fitted order "
              "%.2f, converges)"
              % (["%+.4f" % s for s in derived.details["shifts"]],
                 ["%.3e" % r for r in derived.residuals],
                 derived.fitted_order))
        print("  the stated cubic shift misses the finite-spacing "
              "self-interaction and pair-ordering corrections that the "
              "derived counterterm carries; the defect saturates near "
              "%.2e instead of vanishing" % delta_stated.residuals[-1])
    assert verdict


def test_05_commuting_hierarchy():
    grid = LatticeGrid.from_length(6, 1.0)
    sector = build_sector(grid, 3)
    spec = fz.ModelSpec(fz.DeltaGas(1.0), grid, 3)
    drift = fz.model_drift(spec)
    summary = fz.check_hierarchy_commutation(sector, drift)

    global_worst = max(summary["global_rel"].values())
    far_worst = summary["far_pair_rel_max"]
    global_ok = global_worst <= 1e-9
    far_ok = far_worst <= 1e-10

    # adjacent-pair weak residuals under refinement (recorded clause)
    spacings, residuals = [], []
    for n in (8, 16, 32):
        fine = LatticeGrid.from_length(n, 1.0)
        fine_sector = build_sector(fine, 2)
        fine_drift = fz.model_drift(fz.ModelSpec(fz.DeltaGas(1.0), fine, 2))
        i0 = n // 2
        m1 = fz.c_operator(fine_sector, i0, fine_drift)
        m1 = (m1.getH() @ m1).tocsr()
        m2 = fz.c_operator(fine_sector, i0 + 1, fine_drift)
        m2 = (m2.getH() @ m2).tocsr()
        bracket = (m1 @ m2 - m2 @ m1).toarray()
        product = (m1 @ m2).toarray()
        probes = algebra.probe_pairs_raw(fine_sector)
        num = max(abs(np.vdot(a, bracket @ b)) for a, b in probes)
        den = max(abs(np.vdot(a, product @ b)) for a, b in probes)
        spacings.append(fine.spacing)
        residuals.append(num / max(den, 1e-300))
    adjacent_order = algebra.fit_order(spacings, residuals)
    adjacent_ok = adjacent_order > 0.5

    ok = global_ok and far_ok and adjacent_ok
    verdict = _verdict(
        5, "commuting hierarchy", ok,
        "global %.2e vs 1e-9, far-pair %.2e vs 1e-10, adjacent order %.2f"
        % (global_worst, far_worst, adjacent_order))
    if not ok:
        print("  global member commutators (relative):")
        for key, value in sorted(summary["global_rel"].items()):
            print("    powers (%s): %.3e" % (key, value))
        table = summary["local_rel_table"]
        print("  far site pairs at n=6: (0,3) %.3e  (1,4) %.3e  (2,5) %.3e"
              % (table[0, 3], table[1, 4], table[2, 5]))
        print("  same-site commutators are exactly %.1e; the step drift "
              "breaks translation invariance, so one far pair vanishes "
              "while the rest stay at the 1e-2 scale"
              % summary["same_site_rel_max"])
        print("  adjacent weak residuals under refinement: %s "
              "(fitted order %.2f; the residual grows as the grid is "
              "refined, so the recorded clause cannot certify convergence)"
              % (["%.3e" % r for r in residuals], adjacent_order))
        print("  conclusion: the commuting-family property does not hold "
              "for the lattice-regularized step drift at these spacings "
              "and tolerances; the measured sizes miss the bounds by at "
              "least seven orders of magnitude")
    assert verdict


def test_06_positivity_and_groundstate():
    roster = [
        ("trap n=128", fz.ModelSpec(fz.Oscillatory(1.0),
                                    LatticeGrid.from_length(128, 20.0), 1)),
        ("free gas n=12", fz.ModelSpec(fz.DeltaGas(0.0),
                                       LatticeGrid.from_length(12, 1.0), 2)),
        ("inverse-square n=16", fz.ModelSpec(
            fz.CalogeroSutherland(2.0), LatticeGrid.from_length(16, 1.0), 2)),
        ("inverse-square n=32", fz.ModelSpec(
            fz.CalogeroSutherland(2.0), LatticeGrid.from_length(32, 1.0), 2)),
        ("contact n=12", fz.ModelSpec(fz.DeltaGas(1.0),
                                      LatticeGrid.from_length(12, 1.0), 2)),
        ("pair-trap n=16", fz.ModelSpec(
            fz.GeneralizedOscillatory(0.8), LatticeGrid.from_length(16, 1.0),
            2)),
        ("power-law n=64", fz.ModelSpec(
            fz.CoulombType(1.0, 0.2), LatticeGrid.from_length(64, 1.0), 2)),
    ]
    rows = []
    psd_ok = True
    ann_ok = True
    for label, spec in roster:
        g = fz.groundstate_check(spec)
        psd_ok = psd_ok and g.psd_ok
        if g.annihilation_max is not None and not g.annihilation_ok:
            ann_ok = False
        rows.append((label, g))

    ok = psd_ok and ann_ok
    verdict = _verdict(
        6, "positivity and ground-state annihilation", ok,
        "positivity %s, annihilation clause %s"
        % ("holds on all %d operators" % len(rows) if psd_ok else "FAILS",
           "holds" if ann_ok else "fails on dense-solvable operators"))
    if not ok:
        print("  per-operator clause-2 roster (max_i |C_i ground| vs "
              "1e-5 |H|^(1/2)):")
        for label, g in rows:
            if g.annihilation_max is None:
                print("    %-22s dim %5d  lam_min %+.2e  clause 2 not "
                      "certified (above the dense cutoff)"
                      % (label, g.dimension, g.lam_min))
            else:
                print("    %-22s dim %5d  lam_min %+.2e  residual %.3e  "
                      "threshold %.3e  %s"
                      % (label, g.dimension, g.lam_min, g.annihilation_max,
                         g.annihilation_threshold,
                         "ok" if g.annihilation_ok else "FAIL"))
        print("  the step-drift and linear-pair-drift ground vectors are "
              "strictly positive-energy at these spacings (lam_min 0.48 "
              "and 0.05); their factorizing operators do not annihilate "
              "any lattice vector, so the clause fails by design of the "
              "discretization, not by solver error")
    assert verdict


def test_07_power_law_regulator():
    worst_fd = 0.0
    for eps in (0.05, 0.1, 0.2):
        kernel = fz.CoulombS(1.0, eps)
        for u in (-1.4, -0.8, -0.33, 0.27, 0.61, 1.2):
            step = 1e-6
            fd = (fz.kernel_eval(kernel, u + step, 0.0)
                  - fz.kernel_eval(kernel, u - step, 0.0)) / (2 * step)
            expected = abs(u) ** (eps - 1)
            worst_fd = max(worst_fd, abs(fd - expected) / expected)
    fd_ok = worst_fd <= 1e-6

    grid = LatticeGrid.from_length(64, 1.0)
    spec = fz.ModelSpec(fz.CoulombType(1.0, 0.2), grid, 2)
    record = fz.check_equivalence(spec, epsilons=(0.2, 0.1, 0.05))
    monotone = all(b < a for a, b in
                   zip(record.residuals, record.residuals[1:]))

    ok = fd_ok and monotone
    assert _verdict(7, "power-law regulator", ok,
                    "derivative identity %.2e vs 1e-6, ladder %s"
                    % (worst_fd, ["%.3e" % r for r in record.residuals]))


def test_08_permanent_correctness():
    rng = np.random.Generator(np.random.Philox(88))
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 7))
        mat = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        fast = permanent(mat)
        slow = permanent_naive(mat)
        worst = max(worst, abs(fast - slow) / max(abs(slow), 1.0))
    perm_ok = worst <= 1e-12

    sym_worst = 0.0
    for n in range(1, 6):
        alphas = [rng.standard_normal(3) + 1j * rng.standard_normal(3)
                  for _ in range(n)]
        betas = [rng.standard_normal(3) + 1j * rng.standard_normal(3)
                 for _ in range(n)]
        fast = symmetrized_inner(alphas, betas)
        slow = symmetrized_inner_bruteforce(alphas, betas)
        sym_worst = max(sym_worst, abs(fast - slow) / max(abs(slow), 1.0))
    sym_ok = sym_worst <= 1e-10

    ok = perm_ok and sym_ok
    assert _verdict(8, "permanent correctness", ok,
                    "vs naive %.2e, symmetrized vs brute force %.2e"
                    % (worst, sym_worst))


def test_09_point_process_functional():
    ensemble = ms.PoissonEnsemble(1.3, (0.0, 2.0), 7)
    xs = np.linspace(0.0, 2.0, 129)

    def grid_fn(values):
        return ms.TestFunctionGrid(xs, values)

    functions = [grid_fn(np.sin(np.pi * xs)),
                 grid_fn(np.full_like(xs, 0.9)),
                 grid_fn(0.8 * xs / 2),
                 grid_fn(1.5 * np.exp(-((xs - 1.0) / 0.3) ** 2)),
                 grid_fn(0.6 * np.sin(2 * np.pi * xs) + 0.4)]

    worst_pull = 0.0
    for fn in functions:
        closed = ms.poisson_closed_form(ensemble, fn)
        estimate = ms.characteristic_functional_mc(ensemble, fn,
                                                   n_samples=100_000)
        worst_pull = max(worst_pull,
                         abs(estimate.mean - closed) / estimate.std_error)
    mc_ok = worst_pull <= 3.0

    zero = grid_fn(np.zeros_like(xs))
    zero_ok = ms.characteristic_functional_mc(
        ensemble, zero, n_samples=1000).mean == 1.0 + 0.0j

    bump = functions[3]
    worst_moment = 0.0
    for order in (1, 2, 3, 4):
        estimate = ms.normal_ordered_moment_mc(ensemble, bump, order,
                                               n_samples=60_000)
        expected = ms.factorial_moment_closed_form(ensemble, bump, order)
        worst_moment = max(worst_moment,
                           abs(estimate.mean - expected) / estimate.std_error)
    moments_ok = worst_moment <= 3.0

    gram = ms.positive_definiteness_check(ensemble, functions + [zero],
                                          method="closed")
    gram_ok = gram["lam_min"] >= -1e-9

    ok = mc_ok and zero_ok and moments_ok and gram_ok
    assert _verdict(
        9, "point-process functional", ok,
        "worst pull %.2f sigma, L(0)=1 %s, moments %.2f sigma, Gram "
        "lam_min %.2e" % (worst_pull, zero_ok, worst_moment,
                          gram["lam_min"]))


def test_10_thermodynamic_limit():
    particles = 10_000
    beta = 1.0
    length = (math.pi * beta) ** (2.0 / 3.0) * particles
    rho_bar = jw.thermodynamic_density(beta, particles, length)
    limit = jw.thermodynamic_energy_density(rho_bar)
    finite = jw.energy_density(jw.SutherlandGround(beta, length, particles))
    rel = abs(finite - limit) / limit
    ok = rel <= 1e-4 and abs(rho_bar - 1.0) < 1e-12
    assert _verdict(10, "thermodynamic limit", ok,
                    "rel error %.2e vs 1e-4 at rho_bar = 1" % rel)
