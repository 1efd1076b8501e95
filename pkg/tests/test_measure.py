import math

import numpy as np
import pytest

from fockfactor.errors import (CapacityError, DomainError, IterationError,
                               ShapeError)
from fockfactor import measure as ms


BOX = (0.0, 2.0)
XS = np.linspace(BOX[0], BOX[1], 129)


def _ensemble(seed=7, intensity=1.3):
    return ms.PoissonEnsemble(intensity, BOX, seed)


def _grid(values):
    return ms.TestFunctionGrid(XS, values)


def test_sampling_is_deterministic():
    first = ms.sample_configuration(_ensemble(3), draws=20)
    second = ms.sample_configuration(_ensemble(3), draws=20)
    assert len(first) == len(second) == 20
    for a, b in zip(first, second):
        assert np.array_equal(a, b)


def test_mean_count_matches_intensity():
    configs = ms.sample_configuration(_ensemble(1), draws=4000)
    counts = np.array([len(c) for c in configs])
    expected = 1.3 * (BOX[1] - BOX[0])
    assert counts.mean() == pytest.approx(expected, abs=4 * math.sqrt(
        expected / 4000))


def test_functional_at_zero_is_exactly_one():
    zero = _grid(np.zeros_like(XS))
    estimate = ms.characteristic_functional_mc(_ensemble(), zero,
                                               n_samples=2000)
    assert estimate.mean == 1.0 + 0.0j
    assert ms.poisson_closed_form(_ensemble(), zero) == 1.0 + 0.0j


def test_constant_function_closed_form():
    const = _grid(np.full_like(XS, math.pi))
    closed = ms.poisson_closed_form(_ensemble(intensity=1.3), const)
    # e^{i pi} = -1, so the integrand is -2 over the whole box
    assert closed == pytest.approx(math.exp(-2 * 1.3 * (BOX[1] - BOX[0])),
                                   rel=1e-12)


@pytest.mark.parametrize("label,values", [
    ("sine", np.sin(np.pi * XS)),
    ("ramp", 0.8 * XS / 2),
    ("bump", 1.5 * np.exp(-((XS - 1.0) / 0.3) ** 2)),
    ("lobes", 0.6 * np.sin(2 * np.pi * XS) + 0.4),
    ("constant", np.full_like(XS, 0.9)),
])
def test_mc_matches_closed_form(label, values):
    fn = _grid(values)
    ensemble = _ensemble(11)
    closed = ms.poisson_closed_form(ensemble, fn)
    estimate = ms.characteristic_functional_mc(ensemble, fn,
                                               n_samples=100_000)
    assert abs(closed) <= 1.0 + 1e-12
    assert estimate.consistent_with(closed)


def test_factorial_moments_match_power_law():
    fn = _grid(1.5 * np.exp(-((XS - 1.0) / 0.3) ** 2))
    ensemble = _ensemble(7)
    for order in (1, 2, 3, 4):
        estimate = ms.normal_ordered_moment_mc(ensemble, fn, order,
                                               n_samples=60_000)
        expected = ms.factorial_moment_closed_form(ensemble, fn, order)
        assert estimate.consistent_with(expected), order


def test_moment_order_cap():
    fn = _grid(np.sin(np.pi * XS))
    with pytest.raises(CapacityError):
        ms.normal_ordered_moment_mc(_ensemble(), fn, 5, n_samples=2000)
    with pytest.raises(ValueError):
        ms.factorial_moment_closed_form(_ensemble(), fn, 0)


def test_sample_count_floor():
    fn = _grid(np.sin(np.pi * XS))
    with pytest.raises(ValueError):
        ms.characteristic_functional_mc(_ensemble(), fn, n_samples=999)


def test_grid_validation():
    with pytest.raises(ValueError):
        ms.TestFunctionGrid(XS[:8], np.zeros(8))
    xs_bad = XS.copy()
    xs_bad[5] = xs_bad[4]
    with pytest.raises(ValueError):
        ms.TestFunctionGrid(xs_bad, np.zeros_like(xs_bad))
    with pytest.raises(ShapeError):
        ms.TestFunctionGrid(XS, np.zeros(64))


def test_grid_zero_outside_box():
    fn = ms.TestFunctionGrid(np.linspace(0.5, 1.5, 33),
                             np.ones(33))
    assert fn(np.array([0.2]))[0] == 0.0
    assert fn(np.array([1.7]))[0] == 0.0
    assert fn(np.array([1.0]))[0] == pytest.approx(1.0)


def test_refinement_is_linear_exact():
    fn = _grid(0.8 * XS / 2)
    refined = fn.refined()
    assert refined.xs.size == 2 * XS.size - 1
    closed_a = ms.poisson_closed_form(_ensemble(), fn)
    closed_b = ms.poisson_closed_form(_ensemble(), refined)
    assert closed_a == pytest.approx(closed_b, rel=1e-12)


def test_refinement_budget_exhaustion():
    fn = _grid(np.sin(np.pi * XS))
    with pytest.raises(IterationError):
        ms.poisson_closed_form(_ensemble(), fn, tol=0.0, max_refinements=3)


def test_function_box_must_fit_ensemble():
    wide = ms.TestFunctionGrid(np.linspace(-0.5, 2.5, 65), np.ones(65))
    with pytest.raises(DomainError):
        ms.poisson_closed_form(_ensemble(), wide)


def test_eta_pairing_domain():
    fn = ms.TestFunctionGrid(np.linspace(0.5, 1.5, 33), np.ones(33))
    assert ms.eta_pairing(fn, np.array([0.7, 1.2])) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        ms.eta_pairing(fn, np.array([0.2]))


def test_oscillator_matrix_element_closed_forms():
    flat = ms.oscillator_matrix_element(1.0)
    assert flat == pytest.approx(math.sqrt(math.pi) / (2 * math.pi),
                                 rel=1e-10)
    k1, k2 = 0.7, -0.3
    shifted = ms.oscillator_matrix_element(1.0, lambda x: k1 * x,
                                           lambda x: k2 * x)
    target = math.exp(-(k1 + k2) ** 2 / 4) * math.sqrt(math.pi) / (2 * math.pi)
    assert shifted == pytest.approx(target, rel=1e-10)
    diag = ms.oscillator_matrix_element(np.diag([1.0, 4.0]))
    target2 = math.sqrt(math.pi) * math.sqrt(math.pi / 4) / (2 * math.pi) ** 2
    assert diag == pytest.approx(target2, rel=1e-10)


def test_oscillator_matrix_element_guards():
    with pytest.raises(DomainError):
        ms.oscillator_matrix_element(np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(CapacityError):
        ms.oscillator_matrix_element(np.eye(3))


def test_positive_definiteness_closed_and_mc():
    fns = [_grid(np.sin(np.pi * XS)),
           _grid(0.8 * XS / 2),
           _grid(1.5 * np.exp(-((XS - 1.0) / 0.3) ** 2)),
           _grid(np.zeros_like(XS))]
    closed = ms.positive_definiteness_check(_ensemble(31), fns)
    assert closed["passed"]
    assert closed["lam_min"] > -1e-9
    sampled = ms.positive_definiteness_check(_ensemble(31), fns, method="mc",
                                             n_samples=20_000)
    assert sampled["passed"]


def test_positive_definiteness_guards():
    fn = _grid(np.sin(np.pi * XS))
    with pytest.raises(ValueError):
        ms.positive_definiteness_check(_ensemble(), [fn])
    with pytest.raises(CapacityError):
        ms.positive_definiteness_check(_ensemble(), [fn] * 13)
    other = ms.TestFunctionGrid(np.linspace(0.0, 2.0, 65), np.zeros(65))
    with pytest.raises(ShapeError):
        ms.positive_definiteness_check(_ensemble(), [fn, other])


def test_function_from_csv(tmp_path):
    path = tmp_path / "fn.csv"
    with open(path, "w") as handle:
        handle.write("x,f(x)\n")
        for x in np.linspace(0.25, 0.75, 21):
            handle.write("%.17g,%.17g\n" % (x, math.sin(x)))
    fn = ms.test_function_from_csv(path)
    assert fn.xs.size == 21
    assert fn(np.array([0.5]))[0] == pytest.approx(math.sin(0.5), rel=1e-6)
    assert fn(np.array([0.9]))[0] == 0.0
