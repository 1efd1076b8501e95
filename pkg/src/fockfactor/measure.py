"""Poisson point ensembles on an interval, sampled test functions, and
Monte Carlo estimators for the characteristic functional and its moments.

Reproducibility convention: every estimator builds a fresh counter-based
generator from the ensemble seed, so repeated calls with the same
ensemble return bit-identical results. The price is that different
estimators share the same position stream; for the positive-definiteness
check this is a feature (the Gram matrix is then a sum of rank-one
projectors and stays positive semi-definite by construction).

Test functions are piecewise-linear interpolants through sampled values
(TestFunctionGrid). Both the Monte Carlo and the closed-form sides
evaluate the same interpolant, so their comparison tests the estimator
rather than an interpolation gap. Outside its sample box a test function
is zero; direct pairing against positions outside the box is a domain
error instead, to catch accidental box mismatches early.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DomainError, IterationError, ShapeError

MOMENT_ORDER_CAP = 4
GRAM_SIZE_CAP = 12
MIN_TEST_SAMPLES = 16
MIN_MC_SAMPLES = 1000


@dataclass(frozen=True)
class PoissonEnsemble:
    """Homogeneous Poisson ensemble of the given intensity on box=(a, b)."""
    intensity: float
    box: tuple
    seed: int = 0

    def __post_init__(self):
        if self.intensity < 0:
            raise ValueError("intensity must be non-negative")
        a, b = self.box
        if not b > a:
            raise ValueError("box must satisfy a < b")

    def generator(self):
        """A fresh counter-based generator seeded by the ensemble."""
        return np.random.Generator(np.random.Philox(self.seed))


class TestFunctionGrid:
    """Sampled real test function: values on an ascending grid, evaluated
    as the piecewise-linear interpolant, zero outside the sample box."""

    def __init__(self, xs, values):
        xs = np.asarray(xs, dtype=float)
        values = np.asarray(values, dtype=float)
        if xs.ndim != 1 or xs.shape != values.shape:
            raise ShapeError("xs and values must be matching 1-d arrays")
        if xs.size < MIN_TEST_SAMPLES:
            raise ValueError("need at least %d samples, got %d"
                             % (MIN_TEST_SAMPLES, xs.size))
        if not np.all(np.diff(xs) > 0):
            raise ValueError("sample points must be strictly increasing")
        self.xs = xs
        self.values = values

    @classmethod
    def from_callable(cls, fn, box, n_samples=129):
        xs = np.linspace(box[0], box[1], n_samples)
        return cls(xs, np.asarray(fn(xs), dtype=float))

    @property
    def box(self):
        return (float(self.xs[0]), float(self.xs[-1]))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.interp(x, self.xs, self.values)
        out = np.where((x < self.xs[0]) | (x > self.xs[-1]), 0.0, out)
        return out if out.ndim else float(out)

    def refined(self):
        """Dyadic refinement by midpoint insertion; exact on the
        interpolant, so refinement changes quadratures only."""
        mid_x = 0.5 * (self.xs[:-1] + self.xs[1:])
        mid_v = 0.5 * (self.values[:-1] + self.values[1:])
        xs = np.empty(self.xs.size + mid_x.size)
        vals = np.empty_like(xs)
        xs[0::2] = self.xs
        xs[1::2] = mid_x
        vals[0::2] = self.values
        vals[1::2] = mid_v
        return TestFunctionGrid(xs, vals)

    def _require_same_grid(self, other):
        if not isinstance(other, TestFunctionGrid):
            raise ShapeError("expected a sampled test function")
        if not np.array_equal(self.xs, other.xs):
            raise ShapeError("test functions live on different grids")

    def __sub__(self, other):
        self._require_same_grid(other)
        return TestFunctionGrid(self.xs, self.values - other.values)

    def __neg__(self):
        return TestFunctionGrid(self.xs, -self.values)


def test_function_from_csv(path):
    """Load x,f(x) rows into a TestFunctionGrid."""
    xs, values = [], []
    with open(path, newline="") as handle:
        for row in csv.reader(handle):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if row[0].strip().lower() == "x":
                continue
            xs.append(float(row[0]))
            values.append(float(row[1]))
    return TestFunctionGrid(np.asarray(xs), np.asarray(values))


@dataclass
class MCEstimate:
    """Monte Carlo mean with its standard error."""
    mean: complex
    std_error: float
    n_samples: int

    def consistent_with(self, value, sigmas=3.0):
        return abs(self.mean - value) <= sigmas * max(self.std_error, 1e-300)


def _require_grid_function(fn):
    if not isinstance(fn, TestFunctionGrid):
        raise ShapeError("expected a sampled test function (TestFunctionGrid)")


def _require_inside(ensemble, fn):
    a, b = ensemble.box
    fa, fb = fn.box
    if fa < a - 1e-12 or fb > b + 1e-12:
        raise DomainError("test function box %r exceeds ensemble box %r"
                          % (fn.box, ensemble.box))


def sample_configuration(ensemble, draws=None):
    """Draw configurations (position arrays) from the ensemble.

    With draws=None a single configuration is returned; with an integer,
    a list of that many. Calls are deterministic in the ensemble seed.
    """
    rng = ensemble.generator()
    a, b = ensemble.box
    lam = ensemble.intensity * (b - a)
    single = draws is None
    count_of = rng.poisson(lam, 1 if single else draws)
    configs = [rng.uniform(a, b, int(c)) for c in count_of]
    return configs[0] if single else configs


def eta_pairing(fn, positions):
    """Linear pairing eta(f) = sum_k f(y_k) over a configuration.

    Positions outside the function's sample box raise DomainError.
    """
    _require_grid_function(fn)
    positions = np.asarray(positions, dtype=float)
    a, b = fn.box
    if positions.size and (positions.min() < a or positions.max() > b):
        raise DomainError("configuration leaves the test-function box")
    return float(np.sum(fn(positions))) if positions.size else 0.0


def _sample_sums(ensemble, fn, n_samples, powers=(1,)):
    """Per-sample power sums sum_k f(y_k)^p for each requested power,
    vectorized over all samples at once."""
    rng = ensemble.generator()
    a, b = ensemble.box
    lam = ensemble.intensity * (b - a)
    counts = rng.poisson(lam, n_samples)
    positions = rng.uniform(a, b, int(counts.sum()))
    values = fn(positions)
    owner = np.repeat(np.arange(n_samples), counts)
    out = {}
    for p in powers:
        out[p] = np.bincount(owner, weights=values ** p,
                             minlength=n_samples)
    return out


def characteristic_functional_mc(ensemble, fn, n_samples=100_000):
    """Monte Carlo estimate of L(f) = E exp(i eta(f))."""
    _require_grid_function(fn)
    _require_inside(ensemble, fn)
    if n_samples < MIN_MC_SAMPLES:
        raise ValueError("need at least %d samples" % MIN_MC_SAMPLES)
    sums = _sample_sums(ensemble, fn, n_samples)[1]
    samples = np.exp(1j * sums)
    mean = complex(samples.mean())
    std_error = float(samples.std()) / math.sqrt(n_samples)
    return MCEstimate(mean=mean, std_error=std_error, n_samples=n_samples)


def poisson_closed_form(ensemble, fn, tol=1e-8, max_refinements=24):
    """Closed form L(f) = exp(intensity * integral (e^{i f} - 1)).

    The integrand is not piecewise linear even though f is, so the
    quadrature grid is refined dyadically until the value moves by less
    than tol.
    """
    _require_grid_function(fn)
    _require_inside(ensemble, fn)
    grid = fn
    previous = None
    for _ in range(max_refinements):
        integral = np.trapezoid(np.exp(1j * grid.values) - 1.0, grid.xs)
        value = complex(np.exp(ensemble.intensity * integral))
        if previous is not None and abs(value - previous) <= tol:
            return value
        previous = value
        grid = grid.refined()
    raise IterationError("quadrature did not settle within %d refinements"
                         % max_refinements)


def factorial_moment_closed_form(ensemble, fn, order):
    """Expected order-th factorial moment (intensity * integral f)^order.

    The trapezoid rule is exact here because f itself is the piecewise-
    linear interpolant.
    """
    _require_grid_function(fn)
    _require_inside(ensemble, fn)
    _check_order(order)
    integral = np.trapezoid(fn.values, fn.xs)
    return (ensemble.intensity * integral) ** order


def _check_order(order):
    if order < 1:
        raise ValueError("order must be at least 1")
    if order > MOMENT_ORDER_CAP:
        raise CapacityError("moment order %d exceeds cap %d"
                            % (order, MOMENT_ORDER_CAP))


def normal_ordered_moment_mc(ensemble, fn, order, n_samples=100_000):
    """Monte Carlo estimate of the order-th factorial moment
    E sum over ordered distinct k-tuples of prod f(y_k), computed from
    power sums (no tuple enumeration)."""
    _require_grid_function(fn)
    _require_inside(ensemble, fn)
    _check_order(order)
    if n_samples < MIN_MC_SAMPLES:
        raise ValueError("need at least %d samples" % MIN_MC_SAMPLES)
    p = _sample_sums(ensemble, fn, n_samples, powers=(1, 2, 3, 4))
    if order == 1:
        samples = p[1]
    elif order == 2:
        samples = p[1] ** 2 - p[2]
    elif order == 3:
        samples = p[1] ** 3 - 3 * p[1] * p[2] + 2 * p[3]
    else:
        samples = (p[1] ** 4 - 6 * p[1] ** 2 * p[2] + 3 * p[2] ** 2
                   + 8 * p[1] * p[3] - 6 * p[4])
    mean = complex(samples.mean())
    std_error = float(samples.std()) / math.sqrt(n_samples)
    return MCEstimate(mean=mean, std_error=std_error, n_samples=n_samples)


def oscillator_matrix_element(omega, phase_one=None, phase_two=None,
                              n_points=None):
    """Gaussian-weighted matrix element
    (2 pi)^{-m} integral exp(-x . omega x) exp(i (f1 + f2)) dx
    by trapezoid quadrature over a +-8 sigma box, sigma from the softest
    mode. One or two dimensions; omega must be positive definite.
    """
    omega = np.atleast_2d(np.asarray(omega, dtype=float))
    m = omega.shape[0]
    if omega.shape != (m, m):
        raise ShapeError("omega must be square")
    if m > 2:
        raise CapacityError("quadrature supports one or two dimensions")
    eigenvalues = np.linalg.eigvalsh(0.5 * (omega + omega.T))
    if eigenvalues[0] <= 0:
        raise DomainError("frequency matrix must be positive definite")
    sigma = 1.0 / math.sqrt(2 * eigenvalues[0])
    half = 8.0 * sigma

    if m == 1:
        n = n_points or 1201
        xs = np.linspace(-half, half, n)
        phase = np.zeros_like(xs)
        if phase_one is not None:
            phase = phase + phase_one(xs)
        if phase_two is not None:
            phase = phase + phase_two(xs)
        integrand = np.exp(-omega[0, 0] * xs ** 2 + 1j * phase)
        return complex(np.trapezoid(integrand, xs) / (2 * math.pi))

    n = n_points or 401
    xs = np.linspace(-half, half, n)
    ys = np.linspace(-half, half, n)
    grid_x, grid_y = np.meshgrid(xs, ys, indexing="ij")
    quad = (omega[0, 0] * grid_x ** 2 + omega[1, 1] * grid_y ** 2
            + 2 * omega[0, 1] * grid_x * grid_y)
    phase = np.zeros_like(grid_x)
    if phase_one is not None:
        phase = phase + phase_one(grid_x, grid_y)
    if phase_two is not None:
        phase = phase + phase_two(grid_x, grid_y)
    integrand = np.exp(-quad + 1j * phase)
    inner = np.trapezoid(integrand, ys, axis=1)
    return complex(np.trapezoid(inner, xs) / (2 * math.pi) ** 2)


def positive_definiteness_check(ensemble, fns, method="closed",
                                n_samples=20_000):
    """Spectral floor of the Gram matrix M[j, k] = L(f_j - f_k).

    The matrix is positive semi-definite for any genuine characteristic
    functional; the check reports its smallest eigenvalue against a
    rounding floor (closed form) or a standard-error floor (Monte Carlo).
    At most GRAM_SIZE_CAP functions, all on a common sample grid.
    """
    if len(fns) > GRAM_SIZE_CAP:
        raise CapacityError("at most %d test functions, got %d"
                            % (GRAM_SIZE_CAP, len(fns)))
    if len(fns) < 2:
        raise ValueError("need at least two test functions")
    for fn in fns:
        _require_grid_function(fn)
        fns[0]._require_same_grid(fn)
        _require_inside(ensemble, fn)
    size = len(fns)
    gram = np.zeros((size, size), dtype=complex)
    max_std_error = 0.0
    for j in range(size):
        for k in range(size):
            difference = fns[j] - fns[k]
            if method == "closed":
                gram[j, k] = poisson_closed_form(ensemble, difference)
            elif method == "mc":
                estimate = characteristic_functional_mc(
                    ensemble, difference, n_samples=n_samples)
                gram[j, k] = estimate.mean
                max_std_error = max(max_std_error, estimate.std_error)
            else:
                raise ValueError("method must be 'closed' or 'mc'")
    gram = 0.5 * (gram + gram.conj().T)
    lam_min = float(np.linalg.eigvalsh(gram)[0])
    threshold = -1e-9 if method == "closed" else -5.0 * max_std_error
    return {"lam_min": lam_min, "threshold": threshold,
            "passed": lam_min >= threshold, "method": method,
            "max_std_error": max_std_error}
