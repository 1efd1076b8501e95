"""Occupation-number Fock sectors on a periodic 1-D grid and the elementary
second-quantized operator matrices built on them.

Conventions used throughout the package:

* sites are x_i = i * spacing, i = 0 .. n_sites-1, on a circle of
  circumference length = n_sites * spacing;
* the lattice field is psi_i = a_i / sqrt(spacing), so the canonical
  commutator [psi_i, psi_j+] carries the lattice delta delta_ij / spacing;
* density rho_i = n_i / spacing; current and K use the central-difference
  stencil; the kinetic Gram form uses forward differences (Hermitian and
  positive semi-definite by construction).

All operators are scipy.sparse CSR matrices with complex entries. Operators
between sectors map particle number N to N-1 (annihilation direction).
"""

import math
import itertools

import numpy as np
from scipy import sparse

from .errors import CapacityError, ShapeError

DIMENSION_CAP = 200_000


class LatticeGrid:
    """Periodic 1-D grid with n_sites points and uniform spacing."""

    def __init__(self, n_sites, spacing, periodic=True):
        if n_sites < 1:
            raise ValueError("need at least 1 site, got %d" % n_sites)
        if spacing <= 0:
            raise ValueError("spacing must be positive")
        if not periodic:
            raise ValueError("only periodic grids are supported")
        self.n_sites = int(n_sites)
        self.spacing = float(spacing)
        self.periodic = True

    @classmethod
    def from_length(cls, n_sites, length):
        return cls(n_sites, length / n_sites)

    @property
    def length(self):
        return self.n_sites * self.spacing

    @property
    def sites(self):
        return np.arange(self.n_sites) * self.spacing

    def __repr__(self):
        return "LatticeGrid(n_sites=%d, spacing=%g)" % (self.n_sites, self.spacing)

    def __eq__(self, other):
        return (isinstance(other, LatticeGrid)
                and other.n_sites == self.n_sites
                and other.spacing == self.spacing)

    def __hash__(self):
        return hash((self.n_sites, self.spacing))


def _enumerate_occupations(n_sites, total):
    """All occupation tuples of length n_sites summing to total, sorted."""
    states = []

    def rec(prefix, remaining, sites_left):
        if sites_left == 1:
            states.append(tuple(prefix) + (remaining,))
            return
        for k in range(remaining, -1, -1):
            rec(prefix + [k], remaining - k, sites_left - 1)

    rec([], total, n_sites)
    states.sort()
    return states


class FockSector:
    """Fixed-N bosonic sector: ordered occupation basis plus index lookup.

    The basis is lexicographically sorted occupation tuples; ``index_of``
    maps a tuple back to its basis position. Dimension is the stars-and-bars
    count C(N + n_sites - 1, N) and is checked against ``dim_cap`` before
    enumeration.
    """

    def __init__(self, grid, particle_count, dim_cap=DIMENSION_CAP):
        if particle_count < 0:
            raise ValueError("particle_count must be non-negative")
        dim = math.comb(particle_count + grid.n_sites - 1, particle_count)
        if dim > dim_cap:
            raise CapacityError(
                "sector dimension %d exceeds cap %d (n_sites=%d, N=%d)"
                % (dim, dim_cap, grid.n_sites, particle_count))
        self.grid = grid
        self.particle_count = int(particle_count)
        self.dim_cap = dim_cap
        self.basis = _enumerate_occupations(grid.n_sites, particle_count)
        self.index_of = {state: k for k, state in enumerate(self.basis)}
        self._lowered = None
        self._lower_ops = None
        assert len(self.basis) == dim

    @property
    def dimension(self):
        return len(self.basis)

    def lowered(self):
        """The companion sector with one particle fewer (cached). None at N=0."""
        if self.particle_count == 0:
            return None
        if self._lowered is None:
            self._lowered = FockSector(self.grid, self.particle_count - 1,
                                       dim_cap=self.dim_cap)
        return self._lowered

    def raised(self):
        return FockSector(self.grid, self.particle_count + 1, dim_cap=self.dim_cap)

    def __repr__(self):
        return ("FockSector(n_sites=%d, N=%d, dim=%d)"
                % (self.grid.n_sites, self.particle_count, self.dimension))


def build_sector(grid, particle_count, dim_cap=DIMENSION_CAP):
    """Build the N-particle occupation sector on the given grid."""
    return FockSector(grid, particle_count, dim_cap=dim_cap)


# --------------------------------------------------------------------------
# elementary operators
# --------------------------------------------------------------------------

def annihilation_matrix(sector, site):
    """Bare boson annihilation a_site, mapping sector N to sector N-1.

    For N = 0 the target space is the zero space and the returned matrix
    has zero rows (the zero map, not an error).
    """
    _check_site(sector, site)
    if sector.particle_count == 0:
        return sparse.csr_matrix((0, sector.dimension), dtype=complex)
    if sector._lower_ops is None:
        sector._lower_ops = [None] * sector.grid.n_sites
    cached = sector._lower_ops[site]
    if cached is not None:
        return cached
    lower = sector.lowered()
    rows, cols, vals = [], [], []
    for k, occ in enumerate(sector.basis):
        if occ[site] == 0:
            continue
        target = list(occ)
        target[site] -= 1
        rows.append(lower.index_of[tuple(target)])
        cols.append(k)
        vals.append(math.sqrt(occ[site]))
    op = sparse.csr_matrix((vals, (rows, cols)),
                           shape=(lower.dimension, sector.dimension),
                           dtype=complex)
    sector._lower_ops[site] = op
    return op


def field_annihilation(sector, site):
    """Lattice field psi_site = a_site / sqrt(spacing), sector N -> N-1."""
    return annihilation_matrix(sector, site) / math.sqrt(sector.grid.spacing)


def field_creation(sector, site):
    """Adjoint of field_annihilation: sector N-1 -> N."""
    return field_annihilation(sector, site).getH()


def hop_matrix(sector, i, j):
    """Number-conserving hop a_i+ a_j on the sector."""
    _check_site(sector, i)
    _check_site(sector, j)
    dim = sector.dimension
    rows, cols, vals = [], [], []
    for k, occ in enumerate(sector.basis):
        if occ[j] == 0:
            continue
        if i == j:
            rows.append(k)
            cols.append(k)
            vals.append(float(occ[j]))
        else:
            target = list(occ)
            target[j] -= 1
            target[i] += 1
            vals.append(math.sqrt(occ[j] * target[i]))
            rows.append(sector.index_of[tuple(target)])
            cols.append(k)
    return sparse.csr_matrix((vals, (rows, cols)), shape=(dim, dim), dtype=complex)


def diagonal_operator(sector, fn):
    """Diagonal matrix with entries fn(occupation_tuple)."""
    return sparse.diags([complex(fn(occ)) for occ in sector.basis],
                        format="csr", dtype=complex)


def number_matrix(sector, site):
    _check_site(sector, site)
    return diagonal_operator(sector, lambda occ: occ[site])


def density_matrix(sector, site):
    """Density at a point: rho_site = n_site / spacing (diagonal, Hermitian)."""
    _check_site(sector, site)
    h = sector.grid.spacing
    return diagonal_operator(sector, lambda occ: occ[site] / h)


def number_operator(sector):
    """Total particle number; equals N times the identity on a fixed sector."""
    return diagonal_operator(sector, sum)


def k_matrix(sector, site):
    """K at a site: psi+(x) times the central-difference derivative of psi.

    Assembled from hop matrices:
    K_i = (a_i+ a_{i+1} - a_i+ a_{i-1}) / (2 h^2).
    """
    n = sector.grid.n_sites
    h = sector.grid.spacing
    return (hop_matrix(sector, site, (site + 1) % n)
            - hop_matrix(sector, site, (site - 1) % n)) / (2 * h * h)


def current_matrix(sector, site):
    """Hermitian current J_i = (K_i - K_i+) / (2i), central stencil."""
    n = sector.grid.n_sites
    h = sector.grid.spacing
    t = (hop_matrix(sector, site, (site + 1) % n)
         - hop_matrix(sector, site, (site - 1) % n))
    return (t - t.getH()) / (4j * h * h)


def grad_density_matrix(sector, site):
    """Product-rule discretization of the density gradient: K_i + K_i+."""
    k = k_matrix(sector, site)
    return k + k.getH()


def kinetic_matrix(sector):
    """Kinetic energy as the forward-difference Gram form.

    T = 1/2 sum_i h (D+ psi)_i^dag (D+ psi)_i with D+ the forward
    difference. Hermitian and PSD by construction; single-particle
    eigenvalues are (1 - cos(2 pi k / n)) / h^2.
    """
    n = sector.grid.n_sites
    h = sector.grid.spacing
    if sector.particle_count == 0:
        return sparse.csr_matrix((sector.dimension, sector.dimension), dtype=complex)
    total = sparse.csr_matrix((sector.dimension, sector.dimension), dtype=complex)
    for i in range(n):
        diff = (annihilation_matrix(sector, (i + 1) % n)
                - annihilation_matrix(sector, i)) / h
        total = total + 0.5 * diff.getH() @ diff
    return total


def central_kinetic_gram(sector):
    """Coefficient-1 kinetic Gram with central differences.

    T = sum_i (Dc a)_i^dag (Dc a)_i / (2h)^2 scaling folded in. Used on
    the first-quantized side of the weak equivalence checks, where it
    matches sum_i h K_i+ rho_i+ K_i exactly.
    """
    n = sector.grid.n_sites
    h = sector.grid.spacing
    if sector.particle_count == 0:
        return sparse.csr_matrix((sector.dimension, sector.dimension), dtype=complex)
    total = sparse.csr_matrix((sector.dimension, sector.dimension), dtype=complex)
    for i in range(n):
        diff = (annihilation_matrix(sector, (i + 1) % n)
                - annihilation_matrix(sector, (i - 1) % n)) / (2 * h)
        total = total + diff.getH() @ diff
    return total


def _check_site(sector, site):
    if not 0 <= site < sector.grid.n_sites:
        raise ValueError("site %d outside grid of %d sites"
                         % (site, sector.grid.n_sites))


# --------------------------------------------------------------------------
# permanents and symmetrized inner products
# --------------------------------------------------------------------------

PERMANENT_CAP = 20


def permanent(matrix):
    """Permanent of a square complex matrix by the Ryser formula.

    Subsets are visited in Gray-code order so each step updates the row
    sums with a single column. Size capped at PERMANENT_CAP.
    """
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError("permanent needs a square matrix, got %r" % (a.shape,))
    n = a.shape[0]
    if n > PERMANENT_CAP:
        raise CapacityError("matrix size %d exceeds permanent cap %d"
                            % (n, PERMANENT_CAP))
    if n == 0:
        return complex(1.0)
    row_sums = np.zeros(n, dtype=complex)
    total = 0.0 + 0.0j
    gray = 0
    for k in range(1, 1 << n):
        new_gray = k ^ (k >> 1)
        changed_bit = (new_gray ^ gray).bit_length() - 1
        if new_gray & (1 << changed_bit):
            row_sums += a[:, changed_bit]
        else:
            row_sums -= a[:, changed_bit]
        gray = new_gray
        term = np.prod(row_sums)
        if new_gray.bit_count() % 2:
            total -= term
        else:
            total += term
    sign = -1.0 if n % 2 else 1.0
    return complex(sign * total)


def permanent_naive(matrix):
    """Reference permanent by explicit sum over permutations (small sizes)."""
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError("permanent needs a square matrix, got %r" % (a.shape,))
    n = a.shape[0]
    total = 0.0 + 0.0j
    for perm in itertools.permutations(range(n)):
        prod = 1.0 + 0.0j
        for i, j in enumerate(perm):
            prod *= a[i, j]
        total += prod
    return complex(total)


SYMMETRIZED_CAP = 10


def symmetrized_inner(alphas, betas):
    """Inner product of two symmetrized product vectors.

    Equals the permanent of the Gram matrix G[i, j] = <beta_i | alpha_j>.
    Counts must match (ShapeError otherwise) and are capped at
    SYMMETRIZED_CAP.
    """
    if len(alphas) != len(betas):
        raise ShapeError("need equal counts, got %d and %d"
                         % (len(alphas), len(betas)))
    if len(alphas) > SYMMETRIZED_CAP:
        raise CapacityError("count %d exceeds cap %d"
                            % (len(alphas), SYMMETRIZED_CAP))
    if not alphas:
        return complex(1.0)
    lengths = {len(v) for v in alphas} | {len(v) for v in betas}
    if len(lengths) != 1:
        raise ShapeError("vectors must share a common length")
    n = len(alphas)
    gram = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            gram[i, j] = np.vdot(betas[i], alphas[j])
    return permanent(gram)


def symmetrized_inner_bruteforce(alphas, betas):
    """Same value by direct summation over all permutations (n <= 5)."""
    if len(alphas) != len(betas):
        raise ShapeError("need equal counts")
    n = len(alphas)
    if n > 5:
        raise CapacityError("brute-force path limited to n <= 5")
    total = 0.0 + 0.0j
    for perm in itertools.permutations(range(n)):
        prod = 1.0 + 0.0j
        for i in range(n):
            prod *= np.vdot(betas[i], alphas[perm[i]])
        total += prod
    return complex(total)


# --------------------------------------------------------------------------
# state constructors
# --------------------------------------------------------------------------

def condensate_state(sector, orbital):
    """Normalized N-fold product state of one orbital (values per site).

    The unnormalized amplitude on an occupation state mu is
    sqrt(N!) * prod_i orbital_i^mu_i / sqrt(mu_i!).
    """
    orbital = np.asarray(orbital)
    if orbital.shape != (sector.grid.n_sites,):
        raise ShapeError("orbital must have one value per site")
    vec = np.zeros(sector.dimension, dtype=complex)
    root_nfact = math.sqrt(math.factorial(sector.particle_count))
    for k, occ in enumerate(sector.basis):
        amp = root_nfact
        for i, m in enumerate(occ):
            if m:
                amp = amp * orbital[i] ** m / math.sqrt(math.factorial(m))
        vec[k] = amp
    norm = np.linalg.norm(vec)
    return vec / norm if norm > 0 else vec


def pair_weighted_state(sector, orbital, pair_weight):
    """Condensate of ``orbital`` times prod over particle pairs of
    pair_weight(x_a, x_b), normalized. Used to build correlated probe
    states (e.g. Jastrow-type weights for singular kernels)."""
    orbital = np.asarray(orbital)
    if orbital.shape != (sector.grid.n_sites,):
        raise ShapeError("orbital must have one value per site")
    x = sector.grid.sites
    vec = np.zeros(sector.dimension, dtype=complex)
    root_nfact = math.sqrt(math.factorial(sector.particle_count))
    for k, occ in enumerate(sector.basis):
        amp = root_nfact
        positions = []
        for i, m in enumerate(occ):
            if m:
                amp = amp * orbital[i] ** m / math.sqrt(math.factorial(m))
                positions.extend([x[i]] * m)
        for a in range(len(positions)):
            for b in range(a + 1, len(positions)):
                amp = amp * pair_weight(positions[a], positions[b])
        vec[k] = amp
    norm = np.linalg.norm(vec)
    return vec / norm if norm > 0 else vec


# --------------------------------------------------------------------------
# debug serialization
# --------------------------------------------------------------------------

def write_triplets(op, stream):
    """Write a sparse matrix as one 'row col real imag' line per entry."""
    coo = sparse.coo_matrix(op)
    for r, c, v in zip(coo.row, coo.col, coo.data):
        stream.write("%d %d %.17g %.17g\n" % (r, c, v.real, v.imag))


def read_triplets(stream, shape):
    """Inverse of write_triplets."""
    rows, cols, vals = [], [], []
    for line in stream:
        parts = line.split()
        if not parts:
            continue
        rows.append(int(parts[0]))
        cols.append(int(parts[1]))
        vals.append(float(parts[2]) + 1j * float(parts[3]))
    return sparse.csr_matrix((vals, (rows, cols)), shape=shape, dtype=complex)
