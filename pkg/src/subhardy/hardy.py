"""Multiplication operators, the tensor rational basis, and the layered
decomposition of the truncated Hardy model.

The key structural fact used throughout: within a degree-capped model, the
truncated coefficient vectors of the basis family ``e_{j m}`` enumerated by
order of vanishing form a Parseval tight frame.  A capped polynomial ``f``
has ``<f, e_{j m}> = 0`` as soon as ``e_{j m}`` vanishes to order beyond
the cap, and the finitely many surviving terms reproduce ``f`` coefficient
by coefficient.  Consequently analysis against the truncated frame *is*
the minimum-norm least-squares solution, and the decomposition of the
model into shifted copies of the span of the products ``B_1^{m_1} ...
B_n^{m_n}`` is numerically exact.
"""

from dataclasses import dataclass, field

import numpy as np

from .blaschke import BlaschkeProduct, _tm_coeffs, _require_normalized
from .errors import ArgumentError, CapError
from .operators import OperatorMatrix
from .spaces import CoefVector, TruncatedHardySpace

__all__ = ['MultiplicationOperator', 'multiplication_matrix',
           'multiplication_loss', 'tensor_tm_basis_coeffs', 'hardy_B_basis',
           'b_power_indices', 'St7Decomposition', 'st7_decompose']

#: lost-amplitude threshold certifying a multiplication column as exact;
#: cross terms then perturb windowed norms at the 1e-18 * dim level, well
#: inside the 1e-12 isometry contract
WINDOW_TOL = 1e-9

#: lost-mass threshold certifying a truncated symbol power as exact
POWER_TOL = 1e-12


@dataclass(frozen=True)
class MultiplicationOperator:
    """Matrix of multiplication by ``B(z_i)`` on a truncated model.

    The column for a basis monomial holds the truncated coefficients of
    the product; ``exact_window`` lists the basis positions whose column
    loses no coefficient mass to truncation (for those the matrix acts
    isometrically, since the symbol is unimodular on the torus).
    """

    space: TruncatedHardySpace
    variable: int  # 1-based, matching the i of B(z_i)
    symbol: BlaschkeProduct
    matrix: np.ndarray = field(repr=False)
    exact_window: np.ndarray = field(repr=False)

    def as_operator(self):
        return OperatorMatrix(self.matrix, window=self.exact_window)


def _axis_matrix(B, cap):
    # lower-triangular Toeplitz of the truncated symbol coefficients
    c = B.coefficients(cap)
    M = np.zeros((cap + 1, cap + 1), dtype=complex)
    for k in range(cap + 1):
        M[k:, k] = c[:cap + 1 - k]
    return M


def _kron_chain(mats):
    out = mats[0]
    for M in mats[1:]:
        out = np.kron(out, M)
    return out


def _column_tail_amplitudes(B, cap):
    """Amplitude lost to truncation by each column of the axis matrix.

    Column ``k`` of multiplication by ``B`` discards the symbol
    coefficients beyond ``cap - k``; the discarded mass is summed from an
    extended expansion (rounding in ``1 - |column|**2`` would drown tails
    below the 1e-8 level).
    """
    rho = B.max_zero_modulus
    if rho == 0.0:
        return np.zeros(cap + 1)
    extra = int(np.ceil(30.0 / -np.log10(rho))) + B.degree
    ext = B.coefficients(cap + extra)
    tail_mass = np.cumsum(np.abs(ext[::-1]) ** 2)[::-1]
    # tail_mass[t] = sum of |c_j|^2 for j >= t
    return np.sqrt(tail_mass[cap + 1 - np.arange(cap + 1)])


def multiplication_matrix(space, B, variable, window_tol=WINDOW_TOL):
    """Multiplication by ``B`` acting on the chosen variable of the model.

    ``variable`` is 1-based and the degree of ``B`` must not exceed the cap
    of that variable.  The exact window consists of the monomials with
    ``k_i <= N_i - degree`` whose column retains full mass within
    ``window_tol`` (for a monomial symbol that is all of them; zeros away
    from the origin leak geometrically and shrink the certified window).
    """
    if not 1 <= variable <= space.n:
        raise ArgumentError('variable %d out of range [1, %d]'
                            % (variable, space.n))
    axis = variable - 1
    cap = space.caps[axis]
    if B.degree > cap:
        raise CapError('symbol degree %d exceeds cap %d of variable %d'
                       % (B.degree, cap, variable))
    M = _axis_matrix(B, cap)
    mats = [np.eye(c + 1, dtype=complex) for c in space.caps]
    mats[axis] = M
    full = _kron_chain(mats)
    lost = _column_tail_amplitudes(B, cap)
    good_k = np.flatnonzero(lost <= window_tol)
    good_k = good_k[good_k <= cap - B.degree]
    keep = np.isin(np.arange(cap + 1), good_k)
    window = []
    for flat, multi in enumerate(space.basis_indices()):
        if keep[multi[axis]]:
            window.append(flat)
    return MultiplicationOperator(space, variable, B, full,
                                  np.asarray(window, dtype=int))


def multiplication_loss(space, B, variable, V):
    """Amplitude each column of ``V`` loses under truncated multiplication.

    The product ``B(z_variable) * v`` is formed on an extended grid and the
    norm of the part falling past the cap is measured directly, so there
    is no cancellation error (a norm-difference computation cannot resolve
    losses below the square root of machine precision).
    """
    axis = variable - 1
    cap = space.caps[axis]
    rho = B.max_zero_modulus
    ext = B.degree
    if rho > 0.0:
        ext += int(np.ceil(30.0 / -np.log10(rho)))
    c = B.coefficients(cap + ext)
    R = np.zeros((cap + ext + 1, cap + 1), dtype=complex)
    for k in range(cap + 1):
        R[k:, k] = c[:cap + ext + 1 - k]
    V = np.asarray(V, dtype=complex)
    out = np.empty(V.shape[1])
    for j in range(V.shape[1]):
        grid = np.moveaxis(V[:, j].reshape(space.shape), axis, 0)
        prod = np.tensordot(R, grid, axes=(1, 0))
        out[j] = float(np.linalg.norm(prod[cap + 1:]))
    return out


def _check_symbols(Bs, space):
    if len(Bs) != space.n:
        raise ArgumentError('expected %d Blaschke products, got %d'
                            % (space.n, len(Bs)))
    for B in Bs:
        _require_normalized(B)


def _tm_order(B, j, m):
    # order of vanishing of e_{j m} at the origin
    return m * B.origin_zero_count() + B.origin_zero_count(j)


def tensor_tm_basis_coeffs(Bs, j, m, space):
    """Coefficient vector of the tensor basis element indexed by ``(j, m)``.

    Per-variable feasibility requires the element's order of vanishing to
    stay within the cap, otherwise the stored vector would be identically
    zero and the cap is declared insufficient.
    """
    _check_symbols(Bs, space)
    j = tuple(int(x) for x in j)
    m = tuple(int(x) for x in m)
    if len(j) != space.n or len(m) != space.n:
        raise ArgumentError('index vectors must have one entry per variable')
    factors = []
    for i, B in enumerate(Bs):
        if not 0 <= j[i] <= B.degree - 1:
            raise ArgumentError('j[%d]=%d out of range for degree %d'
                                % (i, j[i], B.degree))
        if m[i] < 0:
            raise ArgumentError('m must be non-negative')
        cap = space.caps[i]
        if _tm_order(B, j[i], m[i]) > cap:
            raise CapError('cap %d of variable %d cannot hold the element '
                           '(j, m)=(%d, %d)' % (cap, i + 1, j[i], m[i]))
        factors.append(_tm_coeffs(B, j[i], m[i], cap))
    grid = factors[0]
    for f in factors[1:]:
        grid = np.multiply.outer(grid, f)
    return CoefVector.from_grid(space, grid)


def _certified_power_coeffs(B, cap, tol, m_cap=None):
    """Truncated coefficients of ``B**m`` while the truncation stays exact.

    Powers are included while the retained mass is within ``tol`` of one
    (the symbol is inner, so any shortfall is truncation loss).
    """
    out = [np.zeros(cap + 1, dtype=complex)]
    out[0][0] = 1.0
    Bc = B.coefficients(cap)
    cur = out[0]
    limit = cap if m_cap is None else m_cap
    for _ in range(limit):
        cur = np.convolve(cur, Bc)[:cap + 1]
        if m_cap is None and 1.0 - np.linalg.norm(cur) ** 2 > tol:
            break
        out.append(cur)
    return out


def b_power_indices(Bs, space, m_caps=None, tol=POWER_TOL):
    """Exponent multi-indices enumerated by :func:`hardy_B_basis`."""
    _check_symbols(Bs, space)
    counts = []
    for i, B in enumerate(Bs):
        m_cap = None if m_caps is None else m_caps[i]
        counts.append(len(_certified_power_coeffs(B, space.caps[i], tol,
                                                  m_cap)))
    return list(np.ndindex(*counts))


def hardy_B_basis(Bs, space, m_caps=None, tol=POWER_TOL):
    """Orthonormal family ``B_1^{m_1} ... B_n^{m_n}`` held by the model.

    Exponents run over the grid of :func:`b_power_indices` in
    lexicographic order; with the default ``m_caps`` each power is included
    while its truncated vector retains full mass within ``tol``, so the
    returned family is orthonormal to the same accuracy.
    """
    _check_symbols(Bs, space)
    per_var = []
    for i, B in enumerate(Bs):
        m_cap = None if m_caps is None else m_caps[i]
        per_var.append(_certified_power_coeffs(B, space.caps[i], tol, m_cap))
    out = []
    for m in np.ndindex(*[len(p) for p in per_var]):
        grid = per_var[0][m[0]]
        for i in range(1, space.n):
            grid = np.multiply.outer(grid, per_var[i][m[i]])
        out.append(CoefVector.from_grid(space, grid))
    return out


@dataclass
class St7Decomposition:
    """Split of a model vector into shifted copies of the product span.

    ``components[j]`` holds, for each component index vector ``j``, the
    coordinates of ``f_j`` against the products ``B^m`` (so that ``f`` is
    the sum over ``j`` of ``e_{j 0} f_j``); ``residual`` is the relative
    reconstruction defect of the frame expansion on the model.
    """

    space: TruncatedHardySpace
    components: dict
    residual: float
    coefficients: dict = field(repr=False)

    def component_vector(self, j):
        return self.components[tuple(j)]


def st7_decompose(f, Bs, tol=1e-9):
    """Decompose ``f`` along the components ``e_{j 0} H^2(B_1, ..., B_n)``.

    Solves the minimum-norm least-squares expansion of ``f`` against the
    truncated tensor frame (for which analysis by inner products is the
    exact solution) and regroups the coefficients by component index.  The
    returned residual is reported, not assumed; it exceeds ``tol`` only
    when the caps cannot carry the frame.
    """
    space = f.space
    _check_symbols(Bs, space)
    per_var_cols = []
    per_var_labels = []
    for i, B in enumerate(Bs):
        cap = space.caps[i]
        cols = []
        labels = []
        for j in range(B.degree):
            m = 0
            while _tm_order(B, j, m) <= cap:
                cols.append(_tm_coeffs(B, j, m, cap))
                labels.append((j, m))
                m += 1
        per_var_cols.append(np.array(cols).T)
        per_var_labels.append(labels)
    C = _kron_chain(per_var_cols)
    coords = C.conj().T @ f.coeffs
    recon = C @ coords
    scale = max(f.norm(), 1.0e-300)
    residual = float(np.linalg.norm(recon - f.coeffs)) / scale
    # regroup the flat coordinate vector by component index j
    col_counts = [len(lab) for lab in per_var_labels]
    coord_grid = coords.reshape(col_counts)
    slices = []
    for labels in per_var_labels:
        per_j = {}
        for pos, (j, m) in enumerate(labels):
            per_j.setdefault(j, []).append(pos)
        slices.append(per_j)
    components = {}
    coefficients = {}
    for jvec in np.ndindex(*[len(s) for s in slices]):
        take = [slices[i][jvec[i]] for i in range(space.n)]
        block = coord_grid[np.ix_(*take)]
        comp_space = TruncatedHardySpace(tuple(len(t) - 1 for t in take))
        components[tuple(jvec)] = CoefVector.from_grid(comp_space, block)
        coefficients[tuple(jvec)] = block
    return St7Decomposition(space, components, residual, coefficients)
