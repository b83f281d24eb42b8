"""Generator extraction for sub-Hardy Hilbert spaces.

A model subspace is a span of coefficient vectors inside a truncated
Hardy model, optionally carrying its own inner product through a Gram
matrix.  When the multiplication tuple leaves the span invariant, doubly
commutes and certifies as a tuple of near-isometries *in the subspace
inner product*, the joint wandering space of the compressed tuple yields
an orthonormal family ``phi_1, ..., phi_r`` with ``r`` at most the product
of the symbol degrees, and the span is recovered as the layered sum of the
products ``B^k phi_i``.

All subspace-norm computations run in orthonormal coordinates obtained
from the Cholesky factor of the Gram matrix, so the compressed adjoints
are plain conjugate transposes there (equivalently, the subspace adjoint
of a compression ``C`` is ``G^{-1} C* G``).
"""

from dataclasses import dataclass, field

import numpy as np

from .blaschke import BlaschkeProduct
from .errors import (ArgumentError, BoundViolationError, CertificationError,
                     InvarianceError, WindowError)
from .hardy import multiplication_loss, multiplication_matrix
from . import linalg
from .operators import (OperatorMatrix, doubly_commuting_residual,
                        near_isometry_certificate, _wandering_window_coords)
from .spaces import CoefVector, TruncatedHardySpace

__all__ = ['ModelSubspace', 'GeneratorSet', 'ContractionReport',
           'extract_generators', 'verify_norm_identity',
           'verify_independence', 'verify_contraction_property',
           'verify_component_vanishing']


@dataclass
class ModelSubspace:
    """A Hilbert space sitting inside a truncated Hardy model.

    Parameters
    ----------
    space : TruncatedHardySpace
        The ambient coefficient model.
    span : (dim, s) complex ndarray
        Columns spanning the subspace (linearly independent).
    gram : (s, s) complex ndarray, optional
        Hermitian positive-definite matrix of the subspace inner product on
        the span columns, ``gram[a, b] = <v_b, v_a>_M``.  Absent means the
        ambient coefficient inner product.
    """

    space: TruncatedHardySpace
    span: np.ndarray = field(repr=False)
    gram: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        V = np.asarray(self.span, dtype=complex)
        if V.ndim != 2 or V.shape[0] != self.space.dim or V.shape[1] == 0:
            raise ArgumentError('span must be a (space.dim, s) matrix with '
                                's >= 1')
        s = np.linalg.svd(V, compute_uv=False)
        if s[-1] <= 1e-9 * s[0]:
            raise ArgumentError('span columns are not linearly independent')
        self.span = V
        if self.gram is not None:
            G = np.asarray(self.gram, dtype=complex)
            if G.shape != (V.shape[1], V.shape[1]):
                raise ArgumentError('gram has wrong shape')
            if linalg.spectral_norm(G - G.conj().T) > 1e-12 * \
                    linalg.spectral_norm(G):
                raise ArgumentError('gram is not Hermitian')
            vals = np.linalg.eigvalsh(G)
            if vals[0] <= 1e-12 * vals[-1]:
                raise ArgumentError('gram is not positive definite')
            self.gram = G

    @classmethod
    def from_vectors(cls, vectors, gram=None):
        space = vectors[0].space
        V = np.column_stack([v.coeffs for v in vectors])
        return cls(space, V, gram)

    @property
    def size(self):
        return self.span.shape[1]

    def gram_matrix(self):
        if self.gram is not None:
            return self.gram
        return self.span.conj().T @ self.span

    def cholesky(self):
        """Lower factor ``L`` with ``gram = L L*``."""
        return np.linalg.cholesky(self.gram_matrix())

    def coords_of(self, vec, tol=None):
        """Span coordinates of an ambient vector, with expression residual."""
        vec = np.asarray(vec, dtype=complex)
        coords, *_ = np.linalg.lstsq(self.span, vec, rcond=None)
        resid = float(np.linalg.norm(self.span @ coords - vec))
        return coords, resid

    def m_norm(self, coords):
        G = self.gram_matrix()
        return float(np.sqrt(max(0.0, np.real(coords.conj() @ G @ coords))))


@dataclass
class GeneratorSet:
    """Extracted generators with their certification data.

    ``phis`` are subspace-orthonormal, ``r`` their count, ``bound`` the
    product of the symbol degrees.  ``residual_representation`` is the
    worst defect of reconstructing a span vector from the certified power
    images of the generators, in the subspace norm.
    """

    phis: list
    r: int
    bound: int
    residual_representation: float
    orthonormality_defect: float
    component_vanishing_dim: int
    symbols: tuple
    subspace: ModelSubspace = field(repr=False)
    certificates: list = field(repr=False, default=None)

    def to_json(self):
        from .serialize import coefvector_to_json
        return {
            'phis': [coefvector_to_json(p) for p in self.phis],
            'r': self.r,
            'bound': self.bound,
            'residual_representation': self.residual_representation,
            'orthonormality_defect': self.orthonormality_defect,
            'component_vanishing_dim': self.component_vanishing_dim,
            'certificates': [c.to_json() for c in self.certificates],
        }


def _compressed_tuple(M, Bs, tol):
    """Compress the multiplication tuple to the span, in orthonormal
    subspace coordinates, with the faithful-column window.

    A span column is faithful when, under every operator, its image both
    stays inside the span and loses no mass to the ambient cap.
    """
    ops = [multiplication_matrix(M.space, B, i + 1)
           for i, B in enumerate(Bs)]
    V = M.span
    col_norms = np.maximum(np.linalg.norm(V, axis=0), 1e-300)
    pinvV = np.linalg.pinv(V)
    comps = []
    residual_cols = []
    for i, op in enumerate(ops):
        TV = op.matrix @ V
        C = pinvV @ TV
        R = TV - V @ C
        scale = np.maximum(np.linalg.norm(TV, axis=0), 1e-300)
        residual_cols.append(np.linalg.norm(R, axis=0) / scale)
        residual_cols.append(
            multiplication_loss(M.space, Bs[i], i + 1, V) / col_norms)
        comps.append(C)
    worst = np.max(np.vstack(residual_cols), axis=0)
    window = np.flatnonzero(worst <= tol)
    if window.size == 0:
        raise InvarianceError(
            'subspace is not invariant under the multiplication tuple '
            '(best column residual %.3g)' % worst.min())
    L = M.cholesky()
    LH = L.conj().T
    LH_inv = np.linalg.inv(LH)
    Ds = [OperatorMatrix(LH @ C @ LH_inv, window=window) for C in comps]
    return ops, Ds, L, window


def _ambient_power_images(ops, vec, max_counts, leak_tol):
    """Images ``T^m vec`` for multi-powers ``m``, chains stopped when the
    ambient truncation starts eating mass (inner symbols preserve norm, so
    any shortfall is leakage past the cap)."""
    images = {(): vec}
    for i in reversed(range(len(ops))):
        new = {}
        for m, v in sorted(images.items()):
            cur = v
            p = 0
            while True:
                new[(p,) + m] = cur
                if p >= max_counts[i]:
                    break
                nxt = ops[i].matrix @ cur
                lost = np.linalg.norm(cur) ** 2 - np.linalg.norm(nxt) ** 2
                if np.sqrt(max(0.0, lost)) > leak_tol * np.linalg.norm(cur):
                    break
                cur = nxt
                p += 1
        images = new
    return images


def _certified_power_columns(M, ops, phi_vec, tol, leak_tol=1e-8):
    """Power images of one generator that verifiably remain in the span.

    Chains stop at ambient truncation leakage or when the image leaves the
    span; returns ``{m: (ambient vector, span coordinates)}``.
    """
    max_counts = [c for c in M.space.caps]
    raw = _ambient_power_images(ops, phi_vec, max_counts, leak_tol)
    out = {}
    blocked = set()
    for m in sorted(raw):
        # once a power leaves the span, every componentwise-larger power is
        # downstream of an out-of-span vector and is excluded with it
        if any(all(a <= b for a, b in zip(mb, m)) for mb in blocked):
            continue
        vec = raw[m]
        coords, resid = M.coords_of(vec)
        if resid > max(tol, 1e-9) * max(np.linalg.norm(vec), 1e-300):
            blocked.add(m)
            continue
        out[m] = (vec, coords)
    return out


def verify_component_vanishing(Ds, tol, power_cap=None):
    """Dimension of the non-principal summands of the compressed tuple.

    For multiplication tuples whose symbols vanish at the origin, every
    summand other than the full-subset one is null; the extraction builds
    the principal summand directly, and this check asserts the others are
    numerically absent.  For a single operator the check is the invertible
    part of its windowed range chain.
    """
    from .wold import multivariable_wold, wold_decompose
    if len(Ds) == 1:
        dec = wold_decompose(Ds[0], tol=tol, power_cap=power_cap, force=True)
        return dec.invertible_dim
    mw = multivariable_wold(Ds, power_cap=power_cap, tol=tol, force=True)
    full = tuple(range(len(Ds)))
    return sum(B.shape[1] for A, B in mw.summands.items() if A != full)


def extract_generators(M, Bs, tol=1e-9, k_max=8, check_vanishing=True):
    """Extract the orthonormal generator family of an invariant subspace.

    Requires span invariance under every multiplication operator, a
    passing doubly-commuting residual and per-operator near-isometry
    certificates in the subspace inner product.  The generator count is
    asserted against the product of the symbol degrees; exceeding it
    raises ``BoundViolationError`` (a falsification event, never clipped).
    """
    Bs = tuple(Bs)
    ops, Ds, L, window = _compressed_tuple(M, Bs, tol)
    if len(Ds) >= 2:
        dc, ok = doubly_commuting_residual(Ds, tol)
        if not ok:
            raise CertificationError('compressed tuple is not doubly '
                                     'commuting (max residual %.3g)'
                                     % dc.max())
    certs = [near_isometry_certificate(D, k_max=k_max, tol=tol) for D in Ds]
    bad = [i for i, c in enumerate(certs) if not c.verdict]
    if bad:
        raise CertificationError('near-isometry certification failed for '
                                 'compressed operators %r' % bad)
    K, _ = _wandering_window_coords(Ds, list(range(len(Ds))), tol)
    r = K.shape[1]
    bound = int(np.prod([B.degree for B in Bs]))
    if r > bound:
        raise BoundViolationError(
            'BOUND_VIOLATION: %d generators exceed the degree bound %d'
            % (r, bound))
    if r == 0:
        raise CertificationError('wandering space is empty; the window is '
                                 'too small to resolve generators')
    s = M.size
    Kfull = np.zeros((s, r), dtype=complex)
    Kfull[window] = K
    LH = L.conj().T
    coords = np.linalg.solve(LH, Kfull)  # subspace coordinates, M-orthonormal
    ambient = M.span @ coords
    ambient = linalg.fix_orientation(ambient)
    coords = np.linalg.lstsq(M.span, ambient, rcond=None)[0]
    G = M.gram_matrix()
    ortho_defect = float(linalg.spectral_norm(
        coords.conj().T @ G @ coords - np.eye(r)))
    phis = [CoefVector(M.space, ambient[:, i]) for i in range(r)]
    # reconstruct every span vector from the certified power images
    all_coords = []
    for i in range(r):
        cols = _certified_power_columns(M, ops, ambient[:, i], tol)
        all_coords.extend(c for _, c in cols.values())
    X = LH @ np.column_stack(all_coords)
    Q = linalg.orth(X, tol)
    target = LH  # columns are the span vectors in orthonormal coordinates
    R = target - Q @ (Q.conj().T @ target)
    per_col = np.linalg.norm(R, axis=0) / np.linalg.norm(target, axis=0)
    residual_representation = float(per_col.max())
    vanishing = -1
    if check_vanishing:
        vanishing = verify_component_vanishing(Ds, tol)
    return GeneratorSet(phis, r, bound, residual_representation,
                        ortho_defect, vanishing, Bs, M, certs)


def _require_isometric(Ds, iso_tol):
    for i, D in enumerate(Ds):
        svals = np.linalg.svd(D.window_columns(), compute_uv=False)
        if abs(svals[0] - 1.0) > iso_tol or abs(svals[-1] - 1.0) > iso_tol:
            raise CertificationError(
                'operator %d is not isometric on the subspace window '
                '(singular values in [%.6g, %.6g]); the exact norm identity '
                'holds only in the isometric case' % (i, svals[-1], svals[0]))


def verify_norm_identity(G, fs, tol=1e-10, iso_tol=1e-8, leak_tol=1e-8):
    """Residual of the Pythagorean identity for generator combinations.

    ``fs`` holds one coefficient vector per generator, in product-power
    coordinates (entry ``m`` multiplies ``B^m``).  Returns
    ``| ||sum phi_i f_i||_M^2 - sum ||f_i||_2^2 |``; requires the
    compressed tuple to act isometrically and every product to stay inside
    the window (overflow raises).
    """
    M = G.subspace
    ops, Ds, L, _ = _compressed_tuple(M, G.symbols, max(tol, 1e-9))
    _require_isometric(Ds, iso_tol)
    if len(fs) != G.r:
        raise ArgumentError('need one coefficient vector per generator')
    total = np.zeros(M.space.dim, dtype=complex)
    right = 0.0
    for phi, f in zip(G.phis, fs):
        grid = f.grid()
        counts = [c for c in f.space.caps]
        images = _ambient_power_images(ops, phi.coeffs, counts, leak_tol)
        for m in np.ndindex(*f.space.shape):
            if grid[m] == 0:
                continue
            if m not in images:
                raise WindowError('window overflow: power %r of a generator '
                                  'leaves the model' % (m,))
            total = total + grid[m] * images[m]
        right += float(np.linalg.norm(f.coeffs) ** 2)
    coords, resid = M.coords_of(total)
    if resid > max(tol, 1e-9) * max(np.linalg.norm(total), 1e-300):
        raise WindowError('window overflow: the combination leaves the '
                          'span (residual %.3g)' % resid)
    left = M.m_norm(coords) ** 2
    return abs(left - right)


def verify_independence(G, tol=1e-9):
    """Smallest singular value of the stacked multiplication map.

    The map sends tuples of product-power coefficients to the subspace
    element ``sum phi_i f_i`` (measured in the subspace norm); a value
    above the tolerance certifies that the generator modules meet only in
    zero, so the layered sum is an algebraic direct sum.
    """
    M = G.subspace
    ops, _, L, _ = _compressed_tuple(M, G.symbols, max(tol, 1e-9))
    LH = L.conj().T
    cols = []
    for phi in G.phis:
        certified = _certified_power_columns(M, ops, phi.coeffs, tol)
        cols.extend(LH @ c for _, c in certified.values())
    A = np.column_stack(cols)
    svals = np.linalg.svd(A, compute_uv=False)
    return float(svals[-1])


@dataclass
class ContractionReport:
    """Sampled check of the generator multiplier bound.

    The certified inequality is ``||phi_i f||_M <= ||f||_2`` for subspace
    unit generators: the right-hand side is the plain coefficient 2-norm
    of ``f`` (the ``rhs_norm`` field records this; a variant with the
    subspace norm on the right is not what the construction guarantees).
    """

    max_excess: float
    passes: bool
    n_samples: int
    seed: int
    rhs_norm: str = 'ambient-l2'

    def to_json(self):
        return {'max_excess': self.max_excess, 'passes': self.passes,
                'n_samples': self.n_samples, 'seed': self.seed,
                'rhs_norm': self.rhs_norm}


def verify_contraction_property(G, tol=1e-10, n_samples=100, seed=0x5EED):
    """Sample random coefficient tuples and bound the multiplier excess.

    Draws ``f`` with independent standard complex Gaussian coefficients on
    each generator's certified power grid and reports the largest value of
    ``||phi_i f||_M - ||f||_2``.
    """
    M = G.subspace
    ops, _, L, _ = _compressed_tuple(M, G.symbols, 1e-9)
    rng = np.random.default_rng(seed)
    worst = -np.inf
    for phi in G.phis:
        certified = _certified_power_columns(M, ops, phi.coeffs, 1e-9)
        coords = np.column_stack([c for _, c in certified.values()])
        n_cols = coords.shape[1]
        for _ in range(n_samples):
            c = (rng.standard_normal(n_cols)
                 + 1j * rng.standard_normal(n_cols)) / np.sqrt(2.0)
            mnorm = M.m_norm(coords @ c)
            excess = mnorm - float(np.linalg.norm(c))
            worst = max(worst, excess)
    return ContractionReport(float(worst), bool(worst < tol), n_samples,
                             seed)
