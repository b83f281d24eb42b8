"""Dense linear-algebra helpers used throughout the toolkit.

Conventions
-----------
* Subspaces are represented by complex matrices whose columns form an
  orthonormal basis; the empty subspace of an ambient dimension ``d`` is a
  ``(d, 0)`` array.
* Rank decisions are relative: singular values below ``tol`` times the
  largest singular value are treated as zero.
* Orientation of computed bases is made deterministic by rotating each
  column so that its first significant coordinate is real and positive.
"""

import numpy as np

__all__ = [
    'DEFAULT_TOL', 'orth', 'null_space', 'fix_orientation', 'projector',
    'spectral_norm', 'principal_angle_sines', 'subspace_distance',
    'complement_within', 'intersect_subspaces', 'power_chain_intersection',
    'random_unitary', 'random_contraction',
]

DEFAULT_TOL = 1e-9


def _empty(d):
    return np.zeros((d, 0), dtype=complex)


def orth(A, tol=DEFAULT_TOL, floor=0.0):
    """Orthonormal basis of the column space of ``A``.

    Rank is the number of singular values exceeding ``tol * sigma_max``.
    When the columns carry a meaningful absolute scale (images of unit
    vectors under a bounded operator), pass ``floor`` so that a matrix of
    pure rounding noise collapses to the empty subspace instead of being
    kept at full relative rank.
    """
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2:
        raise ValueError('expected a matrix')
    if A.shape[1] == 0:
        return A.copy()
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        return _empty(A.shape[0])
    cut = max(tol * s[0], floor)
    rank = int(np.count_nonzero(s > cut))
    return U[:, :rank]


def null_space(A, tol=DEFAULT_TOL):
    """Orthonormal basis of the (right) null space of ``A``."""
    A = np.asarray(A, dtype=complex)
    m, n = A.shape
    if m == 0 or n == 0:
        return np.eye(n, dtype=complex)
    _, s, Vh = np.linalg.svd(A, full_matrices=True)
    if s.size == 0 or s[0] <= 0.0:
        return np.eye(n, dtype=complex)
    rank = int(np.count_nonzero(s > tol * s[0]))
    return Vh[rank:].conj().T


def fix_orientation(V, rel=1e-8):
    """Rotate each column so its first significant entry is real positive.

    The first entry with modulus above ``rel`` times the column max is the
    pivot.  Zero columns are left untouched.
    """
    V = np.array(V, dtype=complex, copy=True)
    for k in range(V.shape[1]):
        col = V[:, k]
        mags = np.abs(col)
        top = mags.max()
        if top == 0.0:
            continue
        pivot = int(np.argmax(mags > rel * top))
        phase = col[pivot] / abs(col[pivot])
        V[:, k] = col * np.conj(phase)
    return V


def projector(Q):
    """Orthogonal projector onto the span of the orthonormal columns ``Q``."""
    return Q @ Q.conj().T


def spectral_norm(A):
    A = np.asarray(A, dtype=complex)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def principal_angle_sines(U, V):
    """Sines of the principal angles between two orthonormal-column spans.

    Computed from the residual ``(I - U U*) V`` which resolves small angles
    to machine precision (the cosine-based formula cannot).  Returns the
    sines sorted in descending order, ``min(dim U, dim V)`` of them.
    """
    if U.shape[1] == 0 or V.shape[1] == 0:
        return np.zeros(0)
    R = V - U @ (U.conj().T @ V)
    s = np.linalg.svd(R, compute_uv=False)
    s = np.clip(s, 0.0, 1.0)
    k = min(U.shape[1], V.shape[1])
    return np.sort(s)[::-1][:k]


def subspace_distance(U, V):
    """Sine of the largest principal angle; ``1.0`` if dimensions differ.

    Zero iff the spans coincide (and have equal dimension).
    """
    if U.shape[1] != V.shape[1]:
        return 1.0
    if U.shape[1] == 0:
        return 0.0
    return float(principal_angle_sines(U, V)[0])


def complement_within(U, W, tol=DEFAULT_TOL):
    """Orthonormal basis of ``span(U) ominus span(W)``.

    Both arguments must have orthonormal columns.
    """
    if U.shape[1] == 0 or W.shape[1] == 0:
        return U.copy()
    C = null_space(W.conj().T @ U, tol)
    if C.shape[1] == 0:
        return _empty(U.shape[0])
    return orth(U @ C, tol)


def intersect_subspaces(bases, tol=DEFAULT_TOL, max_sweeps=200):
    """Intersection of several subspaces by alternating projections.

    Each sweep projects the current iterate onto every subspace in turn and
    re-estimates its rank.  Convergence is declared when the iterate lies in
    all subspaces within ``tol``; the sweep count is capped at
    ``max_sweeps``.
    """
    bases = [np.asarray(B, dtype=complex) for B in bases]
    if not bases:
        raise ValueError('need at least one subspace')
    V = orth(bases[0], tol)
    if len(bases) == 1:
        return V
    for _ in range(max_sweeps):
        for Q in bases[1:]:
            if V.shape[1] == 0:
                return V
            # projections of unit vectors: anything below tol is noise
            V = orth(Q @ (Q.conj().T @ V), tol, floor=tol)
        worst = 0.0
        for Q in bases:
            if V.shape[1] == 0:
                return V
            worst = max(worst, spectral_norm(V - Q @ (Q.conj().T @ V)))
        if worst <= tol:
            return V
    return V


def power_chain_intersection(A, V0, tol=DEFAULT_TOL, power_cap=None,
                             max_sweeps=200):
    """Limit of the decreasing chain ``span(A^m V0)``, ``m = 0..power_cap``.

    Requires ``A span(V0) <= span(V0)`` so that the chain is nested; each
    step intersects the previous iterate with its image by alternating
    projections.  The chain stabilises once two successive subspaces agree
    within ``tol`` (a nested chain that stops shrinking is constant from
    then on).

    Returns ``(basis, steps, converged)``.
    """
    V = orth(V0, tol)
    if power_cap is None:
        power_cap = max(V.shape[1], 1)
    scale = max(1.0, spectral_norm(A))
    for m in range(1, power_cap + 1):
        if V.shape[1] == 0:
            return V, m - 1, True
        W = orth(A @ V, tol, floor=tol * scale)
        W = intersect_subspaces([W, V], tol, max_sweeps)
        if W.shape[1] == V.shape[1] and subspace_distance(W, V) <= tol:
            return W, m, True
        V = W
    return V, power_cap, V.shape[1] == 0


def random_unitary(d, rng):
    """Haar-ish random unitary from the QR of a complex Gaussian matrix."""
    Z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_contraction(d, rng, smin=0.6, smax=0.95):
    """Random invertible contraction with singular values in [smin, smax]."""
    U = random_unitary(d, rng)
    V = random_unitary(d, rng)
    s = rng.uniform(smin, smax, size=d)
    return U @ np.diag(s) @ V.conj().T
