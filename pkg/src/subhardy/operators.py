"""Operator-level analysis: near-isometry certificates, Shimorin checks,
doubly-commuting residuals and wandering subspaces.

Operators are square complex matrices together with an *exact window*: the
subset of coordinates on which the matrix models its infinite-dimensional
prototype without truncation leakage.  Every theorem-level quantity is
evaluated on window vectors only; in a finite model a bounded-below
operator is always invertible, so the infinite-dimensional dichotomies are
visible only through windowed truncations.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, InvarianceError, WindowError
from . import linalg
from .linalg import DEFAULT_TOL

__all__ = [
    'OperatorMatrix', 'NearIsometryCertificate', 'ShimorinConditionReport',
    'ShimorinReport', 'ReductionReport', 'near_isometry_certificate',
    'shimorin_check', 'shimorin_condA_form', 'shimorin_condB_form',
    'doubly_commuting_residual', 'wandering_basis',
    'verify_reduction_properties', 'kernel_range_duality',
    'compress_to_subspace', 'joint_window',
]


@dataclass(frozen=True)
class OperatorMatrix:
    """A square complex matrix with an exact-window mask.

    Parameters
    ----------
    matrix : (d, d) complex ndarray
    window : sequence of int, optional
        Coordinates on which the matrix is a faithful model.  Defaults to
        all coordinates.
    """

    matrix: np.ndarray = field(repr=False)
    window: np.ndarray = None

    def __post_init__(self):
        A = np.asarray(self.matrix, dtype=complex)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ArgumentError('operator matrix must be square')
        object.__setattr__(self, 'matrix', A)
        if self.window is None:
            w = np.arange(A.shape[0])
        else:
            w = np.unique(np.asarray(self.window, dtype=int))
            if w.size and (w[0] < 0 or w[-1] >= A.shape[0]):
                raise ArgumentError('window indices out of range')
        object.__setattr__(self, 'window', w)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def window_dim(self):
        return int(self.window.size)

    def submatrix(self):
        """Compression to the window coordinates (rows and columns)."""
        return self.matrix[np.ix_(self.window, self.window)]

    def window_columns(self):
        """Full rows, columns restricted to the window."""
        return self.matrix[:, self.window]

    def embed(self, V):
        """Lift window-coordinate columns to full-coordinate columns."""
        V = np.asarray(V, dtype=complex)
        out = np.zeros((self.dim,) + V.shape[1:], dtype=complex)
        out[self.window] = V
        return out

    def restrict(self, V):
        """Drop full-coordinate columns to window coordinates."""
        return np.asarray(V, dtype=complex)[self.window]


def joint_window(Ts):
    """Common window of a tuple of same-dimension operators."""
    if len(Ts) == 0:
        raise ArgumentError('empty operator tuple')
    d = Ts[0].dim
    if any(T.dim != d for T in Ts):
        raise ArgumentError('operators must share one dimension')
    w = Ts[0].window
    for T in Ts[1:]:
        w = np.intersect1d(w, T.window)
    if w.size == 0:
        raise WindowError('joint window is empty')
    return w


@dataclass
class NearIsometryCertificate:
    """Certificate for the two defining near-isometry conditions.

    ``delta`` is the smallest singular value of the operator restricted to
    its window (the bounded-below constant of the windowed model; it upper
    bounds the true constant of the prototype).  ``range_residuals[k-1]``
    measures how far ``T*^k T^(k+1)`` applied to window vectors sticks out
    of the range of ``T``, for ``k = 1..k_max``; the prototype condition
    quantifies over all ``k``, so the certificate is explicitly finite.
    """

    delta: float
    contraction_excess: float
    range_residuals: list
    k_max: int
    tol: float
    verdict: bool

    def to_json(self):
        return {
            'delta': self.delta,
            'contraction_excess': self.contraction_excess,
            'range_residuals': list(self.range_residuals),
            'k_max': self.k_max,
            'tol': self.tol,
            'verdict': self.verdict,
        }


def near_isometry_certificate(T, k_max=8, tol=DEFAULT_TOL):
    """Certify contraction, lower bound, and range containment of ``T``.

    The verdict is true iff ``delta > tol``, the contraction excess is
    below ``tol`` and every range residual up to ``k_max`` is below ``tol``.
    """
    if k_max < 1:
        raise ArgumentError('k_max must be at least 1')
    if T.window_dim == 0:
        raise WindowError('empty window')
    A = T.matrix
    cols = T.window_columns()
    s = np.linalg.svd(cols, compute_uv=False)
    delta = float(s[-1])
    excess = max(0.0, float(s[0]) - 1.0)
    Q = linalg.orth(A, tol)
    P = linalg.projector(Q)
    eye = np.eye(T.dim)
    residuals = []
    X = A.conj().T @ A @ A  # T*^k T^(k+1) for k = 1; then X -> T* X T
    for _ in range(1, k_max + 1):
        residuals.append(linalg.spectral_norm(((eye - P) @ X)[:, T.window]))
        X = A.conj().T @ X @ A
    verdict = (delta > tol and excess < tol
               and max(residuals) < tol)
    return NearIsometryCertificate(delta, excess, residuals, k_max, tol,
                                   verdict)


@dataclass
class ShimorinConditionReport:
    holds: bool
    min_eig: float
    witness: np.ndarray = field(repr=False)

    def to_json(self):
        from .serialize import vector_to_json
        return {'holds': self.holds, 'min_eig': self.min_eig,
                'witness': vector_to_json(self.witness)}


@dataclass
class ShimorinReport:
    condA: ShimorinConditionReport
    condB: ShimorinConditionReport
    tol: float

    def to_json(self):
        return {'condA': self.condA.to_json(), 'condB': self.condB.to_json(),
                'tol': self.tol}


def shimorin_condA_form(T):
    """Matrix of the quadratic form ``2 T*T - T*^2 T^2 - I`` (full space).

    Positive semidefiniteness of this form on the window is the first
    Shimorin condition; evaluating it at ``x`` gives
    ``2||Tx||^2 - ||T^2 x||^2 - ||x||^2``.
    """
    A = T.matrix
    AA = A @ A
    return 2.0 * A.conj().T @ A - AA.conj().T @ AA - np.eye(T.dim)


def shimorin_condB_form(T):
    """Block form whose positivity is the second Shimorin condition.

    ``(x, y) -> 2||x||^2 + 2||Ty||^2 - ||Tx + y||^2`` as a Hermitian matrix
    on the doubled space.
    """
    A = T.matrix
    G = A.conj().T @ A
    eye = np.eye(T.dim)
    top = np.hstack([2.0 * eye - G, -A.conj().T])
    bot = np.hstack([-A, 2.0 * G - eye])
    return np.vstack([top, bot])


def _psd_on_window(M, window, dim, tol, doubled=False):
    if doubled:
        idx = np.concatenate([window, window + dim])
    else:
        idx = window
    sub = M[np.ix_(idx, idx)]
    vals, vecs = np.linalg.eigh(sub)
    min_eig = float(vals[0])
    witness = np.zeros(M.shape[0], dtype=complex)
    witness[idx] = vecs[:, 0]
    return ShimorinConditionReport(min_eig >= -tol, min_eig, witness)


def shimorin_check(T, tol=DEFAULT_TOL):
    """Test both Shimorin conditions on the window of ``T``.

    Each verdict is a minimum-eigenvalue sign test of the corresponding
    Hermitian form; the witness is an eigenvector of the most negative
    eigenvalue (embedded into full coordinates, the condB witness living on
    the doubled space).
    """
    A_form = shimorin_condA_form(T)
    B_form = shimorin_condB_form(T)
    condA = _psd_on_window(A_form, T.window, T.dim, tol)
    condB = _psd_on_window(B_form, T.window, T.dim, tol, doubled=True)
    return ShimorinReport(condA, condB, tol)


def doubly_commuting_residual(Ts, tol=DEFAULT_TOL):
    """Pairwise commutation and star-commutation residuals on the window.

    ``residuals[i][j]`` is the larger of the commutator and the
    star-commutator norm, columns restricted to the joint window.  The
    verdict is true iff every off-diagonal residual is below ``tol``.
    """
    if len(Ts) < 2:
        raise ArgumentError('need at least two operators')
    w = joint_window(Ts)
    k = len(Ts)
    residuals = np.zeros((k, k))
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            Ai, Aj = Ts[i].matrix, Ts[j].matrix
            comm = (Ai @ Aj - Aj @ Ai)[:, w]
            star = (Ai @ Aj.conj().T - Aj.conj().T @ Ai)[:, w]
            residuals[i, j] = max(linalg.spectral_norm(comm),
                                  linalg.spectral_norm(star))
    verdict = bool(np.all(residuals < tol))
    return residuals, verdict


def _wandering_window_coords(Ts, A, tol):
    """Joint wandering subspace in joint-window coordinates."""
    w = joint_window(Ts)
    if len(A) == 0:
        return np.eye(w.size, dtype=complex), w
    kernels = []
    for i in A:
        S = Ts[i].matrix[np.ix_(w, w)]
        kernels.append(linalg.null_space(S.conj().T, tol))
    if len(kernels) == 1:
        V = kernels[0]
    else:
        V = linalg.intersect_subspaces(kernels, tol)
    return V, w


def wandering_basis(Ts, A, tol=DEFAULT_TOL):
    """Orthonormal basis of ``W_A``, the joint kernel of the adjoints.

    ``A`` is a set of 0-based positions into ``Ts``; the empty set returns
    the full window basis.  Vectors are returned in full coordinates
    (supported on the joint window) with deterministic orientation.
    """
    A = sorted(set(int(i) for i in A))
    if A and (A[0] < 0 or A[-1] >= len(Ts)):
        raise ArgumentError('A contains out-of-range positions')
    V, w = _wandering_window_coords(Ts, A, tol)
    out = np.zeros((Ts[0].dim, V.shape[1]), dtype=complex)
    out[w] = V
    return linalg.fix_orientation(out)


def kernel_range_duality(T, tol=DEFAULT_TOL):
    """Residual of ``P_range(T) + P_ker(T*) - I`` on the window submodel."""
    S = T.submatrix()
    Qr = linalg.orth(S, tol)
    Qk = linalg.null_space(S.conj().T, tol)
    eye = np.eye(S.shape[0])
    return linalg.spectral_norm(linalg.projector(Qr)
                                + linalg.projector(Qk) - eye)


def compress_to_subspace(T, Q, tol=DEFAULT_TOL):
    """Compression of ``T`` to the span of orthonormal columns ``Q``.

    Returns an :class:`OperatorMatrix` on the subspace coordinates whose
    window consists of the *faithful* columns: those basis vectors whose
    image under the full matrix stays inside the span within ``tol`` (the
    per-column invariance residuals are returned alongside).
    """
    Q = np.asarray(Q, dtype=complex)
    TQ = T.matrix @ Q
    C = Q.conj().T @ TQ
    R = TQ - Q @ C
    col_residuals = np.linalg.norm(R, axis=0)
    faithful = np.flatnonzero(col_residuals <= tol)
    return OperatorMatrix(C, window=faithful), col_residuals


@dataclass
class ReductionReport:
    """Numeric form of the wandering-subspace reduction properties."""

    invariance_residual_T: float
    invariance_residual_Tstar: float
    subspace_match_residual: float
    wandering_dim: int
    certificate: NearIsometryCertificate

    def to_json(self):
        return {
            'invariance_residual_T': self.invariance_residual_T,
            'invariance_residual_Tstar': self.invariance_residual_Tstar,
            'subspace_match_residual': self.subspace_match_residual,
            'wandering_dim': self.wandering_dim,
            'certificate': self.certificate.to_json(),
        }


def verify_reduction_properties(Ts, A, j, tol=DEFAULT_TOL, k_max=8):
    """Check that ``W_A`` reduces ``T_j``, that the two descriptions of its
    wandering part agree, and that ``T_j`` compresses to a near-isometry.

    ``j`` must not belong to ``A``; the tuple must pass the
    doubly-commuting residual first.
    """
    A = sorted(set(int(i) for i in A))
    if j in A:
        raise ArgumentError('j must lie outside A')
    _, ok = doubly_commuting_residual(Ts, tol)
    if not ok:
        raise ArgumentError('tuple is not doubly commuting within tol')
    V, w = _wandering_window_coords(Ts, A, tol)
    S = Ts[j].matrix[np.ix_(w, w)]
    P = linalg.projector(V)
    eye = np.eye(w.size)
    res_T = linalg.spectral_norm((eye - P) @ S @ V)
    res_Ts = linalg.spectral_norm((eye - P) @ S.conj().T @ V)
    # W_A ominus T_j W_A versus W_A with j adjoined
    image = linalg.orth(S @ V, tol)
    lhs = linalg.complement_within(V, image, tol)
    rhs, _ = _wandering_window_coords(Ts, A + [j], tol)
    match = linalg.subspace_distance(lhs, rhs)
    # full-coordinate compression so truncation at the window edge is seen
    Qfull = np.zeros((Ts[j].dim, V.shape[1]), dtype=complex)
    Qfull[w] = V
    comp, _ = compress_to_subspace(Ts[j], Qfull, tol)
    if V.shape[1] > 0:
        cert = near_isometry_certificate(comp, k_max=k_max, tol=tol)
    else:
        # a vacuous pass: every operator on the zero space is an isometry
        cert = NearIsometryCertificate(1.0, 0.0, [0.0] * k_max, k_max, tol,
                                       True)
    return ReductionReport(res_T, res_Ts, match, V.shape[1], cert)
