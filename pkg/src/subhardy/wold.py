"""Wold-type decompositions for near-isometries and doubly commuting tuples.

The single-operator engine splits the windowed model into a layered shift
part (iterated images of the wandering subspace) and an invertible part
(the stabilised intersection of the range chain).  The tuple engine builds
one summand per subset ``A`` of the operator positions: the joint
wandering space of ``A``, intersected over the power chains of the
complementary operators, then layered by the powers of the operators in
``A``.  All infinite constructions are truncated at an explicit power cap;
layer vectors whose image leaks out of the window are clipped and counted,
never silently truncated.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, CertificationError, InvarianceError
from . import linalg
from .linalg import DEFAULT_TOL
from .operators import (NearIsometryCertificate, OperatorMatrix,
                        compress_to_subspace, doubly_commuting_residual,
                        joint_window, near_isometry_certificate,
                        _wandering_window_coords)

__all__ = ['WoldDecomposition', 'MultiWoldDecomposition', 'RestrictionClass',
           'LemmaOtReport', 'wold_decompose', 'multivariable_wold',
           'classify_restriction', 'lemma_ot_check']


def _embed(dim, w, V):
    out = np.zeros((dim, V.shape[1]), dtype=complex)
    out[w] = V
    return out


def _image_with_clip(A_full, w, V_w, tol, dim):
    """Apply the full matrix to window vectors; clip columns that leak.

    A column is clipped when the relative energy of its image outside the
    window exceeds ``tol``.  Returns the orthonormalised surviving image
    (window coordinates) and the clip count.
    """
    if V_w.shape[1] == 0:
        return V_w, 0
    img = A_full @ _embed(dim, w, V_w)
    norms = np.linalg.norm(img, axis=0)
    off = img.copy()
    off[w] = 0.0
    leak = np.linalg.norm(off, axis=0)
    keep = leak <= tol * np.maximum(norms, 1e-300)
    clipped = int(np.count_nonzero(~keep))
    kept = img[np.ix_(w, np.flatnonzero(keep))]
    return linalg.orth(kept, tol, floor=tol), clipped


@dataclass
class WoldDecomposition:
    """Layered shift part plus invertible part of a windowed near-isometry.

    ``layers[m]`` is an orthonormal basis (full coordinates) of the m-th
    image of the wandering subspace; ``invertible_part`` spans the
    stabilised intersection of the range chain.  ``residuals`` reports the
    mutual-orthogonality, orthogonality-to-invertible and completeness
    defects; clipped vectors are counted, and ``converged`` records whether
    the range chain stabilised before the power cap.
    """

    layers: list
    invertible_part: np.ndarray = field(repr=False)
    m_max: int
    clipped: int
    residuals: dict
    converged: bool
    exhausted: bool
    certificate: NearIsometryCertificate

    @property
    def shift_dim(self):
        return sum(L.shape[1] for L in self.layers)

    @property
    def invertible_dim(self):
        return self.invertible_part.shape[1]


def wold_decompose(T, m_max=None, tol=DEFAULT_TOL, power_cap=None, k_max=8,
                   force=False):
    """Split the windowed model of ``T`` into shift and invertible parts.

    Requires a passing near-isometry certificate unless ``force`` is set.
    ``m_max`` bounds the number of layers and ``power_cap`` the range
    chain; both default to the window dimension.
    """
    cert = near_isometry_certificate(T, k_max=k_max, tol=tol)
    if not cert.verdict and not force:
        raise CertificationError(
            'near-isometry certificate failed (delta=%.3g, excess=%.3g, '
            'max range residual=%.3g); pass force=True to decompose anyway'
            % (cert.delta, cert.contraction_excess,
               max(cert.range_residuals)))
    w = T.window
    wdim = w.size
    S = T.submatrix()
    if m_max is None:
        m_max = wdim
    if power_cap is None:
        power_cap = wdim
    wander = linalg.fix_orientation(linalg.null_space(S.conj().T, tol))
    layers_w = []
    clipped = 0
    cur = wander
    for _ in range(m_max + 1):
        if cur.shape[1] == 0:
            break
        layers_w.append(cur)
        cur, c = _image_with_clip(T.matrix, w, cur, tol, T.dim)
        clipped += c
    if not layers_w and wander.shape[1] > 0:
        raise InvarianceError('window too small: every layer clipped')
    # the layer chain is exhausted when it died on its own; a chain cut by
    # m_max leaves the shift part deliberately incomplete
    exhausted = cur.shape[1] == 0
    inv_w, _, converged = linalg.power_chain_intersection(
        S, np.eye(wdim, dtype=complex), tol, power_cap)
    residuals = _orthogonality_residuals(layers_w, inv_w, wdim)
    layers = [linalg.fix_orientation(_embed(T.dim, w, L)) for L in layers_w]
    inv = linalg.fix_orientation(_embed(T.dim, w, inv_w))
    return WoldDecomposition(layers, inv, m_max, clipped, residuals,
                             converged, exhausted, cert)


def _orthogonality_residuals(layers_w, inv_w, wdim):
    layer_orth = 0.0
    for a in range(len(layers_w)):
        for b in range(a + 1, len(layers_w)):
            layer_orth = max(layer_orth, linalg.spectral_norm(
                layers_w[a].conj().T @ layers_w[b]))
    vs_inv = 0.0
    for L in layers_w:
        vs_inv = max(vs_inv, linalg.spectral_norm(L.conj().T @ inv_w))
    P = np.zeros((wdim, wdim), dtype=complex)
    for L in layers_w:
        P += linalg.projector(L)
    P += linalg.projector(inv_w)
    completeness = linalg.spectral_norm(P - np.eye(wdim))
    return {'layer_orthogonality': layer_orth,
            'layers_vs_invertible': vs_inv,
            'completeness': completeness}


@dataclass
class RestrictionClass:
    """Classification of an operator restricted to an invariant subspace.

    ``verdict`` is ``'shift'`` when the wandering subspace of the
    compression exists and its iterated images exhaust the subspace,
    ``'invertible'`` when the compression has trivial adjoint kernel and is
    bounded below, and ``'neither'`` otherwise.  ``sigma_min``/``sigma_max``
    are the extreme singular values of the compression on its faithful
    columns; ``unitary`` is claimed only when both sit at one within
    ``unitary_tol`` (invertibility is all a near-isometry guarantees, so
    unitarity is reported as a fact, never assumed).
    """

    verdict: str
    invariance_residual: float
    sigma_min: float
    sigma_max: float
    unitary: bool
    wandering_dim: int
    dim: int

    def to_json(self):
        return {'verdict': self.verdict,
                'invariance_residual': self.invariance_residual,
                'sigma_min': self.sigma_min, 'sigma_max': self.sigma_max,
                'unitary': self.unitary,
                'wandering_dim': self.wandering_dim, 'dim': self.dim}


def classify_restriction(T, basis, tol=DEFAULT_TOL, unitary_tol=1e-9):
    """Classify ``T`` restricted to the span of ``basis``.

    ``basis`` must have orthonormal columns supported on the window of
    ``T`` and span a subspace invariant in the windowed model (images that
    leave the window count as truncated, not as invariance failures).
    """
    Q = np.asarray(basis, dtype=complex)
    if Q.shape[1] == 0:
        raise ArgumentError('cannot classify the zero subspace')
    off = Q.copy()
    off[T.window] = 0.0
    if linalg.spectral_norm(off) > tol:
        raise ArgumentError('basis is not supported on the window')
    Qw = T.restrict(Q)
    S = T.submatrix()
    P = linalg.projector(Qw)
    eye = np.eye(S.shape[0])
    inv_res = linalg.spectral_norm((eye - P) @ S @ Qw)
    if inv_res > tol:
        raise InvarianceError('subspace is not invariant in the windowed '
                              'model (residual %.3g)' % inv_res)
    comp, _ = compress_to_subspace(T, Q, tol)
    C = comp.matrix
    s_dim = C.shape[0]
    fw = comp.window
    svals = np.linalg.svd(C, compute_uv=False)
    # the wandering part of the compression is basis independent: the
    # orthocomplement of its range
    K = linalg.null_space(C.conj().T, tol)
    wdim = K.shape[1]
    if wdim > 0:
        stack = [K]
        cur = K
        for _ in range(s_dim):
            cur = linalg.orth(C @ cur, tol, floor=tol)
            if cur.shape[1] == 0:
                break
            stack.append(cur)
        total = linalg.orth(np.hstack(stack), tol).shape[1]
        verdict = 'shift' if total == s_dim else 'neither'
        # report is the honest bounded-below data: faithful columns only
        if fw.size:
            fsv = np.linalg.svd(C[:, fw], compute_uv=False)
            sigma_min, sigma_max = float(fsv[-1]), float(fsv[0])
        else:
            sigma_min, sigma_max = float(svals[-1]), float(svals[0])
    else:
        sigma_min, sigma_max = float(svals[-1]), float(svals[0])
        verdict = 'invertible' if sigma_min > tol else 'neither'
    unitary = (verdict == 'invertible'
               and abs(sigma_min - 1.0) <= unitary_tol
               and abs(sigma_max - 1.0) <= unitary_tol)
    return RestrictionClass(verdict, inv_res, sigma_min, sigma_max, unitary,
                            wdim, s_dim)


@dataclass
class MultiWoldDecomposition:
    """The ``2^m`` jointly reducing summands of a doubly commuting tuple.

    ``summands`` maps each subset ``A`` (a tuple of 0-based operator
    positions) to an orthonormal basis in full coordinates;
    ``classifications[A][i]`` classifies operator ``i`` on that summand
    (``None`` when the summand is zero).  Residuals cover pairwise
    orthogonality, completeness on the joint window, the reducing property
    and the within-summand layer structure.
    """

    summands: dict
    classifications: dict
    residuals: dict
    clipped: int
    certificates: list
    window: np.ndarray = field(repr=False)

    def dims(self):
        return {A: B.shape[1] for A, B in self.summands.items()}


def multivariable_wold(Ts, m=None, power_cap=None, tol=DEFAULT_TOL, k_max=8,
                       force=False):
    """Decompose the joint window into the ``2^m`` reducing summands.

    ``Ts`` is the operator tuple, ``m`` how many leading operators to
    decompose against (defaults to all, must be at least 2).  The tuple
    must pass the doubly-commuting residual and each operator its
    near-isometry certificate, unless ``force`` is given.
    """
    if m is None:
        m = len(Ts)
    if not 2 <= m <= len(Ts):
        raise ArgumentError('need 2 <= m <= %d, got %d' % (len(Ts), m))
    ops = list(Ts[:m])
    dc, ok = doubly_commuting_residual(ops, tol)
    if not ok and not force:
        raise CertificationError('tuple is not doubly commuting within tol '
                                 '(max residual %.3g)' % dc.max())
    certs = [near_isometry_certificate(T, k_max=k_max, tol=tol) for T in ops]
    if not all(c.verdict for c in certs) and not force:
        bad = [i for i, c in enumerate(certs) if not c.verdict]
        raise CertificationError('near-isometry certificate failed for '
                                 'operators %r' % bad)
    w = joint_window(ops)
    wdim = w.size
    dim = ops[0].dim
    if power_cap is None:
        power_cap = wdim
    subs = [T.matrix[np.ix_(w, w)] for T in ops]
    summands = {}
    block_orth = 0.0
    clipped = 0
    for bitmask in range(2 ** m):
        A = tuple(i for i in range(m) if bitmask >> i & 1)
        if A:
            core, _ = _wandering_window_coords(ops, list(A), tol)
        else:
            core = np.eye(wdim, dtype=complex)
        for jj in sorted(set(range(m)) - set(A)):
            if core.shape[1] == 0:
                break
            core, _, _ = linalg.power_chain_intersection(subs[jj], core, tol,
                                                         power_cap)
        if A and core.shape[1] > 0:
            blocks, c = _layer_blocks(ops, w, dim, A, core, tol, power_cap)
            clipped += c
            mats = [b for _, b in blocks]
            stacked = np.hstack(mats) if mats else core[:, :0]
            block_orth = max(block_orth, _cross_block_defect(mats))
            basis = linalg.orth(stacked, tol)
        else:
            basis = core
        summands[A] = linalg.fix_orientation(basis)
    residuals = _summand_residuals(summands, subs, wdim)
    residuals['layer_block_orthogonality'] = block_orth
    classifications = {}
    for A, basis_w in summands.items():
        per_op = {}
        for i in range(m):
            if basis_w.shape[1] == 0:
                per_op[i] = None
            else:
                per_op[i] = classify_restriction(
                    OperatorMatrix(ops[i].matrix, window=w),
                    _embed(dim, w, basis_w), tol)
        classifications[A] = per_op
    embedded = {A: _embed(dim, w, B) for A, B in summands.items()}
    return MultiWoldDecomposition(embedded, classifications, residuals,
                                  clipped, certs, w)


def _layer_blocks(ops, w, dim, A, core_w, tol, power_cap):
    """Images ``T_A^r core`` for power vectors ``r`` in lexicographic order.

    Powers of the later positions are applied first so that the block for
    ``r`` is ``T_{a1}^{r1}(T_{a2}^{r2}(... core))`` with ``a1 < a2 < ...``,
    matching a peel-in-index-order construction.
    """
    blocks = [((), core_w)]
    clipped = 0
    for var in sorted(A, reverse=True):
        new = []
        for r, base in blocks:
            cur = base
            p = 0
            while cur.shape[1] > 0 and p <= power_cap:
                new.append(((p,) + r, cur))
                if p == power_cap:
                    break
                cur, c = _image_with_clip(ops[var].matrix, w, cur, tol, dim)
                clipped += c
                p += 1
        blocks = new
    blocks.sort(key=lambda item: item[0])
    return blocks, clipped


def _cross_block_defect(mats):
    worst = 0.0
    for a in range(len(mats)):
        for b in range(a + 1, len(mats)):
            worst = max(worst, linalg.spectral_norm(
                mats[a].conj().T @ mats[b]))
    return worst


def _summand_residuals(summands, subs, wdim):
    keys = list(summands)
    pair = 0.0
    for a in range(len(keys)):
        for b in range(a + 1, len(keys)):
            pair = max(pair, linalg.spectral_norm(
                summands[keys[a]].conj().T @ summands[keys[b]]))
    P = np.zeros((wdim, wdim), dtype=complex)
    for B in summands.values():
        P += linalg.projector(B)
    completeness = linalg.spectral_norm(P - np.eye(wdim))
    reducing = 0.0
    eye = np.eye(wdim)
    for B in summands.values():
        if B.shape[1] == 0:
            continue
        PB = linalg.projector(B)
        for S in subs:
            reducing = max(
                reducing,
                linalg.spectral_norm((eye - PB) @ S @ B),
                linalg.spectral_norm((eye - PB) @ S.conj().T @ B))
    return {'pairwise_orthogonality': pair, 'completeness': completeness,
            'reducing': reducing}


@dataclass
class LemmaOtReport:
    """Hypothesis residuals and identity residuals of the interchange lemma.

    When a hypothesis fails the identity residuals are ``None`` and
    ``failed_hypotheses`` names the culprits; the report aborts loudly
    rather than checking identities whose premises do not hold.
    """

    hypotheses: dict
    hypotheses_ok: bool
    failed_hypotheses: list
    identity_residuals: dict
    power_cap: int

    def to_json(self):
        return {'hypotheses': self.hypotheses,
                'hypotheses_ok': self.hypotheses_ok,
                'failed_hypotheses': self.failed_hypotheses,
                'identity_residuals': self.identity_residuals,
                'power_cap': self.power_cap}


def _chain_spans(S, V0, tol, cap):
    """Orthonormal bases of ``S^m span(V0)`` until the chain dies or cap."""
    out = []
    cur = linalg.orth(V0, tol)
    for _ in range(cap + 1):
        if cur.shape[1] == 0:
            break
        out.append(cur)
        cur = linalg.orth(S @ cur, tol, floor=tol)
    return out


def _stabilised(seq, tol):
    """Last element of a nested sequence of subspaces, early-stopped."""
    prev = None
    for V in seq:
        if prev is not None and V.shape[1] == prev.shape[1] \
                and linalg.subspace_distance(V, prev) <= tol:
            return V
        prev = V
        if V.shape[1] == 0:
            return V
    return prev


def lemma_ot_check(T1, T2, W, power_cap=None, tol=DEFAULT_TOL):
    """Verify the three image/intersection interchange identities.

    ``W`` is a full-coordinate basis of the distinguished subspace.  The
    hypotheses (commutation, boundedness below of the first operator,
    injectivity of the second, invariance of ``W`` under the first, and
    orthogonality of ``T2^k W`` to ``T2^m H`` for ``k < m``) are verified
    numerically first; identities are only evaluated when they all hold.
    Each identity residual is the sine of the largest principal angle
    between the two computed sides.
    """
    w = joint_window([T1, T2])
    wdim = w.size
    if power_cap is None:
        power_cap = wdim
    S1 = T1.matrix[np.ix_(w, w)]
    S2 = T2.matrix[np.ix_(w, w)]
    QW = linalg.orth(np.asarray(W, dtype=complex)[w], tol)
    A1, A2 = T1.matrix, T2.matrix
    commute = linalg.spectral_norm((A1 @ A2 - A2 @ A1)[:, w])
    s1 = np.linalg.svd(A1[:, w], compute_uv=False)
    s2 = np.linalg.svd(A2[:, w], compute_uv=False)
    eyew = np.eye(wdim)
    if QW.shape[1]:
        PW = linalg.projector(QW)
        invariance = linalg.spectral_norm((eyew - PW) @ S1 @ QW)
    else:
        invariance = 0.0
    w_chain = _chain_spans(S2, QW, tol, power_cap)
    h_chain = _chain_spans(S2, np.eye(wdim, dtype=complex), tol, power_cap)
    orth_res = 0.0
    for k in range(len(w_chain)):
        for mm in range(k + 1, len(h_chain)):
            orth_res = max(orth_res, linalg.spectral_norm(
                w_chain[k].conj().T @ h_chain[mm]))
    hyps = {
        'commutation': commute,
        'T1_bounded_below_sigma_min': float(s1[-1]),
        'T2_injective_sigma_min': float(s2[-1]),
        'W_invariant_under_T1': invariance,
        'orthogonality': orth_res,
    }
    failed = []
    if commute > tol:
        failed.append('commutation')
    if s1[-1] <= tol:
        failed.append('T1_bounded_below_sigma_min')
    if s2[-1] <= tol:
        failed.append('T2_injective_sigma_min')
    if invariance > tol:
        failed.append('W_invariant_under_T1')
    if orth_res > tol:
        failed.append('orthogonality')
    if failed:
        return LemmaOtReport(hyps, False, failed, None, power_cap)

    def span_of(mats):
        mats = [M for M in mats if M.shape[1] > 0]
        if not mats:
            return np.zeros((wdim, 0), dtype=complex)
        return linalg.orth(np.hstack(mats), tol)

    sum_w = span_of(w_chain)
    int_h = _stabilised(h_chain, tol)
    # identity (i): T1 distributes over the layered-sum-plus-intersection
    lhs1 = linalg.orth(S1 @ span_of([sum_w, int_h]), tol, floor=tol)
    rhs_layers = [linalg.orth(S1 @ X, tol, floor=tol) for X in w_chain]
    rhs_int = _stabilised([linalg.orth(S1 @ C, tol, floor=tol)
                           for C in h_chain], tol)
    rhs1 = span_of(rhs_layers + [rhs_int])
    res1 = linalg.subspace_distance(lhs1, rhs1)
    # identity (ii) with R the full window space
    lhs2 = linalg.orth(S1 @ int_h, tol, floor=tol)
    res2 = linalg.subspace_distance(lhs2, rhs_int)
    # identity (iii): intersection of T1-powers of the layered sum
    lhs3, _, _ = linalg.power_chain_intersection(S1, sum_w, tol, power_cap)
    core, _, _ = linalg.power_chain_intersection(S1, QW, tol, power_cap)
    rhs3 = span_of(_chain_spans(S2, core, tol, power_cap))
    res3 = linalg.subspace_distance(lhs3, rhs3)
    identities = {'identity_i': res1, 'identity_ii': res2,
                  'identity_iii': res3}
    return LemmaOtReport(hyps, True, [], identities, power_cap)
