"""Finite Blaschke products and the rational orthonormal bases they generate.

A finite Blaschke product with zeros ``a_1, ..., a_r`` in the open unit
disc is the product of the Moebius factors ``(z - a_l) / (1 - conj(a_l) z)``.
With the normalisation ``a_1 = 0`` the functions

    e_{j m} = khat_{j+1} * B_j * B**m,    0 <= j <= r - 1,  m >= 0,

form an orthonormal basis of the Hardy space of the disc, where ``B_j`` is
the partial product of the first ``j`` factors (``B_0 = 1``) and
``khat_j`` is the normalised Cauchy kernel at ``a_j``.  For ``B = z`` the
family reduces to the monomials.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (ArgumentError, CapError, CapWarning, DomainError,
                     NormalizationError)
from .spaces import CoefVector, TruncatedHardySpace

__all__ = ['BlaschkeProduct', 'TMIndex', 'TMComponent', 'evaluate',
           'tm_component', 'tm_basis_coeffs']

#: evaluation is permitted up to this much beyond the closed unit disc
_BOUNDARY_SLACK = 1e-12


@dataclass(frozen=True)
class BlaschkeProduct:
    """A finite Blaschke product given by its ordered list of zeros.

    Parameters
    ----------
    zeros : sequence of complex
        Zeros ``a_1, ..., a_r``, all of modulus < 1.  Partial products use
        the zeros in the given order.
    allow_unnormalized : bool
        By default the first zero must be the origin (the normalisation
        under which the generated family is orthonormal and complete);
        passing ``True`` admits other first zeros, in which case the
        basis-generating operations refuse to run.
    """

    zeros: tuple
    allow_unnormalized: bool = False

    def __post_init__(self):
        zs = tuple(complex(z) for z in self.zeros)
        if len(zs) == 0:
            raise ArgumentError('a Blaschke product needs at least one zero')
        if any(abs(z) >= 1.0 for z in zs):
            raise ArgumentError('all zeros must lie in the open unit disc')
        if not self.allow_unnormalized and zs[0] != 0:
            raise NormalizationError(
                'first zero must be 0 (pass allow_unnormalized=True to '
                'construct anyway; basis generation will then refuse)')
        object.__setattr__(self, 'zeros', zs)

    @property
    def degree(self):
        return len(self.zeros)

    @property
    def normalized(self):
        return self.zeros[0] == 0

    @property
    def max_zero_modulus(self):
        return max(abs(z) for z in self.zeros)

    def origin_zero_count(self, j=None):
        """Number of zeros at the origin among the first ``j`` factors.

        This is the order of vanishing of the partial product ``B_j`` at 0
        (of the full product when ``j`` is omitted).
        """
        if j is None:
            j = self.degree
        return sum(1 for z in self.zeros[:j] if z == 0)

    def __call__(self, z):
        return evaluate(self, z)

    def partial(self, j, z):
        """Evaluate the partial product ``B_j`` (first ``j`` factors)."""
        if not 0 <= j <= self.degree:
            raise ArgumentError('partial-product index out of range')
        z = _check_domain(z)
        out = np.ones_like(z)
        for a in self.zeros[:j]:
            out = out * (z - a) / (1.0 - np.conj(a) * z)
        return out

    def coefficients(self, cap):
        """Taylor coefficients of the product through degree ``cap``."""
        return _partial_coeffs(self, self.degree, cap)

    def tail_policy_ok(self, cap):
        """Whether ``cap`` satisfies the recommended tail-bound policy."""
        rho = self.max_zero_modulus
        if rho == 0.0:
            return True
        return cap >= 50.0 / (1.0 - rho)


@dataclass(frozen=True)
class TMIndex:
    """Index pair ``(j, m)`` of a basis element ``e_{j m}``."""

    j: int
    m: int

    def __post_init__(self):
        if self.j < 0 or self.m < 0:
            raise ArgumentError('TM indices must be non-negative')

    def validate(self, degree):
        if self.j > degree - 1:
            raise ArgumentError('j=%d out of range for degree %d'
                                % (self.j, degree))


def _check_domain(z):
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > 1.0 + _BOUNDARY_SLACK):
        raise DomainError('evaluation point outside the closed unit disc')
    return z if z.ndim else complex(z)


def evaluate(B, z):
    """Evaluate ``B`` at ``z`` (scalar or array, ``|z| <= 1`` up to slack).

    On the unit circle the result has modulus one up to rounding.
    """
    return B.partial(B.degree, z)


def _geometric_coeffs(alpha, cap):
    # 1 / (1 - conj(alpha) z) = sum conj(alpha)^k z^k
    return np.conj(alpha) ** np.arange(cap + 1)


def _mobius_coeffs(alpha, cap):
    # (z - alpha) / (1 - conj(alpha) z) truncated at cap
    g = _geometric_coeffs(alpha, cap)
    c = np.empty(cap + 1, dtype=complex)
    c[0] = -alpha * g[0]
    c[1:] = g[:-1] - alpha * g[1:]
    return c

def _partial_coeffs(B, j, cap):
    out = np.zeros(cap + 1, dtype=complex)
    out[0] = 1.0
    for a in B.zeros[:j]:
        out = np.convolve(out, _mobius_coeffs(a, cap))[:cap + 1]
    return out


def _khat_coeffs(alpha, cap):
    return np.sqrt(1.0 - abs(alpha) ** 2) * _geometric_coeffs(alpha, cap)


def _warn_tail_policy(B, cap):
    if not B.tail_policy_ok(cap):
        rho = B.max_zero_modulus
        warnings.warn(
            'cap %d is below the tail policy %.0f for max zero modulus %.3f;'
            ' stored coefficients are exact but tail estimates beyond the'
            ' cap may matter' % (cap, 50.0 / (1.0 - rho), rho),
            CapWarning, stacklevel=3)


def _require_normalized(B):
    if not B.normalized:
        raise NormalizationError('basis generation requires the first zero '
                                 'at the origin')


def _tm_coeffs(B, j, m, cap):
    """Taylor coefficients of ``e_{j m}`` through ``cap``, no cap policing."""
    coeffs = _khat_coeffs(B.zeros[j], cap)
    if j > 0:
        coeffs = np.convolve(coeffs, _partial_coeffs(B, j, cap))[:cap + 1]
    if m > 0:
        Bc = B.coefficients(cap)
        for _ in range(m):
            coeffs = np.convolve(coeffs, Bc)[:cap + 1]
    return coeffs


@dataclass(frozen=True)
class TMComponent:
    """The function ``e_{j 0} = khat_{j+1} B_j``, exposed two ways.

    ``evaluate`` gives pointwise values on the closed disc and
    ``coefficients`` gives Taylor coefficients through a requested cap.
    """

    blaschke: BlaschkeProduct
    j: int

    def evaluate(self, z):
        B = self.blaschke
        z = _check_domain(z)
        a = B.zeros[self.j]
        khat = np.sqrt(1.0 - abs(a) ** 2) / (1.0 - np.conj(a) * z)
        return khat * B.partial(self.j, z)

    __call__ = evaluate

    def coefficients(self, cap):
        _warn_tail_policy(self.blaschke, cap)
        return _tm_coeffs(self.blaschke, self.j, 0, cap)


def tm_component(B, j):
    """The component ``e_{j 0}`` of the basis generated by ``B``.

    ``j`` must lie in ``[0, degree - 1]``; the product must be normalised.
    """
    _require_normalized(B)
    if not 0 <= j <= B.degree - 1:
        raise ArgumentError('component index j=%d out of range [0, %d]'
                            % (j, B.degree - 1))
    return TMComponent(B, j)


def tm_basis_coeffs(B, idx, cap):
    """Coefficient vector of the basis element ``e_{j m}`` through ``cap``.

    Requires ``cap >= degree * (m + 1)``.  The stored coefficients are exact
    (series truncation only discards orders beyond the cap), so the exact
    window of the result is the whole vector.
    """
    _require_normalized(B)
    if not isinstance(idx, TMIndex):
        idx = TMIndex(*idx)
    idx.validate(B.degree)
    if cap < B.degree * (idx.m + 1):
        raise CapError('cap %d insufficient for (j, m)=(%d, %d) with degree '
                       '%d; need cap >= %d'
                       % (cap, idx.j, idx.m, B.degree,
                          B.degree * (idx.m + 1)))
    _warn_tail_policy(B, cap)
    space = TruncatedHardySpace((cap,))
    return CoefVector(space, _tm_coeffs(B, idx.j, idx.m, cap))
