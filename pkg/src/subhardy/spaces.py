"""Truncated coefficient model of the Hardy space on the polydisc.

A function analytic on the polydisc is represented by its Taylor
coefficients on the multi-index grid ``{(k_1, ..., k_n): k_i <= N_i}``.
The basis order is lexicographic with the last variable varying fastest
(C order of the coefficient grid), which for one variable is plain degree
order.  The squared norm of a coefficient vector is the sum of squared
coefficient moduli.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, SpaceMismatchError

__all__ = ['TruncatedHardySpace', 'CoefVector', 'inner_product']


@dataclass(frozen=True)
class TruncatedHardySpace:
    """Degree-capped coefficient model of the Hardy space in ``n`` variables.

    Parameters
    ----------
    caps : tuple of int
        Per-variable degree caps ``(N_1, ..., N_n)``; the model stores all
        monomial coefficients with ``k_i <= N_i``.
    """

    caps: tuple

    def __post_init__(self):
        caps = tuple(int(c) for c in self.caps)
        if len(caps) == 0 or any(c < 0 for c in caps):
            raise ArgumentError('caps must be a non-empty tuple of '
                                'non-negative integers')
        object.__setattr__(self, 'caps', caps)

    @property
    def n(self):
        return len(self.caps)

    @property
    def shape(self):
        return tuple(c + 1 for c in self.caps)

    @property
    def dim(self):
        return int(np.prod(self.shape))

    def basis_indices(self):
        """Multi-indices in basis order (last variable fastest)."""
        return list(np.ndindex(*self.shape))

    def index_of(self, multi):
        """Flat basis position of a monomial multi-index."""
        multi = tuple(int(k) for k in multi)
        if len(multi) != self.n:
            raise ArgumentError('multi-index has wrong length')
        if any(k < 0 or k > c for k, c in zip(multi, self.caps)):
            raise ArgumentError('multi-index %r outside caps %r'
                                % (multi, self.caps))
        return int(np.ravel_multi_index(multi, self.shape))

    def multi_of(self, flat):
        return tuple(int(k) for k in np.unravel_index(int(flat), self.shape))

    def zero(self):
        return CoefVector(self, np.zeros(self.dim, dtype=complex))

    def monomial(self, multi):
        """Coefficient vector of a single monomial."""
        v = np.zeros(self.dim, dtype=complex)
        v[self.index_of(multi)] = 1.0
        return CoefVector(self, v)


@dataclass(frozen=True)
class CoefVector:
    """A function in a :class:`TruncatedHardySpace`, stored coefficientwise."""

    space: TruncatedHardySpace
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        if c.size != self.space.dim:
            raise ArgumentError('coefficient length %d does not match space '
                                'dimension %d' % (c.size, self.space.dim))
        object.__setattr__(self, 'coeffs', c)

    @classmethod
    def from_grid(cls, space, grid):
        """Build from an nd coefficient grid of shape ``space.shape``."""
        grid = np.asarray(grid, dtype=complex)
        if grid.shape != space.shape:
            raise ArgumentError('grid shape %r does not match space shape %r'
                                % (grid.shape, space.shape))
        return cls(space, grid.reshape(-1))

    def grid(self):
        return self.coeffs.reshape(self.space.shape)

    def norm(self):
        return float(np.linalg.norm(self.coeffs))

    def __add__(self, other):
        _check_same_space(self, other)
        return CoefVector(self.space, self.coeffs + other.coeffs)

    def __sub__(self, other):
        _check_same_space(self, other)
        return CoefVector(self.space, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return CoefVector(self.space, self.coeffs * complex(scalar))

    __rmul__ = __mul__


def _check_same_space(f, g):
    if f.space != g.space:
        raise SpaceMismatchError('coefficient vectors live on different '
                                 'spaces: %r vs %r' % (f.space, g.space))


def inner_product(f, g):
    """Coefficient pairing ``sum_k f_k conj(g_k)`` of two model vectors."""
    _check_same_space(f, g)
    return complex(np.sum(f.coeffs * np.conj(g.coeffs)))
