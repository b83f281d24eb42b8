"""Finite-truncation toolkit for operator theory on Hardy models.

Builds finite Blaschke products and the rational orthonormal bases they
generate, certifies near-isometries against the quadratic-form conditions
they are independent of, computes single-operator and doubly-commuting
Wold-type decompositions on windowed truncations, and extracts the
orthonormal generator family of an invariant sub-Hardy Hilbert space.
"""

from .blaschke import (BlaschkeProduct, TMComponent, TMIndex, evaluate,
                       tm_basis_coeffs, tm_component)
from .debranges import (ContractionReport, GeneratorSet, ModelSubspace,
                        extract_generators, verify_component_vanishing,
                        verify_contraction_property, verify_independence,
                        verify_norm_identity)
from .errors import (ArgumentError, BoundViolationError, CapError,
                     CapWarning, CertificationError, DomainError,
                     InvarianceError, NormalizationError, ParseError,
                     SpaceMismatchError, ToolkitError, WindowError)
from .gallery import (LatticeCompositionModel, WeightedShiftModel,
                      lattice_composition_operator, section2_report,
                      weighted_shift)
from .hardy import (MultiplicationOperator, St7Decomposition,
                    b_power_indices, hardy_B_basis, multiplication_loss,
                    multiplication_matrix, st7_decompose,
                    tensor_tm_basis_coeffs)
from .operators import (NearIsometryCertificate, OperatorMatrix,
                        ReductionReport, ShimorinReport,
                        doubly_commuting_residual, joint_window,
                        kernel_range_duality, near_isometry_certificate,
                        shimorin_check, verify_reduction_properties,
                        wandering_basis)
from .spaces import CoefVector, TruncatedHardySpace, inner_product
from .wold import (LemmaOtReport, MultiWoldDecomposition, RestrictionClass,
                   WoldDecomposition, classify_restriction, lemma_ot_check,
                   multivariable_wold, wold_decompose)

__version__ = '0.1.0'
