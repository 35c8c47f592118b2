"""Multiplier-based spectral computations for Schrodinger operators on
metric Cayley graphs of free groups.

The operator -D^2 + q on the 2M-regular metric tree of the rank-M free
group admits M multiplier functions mu_m(lambda), one per edge type, which
solve a coupled quadratic system, build the resolvent kernel, and locate
the spectrum through the reality of their boundary values on [0, infinity).
"""

from .errors import (ConfigError, ExceptionalPointError, NoCandidateError,
                     PathStallError, QCayleyError)
from .fundamental import (FundamentalPair, fundamental_at_length,
                          fundamental_pair, fundamental_samples,
                          sturm_zero_near)
from .graph import (CayleyConfig, EdgeSpec, PotentialSpec, Word,
                    enumerate_subtree_vertices, enumerate_words, reduce_word,
                    tree_edges)
from .multipliers import (DEFAULT_TOL, MultiplierSet, QuarticCoefficients,
                          ToleranceConfig, continuation_solve,
                          gradient_singularity_check, partner_multipliers,
                          polynomial_roots, quartic_coefficients_M2,
                          solve_equal_length, solve_multipliers,
                          summability_check, system_residual)
from .oracle import (DiscreteOperator, TruncatedTree, assemble,
                     build_truncated, discrete_resolvent_compare,
                     low_eigenvalues)
from .resolvent import (TreeFunction, apply_resolvent, bump_profile,
                        edge_interpolate, kernel_eval, root_edge_key,
                        vertex_value, wronskian)
from .spectrum import (Band, Classification, SpectralSample,
                       multipliers_on_axis, periodicity_check, scan_bands,
                       spectral_lower_bound)

__version__ = "0.1.0"
