"""Upper bounds for the second Laplacian eigenvalue of Kähler-Einstein metrics.

Toric manifolds are handled from moment-polytope data alone, Koiso-Sakane
manifolds from one-dimensional integrals, and explicit toric metrics through
a Rayleigh-Ritz spectral approximation.
"""

from .koiso_sakane import (KSData, futaki_integral, ks_bound, ks_family_wq, ks_integral,
                           ks_integrals)
from .moments import (MomentTensor, integrate_polynomial, moment_tensors, monomial_moment,
                      simplex_monomial_integral)
from .poly import MultiPoly
from .polytope import (Facet, Polytope, PolytopeError, Simplex, barycenter,
                       check_fano_normalized, parse_polytope, triangulate, vertices)
from .presets import PRESET_NAMES, disc_moments, preset
from .rayleigh_ritz import (SymplecticPotential, assemble_matrices, canonical_hessian,
                            doran_dp6, generalized_eigenvalues, potential_hessian,
                            rayleigh_ritz_spectrum)
from .toric_bound import (BoundResult, bound_at, bound_at_gradient_form,
                          bound_from_raw_moments, minimize_bound, toric_bound, whiten)

__version__ = "0.1.0"
