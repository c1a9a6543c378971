"""Local-unitary invariants of multipartite states built from reduced density matrices."""
from .catalog import example4_pair, ghz, lo_orbit, lu_orbit, qutrit_psi, random_pure, w
from .equivalence import INCONCLUSIVE, NOT_EQUIVALENT, Verdict, compare, render_report
from .errors import ComparisonError, FormatError, LUInvError, NumericsError, ValidationError
from .invariants import (Fingerprint, InvariantSet, OmegaMatrix, bipartite_invariants,
                         full_fingerprint, kbody_invariants, omega_matrix, one_body_spectra,
                         reduced_eigensystem, robust_invariants)
from .multilinear import (DensityMatrix, PureState, SubsystemSet, SystemShape,
                          density_from_pure, fold, partial_trace, unfold, validate_density,
                          validate_pure)
from .numerics import (WeightedEigensystem, canonical_phase_fix, char_poly_coefficients,
                       haar_random_orthogonal, haar_random_unitary, hermitian_eigendecomposition)

__version__ = "0.1.0"
