"""Exact curl spectra on flat tori, round spheres and spherical space forms."""

__version__ = "0.1.0"

from .analysis import (
    BoundReport,
    WeylReport,
    check_lower_bound,
    counting_identity_check_torus,
    eta_partial,
    weyl_fit,
    weyl_leading_coefficient,
    zeta_at_zero,
    zeta_partial,
)
from .errors import (
    CapExceededError,
    ClosureCapError,
    CountingIdentityError,
    CurlSpectrumError,
    FixedPointError,
    NumericalResidualError,
    ShellCapError,
    TruncationError,
    ValidationError,
)
from .exact import ExactReal
from .spaceform import (
    GroupElement,
    IsometryGroup,
    SeriesPair,
    assert_fixed_point_free,
    asymmetry_certificate,
    auxiliary_G,
    chi_pm,
    close_group,
    det_one_minus_z,
    lens_group,
    poincare_F,
    smallest_eigenvalue_multiplicities,
    spaceform_spectrum,
)
from .spectrum import (
    ManifoldDescriptor,
    SpectralLine,
    Spectrum,
    counting,
    symmetry_defect,
    validate_spectrum,
)
from .sphere import SphereParams, sphere_multiplicity, sphere_spectrum
from .torus import LatticeBasis, ShellTable, dual_lattice, enumerate_shells, identity_basis, torus_spectrum
