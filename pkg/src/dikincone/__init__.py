"""Lorenz cones built on Dikin ellipsoids, their spectra, and invariance tests."""

from .cone import (
    ConeConstruction,
    LorenzCone,
    Membership,
    classify,
    construct_axis,
    construct_general,
    construct_ones,
    construct_tangent_sphere,
    membership,
    sandwich_decompose,
    standard_cone,
    standardize,
    verify_conditions,
)
from .errors import ConeError
from .geometry import (
    DikinEllipsoid,
    Ellipsoid,
    EllipsoidSlice,
    Hyperplane,
    complementary_basis,
    distance_to_hyperplane,
    ones_complement_basis,
    sample_boundary,
    sample_interior,
)
from .invariance import (
    LinearSystem,
    certificate_scan,
    certify_cone,
    certify_ellipsoid,
    nagumo_falsify,
    simulate,
)
from .spectral import (
    ArrowheadMatrix,
    arrowhead_charpoly,
    arrowhead_eigenvalues,
    det_axis_cone,
    det_identity_plus_rank_one,
    equal_c_spectrum,
    inertia,
    lambda1_bounds_axis_cone,
    rank_one_spectrum,
    spectral_report,
)

__version__ = "0.1.0"
