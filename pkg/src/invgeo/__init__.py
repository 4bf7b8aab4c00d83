"""Geodesics on surfaces invariant under a one-parameter group of isometries."""
from .closed_forms import (
    BRANCH_CASES,
    BRANCHES,
    ClosedFormFamily,
    Curvature,
    OmegaSolution,
    closed_form_v,
    crosscheck_closed_form,
    solve_omega,
)
from .engine import (
    GeodesicPath,
    GeodesicState,
    IntegratorControl,
    Slant,
    angle_with_orbit,
    clairaut_slant,
    geodesic_by_quadrature,
    integrate_geodesic,
    is_orbit_geodesic,
    state_from_angle,
    state_from_slant,
    stitch_quadrature,
    turning_points,
)
from .errors import *  # noqa: F401,F403
from .fixtures import fixture_profile
from .spaces import (
    BCV,
    AmbientSpace,
    EuclideanRotational,
    H2xR_G14,
    H2xR_G24,
    H2xR_G34,
    catalog_surface,
    clairaut_in_distance,
    distance_from_radius,
    funnel_embedding,
    funnel_profile,
    horizontal_lift_G34,
    hyperbolic_distance,
    omega_at,
    orbit,
    parse_space,
    radius_from_distance,
)
from .surface import (
    HorizontalProfile,
    Interval,
    MetricProfile,
    ScalarProfile,
    gauss_curvature,
    load_profile,
    profile_from_exprs,
    save_profile,
    validate_metric_identity,
    verify_constant_curvature,
)
