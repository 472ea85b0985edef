"""Power of a point, inversion and radical hyperplanes in the Poincaré ball."""

from .diagram import Arrangement, CellReport, CellStats, assign_cell, assign_cells, cell_boundaries_2d, disk_area, estimate_density
from .errors import HypowError, NumericError, ValidationError
from .inversion import (
    InversionSphere,
    SphericalCircle,
    domain_boundary,
    euclidean_invert_point,
    euclidean_invert_sphere,
    hyperbolic_domain_radius,
    hyperbolic_invert_cycle,
    hyperbolic_invert_point,
    negative_invert_point,
    negative_invert_sphere,
    spherical_invert_point,
    spherical_power_product,
)
from .model import (
    Geodesic,
    GeneralizedSphere,
    Hyperplane,
    Isometry,
    Kind,
    ModelPoint,
    Plane,
    Sphere,
    apply_isometry_point,
    apply_isometry_sphere,
    apply_isometry_surface,
    branch_completion,
    classify_model_sphere,
    distance_to_hyperplane,
    from_surface,
    geodesic_through,
    horosphere_from,
    hyperbolic_distance,
    hypersphere_branch,
    ideal_point,
    intersect_geodesic,
    origin,
    other_branch,
    point,
    sphere_from_center_radius,
    translate_to_origin,
)
from .power import PowerRegime, PowerValue, branch_power, closed_form_power, secant_product, signed_power, tangent_length
from .radical import RadicalKind, RadicalResult, equal_power_point, radical_center, radical_surface
from .scene import Scene, emit_scene, load_scene, parse_scene
from .svg import render_svg

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
