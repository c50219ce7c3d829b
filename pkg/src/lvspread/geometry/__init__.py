"""Direction sets, speed profiles, spreading sets and hypothesis checks (planar case)."""

from .conditions import (
    ConditionReport,
    Verdict,
    check_direction_cover,
    check_path_condition,
    check_star_shaped,
    check_strict_dominance_closure,
    region_where_greater,
)
from .directions import TWO_PI, Arc, DirectionSet, angle_of, normalize_angle, unit
from .profiles import (
    SpeedProfile,
    dominance_set,
    hull_extent,
    inner_objective,
    profiles_to_csv,
    project_onto_cone,
    s_u_profile,
    speed_by_sup,
    speed_profile,
)
from .sets import SpreadingSets, spreading_sets
from .shapes import (
    Ball,
    BallChain,
    Complement,
    Cone,
    HalfPlane,
    Strip,
    SupportSpec,
    Translate,
    Union,
    bounded_directions,
    contains_chain,
    positive_distance_interior,
    spec_from_dict,
    unbounded_directions,
)

__all__ = [
    "TWO_PI", "Arc", "DirectionSet", "angle_of", "normalize_angle", "unit",
    "SupportSpec", "Ball", "HalfPlane", "Cone", "Strip", "BallChain", "Union", "Translate", "Complement",
    "spec_from_dict", "unbounded_directions", "bounded_directions", "positive_distance_interior", "contains_chain",
    "SpeedProfile", "speed_profile", "speed_by_sup", "project_onto_cone", "dominance_set", "s_u_profile",
    "hull_extent", "inner_objective", "profiles_to_csv",
    "ConditionReport", "Verdict", "check_direction_cover", "check_path_condition", "check_star_shaped",
    "check_strict_dominance_closure", "region_where_greater",
    "SpreadingSets", "spreading_sets",
]
