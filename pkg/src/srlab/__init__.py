"""Sub-Riemannian geometry on the Heisenberg, roto-translation and affine-additive groups."""
from .ccdist import CCConfig, CCEstimate, cc_distance, cc_lower_bound, dist_between_sets
from .groups import AA, H, RT, GroupId, GroupMismatch, GroupPoint, identity, inverse, multiply
from .maps import (MAP_F, MAP_G, SmoothMap, dilatation, map_f, map_g, map_g_inverse,
                   pullback_residual, pushforward_frame_coeffs)
from .measure import MCConfig, VolumeScan, ball_volume, growth_scan, haar_density

__version__ = "0.1.0"

__all__ = [
    "AA", "H", "RT", "CCConfig", "CCEstimate", "GroupId", "GroupMismatch", "GroupPoint",
    "MAP_F", "MAP_G", "MCConfig", "SmoothMap", "VolumeScan", "ball_volume", "cc_distance",
    "cc_lower_bound", "dilatation", "dist_between_sets", "growth_scan", "haar_density",
    "identity", "inverse", "map_f", "map_g", "map_g_inverse", "multiply", "pullback_residual",
    "pushforward_frame_coeffs",
]
