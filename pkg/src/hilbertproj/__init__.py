"""Hilbert geometry of convex projective sets.

Projective points and maps, convex bodies and cones, the Hilbert metric,
group actions, invariant cone splittings and equivariant maps between cones.
"""
from .catalog import Scene, catalog_build, default_scenes
from .cones import (ConvexCone, Decomposition, commutant_basis, cone_over, invariant_splitting,
                    orthant, verify_decomposition)
from .convex import (Chord, ConvexBody, NotEnumerable, Position, chord_endpoints, contains,
                     extreme_points, is_extreme, is_strictly_convex, segment_witness)
from .equivariant import (BlendResult, EquivariantSpace, Equivariance, Factorization, Status,
                          blend_interval, boundary_reconstruct, equivariant_solution_space,
                          factorize, family_evaluate, homotopy_agreement, maps_cone_to_cone)
from .errors import *  # noqa: F401,F403
from .groups import GroupGens, OrbitBall, centralizes, cone_lift, orbit_ball, preserves_body
from .hilbert import (MetricSample, check_contraction, check_isometry, cone_hilbert_distance,
                      distance_batch, hilbert_distance, hopf_distance)
from .projective import (AffineChart, ProjLine, ProjLinearMap, ProjPoint, cross_ratio,
                         directional_limit, discontinuity_witness, kernel_and_rank,
                         limit_of_maps, proj_apply, proj_distance, proj_equal)
from .reports import CheckReport
from .suites import SuiteReport, emit_samples, run_check_suite

__version__ = "0.1.0"
