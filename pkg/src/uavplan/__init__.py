"""UAV mission planning: 2-opt tour ordering plus grid A* obstacle avoidance."""

from .astar import CellPath, SearchStats, astar, heuristic, prune_collinear
from .errors import (GenerationError, InfeasibleEndpointError, InfeasibleMissionError,
                     InvalidEndpointError, InvalidTransformError, OutOfBoundsError,
                     PlanningError, SceneFormatError)
from .geo import GeoPoint, GeoTransform, PixelPoint, geo_from_pixel, haversine_m, pixel_from_geo, polyline_length_m
from .grid import CellIndex, GridSpec, Obstacle, OccupancyGrid, build_grid, cell_of, center_of, is_traversable
from .metrics import (MetricsReport, Trajectory, dtw_rmse, knn_rmse, report, resample_by_arclength,
                      sequential_rmse)
from .planner import (Mission, MissionItem, MissionParams, Scene, build_cost_matrix, plan,
                      plan_astar_seq, plan_hybrid, plan_input_order, plan_tsp_euclid, snap_endpoint)
from .sceneio import GenParams, generate_scene, load_reference, load_scene, save_mission, save_scene
from .tsp import Tour, brute_force_tsp, nearest_neighbor_init, tour_length, two_opt

__version__ = "0.1.0"
