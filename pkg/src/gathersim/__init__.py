"""Bearing-only, limited-visibility gathering of planar agent swarms."""
from .analysis import (ConnectivityLedger, MetricsRecord, check_rate_bound,
                       connectivity_audit, gathering_time_bound, hull_metrics,
                       mu_bound)
from .dynamics import (ConstantGain, ConstantSpeed, GeneralGain, RunResult,
                       SimEvent, SwarmState, agent_velocity, merge_coincident,
                       simulate, step)
from .geometry import HullSummary, convex_hull, interior_angles, unit_bearing
from .polygon_bounds import (AngleConfig, brute_force_min, case_values,
                             descent_run, descent_step, theorem1_bound)
from .scenario_io import (Scenario, gen_cone_near_minimum, gen_random_connected,
                          gen_regular_polygon, load_scenario, save_scenario,
                          write_run)
from .sensing import (BearingSet, ExtremalResult, bearing_set, extremal_sweep,
                      extremal_vector_sum, extremal_weights, is_connected,
                      visibility_graph)

__version__ = "0.1.0"
