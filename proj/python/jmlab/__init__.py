"""Reweighted kinetic metrics, cone geometry and action minimization.

Thin re-export of the compiled _jmlab module; see list_scenarios() for the
scenario catalogue of the command-line tool.
"""

from ._jmlab import (
    Potential,
    action_length_bridge,
    apex_extendibility,
    band_minimum,
    blowup_rescale,
    brake_retrace_check,
    cone_distance,
    cone_radius,
    corner_cut,
    discrete_action,
    from_cone_coordinate,
    g17,
    gauss_curvature_fd,
    jm_length,
    kepler_gauss_curvature,
    list_scenarios,
    marchal_condition,
    minimize_fixed_time,
    oracle_shortest_path,
    run_scenario,
    to_cone_coordinate,
    validate_config,
)

__all__ = [
    "Potential",
    "action_length_bridge",
    "apex_extendibility",
    "band_minimum",
    "blowup_rescale",
    "brake_retrace_check",
    "cone_distance",
    "cone_radius",
    "corner_cut",
    "discrete_action",
    "from_cone_coordinate",
    "g17",
    "gauss_curvature_fd",
    "jm_length",
    "kepler_gauss_curvature",
    "list_scenarios",
    "marchal_condition",
    "minimize_fixed_time",
    "oracle_shortest_path",
    "run_scenario",
    "to_cone_coordinate",
    "validate_config",
]
