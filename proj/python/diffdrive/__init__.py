"""Differential-drive robot kinematics, controllers and simulation."""

import json as _json

from ._core import (
    BodyTwist,
    ConfigError,
    Error,
    InvalidArgument,
    PolarSingularity,
    Pose,
    ReferenceTooSlow,
    RobotGeometry,
    ScenarioConfig,
    SimTrace,
    WheelSpeeds,
    atan2_custom,
    characteristic_roots,
    design_gains,
    from_y_axis_heading,
    integrate_pose,
    load_scenario,
    parse_scenario,
    polar_transform,
    pose_derivative,
    ramp_factor,
    regulator_linearized_matrix,
    run_cli,
    run_scenario,
    stability_check,
    to_y_axis_heading,
    trace_csv_columns,
    tracking_closed_loop_matrix,
    tracking_error,
    twist_to_wheels,
    wheel_speed_to_power,
    wheels_to_twist,
    wrap_angle,
)


def summary(trace):
    """Summary block of a trace as a dict."""
    return _json.loads(trace.summary_json())


def simulate(path, overrides=()):
    """Loads a scenario file and runs it."""
    return run_scenario(load_scenario(path, list(overrides)))
