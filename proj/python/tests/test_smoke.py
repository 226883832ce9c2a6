import math
import os
from pathlib import Path

import numpy as np
import pytest

import diffdrive as dd

SCENARIOS = Path(
    os.environ.get("DIFFDRIVE_SCENARIO_DIR", Path(__file__).resolve().parents[2] / "scenarios")
)


def test_kinematics_round_trip():
    twist = dd.wheels_to_twist(dd.WheelSpeeds(10.0, 10.0))
    assert twist.v == pytest.approx(0.275)
    wheels = dd.twist_to_wheels(dd.BodyTwist(0.0, 1.0))
    assert wheels.omega_r == pytest.approx(0.0675 / 0.0275)
    assert dd.pose_derivative(dd.Pose(0, 0, 0), dd.BodyTwist(1, 0)) == (0.0, 1.0, 0.0)
    assert dd.wrap_angle(-math.pi) == math.pi


def test_design_gains_and_roots():
    k1, k2, k3 = dd.design_gains(1.0, 1.0, 0.5, 0.0)
    assert (k1, k2, k3) == (2.0, 2.0, 2.0)
    a = dd.tracking_closed_loop_matrix(k1, k2, k3, 0.5, 0.0)
    roots = dd.characteristic_roots(a)
    assert np.allclose(sorted(r.real for r in roots), [-2, -1, -1], atol=1e-9)
    assert np.allclose(np.sort(np.linalg.eigvals(a).real), [-2, -1, -1], atol=1e-6)
    with pytest.raises(dd.ReferenceTooSlow):
        dd.design_gains(1.0, 1.0, 0.0)


def test_regulator_helpers():
    assert dd.atan2_custom(0.0, 0.0) == 0.0
    assert dd.atan2_custom(1.0, -1.0) == pytest.approx(math.atan2(1.0, -1.0))
    r, e, th = dd.polar_transform(dd.Pose(0, 0, math.pi / 2), dd.Pose(1, 1, math.pi), "x_axis")
    assert (r, e, th) == pytest.approx((math.sqrt(2), -math.pi / 4, 3 * math.pi / 4))
    assert dd.stability_check(0.4, 2.0, -1.0) == (True, [])
    assert dd.stability_check(1.0, 1.0, -1.0) == (False, ["k_etheta - k_r > 0"])
    assert dd.wheel_speed_to_power(20.0) == (100.0, True)


def test_regulation_scenario_converges():
    trace = dd.simulate(SCENARIOS / "nxt_regulation.json")
    s = dd.summary(trace)
    assert trace.converged and not trace.diverged
    assert s["final_error_norm"] < 0.02
    assert abs(s["final_pose_true"]["theta"] - math.pi) < 0.05
    csv = trace.to_csv()
    assert csv.splitlines()[0] == ",".join(dd.trace_csv_columns())
    assert csv == dd.simulate(SCENARIOS / "nxt_regulation.json").to_csv()


def test_config_errors_name_the_key():
    with pytest.raises(dd.ConfigError, match="wheel_diameter"):
        dd.parse_scenario('{"goal": {"x": 1, "y": 1}, "wheel_diameter": 0.05}')
    config = dd.parse_scenario('{"goal": {"x": 1, "y": 1}}', ["max_time=0.3"])
    assert config.mode == "regulation"
    assert len(dd.run_scenario(config)) == 10


def test_cli_entry_point():
    code, out, err = dd.run_cli(["check-stability", "--k-r", "0.4", "--k-etheta", "2",
                                 "--k-thetaE", "-1"])
    assert code == 0
    assert out.startswith("verdict = stable\n")
    code, _, err = dd.run_cli(["design-gains", "--xi", "1", "--omega-n", "1", "--v-ref", "0"])
    assert code == 3
    assert "reference too slow" in err
