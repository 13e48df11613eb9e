"""
Senaryo kinematiği, ölçüm üretimi, koşucu ve konfigürasyon testleri
"""
import json

import numpy as np
import pandas as pd
import pytest
from scipy.spatial.transform import Rotation

from analysis.groups import (
    SIDE_INVERSE,
    AlgebraElement,
    GroupElement,
    SimAlgebraElement,
    act,
    hat,
    random_rotation,
)
from analysis.immersion import CASE_1
from config.scenario_config import (
    SCENARIO_ROTATING_EARTH,
    SCENARIO_SLAM_MOT,
    config_from_dict,
    get_scenario_preset,
    parse_config,
    serialize_config,
    with_overrides,
)
from config.settings import SCENARIO_DEFAULTS
from conftest import preset_params, quick_config
from output.export_manager import ExportManager
from simulation.convergence_metrics import ConvergenceMetrics
from simulation.measurement_generator import synthesize_measurements
from simulation.scenario_runner import trajectory_columns, run_scenario
from simulation.scenarios import (
    SinusoidalInput,
    bias_element,
    build_rotating_earth_spec,
    extract_rotating_earth_state,
    far_initialization,
    propagate_truth,
    rotating_earth_state,
)
from utils.exceptions import ConfigurationError, ConfigValidationError
from utils.helpers import rotation_angle_deg


class TestSlamKinematics:
    def test_free_fall_closed_form(self, slam_spec):
        p0, v0 = np.array([1.0, 2.0, 3.0]), np.array([0.5, -0.2, 1.0])
        l0, q0, c0 = np.array([5.0, 5.0, 0.0]), np.array([-5.0, 5.0, 2.0]), np.array([0.5, 0.0, 0.3])
        T = GroupElement(np.eye(3), np.column_stack([p0, v0, l0, q0, c0]), 5)
        g = np.array([0.0, 0.0, -9.81])
        u = AlgebraElement.zero(3, 5)

        h, steps = 0.01, 100
        for step in range(steps):
            T = propagate_truth(T, u, slam_spec.generator, CASE_1, h, step * h)

        tau = steps * h
        np.testing.assert_allclose(T.W[:, 0], p0 + v0 * tau + 0.5 * g * tau ** 2, atol=1e-9)
        np.testing.assert_allclose(T.W[:, 1], v0 + g * tau, atol=1e-9)
        np.testing.assert_allclose(T.W[:, 2], l0, atol=1e-12)
        np.testing.assert_allclose(T.W[:, 3], q0 + c0 * tau, atol=1e-9)
        np.testing.assert_allclose(T.W[:, 4], c0, atol=1e-12)
        np.testing.assert_allclose(T.R, np.eye(3), atol=1e-12)


def test_pure_rotation_closed_form(rng):
    generator = SimAlgebraElement.zero(3, 2)
    omega = np.array([0.3, -0.7, 0.5])
    u = AlgebraElement(omega, np.zeros((3, 2)))
    R0 = random_rotation(rng, 3)
    T0 = GroupElement(R0, rng.standard_normal((3, 2)), 2)

    T = T0
    h = 0.01
    for step in range(100):
        T = propagate_truth(T, u, generator, CASE_1, h, step * h)

    expected = R0 @ Rotation.from_rotvec(omega * 1.0).as_matrix()
    np.testing.assert_allclose(T.R, expected, atol=1e-8)
    np.testing.assert_allclose(T.W, T0.W, atol=1e-12)


def test_rotating_earth_kinematics(rng):
    earth_rate = np.array([0.01, -0.02, 0.5])
    params = preset_params(SCENARIO_ROTATING_EARTH)
    params.earth_rate = earth_rate.tolist()
    spec = build_rotating_earth_spec(params)

    p, v = np.array([3.0, -1.0, 2.0]), np.array([0.4, 1.2, -0.3])
    R = random_rotation(rng, 3)
    T = GroupElement(R, rotating_earth_state(p, v, earth_rate), 2)

    a = np.array([0.2, -0.5, 1.0])
    rho = np.zeros((3, 2))
    rho[:, 1] = a
    u = AlgebraElement(rng.standard_normal(3), rho)

    eps = 1e-5
    p_f, v_f = extract_rotating_earth_state(propagate_truth(T, u, spec.generator, CASE_1, eps), earth_rate)
    p_b, v_b = extract_rotating_earth_state(propagate_truth(T, u, spec.generator, CASE_1, -eps), earth_rate)

    W_x = hat(earth_rate, 3)
    g = np.asarray(params.gravity)
    np.testing.assert_allclose((p_f - p_b) / (2 * eps), v, atol=1e-6)
    np.testing.assert_allclose(
        (v_f - v_b) / (2 * eps), -2.0 * W_x @ v - W_x @ W_x @ p + g + R @ a, atol=1e-6
    )


class TestInputs:
    def test_gravity_compensation(self):
        config = quick_config(SCENARIO_ROTATING_EARTH)
        inputs = SinusoidalInput(config.input, [0.0, 0.0, -9.81], 2)
        R = Rotation.from_rotvec([0.0, 0.0, np.pi / 2]).as_matrix()
        u = inputs.true_input(0.0, R)
        # t = 0'da dünya ivmesi fazlardan gelir
        accel_world = np.asarray(config.input.accel_amp) * np.sin(np.asarray(config.input.accel_phase))
        np.testing.assert_allclose(R @ u.rho[:, 1], accel_world - np.array([0.0, 0.0, -9.81]), atol=1e-12)
        np.testing.assert_array_equal(u.rho[:, 0], 0.0)

    def test_measured_input_removes_bias(self):
        config = quick_config(SCENARIO_ROTATING_EARTH, bias={'enabled': True, 'omega': [0.01, 0.0, 0.0],
                                                               'accel': [0.0, 0.1, 0.0]})
        bias = bias_element(config.bias, 3, 2)
        u = AlgebraElement(np.ones(3), np.ones((3, 2)))
        measured = SinusoidalInput.measured_input(u, bias)
        np.testing.assert_allclose((measured + bias).to_vector(), u.to_vector())
        assert bias.rho[1, 1] == pytest.approx(0.1)
        assert bias.rho[1, 0] == 0.0

    def test_disabled_bias_is_zero(self):
        bias = bias_element(quick_config(SCENARIO_SLAM_MOT).bias, 3, 5)
        np.testing.assert_array_equal(bias.to_vector(), 0.0)


def test_far_initialization(rng):
    T = GroupElement(np.eye(3), np.zeros((3, 2)), 2)
    T_hat = far_initialization(T, 175.0, 100.0, rng)
    assert rotation_angle_deg(T.R.T @ T_hat.R) == pytest.approx(175.0, abs=1e-6)
    np.testing.assert_allclose(np.linalg.norm(T_hat.W - T.W, axis=0), 100.0)


class TestMeasurements:
    def test_noise_free_values(self, rng, rotating_earth_spec):
        T = GroupElement(random_rotation(rng, 3), rng.standard_normal((3, 2)), 2)
        batch = synthesize_measurements(T, rotating_earth_spec, rng)
        for i in (0, 1):
            expected = act(T, rotating_earth_spec.measurements[i].direction, SIDE_INVERSE)[:3]
            np.testing.assert_allclose(batch.values[i], expected, atol=1e-12)

        bearing = act(T, rotating_earth_spec.measurements[2].direction, SIDE_INVERSE)[:3]
        np.testing.assert_allclose(batch.values[2], bearing / np.linalg.norm(bearing), atol=1e-12)
        ranged = act(T, rotating_earth_spec.measurements[3].direction, SIDE_INVERSE)[:3]
        assert batch.values[3] == pytest.approx(np.linalg.norm(ranged))
        assert batch.valid.all()

    def test_same_seed_same_batch(self, rotating_earth_spec):
        T = GroupElement(np.eye(3), np.ones((3, 2)), 2)
        noise = [0.1, 0.1, 0.05, 0.2]
        first = synthesize_measurements(T, rotating_earth_spec, np.random.default_rng(5), noise)
        second = synthesize_measurements(T, rotating_earth_spec, np.random.default_rng(5), noise)
        for a, b in zip(first.values, second.values):
            np.testing.assert_array_equal(a, b)

    def test_landmark_noise_std(self, rng, rotating_earth_spec):
        T = GroupElement(np.eye(3), np.zeros((3, 2)), 2)
        truth = act(T, rotating_earth_spec.measurements[0].direction, SIDE_INVERSE)[:3]
        samples = np.array([
            synthesize_measurements(T, rotating_earth_spec, rng, [0.5, 0.0, 0.0, 0.0]).values[0]
            for _ in range(4000)
        ])
        np.testing.assert_allclose(samples.mean(axis=0), truth, atol=0.05)
        np.testing.assert_allclose(samples.std(axis=0), 0.5, rtol=0.05)

    def test_degenerate_bearing_invalid(self, rng, rotating_earth_spec):
        bearing_landmark = rotating_earth_spec.measurements[2].direction[:3]
        W = np.column_stack([bearing_landmark, np.zeros(3)])
        batch = synthesize_measurements(GroupElement(np.eye(3), W, 2), rotating_earth_spec, rng)
        assert not batch.valid[2]
        assert batch.valid[[0, 1, 3]].all()

    def test_range_clipped_at_zero(self, rng, rotating_earth_spec):
        range_landmark = rotating_earth_spec.measurements[3].direction[:3]
        T = GroupElement(np.eye(3), np.column_stack([range_landmark, np.zeros(3)]), 2)
        values = [synthesize_measurements(T, rotating_earth_spec, rng, [0, 0, 0, 1.0]).values[3] for _ in range(50)]
        assert min(values) >= 0.0


class TestScenarioRunner:
    @pytest.mark.parametrize("scenario", [SCENARIO_ROTATING_EARTH, SCENARIO_SLAM_MOT])
    def test_truth_initialization_stays_exact(self, scenario):
        log = run_scenario(quick_config(scenario))
        assert list(log.frame.columns) == trajectory_columns(2 if scenario == SCENARIO_ROTATING_EARTH else 5)
        assert len(log.frame) == 101
        assert log.frame['err_metric'].max() < 1e-5
        assert log.ges_eligible == (scenario == SCENARIO_SLAM_MOT)
        assert log.p_eig_min > 0

    def test_decimation(self):
        log = run_scenario(quick_config(SCENARIO_ROTATING_EARTH, decimate=10))
        assert len(log.frame) == 11
        np.testing.assert_allclose(log.frame['t'].to_numpy(), np.linspace(0.0, 1.0, 11))

    def test_slam_converges_from_far_start(self):
        config = quick_config(SCENARIO_SLAM_MOT, duration=10.0, init={'rotation_deg': 30.0, 'w_offset': 2.0})
        frame = run_scenario(config).frame
        assert frame['err_metric'].iloc[-1] < 0.1 * frame['err_metric'].iloc[0]

    def test_gramian_columns(self):
        config = quick_config(SCENARIO_ROTATING_EARTH, gramian={'enabled': True, 'window': 0.2, 'every': 1})
        frame = run_scenario(config).frame
        assert frame['gram_obs_min'].iloc[:10].isna().all()
        assert np.isfinite(frame['gram_obs_min'].iloc[30:]).all()
        assert np.isfinite(frame['gram_det_min'].iloc[30:]).all()

    def test_bias_columns(self):
        config = quick_config(
            SCENARIO_ROTATING_EARTH,
            bias={'enabled': True, 'omega': [0.001, 0.0, 0.0], 'accel': [0.0, 0.0, 0.01]},
        )
        log = run_scenario(config)
        assert np.isfinite(log.frame['err_bw']).all()
        assert log.frame['err_bw'].iloc[0] == pytest.approx(0.001)
        assert len(log.true_bias) == 9

    def test_deterministic_csv(self, tmp_path):
        config = quick_config(SCENARIO_ROTATING_EARTH, seed=42, init={'rotation_deg': 20.0, 'w_offset': 1.0},
                              noise={'landmark': 0.01, 'bearing': 0.01, 'range': 0.01, 'gyro': 0.001})
        first = ExportManager(tmp_path / 'a').export_to_csv(run_scenario(config).frame, 'trajectory.csv')
        second = ExportManager(tmp_path / 'b').export_to_csv(run_scenario(config).frame, 'trajectory.csv')
        with open(first, 'rb') as a, open(second, 'rb') as b:
            assert a.read() == b.read()


class TestRotatingEarthRun:
    def test_not_ges_eligible_with_bearing_and_range(self):
        log = run_scenario(quick_config(SCENARIO_ROTATING_EARTH))
        assert log.rank['ges_eligible']
        assert not log.ges_eligible

    @pytest.mark.parametrize("rotation_deg, w_offset", [(5.0, 1.0), (175.0, 100.0)])
    def test_pose_converges_from_offset(self, rotation_deg, w_offset):
        config = quick_config(
            SCENARIO_ROTATING_EARTH, duration=30.0, decimate=50,
            init={'rotation_deg': rotation_deg, 'w_offset': w_offset},
        )
        frame = run_scenario(config).frame
        initial, final = frame['err_metric'].iloc[0], frame['err_metric'].iloc[-1]
        assert initial > 0.1
        assert final < 1e-3 * max(initial, 1.0)

    def test_fixed_sigma_overrides_covariance_weights(self):
        sigma = [1.0] * 20
        config = quick_config(SCENARIO_ROTATING_EARTH, observer={'sigma': sigma})
        assert run_scenario(config).frame['err_metric'].max() < 1e-5


class TestSlamGlobalConvergence:
    def test_very_far_start(self):
        config = quick_config(
            SCENARIO_SLAM_MOT, duration=30.0, decimate=50, init={'rotation_deg': 175.0, 'w_offset': 100.0},
        )
        frame = run_scenario(config).frame
        assert frame['err_metric'].iloc[0] > 10.0
        assert frame['err_metric'].iloc[-1] < 1e-3

    def test_log_slope_over_random_far_starts(self):
        metrics = ConvergenceMetrics()
        slopes = []
        for seed in range(20):
            config = quick_config(
                SCENARIO_SLAM_MOT, seed=seed, duration=20.0, decimate=10,
                init={'rotation_deg': 170.0, 'w_offset': 100.0},
            )
            slopes.append(metrics.calculate_log_slope(run_scenario(config).frame, 'err_z', 1.0, 20.0))
        assert max(slopes) <= -0.1

    def test_slope_independent_of_initial_scale(self):
        metrics = ConvergenceMetrics()
        slopes = []
        for w_offset in (50.0, 100.0):
            config = quick_config(
                SCENARIO_SLAM_MOT, seed=3, duration=10.0, decimate=10,
                init={'rotation_deg': 175.0, 'w_offset': w_offset},
            )
            slopes.append(metrics.calculate_log_slope(run_scenario(config).frame, 'err_z', 1.0, 10.0))
        assert slopes[1] == pytest.approx(slopes[0], rel=0.1)


class TestBiasEstimation:
    def test_accel_bias_only(self):
        config = quick_config(
            SCENARIO_SLAM_MOT, duration=60.0, decimate=100,
            bias={'enabled': True, 'accel': [0.1, -0.05, 0.2]},
        )
        frame = run_scenario(config).frame
        assert frame['err_brho'].iloc[0] == pytest.approx(np.linalg.norm([0.1, -0.05, 0.2]))
        assert frame['err_brho'].iloc[-1] < 1e-3
        assert frame['err_bw'].iloc[-1] < 1e-3

    def test_full_bias(self):
        config = quick_config(
            SCENARIO_SLAM_MOT, duration=60.0, decimate=100,
            bias={'enabled': True, 'omega': [0.01, -0.02, 0.015], 'accel': [0.1, -0.05, 0.2]},
        )
        frame = run_scenario(config).frame
        assert frame['err_bw'].iloc[0] == pytest.approx(np.linalg.norm([0.01, -0.02, 0.015]))
        assert frame['err_bw'].iloc[-1] < 1e-3
        assert frame['err_brho'].iloc[-1] < 1e-3
        assert frame['err_metric'].iloc[-1] < 1e-3


class TestConvergenceMetrics:
    @staticmethod
    def exponential_frame(rate: float) -> pd.DataFrame:
        t = np.linspace(0.0, 10.0, 1001)
        return pd.DataFrame({'t': t, 'err_metric': np.exp(-rate * t)})

    def test_log_slope(self):
        metrics = ConvergenceMetrics()
        frame = self.exponential_frame(0.5)
        assert metrics.calculate_log_slope(frame) == pytest.approx(-0.5)
        assert metrics.calculate_decay_ratio(frame) == pytest.approx(np.exp(-5.0))
        assert metrics.is_monotone_after_transient(frame)

    def test_all_metrics(self):
        result = ConvergenceMetrics(converged_threshold=1e-2).get_all_metrics(self.exponential_frame(0.5))
        assert result['converged']
        assert result['final_error'] == pytest.approx(np.exp(-5.0))

    def test_aggregate_sweep(self):
        summaries = [
            {'seed': 2, 'log_slope': -0.4, 'final': {'err_metric': 1e-4}},
            {'seed': 1, 'log_slope': -0.6, 'final': {'err_metric': 1e-2}},
        ]
        result = ConvergenceMetrics().aggregate_sweep(summaries)
        assert result['seeds'] == [1, 2]
        assert result['slope_mean'] == pytest.approx(-0.5)
        assert result['slope_std'] == pytest.approx(0.1)
        assert result['converged_runs'] == 1


class TestScenarioConfig:
    @staticmethod
    def violations(tree):
        with pytest.raises(ConfigValidationError) as info:
            config_from_dict(tree)
        return info.value.violations

    def test_presets(self):
        config = config_from_dict({'schema_version': 1, 'scenario': SCENARIO_SLAM_MOT})
        assert config.observer.shared_states
        assert len(config.params.landmarks) == 3
        assert config.params.earth_rate == [0.0, 0.0, 0.0]
        assert get_scenario_preset(SCENARIO_ROTATING_EARTH)['noise']['landmark'] == 0.0

    def test_zero_step_names_field(self):
        violations = self.violations({'schema_version': 1, 'scenario': SCENARIO_ROTATING_EARTH, 'step': 0.0})
        assert any(v.startswith('step') for v in violations)

    def test_short_duration(self):
        violations = self.violations(
            {'schema_version': 1, 'scenario': SCENARIO_ROTATING_EARTH, 'step': 0.1, 'duration': 0.5}
        )
        assert any(v.startswith('duration') for v in violations)

    def test_unknown_keys(self):
        violations = self.violations(
            {'schema_version': 1, 'scenario': SCENARIO_ROTATING_EARTH, 'stepp': 0.1, 'noise': {'sonar': 1.0}}
        )
        assert 'stepp: bilinmeyen anahtar' in violations
        assert 'noise.sonar: bilinmeyen anahtar' in violations

    def test_type_error(self):
        violations = self.violations({'schema_version': 1, 'scenario': SCENARIO_SLAM_MOT, 'decimate': 'many'})
        assert any(v.startswith('decimate') for v in violations)

    def test_landmark_count(self):
        violations = self.violations(
            {'schema_version': 1, 'scenario': SCENARIO_SLAM_MOT, 'params': {'landmarks': [[1.0, 0.0, 0.0]]}}
        )
        assert any(v.startswith('params.landmarks') for v in violations)

    def test_minimal_config_file(self, tmp_path):
        path = tmp_path / 'scenario.json'
        path.write_text('{"scenario": "rotating_earth"}', encoding='utf-8')
        config = parse_config(path)
        assert config.schema_version == SCENARIO_DEFAULTS['schema_version']
        assert config.step == SCENARIO_DEFAULTS['step']
        assert config.duration == SCENARIO_DEFAULTS['duration']
        assert config == config_from_dict({'schema_version': 1, 'scenario': SCENARIO_ROTATING_EARTH})

    def test_unsupported_schema_version(self):
        violations = self.violations({'schema_version': 2, 'scenario': SCENARIO_ROTATING_EARTH})
        assert any(v.startswith('schema_version') for v in violations)

    def test_unknown_scenario(self):
        violations = self.violations({'schema_version': 1, 'scenario': 'submarine'})
        assert any(v.startswith('scenario') for v in violations)

    def test_file_round_trip(self, tmp_path):
        config = quick_config(SCENARIO_SLAM_MOT, seed=9, noise={'landmark': 0.1})
        path = tmp_path / 'scenario.json'
        path.write_text(json.dumps(serialize_config(config)), encoding='utf-8')
        assert parse_config(path) == config

    def test_invalid_json(self, tmp_path):
        path = tmp_path / 'broken.json'
        path.write_text('{"schema_version": 1,', encoding='utf-8')
        with pytest.raises(ConfigurationError, match='JSON'):
            parse_config(path)

    def test_with_overrides(self):
        config = quick_config(SCENARIO_ROTATING_EARTH)
        changed = with_overrides(config, seed=5, decimate=None)
        assert changed.seed == 5
        assert changed.decimate == config.decimate
