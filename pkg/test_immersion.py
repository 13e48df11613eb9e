"""
LTV daldırma, Cayley katsayıları ve ortak durum indirgemesi testleri
"""
import dataclasses

import numpy as np
import pytest

from analysis.groups import (
    SIDE_INVERSE,
    AlgebraElement,
    GroupElement,
    SimAlgebraElement,
    act,
    random_group_element,
)
from analysis.immersion import (
    CASE_1,
    KIND_LANDMARK,
    ImmersedSystem,
    MeasurementSpec,
    SystemSpec,
    build_ltv_general,
    build_ltv_tfg,
    cayley_coefficients,
    direction_table,
    immerse,
    shared_state_reduction,
    vector_field_at_identity,
)
from analysis.integrators import rk4_step
from config.scenario_config import SCENARIO_ROTATING_EARTH, ScenarioParams
from conftest import preset_params
from simulation.scenarios import build_rotating_earth_spec, propagate_truth
from utils.exceptions import InvalidArgumentError


def random_input(rng, d: int, k: int) -> AlgebraElement:
    return AlgebraElement(0.5 * rng.standard_normal(d * (d - 1) // 2), rng.standard_normal((d, k)))


def time_derivative(system: ImmersedSystem, T: GroupElement, u: AlgebraElement, eps: float = 1e-5) -> np.ndarray:
    """π(T(t))'nin merkezi fark türevi"""
    spec = system.spec
    forward = propagate_truth(T, u, spec.generator, spec.case, eps)
    backward = propagate_truth(T, u, spec.generator, spec.case, -eps)
    return (system.immerse(forward) - system.immerse(backward)) / (2.0 * eps)


class TestCayley:
    @pytest.mark.parametrize("size", [3, 5, 8])
    def test_residual_random(self, rng, size):
        for _ in range(20):
            A = rng.standard_normal((size, size))
            coeffs = cayley_coefficients(A)
            scale = max(1.0, np.linalg.norm(A, 2) ** size)
            assert coeffs.residual <= 1e-8 * scale

    def test_residual_scenario_generators(self, rotating_earth_spec, slam_spec):
        for spec in (rotating_earth_spec, slam_spec):
            A = spec.generator.matrix()
            coeffs = cayley_coefficients(spec.generator)
            assert coeffs.N == spec.N
            assert coeffs.residual <= 1e-8 * max(1.0, np.linalg.norm(A, 2) ** spec.N)

    def test_rotating_earth_polynomial(self):
        params = preset_params(SCENARIO_ROTATING_EARTH)
        params.earth_rate = [0.1, 0.2, 0.3]
        spec = build_rotating_earth_spec(params)
        coeffs = cayley_coefficients(spec.generator)
        # p(λ) = λ²·(λ³ + ‖Ω‖²λ)
        expected = np.array([0.0, 0.0, 0.0, -0.14, 0.0])
        np.testing.assert_allclose(coeffs.coefficients, expected, atol=1e-10)

    def test_rejects_non_square(self):
        with pytest.raises(InvalidArgumentError):
            cayley_coefficients(np.zeros((2, 3)))


class TestDirectionTable:
    def test_powers_of_generator(self, case2_spec):
        table = direction_table(case2_spec)
        A = case2_spec.generator.matrix()
        for i, meas in enumerate(case2_spec.measurements):
            for j in range(case2_spec.N):
                expected = np.linalg.matrix_power(A, j) @ meas.direction
                np.testing.assert_allclose(table.column(i, j), expected, atol=1e-12)

    def test_rotating_earth_underline(self, rotating_earth_spec):
        table = direction_table(rotating_earth_spec)
        expected = np.zeros((5, 2))
        expected[0] = [1.0, 0.0]
        expected[1] = [0.0, -1.0]
        for i in range(rotating_earth_spec.M):
            np.testing.assert_array_equal(table.d_under[i], expected)

    def test_rank_scenarios(self, rotating_earth_spec, slam_spec):
        assert direction_table(rotating_earth_spec).rank == 5
        assert direction_table(slam_spec).rank == 8

    def test_rank_deficient_when_landmarks_coincide(self):
        params = ScenarioParams(
            earth_rate=[0.0, 0.0, 0.0],
            landmarks=[[10.0, 0.0, 0.0], [10.0, 0.0, 0.0]],
            bearing_landmark=[10.0, 0.0, 0.0],
            range_landmark=[10.0, 0.0, 0.0],
        )
        system = ImmersedSystem(build_rotating_earth_spec(params))
        assert system.table.rank == 3
        assert not system.ges_eligible

    def test_matrix_layout(self, rotating_earth_spec):
        table = direction_table(rotating_earth_spec)
        M, N = rotating_earth_spec.M, rotating_earth_spec.N
        assert table.D.shape == (N, M * N)
        np.testing.assert_array_equal(table.D[:, 2 * N + 1], table.column(2, 1))


class TestImmersion:
    def test_case_1_blocks(self, rng, rotating_earth_spec):
        T = random_group_element(rng, 3, 2)
        table = direction_table(rotating_earth_spec)
        state = immerse(T, table, CASE_1)
        for i in range(table.M):
            for j in range(table.N):
                full = act(T, table.column(i, j), SIDE_INVERSE)
                np.testing.assert_allclose(state.z_bar[i, j], full[:3], atol=1e-12)

    def test_state_holds_only_blocks(self, rng, rotating_earth_spec):
        table = direction_table(rotating_earth_spec)
        state = immerse(random_group_element(rng, 3, 2), table, CASE_1)
        assert [f.name for f in dataclasses.fields(state)] == ['z_bar']
        np.testing.assert_array_equal(state.vector(), state.z_bar.reshape(-1))

    def test_finite_difference_case_1(self, rng, rotating_earth_spec):
        system = ImmersedSystem(rotating_earth_spec)
        for _ in range(10):
            T = random_group_element(rng, 3, 2, scale=5.0)
            u = random_input(rng, 3, 2)
            F, C = system.dynamics(u)
            np.testing.assert_allclose(
                time_derivative(system, T, u), F @ system.immerse(T) + C, atol=1e-5
            )

    def test_finite_difference_case_2(self, rng, case2_spec):
        system = ImmersedSystem(case2_spec)
        for _ in range(10):
            T = random_group_element(rng, 3, 1, 1, scale=2.0)
            u = random_input(rng, 3, 2)
            F, C = system.dynamics(u)
            np.testing.assert_allclose(
                time_derivative(system, T, u), F @ system.immerse(T) + C, atol=1e-5
            )

    def test_finite_difference_slam(self, rng, slam_spec):
        system = ImmersedSystem(slam_spec, shared_states=True)
        T = random_group_element(rng, 3, 5, scale=5.0)
        u = random_input(rng, 3, 5)
        F, C = system.dynamics(u)
        np.testing.assert_allclose(time_derivative(system, T, u), F @ system.immerse(T) + C, atol=1e-5)

    def test_tfg_builder_matches_reduced_system(self, rng, rotating_earth_spec):
        system = ImmersedSystem(rotating_earth_spec)
        u = random_input(rng, 3, 2)
        F, C, H = build_ltv_tfg(u, rotating_earth_spec, system.table, system.coeffs)
        F_red, C_red = system.dynamics(u)
        np.testing.assert_allclose(F, F_red, atol=1e-12)
        np.testing.assert_allclose(C, C_red, atol=1e-12)
        assert H.shape == (rotating_earth_spec.M * 3, system.state_dim)

    def test_shared_dynamics_reduce_tfg_builder(self, rng, slam_spec):
        system = ImmersedSystem(slam_spec, shared_states=True)
        u = random_input(rng, 3, 5)
        F, C, _ = build_ltv_tfg(u, slam_spec, system.table, system.coeffs)
        F_red, C_red = system.dynamics(u)
        np.testing.assert_allclose(F_red, system.S @ F @ system.E, atol=1e-12)
        np.testing.assert_allclose(C_red, system.S @ C, atol=1e-12)

    def test_vector_field_case_1(self, rng, rotating_earth_spec):
        u = random_input(rng, 3, 2)
        f = vector_field_at_identity(u, rotating_earth_spec)
        B = u.matrix()
        B[3:, 3:] = -rotating_earth_spec.generator.L
        np.testing.assert_allclose(f, rotating_earth_spec.generator.matrix() + B)


class TestGeneralBuilder:
    @staticmethod
    def full_state(T, spec):
        A = spec.generator.matrix()
        blocks = []
        for meas in spec.measurements:
            for j in range(spec.N):
                blocks.append(act(T, np.linalg.matrix_power(A, j) @ meas.direction, SIDE_INVERSE))
        return np.concatenate(blocks)

    def test_finite_difference(self, rng, rotating_earth_spec):
        spec = rotating_earth_spec
        coeffs = cayley_coefficients(spec.generator)
        T = random_group_element(rng, 3, 2, scale=3.0)
        u = random_input(rng, 3, 2)
        F, C, H = build_ltv_general(u, spec, coeffs)
        assert F.shape == (spec.M * spec.N ** 2,) * 2
        np.testing.assert_array_equal(C, 0.0)

        eps = 1e-5
        forward = propagate_truth(T, u, spec.generator, spec.case, eps)
        backward = propagate_truth(T, u, spec.generator, spec.case, -eps)
        derivative = (self.full_state(forward, spec) - self.full_state(backward, spec)) / (2.0 * eps)
        np.testing.assert_allclose(derivative, F @ self.full_state(T, spec), atol=1e-5)

        # H ilk bloğu (z_0) seçer
        z = self.full_state(T, spec)
        np.testing.assert_allclose(H @ z, np.concatenate([z[i * 25:i * 25 + 5] for i in range(spec.M)]))

    def test_underline_stationary(self, rng, rotating_earth_spec):
        spec = rotating_earth_spec
        coeffs = cayley_coefficients(spec.generator)
        u = random_input(rng, 3, 2)
        F, C, _ = build_ltv_general(u, spec, coeffs)

        z0 = self.full_state(random_group_element(rng, 3, 2), spec)
        under = np.concatenate([np.arange(j * 5 + 3, j * 5 + 5) for j in range(spec.M * spec.N)])
        z = z0.copy()
        for step in range(1000):
            z = rk4_step(lambda t, x: F @ x + C, step * 0.01, z, 0.01)
        np.testing.assert_allclose(z[under], z0[under], atol=1e-10)


class TestSharedStates:
    def test_slam_slots(self, slam_spec):
        reduction = shared_state_reduction(direction_table(slam_spec))
        slot, sign = reduction.slot, reduction.sign

        assert reduction.n_slots == 9
        assert len(set(slot[:, 0])) == 6
        # z̄_1: bilinen landmark'lar ve harita landmark'ı ortak
        assert len({slot[i, 1] for i in range(4)}) == 1
        # z̄_2 = −g ortak; nesne hızının z̄_1'i işaret çevrilmiş kopyası
        assert len({slot[i, 2] for i in range(5)}) == 1
        assert slot[5, 1] == slot[0, 2]
        assert sign[5, 1] == -1.0
        assert slot[5, 2] == -1
        assert np.all(slot[:, 3:] == -1)

    def test_reduced_dynamics_consistent(self, rng, slam_spec):
        full = ImmersedSystem(slam_spec)
        shared = ImmersedSystem(slam_spec, shared_states=True)
        assert shared.state_dim == 27
        assert full.state_dim == 6 * 8 * 3

        T = random_group_element(rng, 3, 5, scale=4.0)
        u = random_input(rng, 3, 5)
        np.testing.assert_allclose(shared.expand(shared.immerse(T)), full.expand(full.immerse(T)), atol=1e-12)

        F_f, C_f = full.dynamics(u)
        F_s, C_s = shared.dynamics(u)
        rhs_full = full.expand(F_f @ full.immerse(T) + C_f)
        np.testing.assert_allclose(F_s @ shared.immerse(T) + C_s, shared.compress(rhs_full), atol=1e-9)

    def test_identity_when_disabled(self, rotating_earth_spec):
        system = ImmersedSystem(rotating_earth_spec)
        assert system.reduction.is_identity
        assert system.state_dim == 4 * 5 * 3


class TestSpecValidation:
    def test_unknown_kind(self):
        with pytest.raises(InvalidArgumentError):
            MeasurementSpec('sonar', [1.0, 0.0, 0.0, 1.0, 0.0])

    def test_direction_length(self):
        generator = SimAlgebraElement.zero(3, 2)
        with pytest.raises(InvalidArgumentError):
            SystemSpec(CASE_1, 3, 2, 0, generator, (MeasurementSpec(KIND_LANDMARK, [1.0, 0.0, 0.0]),))

    def test_generator_dimensions(self):
        generator = SimAlgebraElement.zero(3, 1)
        with pytest.raises(InvalidArgumentError):
            SystemSpec(CASE_1, 3, 2, 0, generator, (MeasurementSpec(KIND_LANDMARK, np.ones(5)),))

    def test_invalid_case(self):
        with pytest.raises(InvalidArgumentError):
            SystemSpec(3, 3, 2, 0, SimAlgebraElement.zero(3, 2), (MeasurementSpec(KIND_LANDMARK, np.ones(5)),))
