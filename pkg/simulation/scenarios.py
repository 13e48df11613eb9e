"""
Senaryo tanımları ve gerçek (truth) yörünge üretimi

- Dönen Dünya navigasyonu: TFG(3,2,0), W = [p, v + Ω^×p], 2 landmark + yön + menzil
- Hareketli nesne takipli SLAM: TFG(3,5,0), W = [p, v, l, q, c], 6 doğrusal ölçüm
"""
from typing import Callable, Optional, Tuple, Union

import numpy as np

from analysis.groups import (
    AlgebraElement,
    GroupElement,
    SimAlgebraElement,
    group_exp,
    hat,
    project_to_group,
)
from analysis.immersion import (
    CASE_1,
    CASE_2,
    KIND_BEARING,
    KIND_LANDMARK,
    KIND_RANGE,
    MeasurementSpec,
    SystemSpec,
)
from analysis.integrators import rk4_step
from config.scenario_config import (
    SCENARIO_ROTATING_EARTH,
    SCENARIO_SLAM_MOT,
    BiasConfig,
    InputConfig,
    NoiseConfig,
    ScenarioConfig,
    ScenarioParams,
)
from utils.exceptions import InvalidArgumentError
from utils.logger import logger

# İvme girdisi ρ'nun hız sütununa yazılır (her iki senaryoda W[:, 1])
VELOCITY_COLUMN = 1

InputFn = Union[AlgebraElement, Callable[[float], AlgebraElement]]


def _vec(values) -> np.ndarray:
    return np.asarray(values, dtype=float)


def build_rotating_earth_spec(params: ScenarioParams, noise: Optional[NoiseConfig] = None) -> SystemSpec:
    """
    Dönen Dünya navigasyon sistemi

    Ã: Ω = −(Dünya dönüş hızı), γ = [0, g], L = [[0,0],[−1,0]];
    ölçümler d = [l; 1; 0]: 2 landmark, 1 yön, 1 menzil (N = 5).

    Args:
        params: Fiziksel parametreler
        noise: Kanal gürültüleri (None ise gürültüsüz)

    Returns:
        SystemSpec: Case 1 sistemi
    """
    noise = noise or NoiseConfig()
    gamma = np.zeros((3, 2))
    gamma[:, 1] = _vec(params.gravity)
    L = np.array([[0.0, 0.0], [-1.0, 0.0]])
    generator = SimAlgebraElement(Omega=-_vec(params.earth_rate), gamma=gamma, L=L)

    def direction(landmark) -> np.ndarray:
        return np.concatenate([_vec(landmark), [1.0, 0.0]])

    measurements = [
        MeasurementSpec(KIND_LANDMARK, direction(l), noise.landmark, f"landmark_{i}")
        for i, l in enumerate(params.landmarks)
    ]
    measurements.append(MeasurementSpec(KIND_BEARING, direction(params.bearing_landmark), noise.bearing, 'bearing'))
    measurements.append(MeasurementSpec(KIND_RANGE, direction(params.range_landmark), noise.range, 'range'))

    spec = SystemSpec(case=CASE_1, d=3, n=2, m=0, generator=generator, measurements=tuple(measurements))
    logger.debug(f"Dönen Dünya sistemi oluşturuldu: M={spec.M}, N={spec.N}")
    return spec


def slam_landmarks_independent(landmarks) -> bool:
    """Bilinen landmark konumları doğrusal bağımsız mı"""
    matrix = np.atleast_2d(_vec(landmarks))
    return matrix.shape[0] >= 3 and np.linalg.matrix_rank(matrix) >= 3


def build_slam_mot_spec(params: ScenarioParams, noise: Optional[NoiseConfig] = None) -> SystemSpec:
    """
    Hareketli nesne takipli SLAM sistemi

    W = [p, v, l, q, c]; γ = [0, g, 0, 0, 0]; L yalnızca L₂₁ = L₅₄ = −1.
    Ölçümler: 3 bilinen landmark (d = [l_i; e₁]), bilinmeyen landmark (d̲ = e₁ − e₃),
    nesne konumu (d̲ = e₁ − e₄) ve nesne göreli hızı (d̲ = e₂ − e₅).

    Landmark'lar doğrusal bağımlıysa uyarı loglanır (GES bayrağı koşucu tarafında düşer).
    """
    noise = noise or NoiseConfig()
    if not slam_landmarks_independent(params.landmarks):
        logger.warning("⚠️ SLAM landmark'ları doğrusal bağımsız değil: GES garantisi yok")

    gamma = np.zeros((3, 5))
    gamma[:, 1] = _vec(params.gravity)
    L = np.zeros((5, 5))
    L[1, 0] = -1.0
    L[4, 3] = -1.0
    generator = SimAlgebraElement(Omega=np.zeros(3), gamma=gamma, L=L)

    e = np.eye(5)
    measurements = [
        MeasurementSpec(KIND_LANDMARK, np.concatenate([_vec(l), e[0]]), noise.landmark, f"landmark_{i}")
        for i, l in enumerate(params.landmarks)
    ]
    for name, under in (('map_landmark', e[0] - e[2]), ('object', e[0] - e[3]), ('object_velocity', e[1] - e[4])):
        measurements.append(MeasurementSpec(KIND_LANDMARK, np.concatenate([np.zeros(3), under]), noise.landmark, name))

    spec = SystemSpec(case=CASE_1, d=3, n=5, m=0, generator=generator, measurements=tuple(measurements))
    logger.debug(f"SLAM sistemi oluşturuldu: M={spec.M}, N={spec.N}")
    return spec


def build_system_spec(config: ScenarioConfig) -> SystemSpec:
    if config.scenario == SCENARIO_ROTATING_EARTH:
        return build_rotating_earth_spec(config.params, config.noise)
    if config.scenario == SCENARIO_SLAM_MOT:
        return build_slam_mot_spec(config.params, config.noise)
    raise InvalidArgumentError(f"Geçersiz senaryo: {config.scenario}")


def rotating_earth_state(p: np.ndarray, v: np.ndarray, earth_rate: np.ndarray) -> np.ndarray:
    """W = [p, v + Ω^×p]"""
    p, v = _vec(p), _vec(v)
    return np.column_stack([p, v + hat(_vec(earth_rate), 3) @ p])


def extract_rotating_earth_state(T: GroupElement, earth_rate: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Fiziksel durum: p = W[:,0], v = W[:,1] − Ω^×p
    """
    p = T.W[:, 0].copy()
    v = T.W[:, 1] - hat(_vec(earth_rate), 3) @ p
    return p, v


def initial_truth(config: ScenarioConfig) -> GroupElement:
    """R₀ = I ve senaryoya göre W₀"""
    params = config.params
    if config.scenario == SCENARIO_ROTATING_EARTH:
        W = rotating_earth_state(params.initial_position, params.initial_velocity, params.earth_rate)
        return GroupElement(np.eye(3), W, 2, 0)
    W = np.column_stack([
        params.initial_position,
        params.initial_velocity,
        params.map_landmark,
        params.object_position,
        params.object_velocity,
    ])
    return GroupElement(np.eye(3), W, 5, 0)


def _truth_matrix(u: AlgebraElement, generator: SimAlgebraElement, case: int) -> np.ndarray:
    B = u.matrix()
    d = u.d
    B[d:, d:] = -generator.L if case == CASE_1 else generator.L
    return B


def propagate_truth(
        T: GroupElement,
        u: InputFn,
        generator: SimAlgebraElement,
        case: int,
        h: float,
        t: float = 0.0
) -> GroupElement:
    """
    Gerçek durumun tek adımı

    Case 1: Ṫ = ÃT + T[ω^× ρ; 0 −L], Case 2: Ṫ = [ω^× ρ; 0 L]T − TÃ;
    gömmede RK4 ve ardından project_to_group.

    Args:
        T: Mevcut durum
        u: Giriş (sabit veya zamanın fonksiyonu)
        generator: Ã
        case: CASE_1 veya CASE_2
        h: Adım (s)
        t: Adım başlangıç zamanı

    Returns:
        GroupElement: T(t+h)
    """
    if case not in (CASE_1, CASE_2):
        raise InvalidArgumentError(f"Geçersiz case: {case}")
    A = generator.matrix()
    u_at = u if callable(u) and not isinstance(u, AlgebraElement) else (lambda time: u)

    def dynamics(time: float, X: np.ndarray) -> np.ndarray:
        B = _truth_matrix(u_at(time), generator, case)
        if case == CASE_1:
            return A @ X + X @ B
        return B @ X - X @ A

    X = rk4_step(dynamics, t, T.matrix(), h)
    return project_to_group(X, T.d, T.n, T.m)


def bias_element(bias: BiasConfig, d: int, k: int) -> AlgebraElement:
    """
    Konfigürasyondaki gerçek yanlılık; kapalıysa sıfır
    """
    if not bias.enabled:
        return AlgebraElement.zero(d, k)
    rho = np.zeros((d, k))
    rho[:, VELOCITY_COLUMN] = _vec(bias.accel)
    return AlgebraElement(_vec(bias.omega), rho)


class SinusoidalInput:
    """
    Sinüzoidal gövde açısal hızı ve ivme girdisi

    ω(t)_a = A_a sin(2πf_a t + φ_a); dünya çerçevesi ivmesi aynı formda.
    gravity_compensation açıkken özgül kuvvet a = Rᵀ(a_dünya − g) verilir, böylece
    araç yerçekimiyle düşmez.
    """

    def __init__(self, config: InputConfig, gravity, k: int):
        """
        SinusoidalInput başlatıcı

        Args:
            config: Genlik, frekans, faz ayarları
            gravity: Yerçekimi vektörü g
            k: n+m (ρ sütun sayısı)
        """
        self.config = config
        self.gravity = _vec(gravity)
        self.k = k

        logger.debug(f"SinusoidalInput başlatıldı: k={k}, yerçekimi telafisi={config.gravity_compensation}")

    @staticmethod
    def _wave(amp, freq, phase, t: float) -> np.ndarray:
        return _vec(amp) * np.sin(2.0 * np.pi * _vec(freq) * t + _vec(phase))

    def true_input(self, t: float, R: Optional[np.ndarray] = None) -> AlgebraElement:
        """
        Gerçek giriş u(t)

        Args:
            t: Zaman (s)
            R: Mevcut rotasyon (yerçekimi telafisi için; None ise I)
        """
        cfg = self.config
        omega = self._wave(cfg.omega_amp, cfg.omega_freq, cfg.omega_phase, t)
        accel = self._wave(cfg.accel_amp, cfg.accel_freq, cfg.accel_phase, t)
        R = np.eye(3) if R is None else R
        if cfg.gravity_compensation:
            accel = R.T @ (accel - self.gravity)

        rho = np.zeros((3, self.k))
        rho[:, VELOCITY_COLUMN] = accel
        return AlgebraElement(omega, rho)

    @staticmethod
    def measured_input(
            true_u: AlgebraElement,
            bias: AlgebraElement,
            rng: Optional[np.random.Generator] = None,
            gyro_std: float = 0.0,
            accel_std: float = 0.0
    ) -> AlgebraElement:
        """
        Ölçülen giriş = gerçek − b + gürültü (gerçek giriş = ölçülen + b)
        """
        measured = true_u - bias
        if rng is None or (gyro_std == 0.0 and accel_std == 0.0):
            return measured
        omega = measured.omega + gyro_std * rng.standard_normal(measured.omega.shape)
        rho = measured.rho.copy()
        rho[:, VELOCITY_COLUMN] += accel_std * rng.standard_normal(rho.shape[0])
        return AlgebraElement(omega, rho)


def far_initialization(
        T: GroupElement,
        rotation_deg: float,
        w_offset: float,
        rng: np.random.Generator
) -> GroupElement:
    """
    Gerçek durumdan uzak başlangıç tahmini

    R̂ = R·exp(θ a^×) (a rastgele birim eksen), Ŵ = W + w_offset·(rastgele birim sütunlar)

    Args:
        T: Gerçek durum
        rotation_deg: θ (derece)
        w_offset: Sütun başına ofset normu
        rng: Tohumlu üreteç
    """
    d = T.d
    axis = rng.standard_normal(3 if d == 3 else 1)
    axis = axis / np.linalg.norm(axis)
    if d == 2:
        axis = np.sign(axis)
    rotation = group_exp(AlgebraElement(np.radians(rotation_deg) * axis, np.zeros((d, T.k))))[:d, :d]

    directions = rng.standard_normal((d, T.k))
    directions /= np.linalg.norm(directions, axis=0, keepdims=True)
    T_hat = project_to_group(
        np.block([[T.R @ rotation, T.W + w_offset * directions], [np.zeros((T.k, d)), np.eye(T.k)]]),
        d, T.n, T.m,
    )
    logger.debug(f"Uzak başlangıç: {rotation_deg:.1f}°, W ofseti {w_offset:.1f}")
    return T_hat
