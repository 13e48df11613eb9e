"""
Veri doğrulama fonksiyonları
"""
from typing import List

import numpy as np

from utils.logger import logger


def _check_vector(name: str, value, length: int, violations: List[str]) -> None:
    if not isinstance(value, list) or len(value) != length:
        violations.append(f"{name}: {length} elemanlı olmalı, gelen {value!r}")
    elif not np.all(np.isfinite(np.asarray(value, dtype=float))):
        violations.append(f"{name}: sonlu olmayan değer")


def _check_positive(name: str, value: float, violations: List[str]) -> None:
    if not value > 0:
        violations.append(f"{name}: {value} > 0 olmalı")


def _check_non_negative(name: str, value: float, violations: List[str]) -> None:
    if not value >= 0:
        violations.append(f"{name}: {value} ≥ 0 olmalı")


def validate_scenario_config(config) -> List[str]:
    """
    Senaryo konfigürasyonunun sınırlarını kontrol et

    Args:
        config: ScenarioConfig

    Returns:
        list: İhlal açıklamaları (alan adıyla başlar); boşsa geçerli
    """
    # Import burada yapıyoruz (circular import önlemek için)
    from config.scenario_config import SCENARIO_PRESETS, SCENARIO_SLAM_MOT

    violations = []

    if config.scenario not in SCENARIO_PRESETS:
        violations.append(f"scenario: geçersiz değer {config.scenario!r}")

    _check_positive('step', config.step, violations)
    if config.step > 0 and not config.duration >= 10 * config.step:
        violations.append(f"duration: {config.duration} ≥ 10·step ({10 * config.step}) olmalı")
    if not 0 <= config.seed < 2 ** 64:
        violations.append(f"seed: [0, 2^64) aralığında olmalı, gelen {config.seed}")
    if config.decimate < 1:
        violations.append(f"decimate: {config.decimate} ≥ 1 olmalı")

    for name in ('omega_amp', 'omega_freq', 'omega_phase', 'accel_amp', 'accel_freq', 'accel_phase'):
        _check_vector(f"input.{name}", getattr(config.input, name), 3, violations)

    for name in ('landmark', 'bearing', 'range', 'gyro', 'accel'):
        _check_non_negative(f"noise.{name}", getattr(config.noise, name), violations)

    _check_vector('bias.omega', config.bias.omega, 3, violations)
    _check_vector('bias.accel', config.bias.accel, 3, violations)

    observer = config.observer
    _check_positive('observer.q', observer.q, violations)
    _check_positive('observer.r', observer.r, violations)
    _check_positive('observer.p0', observer.p0, violations)
    _check_non_negative('observer.lam', observer.lam, violations)
    _check_non_negative('observer.bias_q', observer.bias_q, violations)
    if observer.sigma is not None and any(not w > 0 for w in observer.sigma):
        violations.append("observer.sigma: ağırlıklar pozitif olmalı")

    init = config.init
    if not 0 <= init.rotation_deg <= 180:
        violations.append(f"init.rotation_deg: [0, 180] aralığında olmalı, gelen {init.rotation_deg}")
    _check_non_negative('init.w_offset', init.w_offset, violations)
    _check_vector('init.bias_omega', init.bias_omega, 3, violations)
    _check_vector('init.bias_accel', init.bias_accel, 3, violations)

    gramian = config.gramian
    _check_positive('gramian.window', gramian.window, violations)
    if gramian.every < 1:
        violations.append(f"gramian.every: {gramian.every} ≥ 1 olmalı")
    if gramian.max_samples < 2:
        violations.append(f"gramian.max_samples: {gramian.max_samples} ≥ 2 olmalı")

    params = config.params
    for name in ('earth_rate', 'gravity', 'bearing_landmark', 'range_landmark', 'map_landmark',
                 'object_position', 'object_velocity', 'initial_position', 'initial_velocity'):
        _check_vector(f"params.{name}", getattr(params, name), 3, violations)

    expected = 3 if config.scenario == SCENARIO_SLAM_MOT else 2
    if len(params.landmarks) != expected:
        violations.append(f"params.landmarks: {expected} landmark olmalı, gelen {len(params.landmarks)}")
    for i, landmark in enumerate(params.landmarks):
        _check_vector(f"params.landmarks[{i}]", landmark, 3, violations)

    for violation in violations:
        logger.error(f"Konfigürasyon ihlali: {violation}")

    return violations
