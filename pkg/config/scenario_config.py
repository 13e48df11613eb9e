"""
Senaryo konfigürasyonu: preset'ler, JSON ayrıştırma ve serileştirme
"""
import copy
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from config.settings import (
    GRAMIAN_CONFIG,
    OBSERVER_CONFIG,
    RICCATI_CONFIG,
    SCENARIO_DEFAULTS,
)
from utils.exceptions import ConfigurationError, ConfigValidationError
from utils.logger import logger

SCENARIO_ROTATING_EARTH = 'rotating_earth'
SCENARIO_SLAM_MOT = 'slam_mot'

Vector = List[float]


@dataclass
class InputConfig:
    """
    Sinüzoidal giriş: ω(t) = A sin(2πft + φ), ivme aynı formda (dünya çerçevesi)
    """
    omega_amp: Vector = field(default_factory=lambda: [0.1, 0.15, 0.2])
    omega_freq: Vector = field(default_factory=lambda: [0.1, 0.13, 0.07])
    omega_phase: Vector = field(default_factory=lambda: [0.0, 1.0, 2.0])
    accel_amp: Vector = field(default_factory=lambda: [1.0, 0.8, 0.5])
    accel_freq: Vector = field(default_factory=lambda: [0.05, 0.08, 0.11])
    accel_phase: Vector = field(default_factory=lambda: [0.0, 0.5, 1.0])
    gravity_compensation: bool = True


@dataclass
class NoiseConfig:
    """Kanal başına standart sapmalar"""
    landmark: float = 0.0
    bearing: float = 0.0
    range: float = 0.0
    gyro: float = 0.0
    accel: float = 0.0


@dataclass
class BiasConfig:
    """
    Gerçek yanlılık (gerçek giriş = ölçülen + b); accel b_ρ'nun hız sütununa yazılır
    """
    enabled: bool = False
    omega: Vector = field(default_factory=lambda: [0.0, 0.0, 0.0])
    accel: Vector = field(default_factory=lambda: [0.0, 0.0, 0.0])


@dataclass
class ObserverSettings:
    q: float = OBSERVER_CONFIG['q']
    r: float = OBSERVER_CONFIG['r']
    lam: float = RICCATI_CONFIG['default_lambda']
    p0: float = OBSERVER_CONFIG['p0']
    modified_q: bool = RICCATI_CONFIG['modified_q']
    bias_q: float = OBSERVER_CONFIG['bias_q']
    shared_states: bool = False
    sigma: Optional[Vector] = None  # Umeyama sütun ağırlıkları (MN); None ise P bloklarından


@dataclass
class InitConfig:
    """
    Tahmin başlangıcı: rotasyon ofseti (derece), W sütun ofseti (m) ve b̂₀
    """
    rotation_deg: float = 175.0
    w_offset: float = 100.0
    bias_omega: Vector = field(default_factory=lambda: [0.0, 0.0, 0.0])
    bias_accel: Vector = field(default_factory=lambda: [0.0, 0.0, 0.0])


@dataclass
class GramianSettings:
    enabled: bool = GRAMIAN_CONFIG['enabled']
    window: float = GRAMIAN_CONFIG['window']
    every: int = GRAMIAN_CONFIG['every']
    max_samples: int = GRAMIAN_CONFIG['max_samples']


@dataclass
class ScenarioParams:
    """
    Fiziksel senaryo parametreleri (kullanılmayan alanlar senaryoya göre yok sayılır)
    """
    earth_rate: Vector = field(default_factory=lambda: list(SCENARIO_DEFAULTS['earth_rate']))
    gravity: Vector = field(default_factory=lambda: list(SCENARIO_DEFAULTS['gravity']))
    landmarks: List[Vector] = field(default_factory=list)
    bearing_landmark: Vector = field(default_factory=lambda: [0.0, 0.0, 10.0])
    range_landmark: Vector = field(default_factory=lambda: [10.0, 10.0, 10.0])
    map_landmark: Vector = field(default_factory=lambda: [5.0, 5.0, 0.0])
    object_position: Vector = field(default_factory=lambda: [-5.0, 5.0, 2.0])
    object_velocity: Vector = field(default_factory=lambda: [0.5, 0.0, 0.0])
    initial_position: Vector = field(default_factory=lambda: [0.0, 0.0, 0.0])
    initial_velocity: Vector = field(default_factory=lambda: [1.0, 0.0, 0.0])


@dataclass
class ScenarioConfig:
    """
    Tek simülasyon koşusunun tam tanımı

    Attributes:
        scenario: 'rotating_earth' veya 'slam_mot'
        step: Entegrasyon adımı h (s)
        duration: Süre (s)
        seed: 64-bit RNG tohumu
        decimate: Kaç adımda bir geri kazanım + log
    """
    scenario: str
    schema_version: int = SCENARIO_DEFAULTS['schema_version']
    step: float = SCENARIO_DEFAULTS['step']
    duration: float = SCENARIO_DEFAULTS['duration']
    seed: int = 0
    decimate: int = SCENARIO_DEFAULTS['decimate']
    input: InputConfig = field(default_factory=InputConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    bias: BiasConfig = field(default_factory=BiasConfig)
    observer: ObserverSettings = field(default_factory=ObserverSettings)
    init: InitConfig = field(default_factory=InitConfig)
    gramian: GramianSettings = field(default_factory=GramianSettings)
    params: ScenarioParams = field(default_factory=ScenarioParams)

    @property
    def steps(self) -> int:
        return int(round(self.duration / self.step))


# Senaryo preset'leri (kullanıcı dosyası bunların üzerine yazılır)
SCENARIO_PRESETS = {
    SCENARIO_ROTATING_EARTH: {
        'observer': {'shared_states': False},
        'params': {
            'landmarks': [[10.0, 0.0, 0.0], [0.0, 10.0, 0.0]],
            'bearing_landmark': [0.0, 0.0, 10.0],
            'range_landmark': [10.0, 10.0, 10.0],
        },
    },
    SCENARIO_SLAM_MOT: {
        'observer': {'shared_states': True},
        'params': {
            'earth_rate': [0.0, 0.0, 0.0],
            'landmarks': [[10.0, 0.0, 0.0], [0.0, 10.0, 0.0], [0.0, 0.0, 10.0]],
        },
    },
}

_SECTIONS = {
    'input': InputConfig,
    'noise': NoiseConfig,
    'bias': BiasConfig,
    'observer': ObserverSettings,
    'init': InitConfig,
    'gramian': GramianSettings,
    'params': ScenarioParams,
}


def _default_tree(scenario: str) -> Dict[str, Any]:
    return asdict(ScenarioConfig(scenario=scenario))


def _merge(base: Dict[str, Any], override: Dict[str, Any], path: str, violations: List[str]) -> None:
    """override anahtarlarını base'e yaz; bilinmeyen anahtarları ihlal olarak topla"""
    for key, value in override.items():
        name = f"{path}{key}"
        if key not in base:
            violations.append(f"{name}: bilinmeyen anahtar")
            continue
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                violations.append(f"{name}: nesne bekleniyordu")
                continue
            _merge(base[key], value, f"{name}.", violations)
        else:
            base[key] = value


def get_scenario_preset(scenario: str) -> Dict[str, Any]:
    """
    Senaryo preset'ini tam ağaç olarak getir

    Args:
        scenario: 'rotating_earth' veya 'slam_mot'

    Returns:
        dict: Varsayılanlar uygulanmış konfigürasyon ağacı

    Raises:
        ConfigValidationError: Bilinmeyen senaryo
    """
    if scenario not in SCENARIO_PRESETS:
        raise ConfigValidationError(
            [f"scenario: geçersiz değer {scenario!r}. Geçerli: {list(SCENARIO_PRESETS.keys())}"]
        )
    tree = _default_tree(scenario)
    _merge(tree, copy.deepcopy(SCENARIO_PRESETS[scenario]), '', [])
    return tree


def _coerce(value: Any, annotation: Any, name: str, violations: List[str]) -> Any:
    """JSON değerini alan tipine çevir; uyumsuzlukta ihlal ekle"""
    if annotation is bool:
        if not isinstance(value, bool):
            violations.append(f"{name}: bool bekleniyordu, gelen {value!r}")
        return value
    if annotation is int:
        if isinstance(value, bool) or not isinstance(value, int):
            violations.append(f"{name}: tamsayı bekleniyordu, gelen {value!r}")
        return value
    if annotation is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            violations.append(f"{name}: sayı bekleniyordu, gelen {value!r}")
            return value
        return float(value)
    if annotation is str:
        if not isinstance(value, str):
            violations.append(f"{name}: metin bekleniyordu, gelen {value!r}")
        return value
    if annotation == Optional[Vector]:
        return None if value is None else _coerce(value, Vector, name, violations)
    if annotation == Vector:
        if not isinstance(value, list):
            violations.append(f"{name}: sayı listesi bekleniyordu, gelen {value!r}")
            return value
        return [_coerce(v, float, f"{name}[{i}]", violations) for i, v in enumerate(value)]
    if annotation == List[Vector]:
        if not isinstance(value, list):
            violations.append(f"{name}: liste listesi bekleniyordu, gelen {value!r}")
            return value
        return [_coerce(v, Vector, f"{name}[{i}]", violations) for i, v in enumerate(value)]
    return value


def _build(cls: type, data: Dict[str, Any], path: str, violations: List[str]) -> Any:
    kwargs = {}
    for f in fields(cls):
        if f.name not in data:
            continue
        if f.name in _SECTIONS and cls is ScenarioConfig:
            kwargs[f.name] = _build(_SECTIONS[f.name], data[f.name], f"{f.name}.", violations)
        else:
            kwargs[f.name] = _coerce(data[f.name], f.type, f"{path}{f.name}", violations)
    return cls(**kwargs)


def config_from_dict(data: Dict[str, Any], source: str = '<dict>') -> ScenarioConfig:
    """
    Sözlükten doğrulanmış ScenarioConfig

    Args:
        data: JSON kökü
        source: Hata mesajları için kaynak adı

    Returns:
        ScenarioConfig: Varsayılanlar uygulanmış konfigürasyon

    Raises:
        ConfigValidationError: Eksik/bilinmeyen anahtar, tip veya sınır ihlali
    """
    from utils.validators import validate_scenario_config

    if not isinstance(data, dict):
        raise ConfigValidationError([f"{source}: kök bir JSON nesnesi olmalı"])

    violations = []
    # schema_version verilmezse geçerli sürüm varsayılır
    version = data.get('schema_version', SCENARIO_DEFAULTS['schema_version'])
    if version != SCENARIO_DEFAULTS['schema_version']:
        violations.append(
            f"schema_version: desteklenmeyen sürüm {version!r} "
            f"(geçerli: {SCENARIO_DEFAULTS['schema_version']})"
        )
    if 'scenario' not in data:
        violations.append("scenario: zorunlu anahtar eksik")
    if violations:
        raise ConfigValidationError(violations)

    tree = get_scenario_preset(data['scenario'])
    _merge(tree, data, '', violations)
    config = _build(ScenarioConfig, tree, '', violations)
    if violations:
        raise ConfigValidationError(violations)

    violations = validate_scenario_config(config)
    if violations:
        raise ConfigValidationError(violations)
    return config


def parse_config(path: Union[str, Path]) -> ScenarioConfig:
    """
    JSON senaryo dosyasını oku ve doğrula

    Args:
        path: Dosya yolu

    Returns:
        ScenarioConfig: Doğrulanmış konfigürasyon

    Raises:
        ConfigurationError: Dosya okunamıyor veya JSON geçersiz (satır/sütun ile)
        ConfigValidationError: Alan ihlalleri
    """
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ConfigurationError(f"Konfigürasyon okunamadı: {path}: {e}") from e

    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"{path}:{e.lineno}:{e.colno}: JSON hatası: {e.msg}") from e

    config = config_from_dict(data, source=str(path))
    logger.info(f"Konfigürasyon yüklendi: {path} ({config.scenario}, h={config.step}, T={config.duration})")
    return config


def serialize_config(config: ScenarioConfig) -> Dict[str, Any]:
    """parse_config'in kabul ettiği JSON sözlüğü"""
    return asdict(config)


def with_overrides(config: ScenarioConfig, **changes: Any) -> ScenarioConfig:
    """
    Üst düzey alanları değiştirilmiş, yeniden doğrulanmış kopya (ör. seed, decimate)
    """
    tree = serialize_config(config)
    tree.update({key: value for key, value in changes.items() if value is not None})
    return config_from_dict(tree)
