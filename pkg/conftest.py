"""
Ortak pytest fixture'ları
"""
import copy
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from analysis.groups import SimAlgebraElement  # noqa: E402
from analysis.immersion import (  # noqa: E402
    CASE_2,
    KIND_LANDMARK,
    KIND_RANGE,
    MeasurementSpec,
    SystemSpec,
)
from config.scenario_config import (  # noqa: E402
    SCENARIO_PRESETS,
    SCENARIO_ROTATING_EARTH,
    SCENARIO_SLAM_MOT,
    ScenarioParams,
    config_from_dict,
)
from simulation.scenarios import build_rotating_earth_spec, build_slam_mot_spec  # noqa: E402


def quick_config(scenario: str, **sections):
    """
    Testler için kısa, gürültüsüz, Gramian'sız konfigürasyon

    Args:
        scenario: Senaryo adı
        **sections: Üst düzey alanlar veya bölüm sözlükleri (varsayılanların üzerine yazılır)
    """
    tree = {
        'schema_version': 1,
        'scenario': scenario,
        'step': 0.01,
        'duration': 1.0,
        'init': {'rotation_deg': 0.0, 'w_offset': 0.0},
        'gramian': {'enabled': False},
    }
    for key, value in sections.items():
        if isinstance(value, dict) and isinstance(tree.get(key), dict):
            tree[key] = {**tree[key], **value}
        else:
            tree[key] = value
    return config_from_dict(tree)


def preset_params(scenario: str) -> ScenarioParams:
    return ScenarioParams(**copy.deepcopy(SCENARIO_PRESETS[scenario]['params']))


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def rotating_earth_spec():
    return build_rotating_earth_spec(preset_params(SCENARIO_ROTATING_EARTH))


@pytest.fixture
def slam_spec():
    return build_slam_mot_spec(preset_params(SCENARIO_SLAM_MOT))


@pytest.fixture
def case2_spec():
    """TFG(3,1,1) üzerinde genel Ã'lı Case 2 sistemi (2 landmark + 1 menzil)"""
    generator = SimAlgebraElement(
        Omega=[0.3, -0.2, 0.5],
        gamma=[[0.4, -1.0], [0.2, 0.3], [-0.5, 0.8]],
        L=[[0.1, -0.4], [0.6, -0.2]],
    )
    measurements = (
        MeasurementSpec(KIND_LANDMARK, [1.0, 0.0, 0.5, 1.0, 0.0]),
        MeasurementSpec(KIND_LANDMARK, [0.0, 2.0, -1.0, 0.0, 1.0]),
        MeasurementSpec(KIND_RANGE, [0.5, 0.5, 1.0, 1.0, 1.0]),
    )
    return SystemSpec(case=CASE_2, d=3, n=1, m=1, generator=generator, measurements=measurements)
