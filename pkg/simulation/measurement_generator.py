"""
Gerçek durumdan gürültülü ölçüm üretimi
"""
from typing import Optional, Sequence

import numpy as np

from analysis.groups import SIDE_INVERSE, SIDE_LEFT, GroupElement, act
from analysis.immersion import CASE_1, KIND_BEARING, KIND_LANDMARK, SystemSpec
from config.settings import TOLERANCE_CONFIG
from estimation.observer import MeasurementBatch
from utils.logger import logger


def synthesize_measurements(
        T: GroupElement,
        spec: SystemSpec,
        rng: np.random.Generator,
        noise: Optional[Sequence[float]] = None
) -> MeasurementBatch:
    """
    Ölçüm grubu üret

    landmark: ȳ + N(0, σ²I); bearing: normalize(ȳ + N(0, σ²I)) (dejenere ise geçersiz);
    range: ‖ȳ‖ + N(0, σ²) alttan 0'da kırpılır. Case 1 için ȳ = (T⁻¹d)‾, Case 2 için (Td)‾.

    Args:
        T: Gerçek durum
        spec: Sistem tanımı
        rng: Tohumlu üreteç (aynı tohum aynı grup)
        noise: Ölçüm başına std (None ise MeasurementSpec.noise_std)

    Returns:
        MeasurementBatch: Değerler ve geçerlilik bayrakları
    """
    side = SIDE_INVERSE if spec.case == CASE_1 else SIDE_LEFT
    stds = [meas.noise_std for meas in spec.measurements] if noise is None else list(noise)

    values = []
    valid = np.ones(spec.M, dtype=bool)
    for i, meas in enumerate(spec.measurements):
        y_bar = act(T, meas.direction, side=side)[:spec.d]
        sigma = float(stds[i])

        if meas.kind == KIND_LANDMARK:
            values.append(y_bar + sigma * rng.standard_normal(spec.d) if sigma > 0 else y_bar)

        elif meas.kind == KIND_BEARING:
            noisy = y_bar + sigma * rng.standard_normal(spec.d) if sigma > 0 else y_bar
            norm = np.linalg.norm(noisy)
            if norm < TOLERANCE_CONFIG['bearing_min_norm']:
                logger.warning(f"⚠️ Yön ölçümü {i} dejenere (‖ȳ‖ = {norm:.3e}), geçersiz işaretlendi")
                values.append(np.zeros(spec.d))
                valid[i] = False
            else:
                values.append(noisy / norm)

        else:
            distance = float(np.linalg.norm(y_bar))
            if sigma > 0:
                distance += sigma * float(rng.standard_normal())
            values.append(max(distance, 0.0))

    return MeasurementBatch(values=values, valid=valid)
