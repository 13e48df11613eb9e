"""
Sabit adımlı 4. mertebe Runge-Kutta
"""
from typing import Callable, TypeVar

import numpy as np

State = TypeVar('State', np.ndarray, float)


def rk4_step(
        fn: Callable[[float, State], State],
        t: float,
        x: State,
        h: float
) -> State:
    """
    Tek RK4 adımı: x(t) → x(t+h)

    Args:
        fn: Dinamik fonksiyonu f(t, x)
        t: Adım başlangıç zamanı
        x: Başlangıç durumu (vektör veya matris)
        h: Adım büyüklüğü

    Returns:
        x(t+h) yaklaşımı
    """
    k1 = fn(t, x)
    k2 = fn(t + h / 2, x + h / 2 * k1)
    k3 = fn(t + h / 2, x + h / 2 * k2)
    k4 = fn(t + h, x + h * k3)

    return x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
