"""
Matris Riccati denklemleri, Kalman kazancı ve Gramian izleme

Standart:  Ṗ = FP + PFᵀ + Q − PHᵀR⁻¹HP
Modifiye:  Ṗ = λP + F̆P + PF̆ᵀ − PH̆ᵀR⁻¹H̆P
"""
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
import scipy.linalg

from analysis.integrators import rk4_step
from config.settings import GRAMIAN_CONFIG, RICCATI_CONFIG
from utils.exceptions import ConfigurationError, InvalidArgumentError
from utils.logger import logger

P_FLOOR = RICCATI_CONFIG['p_floor']

StageMatrix = Union[np.ndarray, Callable[[float], np.ndarray]]


@dataclass(eq=False)
class RiccatiState:
    """
    Attributes:
        P: Simetrik pozitif tanımlı matris
        t: Zaman (s)
    """
    P: np.ndarray
    t: float = 0.0


@dataclass(frozen=True, eq=False)
class GainConfig:
    """
    Kazanç ayarları

    Attributes:
        Q: Süreç ağırlığı (SPD, d_z×d_z)
        R: Ölçüm başına kanal varyansları (pozitif)
        lam: Unutma faktörü λ ≥ 0 (yalnızca modifiye denklem)
        p0: Başlangıç P ölçeği
        modified_q: Modifiye denkleme Q eklensin mi
    """
    Q: np.ndarray
    R: np.ndarray
    lam: float = RICCATI_CONFIG['default_lambda']
    p0: float = 1.0
    modified_q: bool = RICCATI_CONFIG['modified_q']

    def __post_init__(self):
        Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        R = np.atleast_1d(np.asarray(self.R, dtype=float))
        try:
            scipy.linalg.cholesky(Q, lower=True)
        except np.linalg.LinAlgError as e:
            raise ConfigurationError(f"Q pozitif tanımlı değil: {e}") from e
        if np.any(R <= 0):
            raise ConfigurationError(f"R kanal varyansları pozitif olmalı: {R}")
        if self.lam < 0:
            raise ConfigurationError(f"λ negatif olamaz: {self.lam}")
        if self.p0 <= 0:
            raise ConfigurationError(f"p0 pozitif olmalı: {self.p0}")
        object.__setattr__(self, 'Q', Q)
        object.__setattr__(self, 'R', R)


def symmetrize_and_floor(P: np.ndarray, floor: float = P_FLOOR) -> np.ndarray:
    """
    P = (P + Pᵀ)/2 ve özdeğerleri floor ile alttan sınırla
    """
    P = 0.5 * (P + P.T)
    if P.size == 0:
        return P
    if np.linalg.eigvalsh(P)[0] >= floor:
        return P

    eigenvalues, eigenvectors = np.linalg.eigh(P)
    eigenvalues = np.maximum(eigenvalues, floor)
    P = (eigenvectors * eigenvalues) @ eigenvectors.T
    return 0.5 * (P + P.T)


def inverse_weight(R: np.ndarray) -> np.ndarray:
    """
    R⁻¹ (Cholesky ile)

    Raises:
        ConfigurationError: R pozitif tanımlı değilse
    """
    R = np.atleast_2d(np.asarray(R, dtype=float))
    if R.size == 0:
        return R
    try:
        factor = scipy.linalg.cho_factor(R, lower=True)
    except np.linalg.LinAlgError as e:
        raise ConfigurationError(f"R tersinir değil: {e}") from e
    return scipy.linalg.cho_solve(factor, np.eye(R.shape[0]))


def _stage_fn(F: StageMatrix) -> Callable[[float], np.ndarray]:
    if callable(F):
        return F
    F = np.asarray(F, dtype=float)
    return lambda tau: F


def riccati_rhs(
        P: np.ndarray,
        F: np.ndarray,
        H: np.ndarray,
        Q: Optional[np.ndarray],
        R_inv: np.ndarray,
        lam: float = 0.0
) -> np.ndarray:
    """Ṗ = λP + FP + PFᵀ + Q − PHᵀR⁻¹HP"""
    FP = F @ P
    rhs = FP + FP.T
    if lam:
        rhs = rhs + lam * P
    if Q is not None:
        rhs = rhs + Q
    if H.size:
        PHt = P @ H.T
        rhs = rhs - PHt @ R_inv @ PHt.T
    return rhs


def _integrate(
        P: np.ndarray,
        F: StageMatrix,
        H: np.ndarray,
        Q: Optional[np.ndarray],
        R: np.ndarray,
        lam: float,
        h: float
) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    H = np.atleast_2d(np.asarray(H, dtype=float)) if np.size(H) else np.zeros((0, P.shape[0]))
    R_inv = inverse_weight(R) if H.shape[0] else np.zeros((0, 0))
    F_at = _stage_fn(F)

    P_next = rk4_step(lambda tau, X: riccati_rhs(X, F_at(tau), H, Q, R_inv, lam), 0.0, P, h)
    return symmetrize_and_floor(P_next)


def riccati_step(
        P: np.ndarray,
        F: StageMatrix,
        H: np.ndarray,
        Q: np.ndarray,
        R: np.ndarray,
        h: float
) -> np.ndarray:
    """
    Standart Riccati denkleminin tek RK4 adımı (simetrikleştirme + özdeğer tabanı dahil)

    Args:
        P: SPD matris
        F: Sabit matris veya aşama ofsetinin fonksiyonu F(τ), τ ∈ {0, h/2, h}
        H: Ölçüm matrisi
        Q: Süreç ağırlığı
        R: Ölçüm ağırlığı
        h: Adım (s)

    Returns:
        np.ndarray: P(t+h)

    Raises:
        ConfigurationError: R tersinir değilse
    """
    return _integrate(P, F, H, np.asarray(Q, dtype=float), R, 0.0, h)


def modified_riccati_step(
        P: np.ndarray,
        F: StageMatrix,
        H: np.ndarray,
        R: np.ndarray,
        lam: float,
        h: float,
        Q: Optional[np.ndarray] = None
) -> np.ndarray:
    """
    Modifiye Riccati denkleminin tek RK4 adımı; Q yalnızca modified_q açıkken verilir
    """
    return _integrate(P, F, H, Q, R, lam, h)


def kalman_gain(P: np.ndarray, H: np.ndarray, R: np.ndarray) -> np.ndarray:
    """
    K = PHᵀR⁻¹
    """
    H = np.atleast_2d(np.asarray(H, dtype=float))
    R = np.atleast_2d(np.asarray(R, dtype=float))
    if H.shape[0] == 0:
        return np.zeros((P.shape[0], 0))
    factor = scipy.linalg.cho_factor(R, lower=True)
    return scipy.linalg.cho_solve(factor, H @ P).T


@dataclass
class GramianWindow:
    """
    [t−δ, t] penceresinde ızgara örnekleri

    Attributes:
        h: Örnekler arası adım (s)
        F: Her ızgara noktasında F_t
        H: Her ızgara noktasında H_t
        R: Her ızgara noktasında R_t
    """
    h: float
    F: List[np.ndarray] = field(default_factory=list)
    H: List[np.ndarray] = field(default_factory=list)
    R: List[np.ndarray] = field(default_factory=list)

    @property
    def delta(self) -> float:
        return self.h * max(len(self.F) - 1, 0)

    @classmethod
    def constant(cls, F: np.ndarray, H: np.ndarray, R: np.ndarray, delta: float, h: float) -> 'GramianWindow':
        steps = int(round(delta / h))
        return cls(h=h, F=[F] * (steps + 1), H=[H] * (steps + 1), R=[R] * (steps + 1))

    def information(self, k: int) -> np.ndarray:
        """HᵀR⁻¹H"""
        H = np.atleast_2d(self.H[k])
        if H.shape[0] == 0:
            n = self.F[k].shape[0]
            return np.zeros((n, n))
        return H.T @ inverse_weight(self.R[k]) @ H


def _transition_matrices(window: GramianWindow) -> List[np.ndarray]:
    """
    Φ(t_k, t_1), ∂Φ/∂t = F_t Φ (RK4, orta nokta F doğrusal ara değerli)
    """
    n = window.F[0].shape[0]
    phis = [np.eye(n)]
    for k in range(len(window.F) - 1):
        F0, F1 = window.F[k], window.F[k + 1]
        F_half = 0.5 * (F0 + F1)

        def F_at(tau, F0=F0, F_half=F_half, F1=F1):
            if tau == 0.0:
                return F0
            return F_half if tau < window.h else F1

        phis.append(rk4_step(lambda tau, X: F_at(tau) @ X, 0.0, phis[-1], window.h))
    return phis


def _check_window(window: GramianWindow) -> None:
    if len(window.F) < 2:
        raise InvalidArgumentError("Gramian penceresi boş (en az 2 örnek gerekli)")
    if not (len(window.F) == len(window.H) == len(window.R)):
        raise InvalidArgumentError("Gramian penceresinde F, H, R örnek sayıları farklı")


def _trapezoid(terms: List[np.ndarray], h: float) -> np.ndarray:
    total = 0.5 * (terms[0] + terms[-1]) + sum(terms[1:-1], np.zeros_like(terms[0]))
    G = h * total
    return 0.5 * (G + G.T)


def observability_gramian(window: GramianWindow) -> Tuple[np.ndarray, float]:
    """
    𝒪(t₂, t₁) = ∫ Φᵀ(τ,t₁)HᵀR⁻¹HΦ(τ,t₁) dτ (trapez)

    Returns:
        tuple: (Gramian, λ_min)

    Raises:
        InvalidArgumentError: Pencere boşsa
    """
    _check_window(window)
    phis = _transition_matrices(window)
    terms = [phi.T @ window.information(k) @ phi for k, phi in enumerate(phis)]
    G = _trapezoid(terms, window.h)
    return G, float(np.linalg.eigvalsh(G)[0])


def determinability_gramian(window: GramianWindow) -> Tuple[np.ndarray, float]:
    """
    𝒟(t₂, t₁) = ∫ Φᵀ(τ,t₂)HᵀR⁻¹HΦ(τ,t₂) dτ, Φ(τ,t₂) = Φ(τ,t₁)Φ(t₂,t₁)⁻¹
    """
    _check_window(window)
    phis = _transition_matrices(window)
    phi_end = phis[-1]
    terms = []
    for k, phi in enumerate(phis):
        anchored = np.linalg.solve(phi_end.T, phi.T).T
        terms.append(anchored.T @ window.information(k) @ anchored)
    G = _trapezoid(terms, window.h)
    return G, float(np.linalg.eigvalsh(G)[0])


class GramianMonitor:
    """
    Kayan pencere Gramian izleyicisi; λ_min her `every` adımda yenilenir
    """

    def __init__(
            self,
            h: float,
            window: float = GRAMIAN_CONFIG['window'],
            every: int = GRAMIAN_CONFIG['every'],
            max_samples: int = GRAMIAN_CONFIG['max_samples']
    ):
        """
        GramianMonitor başlatıcı

        Args:
            h: Entegratör adımı (s)
            window: Pencere uzunluğu δ (s)
            every: Yenileme aralığı (adım)
            max_samples: Pencere başına en fazla örnek (seyreltme)
        """
        steps = max(int(round(window / h)), 1)
        self.stride = max(1, int(np.ceil(steps / max(max_samples - 1, 1))))
        self.h = h
        self.every = max(int(every), 1)
        self.samples = deque(maxlen=steps + 1)
        self.obs_min = float('nan')
        self.det_min = float('nan')
        self._count = 0

        logger.debug(f"GramianMonitor başlatıldı: δ={window}s, seyreltme={self.stride}")

    def push(self, F: np.ndarray, H: np.ndarray, R: np.ndarray) -> Tuple[float, float]:
        """
        Yeni örnek ekle; pencere doluysa ve sıra geldiyse λ_min değerlerini yenile

        Returns:
            tuple: (λ_min(𝒪), λ_min(𝒟)); pencere dolmadan nan
        """
        self.samples.append((F, H, R))
        self._count += 1

        if len(self.samples) == self.samples.maxlen and self._count % self.every == 0:
            picked = list(self.samples)[::-1][::self.stride][::-1]
            window = GramianWindow(
                h=self.h * self.stride,
                F=[s[0] for s in picked],
                H=[s[1] for s in picked],
                R=[s[2] for s in picked],
            )
            _, self.obs_min = observability_gramian(window)
            _, self.det_min = determinability_gramian(window)

        return self.obs_min, self.det_min
