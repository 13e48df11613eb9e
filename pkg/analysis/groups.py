"""
SO(d), TFG(d,n,m) ve sim_{n+m}(d) matris Lie grubu aritmetiği

Tüm grup işlemleri yoğun (d+n+m)×(d+n+m) gömme üzerinden tanımlıdır:
    T = [R W; 0 I],   ξ = [ω^× ρ; 0 0],   Ã = [Ω^× γ; 0 L]
"""
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import scipy.linalg

from config.settings import TOLERANCE_CONFIG
from utils.exceptions import (
    DegenerateInputError,
    InternalConsistencyError,
    InvalidArgumentError,
)

ORTHO_TOL = TOLERANCE_CONFIG['ortho_tol']
EXACT_TOL = TOLERANCE_CONFIG['exact_tol']

SIDE_LEFT = 'left'
SIDE_INVERSE = 'inverse'


def so_dim(d: int) -> int:
    """so(d) boyutu: d(d−1)/2"""
    return d * (d - 1) // 2


def _check_dim(d: int) -> None:
    if d not in (2, 3):
        raise InvalidArgumentError(f"Desteklenmeyen boyut d={d}. Geçerli: 2, 3")


def hat(v: Union[float, np.ndarray], d: int) -> np.ndarray:
    """
    Vektörü d×d ters-simetrik matrise göm

    Args:
        v: d(d−1)/2 uzunluklu vektör (d=2 için skaler de kabul edilir)
        d: Boyut (2 veya 3)

    Returns:
        np.ndarray: d×d ters-simetrik matris; d=3 için hat(v)·w = v × w
    """
    _check_dim(d)
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if v.shape != (so_dim(d),):
        raise InvalidArgumentError(
            f"hat: {so_dim(d)} uzunluklu vektör bekleniyordu, gelen şekil {v.shape}"
        )

    if d == 2:
        return np.array([[0.0, -v[0]], [v[0], 0.0]])

    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def hat_basis(d: int) -> np.ndarray:
    """so(d) taban matrisleri, şekil (d(d−1)/2, d, d)"""
    k = so_dim(d)
    return np.stack([hat(np.eye(k)[i], d) for i in range(k)])


def det_correction(U: np.ndarray, Vt: np.ndarray) -> np.ndarray:
    """
    SVD yansıma düzeltmesi: det(U)·det(V) < 0 ise diag(1,…,1,−1), değilse I
    """
    S = np.eye(U.shape[0])
    if np.linalg.det(U) * np.linalg.det(Vt) < 0:
        S[-1, -1] = -1.0
    return S


@dataclass(frozen=True, eq=False)
class GroupElement:
    """
    TFG(d,n,m) elemanı: rotasyon bloğu R ve vektör bloğu W = [X, RY]

    Attributes:
        R: d×d rotasyon matrisi
        W: d×(n+m) matris
        n: Dünya çerçevesi vektör sayısı
        m: Gövde çerçevesi vektör sayısı
    """
    R: np.ndarray
    W: np.ndarray
    n: int
    m: int = 0

    def __post_init__(self):
        R = np.array(self.R, dtype=float)
        W = np.array(self.W, dtype=float)
        if R.ndim != 2 or R.shape[0] != R.shape[1]:
            raise InvalidArgumentError(f"R kare olmalı, gelen şekil {R.shape}")
        _check_dim(R.shape[0])
        if self.n < 0 or self.m < 0:
            raise InvalidArgumentError(f"n, m negatif olamaz: n={self.n}, m={self.m}")
        W = W.reshape(R.shape[0], self.n + self.m)

        if not np.allclose(R.T @ R, np.eye(R.shape[0]), rtol=0.0, atol=ORTHO_TOL):
            raise InvalidArgumentError("R ortonormal değil (RᵀR ≠ I)")
        if abs(np.linalg.det(R) - 1.0) > ORTHO_TOL:
            raise InvalidArgumentError(f"det(R) = {np.linalg.det(R):.6g} ≠ 1")

        object.__setattr__(self, 'R', R)
        object.__setattr__(self, 'W', W)

    @property
    def d(self) -> int:
        return self.R.shape[0]

    @property
    def k(self) -> int:
        return self.n + self.m

    @property
    def dims(self) -> tuple:
        return self.d, self.n, self.m

    def matrix(self) -> np.ndarray:
        """Yoğun (d+n+m)×(d+n+m) gömme"""
        d, k = self.d, self.k
        M = np.eye(d + k)
        M[:d, :d] = self.R
        M[:d, d:] = self.W
        return M

    @classmethod
    def identity(cls, d: int, n: int, m: int = 0) -> 'GroupElement':
        _check_dim(d)
        return cls(np.eye(d), np.zeros((d, n + m)), n, m)

    @classmethod
    def from_matrix(cls, M: np.ndarray, n: int, m: int = 0) -> 'GroupElement':
        """
        Yoğun gömmeyi ayrıştır ve doğrula

        Raises:
            InvalidArgumentError: Alt bloklar [0 I] değilse veya R geçersizse
        """
        M = np.asarray(M, dtype=float)
        k = n + m
        d = M.shape[0] - k
        if M.shape != (d + k, d + k):
            raise InvalidArgumentError(f"Kare matris bekleniyordu, gelen şekil {M.shape}")
        _check_dim(d)
        if not np.allclose(M[d:, :d], 0.0, rtol=0.0, atol=ORTHO_TOL):
            raise InvalidArgumentError("Sol alt blok sıfır değil")
        if not np.allclose(M[d:, d:], np.eye(k), rtol=0.0, atol=ORTHO_TOL):
            raise InvalidArgumentError("Sağ alt blok birim değil")
        return cls(M[:d, :d], M[:d, d:], n, m)


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    """
    tfg cebiri elemanı (ω, ρ); giriş u ve yanlılık b aynı tipte tutulur

    Attributes:
        omega: d(d−1)/2 uzunluklu açısal hız
        rho: d×(n+m) matris
    """
    omega: np.ndarray
    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=float)
        if rho.ndim != 2:
            raise InvalidArgumentError(f"rho 2 boyutlu olmalı, gelen şekil {rho.shape}")
        _check_dim(rho.shape[0])
        omega = np.atleast_1d(np.array(self.omega, dtype=float))
        if omega.shape != (so_dim(rho.shape[0]),):
            raise InvalidArgumentError(
                f"omega uzunluğu {so_dim(rho.shape[0])} olmalı, gelen şekil {omega.shape}"
            )
        object.__setattr__(self, 'omega', omega)
        object.__setattr__(self, 'rho', rho)

    @property
    def d(self) -> int:
        return self.rho.shape[0]

    @property
    def k(self) -> int:
        return self.rho.shape[1]

    def matrix(self) -> np.ndarray:
        d, k = self.d, self.k
        M = np.zeros((d + k, d + k))
        M[:d, :d] = hat(self.omega, d)
        M[:d, d:] = self.rho
        return M

    def to_vector(self) -> np.ndarray:
        """(ω, vec(ρ)) yığını; vec sütun-öncelikli"""
        return np.concatenate([self.omega, self.rho.reshape(-1, order='F')])

    @classmethod
    def from_vector(cls, vec: np.ndarray, d: int, k: int) -> 'AlgebraElement':
        vec = np.asarray(vec, dtype=float)
        s = so_dim(d)
        if vec.shape != (s + d * k,):
            raise InvalidArgumentError(f"Vektör uzunluğu {s + d * k} olmalı, gelen {vec.shape}")
        return cls(vec[:s], vec[s:].reshape(d, k, order='F'))

    @classmethod
    def zero(cls, d: int, k: int) -> 'AlgebraElement':
        return cls(np.zeros(so_dim(d)), np.zeros((d, k)))

    def __add__(self, other: 'AlgebraElement') -> 'AlgebraElement':
        return AlgebraElement(self.omega + other.omega, self.rho + other.rho)

    def __sub__(self, other: 'AlgebraElement') -> 'AlgebraElement':
        return AlgebraElement(self.omega - other.omega, self.rho - other.rho)


@dataclass(frozen=True, eq=False)
class SimAlgebraElement:
    """
    sim_{n+m}(d) elemanı Ã = [Ω^× γ; 0 L]

    Attributes:
        Omega: d(d−1)/2 uzunluklu vektör
        gamma: d×(n+m) matris
        L: (n+m)×(n+m) matris
    """
    Omega: np.ndarray
    gamma: np.ndarray
    L: Optional[np.ndarray] = None

    def __post_init__(self):
        gamma = np.array(self.gamma, dtype=float)
        if gamma.ndim != 2:
            raise InvalidArgumentError(f"gamma 2 boyutlu olmalı, gelen şekil {gamma.shape}")
        d, k = gamma.shape
        _check_dim(d)
        L = np.zeros((k, k)) if self.L is None else np.array(self.L, dtype=float)
        if L.shape != (k, k):
            raise InvalidArgumentError(f"L şekli {(k, k)} olmalı, gelen {L.shape}")
        Omega = np.atleast_1d(np.array(self.Omega, dtype=float))
        if Omega.shape != (so_dim(d),):
            raise InvalidArgumentError(f"Omega uzunluğu {so_dim(d)} olmalı, gelen {Omega.shape}")
        object.__setattr__(self, 'Omega', Omega)
        object.__setattr__(self, 'gamma', gamma)
        object.__setattr__(self, 'L', L)

    @property
    def d(self) -> int:
        return self.gamma.shape[0]

    @property
    def k(self) -> int:
        return self.gamma.shape[1]

    def matrix(self) -> np.ndarray:
        d, k = self.d, self.k
        M = np.zeros((d + k, d + k))
        M[:d, :d] = hat(self.Omega, d)
        M[:d, d:] = self.gamma
        M[d:, d:] = self.L
        return M

    @classmethod
    def zero(cls, d: int, k: int) -> 'SimAlgebraElement':
        return cls(np.zeros(so_dim(d)), np.zeros((d, k)), np.zeros((k, k)))


def _check_same_dims(a: GroupElement, b: GroupElement) -> None:
    if a.dims != b.dims:
        raise InvalidArgumentError(f"Boyut uyuşmazlığı: {a.dims} ≠ {b.dims}")


def compose(a: GroupElement, b: GroupElement) -> GroupElement:
    """embed(a)·embed(b)"""
    _check_same_dims(a, b)
    return GroupElement(a.R @ b.R, a.W + a.R @ b.W, a.n, a.m)


def inverse(T: GroupElement) -> GroupElement:
    """R' = Rᵀ, W' = −RᵀW"""
    return GroupElement(T.R.T, -T.R.T @ T.W, T.n, T.m)


def act(T: GroupElement, v: np.ndarray, side: str = SIDE_LEFT) -> np.ndarray:
    """
    Homojen vektöre etki: T·v (left) veya T⁻¹·v (inverse)
    """
    v = np.asarray(v, dtype=float)
    size = T.d + T.k
    if v.shape != (size,):
        raise InvalidArgumentError(f"Vektör uzunluğu {size} olmalı, gelen şekil {v.shape}")

    d = T.d
    v_bar, v_under = v[:d], v[d:]
    if side == SIDE_LEFT:
        return np.concatenate([T.R @ v_bar + T.W @ v_under, v_under])
    if side == SIDE_INVERSE:
        return np.concatenate([T.R.T @ (v_bar - T.W @ v_under), v_under])

    raise InvalidArgumentError(f"Geçersiz side: {side}. Geçerli: {SIDE_LEFT}, {SIDE_INVERSE}")


def sim_conjugate(S: np.ndarray, T: GroupElement) -> GroupElement:
    """
    S·embed(T)·S⁻¹; S ∈ SIM_{n+m}(d)

    Raises:
        InvalidArgumentError: S SIM grubunda değilse
        InternalConsistencyError: Sonuç TFG değişmezlerini sağlamıyorsa
    """
    S = np.asarray(S, dtype=float)
    d, k = T.d, T.k
    if S.shape != (d + k, d + k):
        raise InvalidArgumentError(f"S şekli {(d + k, d + k)} olmalı, gelen {S.shape}")

    Rs = S[:d, :d]
    if not np.allclose(Rs.T @ Rs, np.eye(d), rtol=0.0, atol=ORTHO_TOL):
        raise InvalidArgumentError("S'nin sol üst bloğu ortogonal değil")
    if not np.allclose(S[d:, :d], 0.0, rtol=0.0, atol=EXACT_TOL):
        raise InvalidArgumentError("S'nin sol alt bloğu sıfır değil")
    if abs(np.linalg.det(S[d:, d:])) < EXACT_TOL:
        raise InvalidArgumentError("S'nin sağ alt bloğu tekil")

    conjugated = S @ np.linalg.solve(S.T, T.matrix().T).T
    try:
        return GroupElement.from_matrix(conjugated, T.n, T.m)
    except InvalidArgumentError as e:
        raise InternalConsistencyError(f"Eşlenik TFG dışına çıktı: {e}") from e


def _rodrigues(phi: np.ndarray) -> tuple:
    """
    exp(φ^×) ve sol Jacobian V(φ) (kapalı form, d=3)
    """
    theta = np.linalg.norm(phi)
    Phi = hat(phi, 3)
    Phi2 = Phi @ Phi
    if theta < 1e-8:
        R = np.eye(3) + Phi + 0.5 * Phi2
        V = np.eye(3) + 0.5 * Phi + Phi2 / 6.0
        return R, V

    a = np.sin(theta) / theta
    b = (1.0 - np.cos(theta)) / theta ** 2
    c = (theta - np.sin(theta)) / theta ** 3
    R = np.eye(3) + a * Phi + b * Phi2
    V = np.eye(3) + b * Phi + c * Phi2
    return R, V


def group_exp(a: Union[AlgebraElement, SimAlgebraElement], t: float = 1.0) -> np.ndarray:
    """
    exp(t·embed(a))

    d=3 tfg elemanları için Rodrigues kapalı formu, diğer durumlarda
    scipy.linalg.expm (Padé ölçekle-ve-karele).

    Returns:
        np.ndarray: Kare matris
    """
    if isinstance(a, AlgebraElement) and a.d == 3:
        R, V = _rodrigues(t * a.omega)
        M = np.eye(3 + a.k)
        M[:3, :3] = R
        M[:3, 3:] = V @ (t * a.rho)
        return M

    return scipy.linalg.expm(t * a.matrix())


def project_to_group(M: np.ndarray, d: int, n: int, m: int = 0) -> GroupElement:
    """
    En yakın TFG elemanı: R bloğu SVD-polar projeksiyon (det düzeltmeli), W kopyalanır

    Raises:
        DegenerateInputError: R bloğu tekilse
    """
    M = np.asarray(M, dtype=float)
    if M.shape != (d + n + m, d + n + m):
        raise InvalidArgumentError(f"Matris şekli {(d + n + m,) * 2} olmalı, gelen {M.shape}")

    U, sigma, Vt = np.linalg.svd(M[:d, :d])
    if sigma[0] == 0.0 or sigma[-1] < EXACT_TOL * sigma[0]:
        raise DegenerateInputError(f"R bloğu tekil (σ = {sigma})")

    R = U @ det_correction(U, Vt) @ Vt
    return GroupElement(R, M[:d, d:], n, m)


def random_rotation(rng: np.random.Generator, d: int = 3) -> np.ndarray:
    """Düzgün dağılımlı rastgele rotasyon (QR yöntemi)"""
    _check_dim(d)
    Q, Rq = np.linalg.qr(rng.standard_normal((d, d)))
    Q = Q @ np.diag(np.sign(np.diag(Rq)))
    if np.linalg.det(Q) < 0:
        Q[:, -1] *= -1.0
    return Q


def random_group_element(
        rng: np.random.Generator,
        d: int,
        n: int,
        m: int = 0,
        scale: float = 1.0
) -> GroupElement:
    """Rastgele TFG elemanı; W ~ N(0, scale²)"""
    return GroupElement(random_rotation(rng, d), scale * rng.standard_normal((d, n + m)), n, m)


def random_sim_matrix(
        rng: np.random.Generator,
        d: int,
        k: int,
        spread: float = 0.3
) -> np.ndarray:
    """Rastgele SIM_{k}(d) elemanı [R W; 0 A], A iyi koşullu"""
    S = np.zeros((d + k, d + k))
    S[:d, :d] = random_rotation(rng, d)
    S[:d, d:] = rng.standard_normal((d, k))
    S[d:, d:] = np.eye(k) + spread * rng.standard_normal((k, k)) / max(np.sqrt(k), 1.0)
    return S
