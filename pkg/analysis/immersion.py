"""
Grup sistemini lineer zamanla değişen (LTV) sisteme daldırma

Case 1:  Ṫ = ÃT + T[ω^× ρ; 0 −L],  y = T⁻¹d,  z_j = T⁻¹Ã^j d
Case 2:  Ṫ = [ω^× ρ; 0 L]T − TÃ,   y = Td,   z_j = TÃ^j d

İndirgenmiş formda yalnızca çizgili (barred) d-vektörler z̄_j^(i) tutulur;
alt çizgili kısımlar d̲_j^(i) sabitine eşittir.
"""
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
import scipy.linalg

from analysis.groups import (
    AlgebraElement,
    GroupElement,
    SimAlgebraElement,
    hat,
    so_dim,
)
from config.settings import TOLERANCE_CONFIG
from utils.exceptions import InvalidArgumentError
from utils.logger import logger

CASE_1 = 1
CASE_2 = 2

KIND_LANDMARK = 'landmark'
KIND_BEARING = 'bearing'
KIND_RANGE = 'range'
MEASUREMENT_KINDS = (KIND_LANDMARK, KIND_BEARING, KIND_RANGE)


def case_sign(case: int) -> float:
    """ω ve ρ terimlerinin işareti: Case 1 → −1, Case 2 → +1"""
    if case == CASE_1:
        return -1.0
    if case == CASE_2:
        return 1.0
    raise InvalidArgumentError(f"Geçersiz case: {case}. Geçerli: {CASE_1}, {CASE_2}")


@dataclass(frozen=True, eq=False)
class MeasurementSpec:
    """
    Tek ölçüm: tür, homojen yön vektörü d^(i) = [d̄; d̲] ve gürültü std

    Attributes:
        kind: 'landmark', 'bearing' veya 'range'
        direction: d+n+m uzunluklu homojen vektör
        noise_std: Kanal başına standart sapma
        name: Log/çıktı için etiket
    """
    kind: str
    direction: np.ndarray
    noise_std: float = 0.0
    name: str = ''

    def __post_init__(self):
        if self.kind not in MEASUREMENT_KINDS:
            raise InvalidArgumentError(
                f"Geçersiz ölçüm türü: {self.kind}. Geçerli: {list(MEASUREMENT_KINDS)}"
            )
        direction = np.array(self.direction, dtype=float)
        if direction.ndim != 1:
            raise InvalidArgumentError(f"Yön vektörü 1 boyutlu olmalı, gelen {direction.shape}")
        if self.noise_std < 0:
            raise InvalidArgumentError(f"noise_std negatif olamaz: {self.noise_std}")
        if self.kind != KIND_LANDMARK and not np.any(direction):
            raise InvalidArgumentError(f"{self.kind} ölçümü sıfır yönle tanımlanamaz")
        object.__setattr__(self, 'direction', direction)


@dataclass(frozen=True, eq=False)
class SystemSpec:
    """
    TFG(d,n,m) üzerinde doğrusal gözlenen sistem

    Attributes:
        case: CASE_1 (y = T⁻¹d) veya CASE_2 (y = Td)
        d, n, m: Grup boyutları
        generator: Sabit Ã ∈ sim_{n+m}(d)
        measurements: MeasurementSpec listesi
    """
    case: int
    d: int
    n: int
    m: int
    generator: SimAlgebraElement
    measurements: Tuple[MeasurementSpec, ...]

    def __post_init__(self):
        case_sign(self.case)
        object.__setattr__(self, 'measurements', tuple(self.measurements))
        if self.N < 2:
            raise InvalidArgumentError(f"N = d+n+m ≥ 2 olmalı, gelen {self.N}")
        if (self.generator.d, self.generator.k) != (self.d, self.k):
            raise InvalidArgumentError(
                f"Üreteç boyutları {(self.generator.d, self.generator.k)} ≠ {(self.d, self.k)}"
            )
        if not self.measurements:
            raise InvalidArgumentError("En az bir ölçüm gerekli")
        for i, meas in enumerate(self.measurements):
            if meas.direction.shape != (self.N,):
                raise InvalidArgumentError(
                    f"Ölçüm {i}: yön uzunluğu {self.N} olmalı, gelen {meas.direction.shape}"
                )

    @property
    def k(self) -> int:
        return self.n + self.m

    @property
    def N(self) -> int:
        return self.d + self.n + self.m

    @property
    def M(self) -> int:
        return len(self.measurements)

    def indices_of(self, kind: str) -> Tuple[int, ...]:
        return tuple(i for i, meas in enumerate(self.measurements) if meas.kind == kind)


@dataclass(frozen=True, eq=False)
class CayleyCoefficients:
    """
    Ã^N = Σ_l ã_l Ã^l katsayıları

    Attributes:
        coefficients: ã_0 … ã_{N−1}
        residual: ‖Ã^N − Σ ã_l Ã^l‖₂
    """
    coefficients: np.ndarray
    residual: float

    @property
    def N(self) -> int:
        return len(self.coefficients)


@dataclass(frozen=True, eq=False)
class DirectionTable:
    """
    d_j^(i) = Ã^j d^(i) tablosu

    Attributes:
        d_bar: (M, N, d) çizgili kısımlar
        d_under: (M, N, n+m) alt çizgili kısımlar
        singular_values: D'nin tekil değerleri (azalan)
        rank: σ_k ≥ rank_rel_tol·σ_1 eşiği ile rank(D)
    """
    d_bar: np.ndarray
    d_under: np.ndarray
    singular_values: np.ndarray
    rank: int

    @property
    def M(self) -> int:
        return self.d_bar.shape[0]

    @property
    def N(self) -> int:
        return self.d_bar.shape[1]

    @property
    def D_bar(self) -> np.ndarray:
        """d×(MN); sütunlar i artan, i içinde j artan"""
        return self.d_bar.reshape(-1, self.d_bar.shape[2]).T

    @property
    def D_under(self) -> np.ndarray:
        return self.d_under.reshape(-1, self.d_under.shape[2]).T

    @property
    def D(self) -> np.ndarray:
        return np.vstack([self.D_bar, self.D_under])

    def column(self, i: int, j: int) -> np.ndarray:
        return np.concatenate([self.d_bar[i, j], self.d_under[i, j]])


@dataclass(eq=False)
class ImmersedState:
    """
    Daldırılmış durum: z̄_j^(i) blokları

    Menzil skalerleri ve yanlılık gözlemci durumunda (ObserverState) tutulur.

    Attributes:
        z_bar: (M, N, d) çizgili bloklar
    """
    z_bar: np.ndarray

    def vector(self) -> np.ndarray:
        return self.z_bar.reshape(-1)


def cayley_coefficients(generator: Union[SimAlgebraElement, np.ndarray]) -> CayleyCoefficients:
    """
    Faddeev–LeVerrier ile karakteristik polinom katsayıları

    p(λ) = Σ c_k λ^k (c_N = 1) için Ã^N = −Σ_{l<N} c_l Ã^l, yani ã_l = −c_l.

    Args:
        generator: Ã (SimAlgebraElement veya kare matris)

    Returns:
        CayleyCoefficients: ã_l ve artık
    """
    A = generator.matrix() if isinstance(generator, SimAlgebraElement) else np.asarray(generator, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidArgumentError(f"Kare matris bekleniyordu, gelen şekil {A.shape}")

    N = A.shape[0]
    identity = np.eye(N)
    c = np.zeros(N + 1)
    c[N] = 1.0
    Mk = np.zeros_like(A)
    for k in range(1, N + 1):
        Mk = A @ Mk + c[N - k + 1] * identity
        c[N - k] = -np.trace(A @ Mk) / k

    coefficients = -c[:N]

    powers = [identity]
    for _ in range(N):
        powers.append(powers[-1] @ A)
    combination = sum(coefficients[l] * powers[l] for l in range(N))
    residual = float(np.linalg.norm(powers[N] - combination, 2))

    scale = max(1.0, np.linalg.norm(A, 2) ** N)
    if residual > TOLERANCE_CONFIG['cayley_rel_tol'] * scale:
        logger.warning(f"⚠️ Cayley-Hamilton artığı yüksek: {residual:.3e} (ölçek {scale:.3e})")

    return CayleyCoefficients(coefficients=coefficients, residual=residual)


def direction_table(spec: SystemSpec) -> DirectionTable:
    """
    d̲_{j+1} = L d̲_j, d̄_{j+1} = Ω^× d̄_j + γ d̲_j özyinelemesi ve rank(D)
    """
    d, N, M = spec.d, spec.N, spec.M
    Omega_hat = hat(spec.generator.Omega, d)
    gamma, L = spec.generator.gamma, spec.generator.L

    d_bar = np.zeros((M, N, d))
    d_under = np.zeros((M, N, spec.k))
    for i, meas in enumerate(spec.measurements):
        d_bar[i, 0] = meas.direction[:d]
        d_under[i, 0] = meas.direction[d:]
        for j in range(N - 1):
            d_bar[i, j + 1] = Omega_hat @ d_bar[i, j] + gamma @ d_under[i, j]
            d_under[i, j + 1] = L @ d_under[i, j]

    D = np.vstack([d_bar.reshape(-1, d).T, d_under.reshape(-1, spec.k).T])
    singular_values = np.linalg.svd(D, compute_uv=False)
    if singular_values.size == 0 or singular_values[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(singular_values >= TOLERANCE_CONFIG['rank_rel_tol'] * singular_values[0]))

    return DirectionTable(d_bar=d_bar, d_under=d_under, singular_values=singular_values, rank=rank)


def immerse(T: GroupElement, table: DirectionTable, case: int) -> ImmersedState:
    """
    π(T): Case 1 z̄_j = Rᵀ(d̄_j − W d̲_j), Case 2 z̄_j = R d̄_j + W d̲_j
    """
    if T.d != table.d_bar.shape[2] or T.k != table.d_under.shape[2]:
        raise InvalidArgumentError(
            f"Boyut uyuşmazlığı: grup {T.dims}, tablo d={table.d_bar.shape[2]}, k={table.d_under.shape[2]}"
        )

    moved = table.d_under @ T.W.T
    if case == CASE_1:
        z_bar = (table.d_bar - moved) @ T.R
    elif case == CASE_2:
        z_bar = table.d_bar @ T.R.T + moved
    else:
        raise InvalidArgumentError(f"Geçersiz case: {case}")

    return ImmersedState(z_bar=z_bar)


def vector_field_at_identity(u: AlgebraElement, spec: SystemSpec) -> np.ndarray:
    """
    f_u(id): Case 1 Ã + [ω^× ρ; 0 −L], Case 2 [ω^× ρ; 0 L] − Ã
    """
    A = spec.generator.matrix()
    B = u.matrix()
    d = spec.d
    if spec.case == CASE_1:
        B[d:, d:] = -spec.generator.L
        return A + B
    B[d:, d:] = spec.generator.L
    return B - A


def _chain_shift(coeffs: CayleyCoefficients) -> np.ndarray:
    """N×N: −1 üst köşegen, son satır −ã_l"""
    N = coeffs.N
    shift = -np.eye(N, k=1)
    shift[-1, :] -= coeffs.coefficients
    return shift


def build_ltv_general(
        u: Union[AlgebraElement, np.ndarray],
        spec: SystemSpec,
        coeffs: CayleyCoefficients
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Genel (indirgenmemiş) LTV: d_z = M·N²

    Bloklar: köşegen −S_u, üst köşegen −I, son satır −ã_l I;
    S_u = f_u(id) − Ã (Case 1) veya −f_u(id) − Ã (Case 2).

    Args:
        u: Giriş (AlgebraElement) veya doğrudan f_u(id) matrisi

    Returns:
        tuple: (F_u, C_u = 0, H)
    """
    N, M = spec.N, spec.M
    f_identity = vector_field_at_identity(u, spec) if isinstance(u, AlgebraElement) else np.asarray(u, dtype=float)
    if f_identity.shape != (N, N):
        raise InvalidArgumentError(f"f_u(id) şekli {(N, N)} olmalı, gelen {f_identity.shape}")

    A = spec.generator.matrix()
    S_u = f_identity - A if spec.case == CASE_1 else -f_identity - A

    block = np.kron(np.eye(N), -S_u) + np.kron(_chain_shift(coeffs), np.eye(N))
    F = scipy.linalg.block_diag(*([block] * M))
    C = np.zeros(M * N * N)

    H_block = np.zeros((N, N * N))
    H_block[:, :N] = np.eye(N)
    H = scipy.linalg.block_diag(*([H_block] * M))

    return F, C, H


def build_ltv_tfg(
        u: AlgebraElement,
        spec: SystemSpec,
        table: DirectionTable,
        coeffs: CayleyCoefficients
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    İndirgenmiş TFG LTV: d_z = M·N·d

    Case 1: ż̄_j = −ω^× z̄_j − ρ d̲_j − z̄_{j+1}; Case 2 ω ve ρ terimlerinin işaretini çevirir.
    Son satırda z̄_N yerine Σ ã_l z̄_l kullanılır.

    Returns:
        tuple: (F_u, C_u, H)
    """
    d, N, M = spec.d, spec.N, spec.M
    sign = case_sign(spec.case)

    block = np.kron(np.eye(N), sign * hat(u.omega, d)) + np.kron(_chain_shift(coeffs), np.eye(d))
    F = scipy.linalg.block_diag(*([block] * M))
    C = sign * (table.d_under @ u.rho.T).reshape(-1)

    H_block = np.zeros((d, N * d))
    H_block[:, :d] = np.eye(d)
    H = scipy.linalg.block_diag(*([H_block] * M))

    return F, C, H


@dataclass(frozen=True, eq=False)
class StateReduction:
    """
    (i, j) → ortak durum yuvası eşlemesi

    Attributes:
        slot: (M, N) yuva indeksleri; −1 sabit sıfır (tahmin edilmez)
        sign: (M, N) ±1; z̄_j^(i) = sign · x[slot]
        representatives: Her yuvanın ilk (i, j) temsilcisi
    """
    slot: np.ndarray
    sign: np.ndarray
    representatives: Tuple[Tuple[int, int], ...]

    @property
    def n_slots(self) -> int:
        return len(self.representatives)

    @property
    def is_identity(self) -> bool:
        M, N = self.slot.shape
        return self.n_slots == M * N and np.array_equal(self.slot.reshape(-1), np.arange(M * N)) \
            and np.all(self.sign == 1.0)

    def expansion_matrix(self, d: int) -> np.ndarray:
        """E: tam blok vektör = E · indirgenmiş vektör"""
        M, N = self.slot.shape
        E = np.zeros((M * N * d, self.n_slots * d))
        for i in range(M):
            for j in range(N):
                s = self.slot[i, j]
                if s < 0:
                    continue
                row = (i * N + j) * d
                E[row:row + d, s * d:(s + 1) * d] = self.sign[i, j] * np.eye(d)
        return E

    def selection_matrix(self, d: int) -> np.ndarray:
        """S: temsilci satırlarını seçer"""
        M, N = self.slot.shape
        S = np.zeros((self.n_slots * d, M * N * d))
        for s, (i, j) in enumerate(self.representatives):
            col = (i * N + j) * d
            S[s * d:(s + 1) * d, col:col + d] = np.eye(d)
        return S


def identity_reduction(M: int, N: int) -> StateReduction:
    """Birleştirme yok: her (i, j) kendi yuvası"""
    return StateReduction(
        slot=np.arange(M * N).reshape(M, N),
        sign=np.ones((M, N)),
        representatives=tuple((i, j) for i in range(M) for j in range(N)),
    )


def shared_state_reduction(
        table: DirectionTable,
        tol: float = TOLERANCE_CONFIG['reduction_tol']
) -> StateReduction:
    """
    Tanımlayıcı sütunları Ã^j d^(i) işaret dışında eşit olan blokları tek kopyada birleştir

    Özdeş sıfır sütunlar yuvasız kalır (z̄ ≡ 0).

    Returns:
        StateReduction: (i, j) → (yuva, işaret) eşlemesi
    """
    M, N = table.M, table.N
    slot = np.full((M, N), -1, dtype=int)
    sign = np.ones((M, N))
    representatives = []
    rep_columns = []

    for i in range(M):
        for j in range(N):
            col = table.column(i, j)
            norm = np.linalg.norm(col)
            if norm <= tol:
                continue

            threshold = tol * max(1.0, norm)
            for s, rep in enumerate(rep_columns):
                if np.linalg.norm(col - rep) <= threshold:
                    slot[i, j] = s
                    break
                if np.linalg.norm(col + rep) <= threshold:
                    slot[i, j] = s
                    sign[i, j] = -1.0
                    break
            else:
                slot[i, j] = len(representatives)
                representatives.append((i, j))
                rep_columns.append(col)

    reduction = StateReduction(slot=slot, sign=sign, representatives=tuple(representatives))
    logger.debug(f"Ortak durum indirgemesi: {M * N} blok → {reduction.n_slots} yuva")
    return reduction


class ImmersedSystem:
    """
    İndirgenmiş daldırılmış sistem (üretim yolu)

    Yön tablosu, Cayley katsayıları ve ortak durum indirgemesini birleştirir;
    F_red = S F E, C_red = S C, H_red = H E.
    """

    def __init__(self, spec: SystemSpec, shared_states: bool = False):
        """
        ImmersedSystem başlatıcı

        Args:
            spec: Sistem tanımı
            shared_states: Ortak durum birleştirme açık mı
        """
        self.spec = spec
        self.table = direction_table(spec)
        self.coeffs = cayley_coefficients(spec.generator)
        if shared_states:
            self.reduction = shared_state_reduction(self.table)
        else:
            self.reduction = identity_reduction(spec.M, spec.N)

        self.E = self.reduction.expansion_matrix(spec.d)
        self.S = self.reduction.selection_matrix(spec.d)

        logger.info(
            f"ImmersedSystem başlatıldı: TFG({spec.d},{spec.n},{spec.m}), Case {spec.case}, "
            f"M={spec.M}, N={spec.N}, durum boyutu={self.state_dim}, rank(D)={self.table.rank}"
        )

    @property
    def state_dim(self) -> int:
        return self.reduction.n_slots * self.spec.d

    @property
    def ges_eligible(self) -> bool:
        return self.table.rank >= self.spec.N

    def dynamics(self, u: AlgebraElement) -> Tuple[np.ndarray, np.ndarray]:
        """
        İndirgenmiş (F_u, C_u) = (S F E, S C); F, C build_ltv_tfg çıktısı
        """
        F, C, _ = build_ltv_tfg(u, self.spec, self.table, self.coeffs)
        if self.reduction.is_identity:
            return F, C
        return self.S @ F @ self.E, self.S @ C

    def expand(self, z: np.ndarray) -> np.ndarray:
        """İndirgenmiş vektör → (M, N, d) bloklar"""
        return (self.E @ z).reshape(self.spec.M, self.spec.N, self.spec.d)

    def compress(self, z_bar: np.ndarray) -> np.ndarray:
        """(M, N, d) bloklar → indirgenmiş vektör (temsilciler)"""
        return self.S @ np.asarray(z_bar, dtype=float).reshape(-1)

    def immerse(self, T: GroupElement) -> np.ndarray:
        return self.compress(immerse(T, self.table, self.spec.case).z_bar)

    def chain_rows(self, i: int) -> np.ndarray:
        """
        Ölçüm i zincirinin (N·d satır) indirgenmiş duruma göre satırları
        """
        d, N = self.spec.d, self.spec.N
        start = i * N * d
        return self.E[start:start + N * d]

    def output_rows(self, i: int) -> np.ndarray:
        """z̄_0^(i) için d satırlık H bloğu (birleştirme işaretiyle)"""
        return self.chain_rows(i)[:self.spec.d]

    @property
    def bias_dim(self) -> int:
        """(b_ω, vec b_ρ) uzunluğu"""
        return so_dim(self.spec.d) + self.spec.d * self.spec.k
