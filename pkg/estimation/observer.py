"""
Daldırılmış durum üzerinde Kalman/Riccati gözlemcileri

- Yanlılıksız gözlemci: dẑ/dt = F_uẑ + C_u + K(ȳ − Hẑ), K = PHᵀR⁻¹
- Yanlılık artırılmış gözlemci: modifiye Riccati ile K = [K_z; K_b]
- Yön (bearing) ölçümleri Π_ȳ = I − ȳȳᵀ projeksiyonu ile, menzil (range)
  ölçümleri s_{j,k} = ½z̄_jᵀz̄_k artırımı ile doğrusal ölçüme dönüştürülür

Sürekli zamanlı gözlemci adım başına şöyle ayrıklaştırılır: (ẑ, ŝ) RK4 ile
tahmin edilir, P aynı adımla Riccati RK4 ile ilerletilir ve inovasyon terimi
adım sonu ölçümüyle adım boyunca uygulanır.
"""
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from analysis.groups import AlgebraElement, GroupElement, hat_basis
from analysis.immersion import (
    KIND_BEARING,
    KIND_LANDMARK,
    KIND_RANGE,
    CayleyCoefficients,
    DirectionTable,
    ImmersedSystem,
    case_sign,
)
from analysis.integrators import rk4_step
from analysis.riccati import (
    GainConfig,
    RiccatiState,
    kalman_gain,
    modified_riccati_step,
    riccati_step,
)
from config.settings import OBSERVER_CONFIG, RICCATI_CONFIG, TOLERANCE_CONFIG
from utils.exceptions import InvalidArgumentError, NumericalError
from utils.logger import logger

InputSignal = Union[AlgebraElement, Callable[[float], AlgebraElement]]


@dataclass(eq=False)
class ObserverState:
    """
    Attributes:
        z: İndirgenmiş çizgili tahmin ẑ
        s: Menzil artırım skalerleri ŝ (menzil ölçümü yoksa None)
        b: (b̂_ω, vec b̂_ρ) yanlılık tahmini (yanlılık modu kapalıysa None)
        riccati: P ve zaman
    """
    z: np.ndarray
    s: Optional[np.ndarray]
    b: Optional[np.ndarray]
    riccati: RiccatiState

    @property
    def t(self) -> float:
        return self.riccati.t

    def vector(self) -> np.ndarray:
        parts = [self.z]
        if self.s is not None:
            parts.append(self.s)
        if self.b is not None:
            parts.append(self.b)
        return np.concatenate(parts)


@dataclass(eq=False)
class MeasurementBatch:
    """
    Tek zaman anındaki ölçümler

    Attributes:
        values: Ölçüm başına değer (landmark d-vektör, bearing birim d-vektör, range skaler)
        valid: Ölçüm başına geçerlilik bayrakları
    """
    values: List[Union[np.ndarray, float]]
    valid: np.ndarray = None

    def __post_init__(self):
        if self.valid is None:
            self.valid = np.ones(len(self.values), dtype=bool)
        self.valid = np.asarray(self.valid, dtype=bool)

    def validate(self, system: ImmersedSystem) -> None:
        """
        Raises:
            InvalidArgumentError: Sayı, boyut, birim norm veya işaret ihlali
        """
        spec = system.spec
        if len(self.values) != spec.M or self.valid.shape != (spec.M,):
            raise InvalidArgumentError(f"Ölçüm sayısı {len(self.values)} ≠ {spec.M}")

        for i, meas in enumerate(spec.measurements):
            if not self.valid[i]:
                continue
            value = self.values[i]
            if meas.kind == KIND_RANGE:
                if not np.isscalar(value) and np.size(value) != 1:
                    raise InvalidArgumentError(f"Ölçüm {i}: menzil skaler olmalı")
                if float(value) < 0:
                    raise InvalidArgumentError(f"Ölçüm {i}: menzil negatif ({float(value)})")
                continue

            value = np.asarray(value, dtype=float)
            if value.shape != (spec.d,):
                raise InvalidArgumentError(f"Ölçüm {i}: şekil {(spec.d,)} olmalı, gelen {value.shape}")
            if meas.kind == KIND_BEARING:
                norm = np.linalg.norm(value)
                if norm >= TOLERANCE_CONFIG['bearing_min_norm'] and abs(norm - 1.0) > 1e-6:
                    raise InvalidArgumentError(f"Ölçüm {i}: yön birim norm değil (‖ȳ‖ = {norm})")


class AugmentedLayout:
    """
    Artırılmış durum düzeni [ẑ; ŝ^(i1); ŝ^(i2); …; b̂]
    """

    def __init__(self, system: ImmersedSystem, bias_mode: bool):
        spec = system.spec
        self.n_z = system.state_dim
        self.range_indices = spec.indices_of(KIND_RANGE)
        self.pairs = [(j, k) for j in range(spec.N) for k in range(j, spec.N)]
        self.pair_index = {pair: idx for idx, pair in enumerate(self.pairs)}
        self.n_pairs = len(self.pairs)
        self.n_s = self.n_pairs * len(self.range_indices)
        self.n_b = system.bias_dim if bias_mode else 0
        self.bias_mode = bias_mode

    @property
    def n_zs(self) -> int:
        return self.n_z + self.n_s

    @property
    def dim(self) -> int:
        return self.n_zs + self.n_b

    def s_slice(self, r: int) -> slice:
        """r'inci menzil ölçümünün ŝ dilimi (artırılmış durum içinde)"""
        start = self.n_z + r * self.n_pairs
        return slice(start, start + self.n_pairs)

    def pair(self, j: int, k: int) -> int:
        return self.pair_index[(min(j, k), max(j, k))]


def range_scalars(z_chain: np.ndarray) -> np.ndarray:
    """
    s_{j,k} = ½ z̄_jᵀ z̄_k, (j ≤ k) sırasıyla

    Args:
        z_chain: (N, d) tek ölçüm zinciri
    """
    gram = 0.5 * z_chain @ z_chain.T
    return gram[np.triu_indices(z_chain.shape[0])]


def range_augmentation_matrices(
        rho: np.ndarray,
        d_under: np.ndarray,
        coeffs: CayleyCoefficients,
        case: int
) -> Tuple[np.ndarray, np.ndarray]:
    """
    ṡ = A_s s + G vec(z̄_0, …, z̄_{N−1})

    ṡ_{j,k} = σ½[(ρd̲_j)ᵀz̄_k + (ρd̲_k)ᵀz̄_j] − ½z̄_{j+1}ᵀz̄_k − ½z̄_jᵀz̄_{k+1};
    σ = −1 (Case 1), +1 (Case 2); z̄_N = Σ ã_ι z̄_ι. ω terimleri ters-simetriden
    dolayı birbirini götürür.

    Args:
        rho: d×(n+m) giriş bloğu
        d_under: (N, n+m) d̲_j dizisi
        coeffs: Cayley katsayıları
        case: CASE_1 veya CASE_2

    Returns:
        tuple: (A_s, G)
    """
    N = d_under.shape[0]
    d = rho.shape[0]
    sigma = case_sign(case)
    pairs = [(j, k) for j in range(N) for k in range(j, N)]
    index = {pair: idx for idx, pair in enumerate(pairs)}

    def idx(a: int, b: int) -> int:
        return index[(min(a, b), max(a, b))]

    rho_d = d_under @ rho.T  # (N, d): ρd̲_j
    A_s = np.zeros((len(pairs), len(pairs)))
    G = np.zeros((len(pairs), N * d))

    for p, (j, k) in enumerate(pairs):
        G[p, k * d:(k + 1) * d] += 0.5 * sigma * rho_d[j]
        G[p, j * d:(j + 1) * d] += 0.5 * sigma * rho_d[k]

        for a, b in ((j, k), (k, j)):
            # ½ z̄_{a+1}ᵀ z̄_b
            if a + 1 < N:
                A_s[p, idx(a + 1, b)] -= 1.0
            else:
                for iota, coefficient in enumerate(coeffs.coefficients):
                    A_s[p, idx(iota, b)] -= coefficient

    return A_s, G


def range_augmentation_rhs(
        z_chain: np.ndarray,
        s: np.ndarray,
        u: AlgebraElement,
        d_under: np.ndarray,
        coeffs: CayleyCoefficients,
        case: int
) -> np.ndarray:
    """
    Tek menzil ölçümü için dŝ/dt

    Args:
        z_chain: (N, d) z̄_j^(i) blokları
        s: s_{j,k}^(i) (j ≤ k) vektörü
        u: Giriş
        d_under: (N, n+m) d̲_j^(i)
    """
    A_s, G = range_augmentation_matrices(u.rho, d_under, coeffs, case)
    return A_s @ s + G @ np.asarray(z_chain, dtype=float).reshape(-1)


def bias_jacobian(z_bar: np.ndarray, table: DirectionTable) -> np.ndarray:
    """
    𝓛†(z̄_j^(i))·b = b_ω^× z̄_j^(i) + b_ρ d̲_j^(i) satırları

    Satır bloğu (i, j): [hat(e_k) z̄ sütunları | d̲ᵀ ⊗ I_d]; d=3 için ilk kısım −z̄^×.
    b = (b_ω, vec b_ρ), vec sütun-öncelikli.

    Args:
        z_bar: (M, N, d) bloklar
        table: Yön tablosu

    Returns:
        np.ndarray: (M·N·d) × (d(d−1)/2 + d(n+m))
    """
    z_bar = np.asarray(z_bar, dtype=float)
    M, N, d = z_bar.shape
    basis = hat_basis(d)
    identity = np.eye(d)

    rows = []
    for i in range(M):
        for j in range(N):
            omega_part = (basis @ z_bar[i, j]).T
            rho_part = np.kron(table.d_under[i, j][None, :], identity)
            rows.append(np.hstack([omega_part, rho_part]))
    return np.vstack(rows)


def bearing_rows(
        y_bar: np.ndarray,
        min_norm: float = TOLERANCE_CONFIG['bearing_min_norm']
) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """
    Π_ȳ = I − ȳȳᵀ satırları ve sanal ölçüm 0

    Returns:
        tuple veya None: (Π_ȳ, 0); ham norm min_norm altındaysa None (ölçüm atlanır)
    """
    y_bar = np.asarray(y_bar, dtype=float)
    norm = np.linalg.norm(y_bar)
    if norm < min_norm:
        return None
    unit = y_bar / norm
    return np.eye(y_bar.size) - np.outer(unit, unit), np.zeros(y_bar.size)


def range_rows(y: float, n_pairs: int, variance: float) -> Tuple[np.ndarray, float, float]:
    """
    ½y² = s_{0,0} ölçümü

    y = r + v, v ~ N(0, σ²) için ½y² = ½r² + rv + ½v²; varyans r²σ² + σ⁴/2 ikinci
    dereceden terimi de içerir ve r yerine ölçülen y kullanılır. Landmark ve yön
    satırları birinci dereceden modelle kalır.

    Args:
        y: Menzil (≥ 0)
        n_pairs: ŝ uzunluğu
        variance: Menzil kanal varyansı σ²

    Returns:
        tuple: (s_{0,0} seçen satır, ½y², varyans y²σ² + σ⁴/2)
    """
    row = np.zeros(n_pairs)
    row[0] = 1.0
    return row, 0.5 * float(y) ** 2, float(y) ** 2 * variance + 0.5 * variance ** 2


@dataclass(eq=False)
class MeasurementRows:
    """Bir adım için yığılmış doğrusal ölçüm modeli"""
    H: np.ndarray
    y: np.ndarray
    R: np.ndarray
    channels: List[str] = field(default_factory=list)


def make_gain_config(
        system: ImmersedSystem,
        bias_mode: bool = False,
        q: float = OBSERVER_CONFIG['q'],
        r: float = OBSERVER_CONFIG['r'],
        lam: float = RICCATI_CONFIG['default_lambda'],
        p0: float = OBSERVER_CONFIG['p0'],
        modified_q: bool = RICCATI_CONFIG['modified_q'],
        bias_q: float = OBSERVER_CONFIG['bias_q']
) -> GainConfig:
    """
    Q = q·I (yanlılık bloğu bias_q·I, sıfırsa q), R_i = max(σ_i², r)
    """
    layout = AugmentedLayout(system, bias_mode)
    q_diag = np.full(layout.dim, float(q))
    if layout.n_b:
        q_diag[layout.n_zs:] = bias_q if bias_q > 0 else q
    variances = [max(meas.noise_std ** 2, r) for meas in system.spec.measurements]
    return GainConfig(Q=np.diag(q_diag), R=np.array(variances), lam=lam, p0=p0, modified_q=modified_q)


def _input_fn(u: InputSignal) -> Callable[[float], AlgebraElement]:
    if callable(u) and not isinstance(u, AlgebraElement):
        return u
    return lambda t: u


class ImmersedObserver:
    """
    Daldırılmış LTV sistem için Kalman/Riccati gözlemcisi
    """

    def __init__(self, system: ImmersedSystem, gain: GainConfig, bias_mode: bool = False):
        """
        ImmersedObserver başlatıcı

        Args:
            system: İndirgenmiş daldırılmış sistem
            gain: Kazanç ayarları (Q boyutu artırılmış durumla eşleşmeli)
            bias_mode: Yanlılık kestirimi açık mı
        """
        self.system = system
        self.spec = system.spec
        self.gain = gain
        self.bias_mode = bias_mode
        self.layout = AugmentedLayout(system, bias_mode)

        if gain.Q.shape != (self.layout.dim, self.layout.dim):
            raise InvalidArgumentError(f"Q şekli {(self.layout.dim,) * 2} olmalı, gelen {gain.Q.shape}")
        if gain.R.shape != (self.spec.M,):
            raise InvalidArgumentError(f"R uzunluğu {self.spec.M} olmalı, gelen {gain.R.shape}")

        self.last_linearization = None

        if self.layout.n_s and bias_mode:
            logger.warning("⚠️ Menzil ölçümü + yanlılık kestirimi deneysel (kararlılık garantisi yok)")

        logger.info(
            f"ImmersedObserver başlatıldı: durum boyutu={self.layout.dim}, "
            f"menzil={len(self.layout.range_indices)}, yanlılık={'açık' if bias_mode else 'kapalı'}"
        )

    def initial_state(
            self,
            T_hat: GroupElement,
            b_hat: Optional[np.ndarray] = None,
            t: float = 0.0
    ) -> ObserverState:
        """
        ẑ₀ = π(T̂₀), ŝ₀ = ½ẑ_jᵀẑ_k, P₀ = p₀I
        """
        z = self.system.immerse(T_hat)
        s = self.range_state(z) if self.layout.n_s else None
        b = None
        if self.bias_mode:
            b = np.zeros(self.layout.n_b) if b_hat is None else np.asarray(b_hat, dtype=float).copy()
            if b.shape != (self.layout.n_b,):
                raise InvalidArgumentError(f"b̂ uzunluğu {self.layout.n_b} olmalı, gelen {b.shape}")
        P = self.gain.p0 * np.eye(self.layout.dim)
        return ObserverState(z=z, s=s, b=b, riccati=RiccatiState(P=P, t=t))

    def range_state(self, z: np.ndarray) -> np.ndarray:
        blocks = self.system.expand(z)
        return np.concatenate([range_scalars(blocks[i]) for i in self.layout.range_indices])

    def augmented_dynamics(self, u: AlgebraElement) -> Tuple[np.ndarray, np.ndarray]:
        """
        [ẑ; ŝ] için (A, c)
        """
        layout = self.layout
        F, C = self.system.dynamics(u)
        if not layout.n_s:
            return F, C

        A = np.zeros((layout.n_zs, layout.n_zs))
        c = np.zeros(layout.n_zs)
        A[:layout.n_z, :layout.n_z] = F
        c[:layout.n_z] = C
        table, coeffs = self.system.table, self.system.coeffs
        for r, i in enumerate(layout.range_indices):
            A_s, G = range_augmentation_matrices(u.rho, table.d_under[i], coeffs, self.spec.case)
            rows = layout.s_slice(r)
            A[rows, rows] = A_s
            A[rows, :layout.n_z] = G @ self.system.chain_rows(i)
        return A, c

    def bias_coupling(self, x_zs: np.ndarray) -> np.ndarray:
        """
        ∂(ż, ṡ)/∂b: Case 1 için −J, Case 2 için +J (menzil satırları dahil)
        """
        layout, system = self.layout, self.system
        sigma = case_sign(self.spec.case)
        z = x_zs[:layout.n_z]
        blocks = system.expand(z)

        J = np.zeros((layout.n_zs, layout.n_b))
        J[:layout.n_z] = sigma * (system.S @ bias_jacobian(blocks, system.table))

        s_omega = layout.n_b - self.spec.d * self.spec.k
        for r, i in enumerate(layout.range_indices):
            d_under = system.table.d_under[i]
            rows = layout.s_slice(r)
            for p, (j, k) in enumerate(layout.pairs):
                J[rows.start + p, s_omega:] = 0.5 * sigma * (
                    np.kron(d_under[j], blocks[i, k]) + np.kron(d_under[k], blocks[i, j])
                )
        return J

    def assemble_measurements(self, batch: MeasurementBatch, x_pred: np.ndarray) -> MeasurementRows:
        """
        Geçerli kanallar için yığılmış (H, ȳ, R); geçersiz kanallar atlanır
        """
        layout, spec = self.layout, self.spec
        d = spec.d
        H_blocks, y_blocks, variances, channels = [], [], [], []

        range_slot = {i: r for r, i in enumerate(layout.range_indices)}
        for i, meas in enumerate(spec.measurements):
            if not batch.valid[i]:
                continue
            value = batch.values[i]
            base_var = float(self.gain.R[i])

            if meas.kind == KIND_LANDMARK:
                H_i = np.zeros((d, layout.dim))
                H_i[:, :layout.n_z] = self.system.output_rows(i)
                H_blocks.append(H_i)
                y_blocks.append(np.asarray(value, dtype=float))
                variances.extend([base_var] * d)
                channels.append(f"{KIND_LANDMARK}_{i}")

            elif meas.kind == KIND_BEARING:
                rows = bearing_rows(value)
                if rows is None:
                    logger.debug(f"Yön ölçümü {i} atlandı (dejenere)")
                    continue
                projector, virtual = rows
                H_i = np.zeros((d, layout.dim))
                H_i[:, :layout.n_z] = projector @ self.system.output_rows(i)
                H_blocks.append(H_i)
                y_blocks.append(virtual)
                variances.extend([base_var] * d)
                channels.append(f"{KIND_BEARING}_{i}")

            else:
                row, half_square, variance = range_rows(float(value), layout.n_pairs, base_var)
                H_i = np.zeros((1, layout.dim))
                H_i[0, layout.s_slice(range_slot[i])] = row
                H_blocks.append(H_i)
                y_blocks.append(np.array([half_square]))
                variances.append(variance)
                channels.append(f"{KIND_RANGE}_{i}")

        if not H_blocks:
            return MeasurementRows(H=np.zeros((0, layout.dim)), y=np.zeros(0), R=np.zeros((0, 0)))

        return MeasurementRows(
            H=np.vstack(H_blocks),
            y=np.concatenate(y_blocks),
            R=np.diag(variances),
            channels=channels,
        )

    def step(self, state: ObserverState, u: InputSignal, batch: MeasurementBatch, h: float) -> ObserverState:
        if self.bias_mode:
            return observer_step_biased(state, u, batch, self, h)
        return observer_step_bias_free(state, u, batch, self, h)


def _stage_lookup(values: Dict[float, object], h: float) -> Callable[[float], object]:
    def at(tau: float):
        if tau <= 0.0:
            return values[0]
        return values[1] if tau < h else values[2]
    return at


def _predict(
        observer: ImmersedObserver,
        x: np.ndarray,
        t: float,
        h: float,
        u_at: Callable[[float], AlgebraElement]
) -> Tuple[np.ndarray, List[Tuple[np.ndarray, np.ndarray]]]:
    """RK4 tahmini; A, c adım başı, ortası ve sonunda değerlendirilir"""
    nodes = [observer.augmented_dynamics(u_at(t + offset)) for offset in (0.0, h / 2, h)]
    node_at = _stage_lookup(nodes, h)

    def dynamics(tau, x_):
        A, c = node_at(tau)
        return A @ x_ + c

    return rk4_step(dynamics, 0.0, x, h), nodes


def _split(observer: ImmersedObserver, x: np.ndarray, riccati: RiccatiState, h: float) -> ObserverState:
    layout = observer.layout
    if not np.all(np.isfinite(x)) or not np.all(np.isfinite(riccati.P)):
        raise NumericalError(f"Gözlemci durumu sonlu değil (t = {riccati.t:.6g})")
    z = x[:layout.n_z]
    s = x[layout.n_z:layout.n_zs] if layout.n_s else None
    b = x[layout.n_zs:] if layout.n_b else None
    return ObserverState(z=z, s=s, b=b, riccati=riccati)


def observer_step_bias_free(
        state: ObserverState,
        u: InputSignal,
        batch: MeasurementBatch,
        observer: ImmersedObserver,
        h: float
) -> ObserverState:
    """
    Yanlılıksız gözlemcinin tek adımı

    Args:
        state: Mevcut durum
        u: Giriş (sabit AlgebraElement veya zamanın fonksiyonu)
        batch: t+h anındaki ölçümler
        observer: Gözlemci (sistem + kazanç ayarları)
        h: Adım (s)

    Returns:
        ObserverState: t+h durumu
    """
    if observer.bias_mode:
        raise InvalidArgumentError("Yanlılık modu açıkken observer_step_biased kullanılmalı")
    batch.validate(observer.system)

    t = state.t
    x = state.vector()
    x_pred, nodes = _predict(observer, x, t, h, _input_fn(u))

    rows = observer.assemble_measurements(batch, x_pred)
    A_at = _stage_lookup([node[0] for node in nodes], h)
    P = riccati_step(state.riccati.P, A_at, rows.H, observer.gain.Q, rows.R, h)

    if rows.H.shape[0]:
        K = kalman_gain(P, rows.H, rows.R)
        x_new = x_pred + h * K @ (rows.y - rows.H @ x_pred)
    else:
        x_new = x_pred

    observer.last_linearization = (nodes[-1][0], rows.H, rows.R)
    return _split(observer, x_new, RiccatiState(P=P, t=t + h), h)


def observer_step_biased(
        state: ObserverState,
        u: InputSignal,
        batch: MeasurementBatch,
        observer: ImmersedObserver,
        h: float
) -> ObserverState:
    """
    Yanlılık artırılmış gözlemcinin tek adımı

    Dinamikler düzeltilmiş giriş u + b̂ ile değerlendirilir (gerçek giriş = ölçülen + b);
    P modifiye Riccati ile F̆ = [[F_{u+b̂}, ∓J_ẑ], [0, 0]], H̆ = [H, 0] kullanılarak ilerler.
    """
    if not observer.bias_mode:
        raise InvalidArgumentError("Yanlılık modu kapalıyken observer_step_bias_free kullanılmalı")
    batch.validate(observer.system)

    layout, spec = observer.layout, observer.spec
    t = state.t
    b = state.b
    bias = AlgebraElement.from_vector(b, spec.d, spec.k)
    u_at = _input_fn(u)

    x_zs = state.vector()[:layout.n_zs]
    x_pred, nodes = _predict(observer, x_zs, t, h, lambda time: u_at(time) + bias)

    J_start = observer.bias_coupling(x_zs)
    J_end = observer.bias_coupling(x_pred)
    couplings = [J_start, 0.5 * (J_start + J_end), J_end]

    def breve(A: np.ndarray, J: np.ndarray) -> np.ndarray:
        F = np.zeros((layout.dim, layout.dim))
        F[:layout.n_zs, :layout.n_zs] = A
        F[:layout.n_zs, layout.n_zs:] = J
        return F

    F_at = _stage_lookup([breve(node[0], J) for node, J in zip(nodes, couplings)], h)

    x_aug_pred = np.concatenate([x_pred, b])
    rows = observer.assemble_measurements(batch, x_aug_pred)
    Q = observer.gain.Q if observer.gain.modified_q else None
    P = modified_riccati_step(state.riccati.P, F_at, rows.H, rows.R, observer.gain.lam, h, Q=Q)

    if rows.H.shape[0]:
        K = kalman_gain(P, rows.H, rows.R)
        x_new = x_aug_pred + h * K @ (rows.y - rows.H @ x_aug_pred)
    else:
        x_new = x_aug_pred

    observer.last_linearization = (F_at(h), rows.H, rows.R)
    return _split(observer, x_new, RiccatiState(P=P, t=t + h), h)
