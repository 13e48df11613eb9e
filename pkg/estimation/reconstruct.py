"""
Daldırılmış tahminden TFG elemanının geri kazanımı (ağırlıklı Umeyama çözümü)
"""
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np
import scipy.linalg

from analysis.groups import GroupElement, det_correction, inverse
from analysis.immersion import CASE_1, CASE_2, DirectionTable, ImmersedSystem
from config.settings import OBSERVER_CONFIG, TOLERANCE_CONFIG
from utils.exceptions import InvalidArgumentError, NumericalError, RankConditionError
from utils.helpers import rotation_angle_deg


@dataclass(frozen=True, eq=False)
class ReconstructionProblem:
    """
    Attributes:
        Z_bar: d×(MN) tahmin edilen çizgili bloklar
        D_bar: d×(MN)
        D_under: (n+m)×(MN)
        case: CASE_1 veya CASE_2
        n, m: Grup boyutları (n None ise n+m satır sayısından alınır)
        Sigma: (MN×MN) SPD ağırlık; None birim
    """
    Z_bar: np.ndarray
    D_bar: np.ndarray
    D_under: np.ndarray
    case: int = CASE_1
    n: Optional[int] = None
    m: int = 0
    Sigma: Optional[np.ndarray] = None

    def __post_init__(self):
        Z_bar = np.atleast_2d(np.asarray(self.Z_bar, dtype=float))
        D_bar = np.atleast_2d(np.asarray(self.D_bar, dtype=float))
        D_under = np.atleast_2d(np.asarray(self.D_under, dtype=float))
        if Z_bar.shape != D_bar.shape:
            raise InvalidArgumentError(f"Z̄ şekli {Z_bar.shape} ≠ D̄ şekli {D_bar.shape}")
        if D_under.shape[1] != D_bar.shape[1]:
            raise InvalidArgumentError(f"D̲ sütun sayısı {D_under.shape[1]} ≠ {D_bar.shape[1]}")
        if self.case not in (CASE_1, CASE_2):
            raise InvalidArgumentError(f"Geçersiz case: {self.case}")
        n = D_under.shape[0] - self.m if self.n is None else self.n
        if n + self.m != D_under.shape[0]:
            raise InvalidArgumentError(f"n+m = {n + self.m} ≠ D̲ satır sayısı {D_under.shape[0]}")
        if self.Sigma is not None:
            Sigma = np.asarray(self.Sigma, dtype=float)
            if Sigma.shape != (D_bar.shape[1],) * 2:
                raise InvalidArgumentError(f"Σ şekli {(D_bar.shape[1],) * 2} olmalı, gelen {Sigma.shape}")
            object.__setattr__(self, 'Sigma', Sigma)

        object.__setattr__(self, 'Z_bar', Z_bar)
        object.__setattr__(self, 'D_bar', D_bar)
        object.__setattr__(self, 'D_under', D_under)
        object.__setattr__(self, 'n', n)


@dataclass(frozen=True, eq=False)
class ReconstructionResult:
    """
    Attributes:
        estimate: Geri kazanılan TFG elemanı
        singular_values: Z̄Π⊥D̄ᵀ tekil değerleri (azalan)
        unique: Optimumun tekliği (σ_{d−1} eşik üstünde)
        residual: Optimize edilen maliyet değeri
    """
    estimate: GroupElement
    singular_values: np.ndarray
    unique: bool
    residual: float


def _inverse_sqrt(Sigma: np.ndarray) -> np.ndarray:
    eigenvalues, eigenvectors = np.linalg.eigh(0.5 * (Sigma + Sigma.T))
    if eigenvalues[0] <= 0:
        raise InvalidArgumentError("Σ pozitif tanımlı değil")
    return (eigenvectors / np.sqrt(eigenvalues)) @ eigenvectors.T


def _unique_optimum(sigma: np.ndarray) -> bool:
    sigma = np.asarray(sigma, dtype=float)
    if sigma.size == 0 or sigma[0] <= 0.0:
        return False
    return bool(sigma[sigma.size - 2] >= TOLERANCE_CONFIG['rank_rel_tol'] * sigma[0])


def uniqueness_check(result: ReconstructionResult) -> bool:
    """
    rank(Z̄Π⊥D̄ᵀ) ≥ d−1 (σ_k ≥ 1e-8·σ_1 eşiğiyle)
    """
    return _unique_optimum(result.singular_values)


def umeyama_solve(problem: ReconstructionProblem) -> ReconstructionResult:
    """
    min ‖Ẑ − π(χ)‖ çözümü

    Π⊥ = I − D̲ᵀ(D̲D̲ᵀ)⁻¹D̲, ŪΛV̄ᵀ = Ẑ̄Π⊥D̄ᵀ, S̄ yansıma düzeltmesi;
    Case 1: R̂ = V̄S̄Ūᵀ, Ŵ = (D̄ − R̂Ẑ̄)D̲ᵀ(D̲D̲ᵀ)⁻¹
    Case 2: R̂ = ŪS̄V̄ᵀ, Ŵ = (Ẑ̄ − R̂D̄)D̲ᵀ(D̲D̲ᵀ)⁻¹

    Raises:
        RankConditionError: D̲D̲ᵀ tekil/kötü koşulluysa
        NumericalError: SVD yakınsamazsa
    """
    Z_bar, D_bar, D_under = problem.Z_bar, problem.D_bar, problem.D_under
    if problem.Sigma is not None:
        weight = _inverse_sqrt(problem.Sigma)
        Z_bar, D_bar, D_under = Z_bar @ weight, D_bar @ weight, D_under @ weight

    gram = D_under @ D_under.T
    eigenvalues = np.linalg.eigvalsh(gram)
    if eigenvalues[-1] <= 0.0 or eigenvalues[0] * TOLERANCE_CONFIG['cond_max'] <= eigenvalues[-1]:
        raise RankConditionError(
            f"D̲D̲ᵀ tekil veya kötü koşullu (λ = [{eigenvalues[0]:.3e}, {eigenvalues[-1]:.3e}])"
        )
    try:
        factor = scipy.linalg.cho_factor(gram, lower=True)
    except np.linalg.LinAlgError as e:
        raise RankConditionError(f"D̲D̲ᵀ pozitif tanımlı değil: {e}") from e

    projector = np.eye(D_under.shape[1]) - D_under.T @ scipy.linalg.cho_solve(factor, D_under)
    cross = Z_bar @ projector @ D_bar.T
    try:
        U, sigma, Vt = np.linalg.svd(cross)
    except np.linalg.LinAlgError as e:
        raise NumericalError(f"SVD başarısız: {e}") from e

    S_bar = det_correction(U, Vt)
    if problem.case == CASE_1:
        R = Vt.T @ S_bar @ U.T
        W = scipy.linalg.cho_solve(factor, D_under @ (D_bar - R @ Z_bar).T).T
        residual = np.linalg.norm(Z_bar - R.T @ (D_bar - W @ D_under)) ** 2
    else:
        R = U @ S_bar @ Vt
        W = scipy.linalg.cho_solve(factor, D_under @ (Z_bar - R @ D_bar).T).T
        residual = np.linalg.norm(Z_bar - R @ D_bar - W @ D_under) ** 2

    return ReconstructionResult(
        estimate=GroupElement(R, W, problem.n, problem.m),
        singular_values=sigma,
        unique=_unique_optimum(sigma),
        residual=float(residual),
    )


def reconstruct_from_state(
        system: ImmersedSystem,
        z: np.ndarray,
        Sigma: Optional[np.ndarray] = None,
        columns: Optional[np.ndarray] = None
) -> ReconstructionResult:
    """
    İndirgenmiş durum vektöründen doğrudan geri kazanım

    Args:
        system: İndirgenmiş daldırılmış sistem
        z: ẑ
        Sigma: Tam (MN×MN) ağırlık; None birim
        columns: Kullanılacak Z̄ sütunlarının maskesi (MN uzunluklu); None hepsi
    """
    spec, table = system.spec, system.table
    Z_bar = system.expand(z).reshape(-1, spec.d).T
    D_bar, D_under = table.D_bar, table.D_under
    if columns is not None:
        columns = np.asarray(columns, dtype=bool)
        if columns.shape != (Z_bar.shape[1],):
            raise InvalidArgumentError(f"Sütun maskesi uzunluğu {Z_bar.shape[1]} olmalı, gelen {columns.shape}")
        Z_bar, D_bar, D_under = Z_bar[:, columns], D_bar[:, columns], D_under[:, columns]
        if Sigma is not None:
            Sigma = np.asarray(Sigma, dtype=float)[np.ix_(columns, columns)]
    problem = ReconstructionProblem(
        Z_bar=Z_bar,
        D_bar=D_bar,
        D_under=D_under,
        case=spec.case,
        n=spec.n,
        m=spec.m,
        Sigma=Sigma,
    )
    return umeyama_solve(problem)


def column_variances(system: ImmersedSystem, P: np.ndarray) -> np.ndarray:
    """
    Z̄ sütunu başına varyans: ilgili yuvanın d×d köşegen bloğunun ortalaması

    Yuvasız (sabit sıfır) sütunlar en küçük varyansı alır.

    Args:
        system: İndirgenmiş daldırılmış sistem
        P: Gözlemci kovaryansı (ilk state_dim satır/sütun ẑ'ye ait)

    Returns:
        np.ndarray: MN uzunluklu pozitif varyanslar
    """
    d, n_z = system.spec.d, system.state_dim
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] < n_z or P.shape[1] < n_z:
        raise InvalidArgumentError(f"P en az {(n_z, n_z)} olmalı, gelen {P.shape}")

    slot_variance = np.diag(P)[:n_z].reshape(-1, d).mean(axis=1)
    slots = system.reduction.slot.reshape(-1)
    variances = np.full(slots.shape, np.nan)
    variances[slots >= 0] = slot_variance[slots[slots >= 0]]
    finite = variances[np.isfinite(variances) & (variances > 0)]
    fill = finite.min() if finite.size else 1.0
    variances[~(np.isfinite(variances) & (variances > 0))] = fill
    return variances


def reconstruct_with_covariance(
        system: ImmersedSystem,
        z: np.ndarray,
        P: np.ndarray,
        exclude_ratio: float = OBSERVER_CONFIG['recon_exclude_ratio']
) -> ReconstructionResult:
    """
    P'den türetilen Σ = diag(varyans) ile geri kazanım

    Varyansı en küçük varyansın exclude_ratio katını aşan sütunlar (ör. menzil
    ölçeği gözlenemeyen yön zincirleri) dışarıda bırakılır. Kalan sütunlarla
    D̲D̲ᵀ tekilleşir ya da optimum tek değilse bütün sütunlar ağırlıklı kullanılır.

    Args:
        system: İndirgenmiş daldırılmış sistem
        z: ẑ
        P: Gözlemci kovaryansı
        exclude_ratio: Dışlama eşiği (varyans oranı)

    Returns:
        ReconstructionResult: Geri kazanım sonucu
    """
    variances = column_variances(system, P)
    Sigma = np.diag(variances)
    keep = variances <= exclude_ratio * variances.min()
    if not keep.all():
        try:
            result = reconstruct_from_state(system, z, Sigma, columns=keep)
            if result.unique:
                return result
        except RankConditionError:
            pass
    return reconstruct_from_state(system, z, Sigma)


def rank_condition(table: DirectionTable) -> Dict[str, object]:
    """
    rank(D) ≥ d+n+m koşulu

    Returns:
        dict: ges_eligible, sigma_min (σ_N), rank
    """
    N = table.D.shape[0]
    sigma = table.singular_values
    sigma_min = float(sigma[N - 1]) if sigma.size >= N else 0.0
    return {
        'ges_eligible': bool(table.rank >= N),
        'sigma_min': sigma_min,
        'rank': int(table.rank),
    }


def error_bound_constants(table: DirectionTable) -> Dict[str, float]:
    """
    d(χ̂, χ) ≤ c·‖Ẑ − Z‖ sabitleri: 2/√λ_min(DDᵀ) ve 2/√σ_min(D)
    """
    D = table.D
    lambda_min = float(np.linalg.eigvalsh(D @ D.T)[0])
    sigma_min = rank_condition(table)['sigma_min']
    return {
        'lambda_min_DDt': lambda_min,
        'bound_lambda': 2.0 / np.sqrt(lambda_min) if lambda_min > 0 else float('inf'),
        'bound_sigma': 2.0 / np.sqrt(sigma_min) if sigma_min > 0 else float('inf'),
    }


def error_metric(estimate: GroupElement, truth: GroupElement, case: int) -> float:
    """
    Case 1: ‖χ⁻¹ − χ̂⁻¹‖_F, Case 2: ‖χ − χ̂‖_F
    """
    if estimate.dims != truth.dims:
        raise InvalidArgumentError(f"Boyut uyuşmazlığı: {estimate.dims} ≠ {truth.dims}")
    if case == CASE_1:
        return float(np.linalg.norm(inverse(truth).matrix() - inverse(estimate).matrix()))
    return float(np.linalg.norm(truth.matrix() - estimate.matrix()))


def state_errors(estimate: GroupElement, truth: GroupElement) -> Dict[str, object]:
    """
    Rotasyon açı hatası (derece) ve W sütun hataları
    """
    return {
        'rot_deg': rotation_angle_deg(truth.R.T @ estimate.R),
        'W_cols': np.linalg.norm(estimate.W - truth.W, axis=0),
    }
