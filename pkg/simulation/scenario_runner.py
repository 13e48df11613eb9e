"""
Uçtan uca senaryo koşucusu: gerçek yörünge → ölçüm → gözlemci → geri kazanım → log
"""
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from analysis.groups import AlgebraElement, GroupElement
from analysis.immersion import KIND_BEARING, KIND_RANGE, ImmersedSystem
from analysis.riccati import GramianMonitor
from config.scenario_config import SCENARIO_SLAM_MOT, ScenarioConfig
from estimation.observer import ImmersedObserver, ObserverState, make_gain_config
from estimation.reconstruct import (
    error_bound_constants,
    error_metric,
    rank_condition,
    reconstruct_from_state,
    reconstruct_with_covariance,
    state_errors,
)
from simulation.measurement_generator import synthesize_measurements
from simulation.scenarios import (
    VELOCITY_COLUMN,
    SinusoidalInput,
    bias_element,
    build_system_spec,
    far_initialization,
    initial_truth,
    propagate_truth,
    slam_landmarks_independent,
)
from utils.exceptions import NumericalError, RankConditionError
from utils.logger import log_function_call, logger


def trajectory_columns(k: int) -> List[str]:
    """Sabit CSV başlığı; W sütun sayısı k = n+m"""
    return (
        ['t', 'err_metric', 'err_rot_deg']
        + [f'err_W_col{c}' for c in range(k)]
        + ['err_z', 'err_bw', 'err_brho', 'gram_obs_min', 'gram_det_min', 'recon_residual']
    )


@dataclass(eq=False)
class TrajectoryLog:
    """
    Bir koşunun logu

    Attributes:
        frame: trajectory_columns sırasıyla satırlar (adım başına, seyreltmeli)
        scenario: Senaryo adı
        seed: RNG tohumu
        steps: Entegrasyon adım sayısı
        rank: rank_condition çıktısı
        bound: error_bound_constants çıktısı
        ges_eligible: Rank, landmark bağımsızlığı ve yön/menzil koşulları (ges_eligibility)
        p_eig_min, p_eig_max: Loglanan adımlarda P özdeğer bandı
        final_state: Son gözlemci durumu
        final_truth: Son gerçek durum
        true_bias: Gerçek yanlılık vektörü (b_ω, vec b_ρ)
    """
    frame: pd.DataFrame
    scenario: str
    seed: int
    steps: int
    rank: Dict[str, object]
    bound: Dict[str, float]
    ges_eligible: bool
    p_eig_min: float
    p_eig_max: float
    final_state: Optional[ObserverState] = None
    final_truth: Optional[GroupElement] = None
    true_bias: Optional[np.ndarray] = None

    @property
    def final(self) -> Dict[str, float]:
        """Son satırın hata metrikleri"""
        row = self.frame.iloc[-1]
        return {column: float(row[column]) for column in self.frame.columns}


def ges_eligibility(
        system: ImmersedSystem,
        config: ScenarioConfig,
        rank: Dict[str, object]
) -> Tuple[bool, List[str]]:
    """
    GES uygunluğu ve bayrağı düşüren nedenler

    rank(D) ≥ N ve SLAM'de bilinen landmark'ların doğrusal bağımsızlığı gerekir.
    Yön ve menzil zincirlerinin gözlenebilirliği rank(D) ile garanti edilmez; bu
    ölçümlerden biri varsa bayrak düşer.

    Args:
        system: İndirgenmiş daldırılmış sistem
        config: Senaryo konfigürasyonu
        rank: rank_condition çıktısı

    Returns:
        tuple: (uygun mu, neden listesi)
    """
    spec = system.spec
    reasons = []
    if not rank['ges_eligible']:
        reasons.append(f"rank(D) = {rank['rank']} < N = {spec.N}")
    if config.scenario == SCENARIO_SLAM_MOT and not slam_landmarks_independent(config.params.landmarks):
        reasons.append("landmark'lar doğrusal bağımlı")
    nonlinear = len(spec.indices_of(KIND_BEARING)) + len(spec.indices_of(KIND_RANGE))
    if nonlinear:
        reasons.append(f"{nonlinear} yön/menzil ölçümünün gözlenebilirliği garanti değil")
    return not reasons, reasons


class ScenarioRunner:
    """
    Senaryo simülasyon motoru
    """

    def __init__(self, config: ScenarioConfig):
        """
        ScenarioRunner başlatıcı

        Args:
            config: Doğrulanmış senaryo konfigürasyonu
        """
        self.config = config
        self.spec = build_system_spec(config)
        self.system = ImmersedSystem(self.spec, shared_states=config.observer.shared_states)
        self.bias_mode = config.bias.enabled

        obs = config.observer
        gain = make_gain_config(
            self.system,
            bias_mode=self.bias_mode,
            q=obs.q,
            r=obs.r,
            lam=obs.lam,
            p0=obs.p0,
            modified_q=obs.modified_q,
            bias_q=obs.bias_q,
        )
        self.observer = ImmersedObserver(self.system, gain, bias_mode=self.bias_mode)
        self.inputs = SinusoidalInput(config.input, config.params.gravity, self.spec.k)
        self.Sigma = None if obs.sigma is None else np.diag(np.asarray(obs.sigma, dtype=float))

        self.rank = rank_condition(self.system.table)
        self.bound = error_bound_constants(self.system.table)
        self.ges_eligible, reasons = ges_eligibility(self.system, config, self.rank)
        if not self.ges_eligible:
            logger.warning(
                f"⚠️⚠️ GES koşulu sağlanmıyor: {'; '.join(reasons)}. Koşu devam ediyor, yakınsama garantisi yok."
            )

        self._recon_warned = False

        logger.info(
            f"ScenarioRunner başlatıldı: {config.scenario}, h={config.step}, T={config.duration}, "
            f"tohum={config.seed}, yanlılık={'açık' if self.bias_mode else 'kapalı'}"
        )

    def _initial_estimates(self, T: GroupElement, rng: np.random.Generator):
        init = self.config.init
        if init.rotation_deg > 0 or init.w_offset > 0:
            T_hat = far_initialization(T, init.rotation_deg, init.w_offset, rng)
        else:
            T_hat = T

        b_hat = None
        if self.bias_mode:
            rho = np.zeros((self.spec.d, self.spec.k))
            rho[:, VELOCITY_COLUMN] = init.bias_accel
            b_hat = AlgebraElement(init.bias_omega, rho).to_vector()
        return T_hat, b_hat

    def _record(
            self,
            t: float,
            state: ObserverState,
            T: GroupElement,
            b_true: AlgebraElement,
            gram: tuple
    ) -> List[float]:
        spec = self.spec
        k = spec.k
        try:
            if self.Sigma is None:
                result = reconstruct_with_covariance(self.system, state.z, state.riccati.P)
            else:
                result = reconstruct_from_state(self.system, state.z, self.Sigma)
            err = error_metric(result.estimate, T, spec.case)
            errors = state_errors(result.estimate, T)
            rot_deg, W_cols, residual = errors['rot_deg'], list(errors['W_cols']), result.residual
        except RankConditionError as e:
            if not self._recon_warned:
                logger.warning(f"⚠️ Geri kazanım yapılamıyor: {e}")
                self._recon_warned = True
            err, rot_deg, W_cols, residual = np.nan, np.nan, [np.nan] * k, np.nan

        err_z = float(np.linalg.norm(state.z - self.system.immerse(T)))
        if self.bias_mode:
            b_hat = AlgebraElement.from_vector(state.b, spec.d, k)
            err_bw = float(np.linalg.norm(b_hat.omega - b_true.omega))
            err_brho = float(np.linalg.norm(b_hat.rho - b_true.rho))
        else:
            err_bw = err_brho = np.nan

        return [t, err, rot_deg] + W_cols + [err_z, err_bw, err_brho, gram[0], gram[1], residual]

    def run(self) -> TrajectoryLog:
        """
        Koşuyu çalıştır

        Returns:
            TrajectoryLog: Loglanan satırlar ve özet bilgiler

        Raises:
            NumericalError: Gözlemci durumu sonlu değilse (adım indeksiyle)
        """
        config, spec = self.config, self.spec
        h = config.step
        steps = config.steps
        rng = np.random.default_rng(config.seed)

        T = initial_truth(config)
        T_hat, b_hat = self._initial_estimates(T, rng)
        b_true = bias_element(config.bias, spec.d, spec.k)
        state = self.observer.initial_state(T_hat, b_hat, t=0.0)

        monitor = None
        if config.gramian.enabled:
            monitor = GramianMonitor(h, config.gramian.window, config.gramian.every, config.gramian.max_samples)
        gram = (np.nan, np.nan)

        eigenvalues = np.linalg.eigvalsh(state.riccati.P)
        p_min, p_max = float(eigenvalues[0]), float(eigenvalues[-1])

        noise = config.noise
        rows = [self._record(0.0, state, T, b_true, gram)]
        logger.info(f"Simülasyon başlıyor: {steps} adım")

        for step in range(1, steps + 1):
            t = (step - 1) * h
            u_true = self.inputs.true_input(t, T.R)
            u_measured = SinusoidalInput.measured_input(u_true, b_true, rng, noise.gyro, noise.accel)

            T = propagate_truth(T, u_true, spec.generator, spec.case, h, t)
            batch = synthesize_measurements(T, spec, rng)
            try:
                state = self.observer.step(state, u_measured, batch, h)
            except NumericalError as e:
                raise NumericalError(f"{e}, t = {step * h:.6g}", step=step) from e

            if monitor is not None:
                gram = monitor.push(*self.observer.last_linearization)

            if step % config.decimate == 0:
                eigenvalues = np.linalg.eigvalsh(state.riccati.P)
                p_min, p_max = min(p_min, float(eigenvalues[0])), max(p_max, float(eigenvalues[-1]))
                rows.append(self._record(step * h, state, T, b_true, gram))

            if step % max(steps // 10, 1) == 0:
                logger.debug(f"Adım {step}/{steps}: hata={rows[-1][1]:.3e}")

        frame = pd.DataFrame(rows, columns=trajectory_columns(spec.k))
        log = TrajectoryLog(
            frame=frame,
            scenario=config.scenario,
            seed=config.seed,
            steps=steps,
            rank=self.rank,
            bound=self.bound,
            ges_eligible=self.ges_eligible,
            p_eig_min=p_min,
            p_eig_max=p_max,
            final_state=state,
            final_truth=T,
            true_bias=b_true.to_vector(),
        )
        logger.info(
            f"Simülasyon tamamlandı: {len(frame)} satır, son hata={frame['err_metric'].iloc[-1]:.3e}, "
            f"P bandı=[{p_min:.3e}, {p_max:.3e}]"
        )
        return log


@log_function_call
def run_scenario(config: ScenarioConfig) -> TrajectoryLog:
    """
    Konfigürasyonu uçtan uca çalıştır (aynı tohum aynı log)
    """
    return ScenarioRunner(config).run()
