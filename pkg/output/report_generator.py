"""
Özet (summary.json) ve konsol raporu oluşturucu
"""
from typing import Dict, List, Optional

import numpy as np

from config.scenario_config import ScenarioConfig, serialize_config
from simulation.convergence_metrics import ConvergenceMetrics
from simulation.scenario_runner import TrajectoryLog
from utils.logger import logger


class ReportGenerator:
    """
    Koşu ve tarama özetlerini oluşturur
    """

    def __init__(self, metrics: Optional[ConvergenceMetrics] = None):
        """
        ReportGenerator başlatıcı
        """
        self.metrics = metrics or ConvergenceMetrics()
        logger.debug("ReportGenerator başlatıldı")

    @staticmethod
    def _window_min(series) -> float:
        values = series.to_numpy(dtype=float)
        finite = values[np.isfinite(values)]
        return float(finite.min()) if finite.size else float('nan')

    def build_summary(self, log: TrajectoryLog, config: ScenarioConfig) -> Dict[str, object]:
        """
        summary.json içeriği

        Args:
            log: Koşu logu
            config: Koşunun konfigürasyonu

        Returns:
            dict: scenario, seed, steps, final, log_slope, rank, sigma_min, rank_condition, ges_eligible,
                  p_eig_min, p_eig_max, gram_obs_min, gram_det_min, config
        """
        frame = log.frame
        summary = {
            'scenario': log.scenario,
            'seed': log.seed,
            'steps': log.steps,
            'final': log.final,
            'log_slope': self.metrics.calculate_log_slope(frame),
            'rank': log.rank['rank'],
            'sigma_min': log.rank['sigma_min'],
            'rank_condition': log.rank['ges_eligible'],
            'ges_eligible': log.ges_eligible,
            'p_eig_min': log.p_eig_min,
            'p_eig_max': log.p_eig_max,
            'gram_obs_min': self._window_min(frame['gram_obs_min']),
            'gram_det_min': self._window_min(frame['gram_det_min']),
            'config': serialize_config(config),
        }
        return summary

    def build_rank_report(
            self,
            rank: Dict[str, object],
            bound: Dict[str, float],
            scenario: str,
            ges_eligible: Optional[bool] = None
    ) -> Dict[str, object]:
        """check-rank çıktısı; ges_eligible verilmezse yalnızca rank koşulu"""
        return {
            'scenario': scenario,
            'rank': rank['rank'],
            'sigma_min': rank['sigma_min'],
            'rank_condition': rank['ges_eligible'],
            'ges_eligible': rank['ges_eligible'] if ges_eligible is None else ges_eligible,
            'lambda_min_DDt': bound['lambda_min_DDt'],
            'bound_lambda': bound['bound_lambda'],
            'bound_sigma': bound['bound_sigma'],
        }

    def build_sweep_summary(self, summaries: List[Dict], config: ScenarioConfig) -> Dict[str, object]:
        """sweep_summary.json içeriği"""
        result = self.metrics.aggregate_sweep(summaries)
        result['scenario'] = config.scenario
        result['config'] = serialize_config(config)
        return result

    def format_console_report(self, summary: Dict[str, object]) -> str:
        """
        Konsol için kısa rapor
        """
        final = summary['final']
        lines = [
            "=" * 70,
            f"📊 {str(summary['scenario']).upper()} SONUÇLARI (tohum {summary['seed']})",
            "=" * 70,
            f"Adım sayısı: {summary['steps']}",
            f"Son hata metriği: {final['err_metric']:.3e}",
            f"Son rotasyon hatası: {final['err_rot_deg']:.3e}°",
            f"Log-eğim: {summary['log_slope']:.4f} 1/s",
            f"rank(D) = {summary['rank']}, σ_min = {summary['sigma_min']:.3e}, GES: "
            f"{'✅' if summary['ges_eligible'] else '❌'}",
            f"P özdeğer bandı: [{summary['p_eig_min']:.3e}, {summary['p_eig_max']:.3e}]",
            "=" * 70,
        ]
        return "\n".join(lines)
