"""
Yakınsama metrikleri
"""
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from utils.helpers import fit_log_slope, safe_divide
from utils.logger import logger


class ConvergenceMetrics:
    """
    Yörünge logu üzerinde yakınsama metrikleri
    """

    def __init__(self, transient_fraction: float = 0.1, converged_threshold: float = 1e-3):
        """
        ConvergenceMetrics başlatıcı

        Args:
            transient_fraction: Eğim uydurmasından atılan başlangıç payı
            converged_threshold: Son hata bu değerin altındaysa yakınsamış sayılır
        """
        self.transient_fraction = transient_fraction
        self.converged_threshold = converged_threshold

        logger.debug("ConvergenceMetrics başlatıldı")

    def calculate_log_slope(
            self,
            frame: pd.DataFrame,
            column: str = 'err_metric',
            t_start: Optional[float] = None,
            t_end: Optional[float] = None
    ) -> float:
        """
        log(hata)'nın zamana göre en küçük kareler eğimi (1/s)
        """
        t = frame['t'].to_numpy()
        if t_start is None:
            t_start = t[0] + self.transient_fraction * (t[-1] - t[0])
        if t_end is None:
            t_end = t[-1]
        return fit_log_slope(t, frame[column].to_numpy(), t_start, t_end)

    def calculate_decay_ratio(self, frame: pd.DataFrame, column: str = 'err_metric') -> float:
        """
        Son hata / ilk hata
        """
        errors = frame[column].to_numpy()
        return float(safe_divide(errors[-1], errors[0], default=float('nan')))

    def is_monotone_after_transient(
            self,
            frame: pd.DataFrame,
            column: str = 'err_metric',
            window: int = 10
    ) -> bool:
        """
        Geçiş sonrası hareketli ortalaması artmayan log-hata
        """
        t = frame['t'].to_numpy()
        start = t[0] + self.transient_fraction * (t[-1] - t[0])
        errors = frame.loc[frame['t'] >= start, column]
        smoothed = np.log(errors.clip(lower=1e-300)).rolling(window, min_periods=1).mean().to_numpy()
        return bool(np.all(np.diff(smoothed) <= 1e-9))

    def get_all_metrics(self, frame: pd.DataFrame) -> Dict[str, float]:
        """
        Tüm metrikleri hesapla
        """
        final_error = float(frame['err_metric'].iloc[-1])
        metrics = {
            'log_slope': self.calculate_log_slope(frame),
            'decay_ratio': self.calculate_decay_ratio(frame),
            'final_error': final_error,
            'converged': bool(final_error < self.converged_threshold),
        }
        logger.info(
            f"Yakınsama metrikleri: eğim={metrics['log_slope']:.4f} 1/s, "
            f"son hata={final_error:.3e}"
        )
        return metrics

    def aggregate_sweep(self, summaries: List[Dict]) -> Dict[str, object]:
        """
        Tohum taraması özet istatistikleri

        Args:
            summaries: Tohum başına özet sözlükleri (seed, log_slope, final)

        Returns:
            dict: Eğim ortalaması/std/min/max, yakınsayan koşu sayısı ve tohum listesi
        """
        frame = pd.DataFrame([
            {
                'seed': s['seed'],
                'log_slope': s['log_slope'],
                'final_error': s['final']['err_metric'],
            }
            for s in summaries
        ]).sort_values('seed')

        slopes = frame['log_slope']
        result = {
            'runs': int(len(frame)),
            'seeds': [int(seed) for seed in frame['seed']],
            'slope_mean': float(slopes.mean()),
            'slope_std': float(slopes.std(ddof=0)),
            'slope_min': float(slopes.min()),
            'slope_max': float(slopes.max()),
            'final_error_max': float(frame['final_error'].max()),
            'converged_runs': int((frame['final_error'] < self.converged_threshold).sum()),
            'per_seed': frame.to_dict(orient='records'),
        }
        logger.info(
            f"Tarama özeti: {result['runs']} koşu, eğim ortalaması={result['slope_mean']:.4f}, "
            f"yakınsayan={result['converged_runs']}"
        )
        return result
