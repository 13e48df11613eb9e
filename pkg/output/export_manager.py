"""
Çıktı export yöneticisi (JSON, CSV)
"""
import json
import math
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Union

import numpy as np
import pandas as pd

from config.settings import OUTPUT_CONFIG
from utils.helpers import atomic_write, atomic_write_many, format_float
from utils.logger import logger


def to_builtin(value: Any) -> Any:
    """
    numpy tiplerini JSON uyumlu Python tiplerine çevir; sonlu olmayan float → None
    """
    if isinstance(value, dict):
        return {str(k): to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_builtin(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, Path):
        return str(value)
    return value


class ExportManager:
    """
    Koşu çıktılarını yazar; her dosya geçici dosyaya yazılıp yeniden adlandırılır
    """

    def __init__(self, out_dir: Optional[Union[str, Path]] = None):
        """
        ExportManager başlatıcı

        Args:
            out_dir: Çıktı dizini (None ise OUTPUT_CONFIG['results_dir'])
        """
        self.out_dir = Path(out_dir) if out_dir is not None else OUTPUT_CONFIG['results_dir']
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.float_format = format_float

        logger.info(f"ExportManager başlatıldı: {self.out_dir}")

    def _json_writer(self, data: Dict) -> Callable[[Path], None]:
        payload = json.dumps(to_builtin(data), indent=2, ensure_ascii=False, allow_nan=False)
        return lambda tmp: tmp.write_text(payload + "\n", encoding='utf-8')

    def _csv_writer(self, df: pd.DataFrame) -> Callable[[Path], None]:
        return lambda tmp: df.to_csv(tmp, index=False, float_format=self.float_format, na_rep='nan')

    def export_to_json(self, data: Dict, filename: str) -> str:
        """
        JSON olarak export et

        Args:
            data: Export edilecek veri
            filename: Dosya adı (out_dir'e göre)

        Returns:
            str: Dosya yolu
        """
        filepath = self.out_dir / filename
        atomic_write(filepath, self._json_writer(data))

        logger.info(f"JSON export: {filepath}")
        return str(filepath)

    def export_to_csv(self, df: pd.DataFrame, filename: str) -> str:
        """
        CSV olarak export et (17 anlamlı basamak, indeks yok)

        Args:
            df: DataFrame
            filename: Dosya adı (out_dir'e göre)

        Returns:
            str: Dosya yolu
        """
        filepath = self.out_dir / filename
        atomic_write(filepath, self._csv_writer(df))

        logger.info(f"CSV export: {filepath} ({len(df)} satır)")
        return str(filepath)

    def export_run(self, df: pd.DataFrame, csv_name: str, summary: Dict, json_name: str) -> None:
        """
        CSV ve özet JSON'u birlikte yaz: ikisi de oluşur ya da hiçbiri

        Args:
            df: Log tablosu
            csv_name: CSV dosya adı
            summary: Özet sözlüğü
            json_name: JSON dosya adı
        """
        csv_path, json_path = self.out_dir / csv_name, self.out_dir / json_name
        atomic_write_many({
            csv_path: self._csv_writer(df),
            json_path: self._json_writer(summary),
        })

        logger.info(f"Koşu çıktıları: {csv_path} ({len(df)} satır), {json_path}")
