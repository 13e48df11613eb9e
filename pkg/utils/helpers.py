"""
Yardımcı fonksiyonlar
"""
import os
import tempfile
from pathlib import Path
from typing import Callable, Dict, List, Sequence, Union

import numpy as np

from config.settings import OUTPUT_CONFIG


def format_float(value: float, digits: int = OUTPUT_CONFIG['float_digits']) -> str:
    """
    Bit-sadık çıktı için float formatı (varsayılan 17 anlamlı basamak)
    """
    return f"{float(value):.{digits}g}"


def safe_divide(numerator: float, denominator: float, default: float = 0.0) -> float:
    """
    Güvenli bölme (sıfıra bölme kontrolü)
    """
    if denominator == 0:
        return default
    return numerator / denominator


def rotation_angle_deg(R: np.ndarray) -> float:
    """
    Rotasyon matrisinin jeodezik açısı (derece)

    Args:
        R: d×d rotasyon matrisi (d ∈ {2, 3})

    Returns:
        float: [0, 180] aralığında açı
    """
    R = np.asarray(R, dtype=float)
    if R.shape == (2, 2):
        return float(np.degrees(abs(np.arctan2(R[1, 0], R[0, 0]))))
    cos_angle = np.clip((np.trace(R) - 1.0) / 2.0, -1.0, 1.0)
    return float(np.degrees(np.arccos(cos_angle)))


def fit_log_slope(
        t: Sequence[float],
        errors: Sequence[float],
        t_start: float = 0.0,
        t_end: float = np.inf,
        floor: float = 1e-300
) -> float:
    """
    log(hata) için en küçük kareler eğimi

    Args:
        t: Zaman dizisi
        errors: Pozitif hata dizisi
        t_start: Pencere başlangıcı
        t_end: Pencere sonu
        floor: log(0) koruması

    Returns:
        float: Eğim (1/s); yeterli nokta yoksa nan
    """
    t = np.asarray(t, dtype=float)
    errors = np.asarray(errors, dtype=float)
    mask = (t >= t_start) & (t <= t_end) & np.isfinite(errors)
    if mask.sum() < 2:
        return float('nan')

    slope, _ = np.polyfit(t[mask], np.log(np.maximum(errors[mask], floor)), 1)
    return float(slope)


def atomic_write(path: Union[str, Path], writer: Callable[[Path], None]) -> Path:
    """
    Geçici dosyaya yaz, başarıda yeniden adlandır (yarım dosya bırakmaz)

    Args:
        path: Hedef dosya yolu
        writer: Geçici yolu alıp içeriği yazan fonksiyon

    Returns:
        Path: Hedef dosya yolu
    """
    return atomic_write_many({Path(path): writer})[0]


def atomic_write_many(writers: Dict[Path, Callable[[Path], None]]) -> List[Path]:
    """
    Birden çok dosyayı birlikte yaz: önce hepsi geçici dosyalara, sonra yeniden adlandırma

    Yazımlardan biri başarısız olursa hiçbir hedef dosya oluşturulmaz.

    Args:
        writers: Hedef yol → geçici yolu alıp içeriği yazan fonksiyon

    Returns:
        list: Hedef dosya yolları
    """
    staged = []
    try:
        for path, writer in writers.items():
            path = Path(path)
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
            os.close(fd)
            staged.append((Path(tmp_name), path))
            writer(Path(tmp_name))
    except BaseException:
        for tmp_path, _ in staged:
            tmp_path.unlink(missing_ok=True)
        raise

    for tmp_path, path in staged:
        os.replace(tmp_path, path)
    return [path for _, path in staged]
