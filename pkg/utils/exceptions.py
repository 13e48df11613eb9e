"""
Kütüphane hata sınıfları
"""
from typing import List, Optional


class ObserverError(Exception):
    """Tüm kütüphane hatalarının tabanı"""


class InvalidArgumentError(ObserverError, ValueError):
    """Boyut uyuşmazlığı veya geçersiz girdi"""


class ConfigurationError(ObserverError):
    """Okunamayan/ayrıştırılamayan konfigürasyon ya da tekil ağırlık matrisi"""


class ConfigValidationError(ConfigurationError):
    """
    Sınır ihlalleri

    Attributes:
        violations: İhlal edilen alanların açıklamaları
    """

    def __init__(self, violations: List[str]):
        self.violations = list(violations)
        super().__init__("Geçersiz konfigürasyon: " + "; ".join(self.violations))


class DegenerateInputError(ObserverError, ValueError):
    """Projeksiyon için tekil rotasyon bloğu"""


class RankConditionError(ObserverError):
    """D̲D̲ᵀ tekil veya kötü koşullu"""


class NumericalError(ObserverError):
    """SVD başarısızlığı veya sonlu olmayan durum"""

    def __init__(self, message: str, step: Optional[int] = None):
        self.step = step
        if step is not None:
            message = f"{message} (adım {step})"
        super().__init__(message)


class InternalConsistencyError(ObserverError):
    """Eşlenik sonucu TFG dışına çıktı"""
