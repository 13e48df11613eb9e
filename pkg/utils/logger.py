"""
Merkezi logging sistemi

Konsol INFO (``--quiet`` ile WARNING), dosya DEBUG seviyesinde yazar. Tarama
süreçleri aynı dosyaya eklediği için kayıtlar süreç kimliği taşır.
"""
import functools
import logging
import sys
import time
from pathlib import Path
from typing import Union

from config.settings import LOG_CONFIG

_CONSOLE_HANDLER_NAME = 'observer-console'


def setup_logger(name: str = 'ImmersionObserver') -> logging.Logger:
    """
    Paylaşılan logger'ı yapılandır (tekrar çağrıda mevcut olanı döndürür)

    Args:
        name: Logger adı

    Returns:
        logging.Logger: Konsol ve dosya handler'lı logger
    """
    logger = logging.getLogger(name)
    if logger.handlers:
        return logger

    logger.setLevel(logging.DEBUG)
    logger.propagate = False
    formatter = logging.Formatter(LOG_CONFIG['format'])

    console_handler = logging.StreamHandler(sys.stdout)
    console_handler.set_name(_CONSOLE_HANDLER_NAME)
    console_handler.setLevel(LOG_CONFIG['level'])
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    log_file = Path(LOG_CONFIG['file'])
    log_file.parent.mkdir(parents=True, exist_ok=True)
    file_handler = logging.FileHandler(log_file, encoding='utf-8')
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(formatter)
    logger.addHandler(file_handler)

    return logger


logger = setup_logger()


def set_console_level(level: Union[int, str]) -> None:
    """
    Yalnızca konsol handler'ının seviyesini değiştir; dosya logu DEBUG'da kalır
    """
    for handler in logger.handlers:
        if handler.get_name() == _CONSOLE_HANDLER_NAME:
            handler.setLevel(level)


def log_function_call(func):
    """
    Orkestrasyon fonksiyonlarının giriş/çıkışını ve süresini DEBUG'da loglar

    Hata loglanmaz, yukarı iletilir (CLI katmanı bir kez loglar).

    Usage:
        @log_function_call
        def run_scenario(config):
            ...
    """

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        logger.debug(f"▶️ {func.__name__} başladı")
        try:
            return func(*args, **kwargs)
        finally:
            logger.debug(f"⏹️ {func.__name__} bitti ({time.perf_counter() - start:.3f} s)")

    return wrapper
