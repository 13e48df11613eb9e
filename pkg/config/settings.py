"""
Genel sistem ayarları ve sabitler
"""
import os
from pathlib import Path
from dotenv import load_dotenv

# .env dosyasını yükle
load_dotenv()

# Proje kök dizini
BASE_DIR = Path(__file__).resolve().parent.parent

# Sayısal toleranslar (tek ayar noktası)
TOLERANCE_CONFIG = {
    'ortho_tol': 1e-9,  # RᵀR = I ve det(R) = 1 kontrolü
    'exact_tol': 1e-12,
    'rank_rel_tol': 1e-8,  # σ_k ≥ 1e-8·σ_1
    'cayley_rel_tol': 1e-8,
    'bearing_min_norm': 1e-6,
    'reduction_tol': 1e-12,  # ortak durum birleştirme
    'cond_max': 1e12,  # D̲D̲ᵀ koşul sayısı üst sınırı
}

# Riccati ayarları
RICCATI_CONFIG = {
    'p_floor': 1e-12,  # P özdeğer tabanı
    'default_lambda': 0.1,  # unutma faktörü (modifiye denklem)
    'modified_q': os.getenv('OBS_MODIFIED_Q', 'false').lower() == 'true',
}

# Gözlemci ayarları
OBSERVER_CONFIG = {
    'q': 1.0,  # süreç ağırlığı ölçeği
    'r': 0.01,  # kanal başına minimum ölçüm varyansı
    'p0': 1.0,
    'bias_q': 0.0,
    'recon_exclude_ratio': 1e6,  # geri kazanımda dışlanan sütun varyans oranı
}

# Gramian izleme ayarları
GRAMIAN_CONFIG = {
    'enabled': True,
    'window': 1.0,  # saniye
    'every': 10,  # kaç adımda bir yenilenir
    'max_samples': 200,  # pencere başına örnek üst sınırı
}

# Senaryo varsayılanları
SCENARIO_DEFAULTS = {
    'step': 0.001,  # saniye
    'duration': 30.0,  # saniye
    'earth_rate': [0.0, 0.0, 7.292e-5],  # rad/s
    'gravity': [0.0, 0.0, -9.81],  # m/s²
    'decimate': 1,
    'schema_version': 1,
}

# Toplu (sweep) çalıştırma ayarları
SWEEP_CONFIG = {
    'seeds': 8,
    'max_workers': int(os.getenv('OBS_NUM_THREADS', os.cpu_count() or 1)),
}

# Çıktı ayarları
OUTPUT_CONFIG = {
    'results_dir': Path(os.getenv('OBS_RESULTS_DIR', BASE_DIR / 'results')),
    'trajectory_file': 'trajectory.csv',
    'summary_file': 'summary.json',
    'gramian_file': 'gramian.csv',
    'rank_file': 'rank.json',
    'sweep_summary_file': 'sweep_summary.json',
    'float_digits': 17,
}

# Log ayarları
LOG_CONFIG = {
    'level': os.getenv('LOG_LEVEL', 'INFO'),
    'format': '%(asctime)s - %(name)s - [%(process)d] - %(levelname)s - %(message)s',
    'file': BASE_DIR / 'app.log',
}
