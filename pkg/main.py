"""
Ana uygulama entry point
"""
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional

from analysis.immersion import ImmersedSystem
from cli.command_parser import CliInvocation, CommandParser
from config.scenario_config import (
    ScenarioConfig,
    config_from_dict,
    parse_config,
    serialize_config,
    with_overrides,
)
from config.settings import LOG_CONFIG, OUTPUT_CONFIG, SWEEP_CONFIG
from estimation.reconstruct import error_bound_constants, rank_condition
from output.export_manager import ExportManager, to_builtin
from output.report_generator import ReportGenerator
from simulation.scenario_runner import ges_eligibility, run_scenario
from simulation.scenarios import build_system_spec
from utils.exceptions import (
    ConfigurationError,
    DegenerateInputError,
    InternalConsistencyError,
    InvalidArgumentError,
    NumericalError,
    RankConditionError,
)
from utils.logger import logger, set_console_level

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_NUMERICAL_ERROR = 2


def _sweep_worker(config_tree: Dict, out_dir: str) -> Dict:
    """Tek tohum koşusu (ayrı süreçte); dosyalar seed_<s>/ altına yazılır"""
    config = config_from_dict(config_tree)
    log = run_scenario(config)

    exporter = ExportManager(Path(out_dir) / f"seed_{config.seed}")
    summary = ReportGenerator().build_summary(log, config)
    exporter.export_run(log.frame, OUTPUT_CONFIG['trajectory_file'], summary, OUTPUT_CONFIG['summary_file'])
    return to_builtin(summary)


class ObserverSimulationApp:
    """
    Ana uygulama sınıfı
    """

    def __init__(self, invocation: CliInvocation):
        """
        Uygulama başlatıcı

        Args:
            invocation: Parse edilmiş komut satırı çağrısı
        """
        self.invocation = invocation
        self.out_dir = invocation.out if invocation.out is not None else OUTPUT_CONFIG['results_dir']
        self.report_gen = ReportGenerator()

        logger.info(f"🚀 ObserverSimulationApp başlatıldı: {invocation.subcommand}")

    def load_config(self) -> ScenarioConfig:
        config = parse_config(self.invocation.config)
        return with_overrides(config, seed=self.invocation.seed, decimate=self.invocation.decimate)

    def run(self) -> int:
        """
        Tek koşu: trajectory.csv + summary.json
        """
        config = self.load_config()
        log = run_scenario(config)

        exporter = ExportManager(self.out_dir)
        summary = self.report_gen.build_summary(log, config)
        exporter.export_run(log.frame, OUTPUT_CONFIG['trajectory_file'], summary, OUTPUT_CONFIG['summary_file'])

        print("\n" + self.report_gen.format_console_report(summary))
        return EXIT_OK

    def sweep(self) -> int:
        """
        Tohum taraması: S..S+n−1 paralel süreçlerde
        """
        config = self.load_config()
        seeds = [config.seed + offset for offset in range(self.invocation.seeds)]
        trees = [serialize_config(with_overrides(config, seed=seed)) for seed in seeds]
        max_workers = max(1, min(SWEEP_CONFIG['max_workers'], len(seeds)))

        logger.info(f"Tarama başlıyor: {len(seeds)} tohum, {max_workers} süreç")
        with ProcessPoolExecutor(max_workers=max_workers) as executor:
            futures = [executor.submit(_sweep_worker, tree, str(self.out_dir)) for tree in trees]
            summaries: List[Dict] = [future.result() for future in futures]

        sweep_summary = self.report_gen.build_sweep_summary(summaries, config)
        ExportManager(self.out_dir).export_to_json(sweep_summary, OUTPUT_CONFIG['sweep_summary_file'])

        print(
            f"\n📊 Tarama: {sweep_summary['runs']} koşu, eğim ortalaması "
            f"{sweep_summary['slope_mean']:.4f} 1/s, yakınsayan {sweep_summary['converged_runs']}"
        )
        return EXIT_OK

    def gramian(self) -> int:
        """
        Gramian λ_min zaman serisi: gramian.csv + summary.json
        """
        config = self.load_config()
        if not config.gramian.enabled:
            tree = serialize_config(config)
            tree['gramian']['enabled'] = True
            config = config_from_dict(tree)
        log = run_scenario(config)

        exporter = ExportManager(self.out_dir)
        summary = self.report_gen.build_summary(log, config)
        exporter.export_run(
            log.frame[['t', 'gram_obs_min', 'gram_det_min']], OUTPUT_CONFIG['gramian_file'],
            summary, OUTPUT_CONFIG['summary_file'],
        )

        print(f"\n📊 Gramian: min λ(𝒪) = {summary['gram_obs_min']:.3e}, min λ(𝒟) = {summary['gram_det_min']:.3e}")
        return EXIT_OK

    def check_rank(self) -> int:
        """
        Simülasyonsuz rank koşulu ve hata sınırı sabitleri
        """
        config = self.load_config()
        system = ImmersedSystem(build_system_spec(config), shared_states=config.observer.shared_states)
        rank = rank_condition(system.table)
        eligible, reasons = ges_eligibility(system, config, rank)
        report = self.report_gen.build_rank_report(
            rank, error_bound_constants(system.table), config.scenario, ges_eligible=eligible
        )
        if not eligible:
            logger.warning(f"⚠️ GES koşulu sağlanmıyor: {'; '.join(reasons)}")

        if self.invocation.out is not None:
            ExportManager(self.out_dir).export_to_json(report, OUTPUT_CONFIG['rank_file'])

        print(
            f"\nrank(D) = {report['rank']}, σ_min = {report['sigma_min']:.6e}, "
            f"GES: {'✅' if report['ges_eligible'] else '❌'}, "
            f"2/√λ_min(DDᵀ) = {report['bound_lambda']:.6e}"
        )
        return EXIT_OK

    def execute(self) -> int:
        handlers = {
            'run': self.run,
            'sweep': self.sweep,
            'gramian': self.gramian,
            'check-rank': self.check_rank,
        }
        return handlers[self.invocation.subcommand]()


def main(argv: Optional[List[str]] = None) -> int:
    """
    Ana fonksiyon

    Returns:
        int: 0 başarı, 1 konfigürasyon hatası, 2 sayısal hata
    """
    try:
        invocation = CommandParser().parse(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG_ERROR

    if invocation.quiet:
        set_console_level(logging.WARNING)

    try:
        return ObserverSimulationApp(invocation).execute()
    except (ConfigurationError, InvalidArgumentError) as e:
        logger.error(f"❌ Konfigürasyon hatası: {e}")
        return EXIT_CONFIG_ERROR
    except (NumericalError, RankConditionError, DegenerateInputError, InternalConsistencyError) as e:
        logger.error(f"❌ Sayısal hata: {e}")
        return EXIT_NUMERICAL_ERROR
    finally:
        set_console_level(LOG_CONFIG['level'])


if __name__ == "__main__":
    sys.exit(main())
