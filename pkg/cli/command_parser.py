"""
Komut satırı argümanlarını parse etme
"""
import argparse
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

from config.settings import OUTPUT_CONFIG, SWEEP_CONFIG
from utils.logger import logger

SUBCOMMANDS = ('run', 'sweep', 'gramian', 'check-rank')


@dataclass(frozen=True)
class CliInvocation:
    """
    Attributes:
        subcommand: run, sweep, gramian veya check-rank
        config: Senaryo JSON dosyası
        out: Çıktı dizini
        seed: Tohum (None ise konfigürasyondaki)
        decimate: Seyreltme (None ise konfigürasyondaki)
        quiet: Konsolda yalnızca uyarı ve hatalar
        seeds: Taramadaki tohum sayısı
    """
    subcommand: str
    config: Path
    out: Optional[Path]
    seed: Optional[int] = None
    decimate: Optional[int] = None
    quiet: bool = False
    seeds: int = SWEEP_CONFIG['seeds']


class CommandParser:
    """
    `python main.py <alt komut> ...` argümanlarını parse eder
    """

    def __init__(self):
        """
        CommandParser başlatıcı
        """
        self.parser = self._build_parser()
        logger.debug("CommandParser başlatıldı")

    @staticmethod
    def _build_parser() -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(
            prog='main.py',
            description='Daldırma tabanlı Lie grubu gözlemci simülatörü',
        )
        subparsers = parser.add_subparsers(dest='subcommand', required=True)

        common = argparse.ArgumentParser(add_help=False)
        common.add_argument('--config', type=Path, required=True, help='Senaryo JSON dosyası')
        common.add_argument('--out', type=Path, default=None,
                            help=f"Çıktı dizini (varsayılan: {OUTPUT_CONFIG['results_dir']})")
        common.add_argument('--seed', type=int, default=None, help='RNG tohumu (konfigürasyonu ezer)')
        common.add_argument('--decimate', type=int, default=None, help='Kaç adımda bir log satırı')
        common.add_argument('--quiet', action='store_true', help='Konsolda yalnızca uyarılar')

        subparsers.add_parser('run', parents=[common], help='Tek koşu: trajectory.csv + summary.json')
        sweep = subparsers.add_parser('sweep', parents=[common], help='Tohum taraması (paralel)')
        sweep.add_argument('--seeds', type=int, default=SWEEP_CONFIG['seeds'], help='Tohum sayısı')
        subparsers.add_parser('gramian', parents=[common], help='Gramian λ_min zaman serisi')
        subparsers.add_parser('check-rank', parents=[common], help='Rank koşulu ve hata sınırı sabitleri')
        return parser

    def parse(self, argv: Optional[List[str]] = None) -> CliInvocation:
        """
        Argümanları parse et

        Args:
            argv: Argüman listesi (None ise sys.argv)

        Returns:
            CliInvocation: Parse edilmiş çağrı

        Raises:
            SystemExit: Kullanım hatası veya --help
        """
        args = self.parser.parse_args(argv)
        if getattr(args, 'seeds', 1) < 1:
            self.parser.error(f"--seeds ≥ 1 olmalı, gelen {args.seeds}")
        if args.decimate is not None and args.decimate < 1:
            self.parser.error(f"--decimate ≥ 1 olmalı, gelen {args.decimate}")

        invocation = CliInvocation(
            subcommand=args.subcommand,
            config=args.config,
            out=args.out,
            seed=args.seed,
            decimate=args.decimate,
            quiet=args.quiet,
            seeds=getattr(args, 'seeds', SWEEP_CONFIG['seeds']),
        )
        logger.debug(f"Komut parse edildi: {invocation}")
        return invocation
