"""
nanostripe command-line entry point

    python main.py fieldmap --config demo/configs/permalloy_q_band.json --out results
    python main.py design-check --preset dysprosium

Exit codes: 0 success, 2 design check failed, 1 error.
"""
import argparse
import sys
from typing import Optional, Sequence

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

from config import settings
from errors import ConfigError, NanostripeError
from logging_config import get_logger, setup_logging
from schemas import RunConfig
from services.reproduction_service import ReproductionService
from spinwave import BoundaryCondition
from units import MATERIAL_PRESETS

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DESIGN_FAILED = 2


def create_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration (default: built-in Q-band permalloy device)")
    common.add_argument("--out", help=f"Output directory (default: {settings.output_dir})")
    common.add_argument("--preset", choices=sorted(MATERIAL_PRESETS), help="Material preset override")
    common.add_argument("--bc", choices=[bc.value for bc in BoundaryCondition],
                        help="Spin-wave boundary condition at the stripe faces")
    common.add_argument("--verbose", "-v", action="store_true", help="Enable verbose logging")

    parser = argparse.ArgumentParser(
        prog="nanostripe",
        description="Stray field, spin-wave spectrum and qubit register design for a magnetized nanostripe",
    )
    subparsers = parser.add_subparsers(dest="command", help="Commands")
    subparsers.add_parser("fieldmap", parents=[common],
                          help="Stray-field maps, x profiles, C(x) and x_optim")
    subparsers.add_parser("modes", parents=[common],
                          help="Spin-wave potential, eigenvalues and mode profiles")
    subparsers.add_parser("spectrum", parents=[common],
                          help="Field-sweep absorption spectrum and line list")
    subparsers.add_parser("design-check", parents=[common],
                          help="Spectral overlap, Ising ratios and addressable counts")
    subparsers.add_parser("decoherence", parents=[common],
                          help="T1 and T2 over qubit position and temperature")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    config = RunConfig.from_file(args.config) if args.config else RunConfig()
    return config.with_overrides(preset=args.preset, bc=args.bc, output_dir=args.out)


def run_command(command: str, config: RunConfig) -> int:
    if command == "design-check":
        _, passed = ReproductionService.cmd_design_check(config)
        return EXIT_OK if passed else EXIT_DESIGN_FAILED
    command_map = {
        "fieldmap": ReproductionService.cmd_fieldmap,
        "modes": ReproductionService.cmd_modes,
        "spectrum": ReproductionService.cmd_spectrum,
        "decoherence": ReproductionService.cmd_decoherence,
    }
    written = command_map[command](config)
    for path in written:
        print(path)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main CLI entry point."""
    parser = create_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return EXIT_ERROR

    setup_logging(verbose=args.verbose)

    errors, warnings = settings.validate_run_environment()
    for warning in warnings:
        logger.warning(f"Settings warning: {warning}")
    if errors:
        for error in errors:
            logger.error(f"Settings error: {error}")
        return EXIT_ERROR

    try:
        config = load_config(args)
        return run_command(args.command, config)
    except ConfigError as e:
        logger.error(str(e))
        return EXIT_ERROR
    except NanostripeError as e:
        logger.error(f"{args.command} failed: {e}", exc_info=settings.debug or args.verbose)
        return EXIT_ERROR
    except OSError as e:
        logger.error(f"{args.command} failed with I/O error: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
