"""
Command-line entry point for the UPB state toolkit
"""

import argparse
import sys
from typing import Dict, Any, List, Optional

from cli.commands import COMMAND_HANDLERS
from core.errors import UpbStateError
from core.serialization import dumps
from construction.upb import UpbParams
from utils.config_loader import Tolerances, load_run_config
from utils.logger import configure_logging, get_logger

logger = get_logger(__name__)

TOL_PREFIX = "tol_"


def _tolerance_flag(field: str) -> str:
    """rank_rel_tol -> --tol-rank-rel, null_gap_min -> --tol-null-gap-min"""
    name = field[:-len("_tol")] if field.endswith("_tol") else field
    return "--tol-" + name.replace("_", "-")


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="YAML file with run configuration")
    common.add_argument("--out", default=None, help="Output directory (default: $UPB_OUTPUT_DIR or .)")
    common.add_argument("--seed", type=int, default=None, help="Seed for random transforms")
    common.add_argument("--cond-max", type=float, default=None, help="Condition number bound of random transforms")
    common.add_argument("--restarts", type=int, default=None, help="See-saw restarts")
    common.add_argument("--max-iters", type=int, default=None, help="See-saw sweeps per restart")
    common.add_argument("--search-seed", type=int, default=None, help="Seed for see-saw starting points")
    common.add_argument("--log-level", default=None, help="Log level (default: $UPB_LOG_LEVEL or WARNING)")
    common.add_argument("--log-json", action="store_true", help="Emit JSON log lines on stderr")
    tolerances = common.add_argument_group("tolerances")
    for field, info in Tolerances.model_fields.items():
        tolerances.add_argument(_tolerance_flag(field), dest=TOL_PREFIX + field, type=float, default=None,
                                help=f"default {info.default}")
    return common


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per pipeline command"""
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="upb-states",
                                     description="Rank 4 PPT states from orthogonal UPBs in the 3x3 system")
    subparsers = parser.add_subparsers(dest="command", required=True)

    generate = subparsers.add_parser("generate", parents=[common], help="Build the standard-form state")
    generate.add_argument("--params", required=True, help="a,b,c,d")

    transform = subparsers.add_parser("transform", parents=[common], help="Apply a product transform")
    transform.add_argument("inputs", nargs=1, help="state.json")
    transform.add_argument("--transform", default=None, help="transform.json (default: seeded random)")

    classify = subparsers.add_parser("classify", parents=[common], help="Classify states")
    classify.add_argument("inputs", nargs="+", help="state.json files")
    classify.add_argument("--jobs", type=int, default=None, help="Worker processes for batches")

    verify = subparsers.add_parser("verify", parents=[common], help="Certify a state")
    verify.add_argument("inputs", nargs=1, help="state.json")

    orbit = subparsers.add_parser("orbit", parents=[common], help="Print the symmetry orbit of parameters")
    orbit.add_argument("--params", required=True, help="a,b,c,d")

    roundtrip = subparsers.add_parser("roundtrip", parents=[common], help="Generate, transform and classify")
    roundtrip.add_argument("--params", required=True, help="a,b,c,d")

    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    params = getattr(args, "params", None)
    return {
        "command": args.command,
        "seed": args.seed,
        "cond_max": args.cond_max,
        "params": list(UpbParams.parse(params).as_tuple()) if params else None,
        "inputs": getattr(args, "inputs", None),
        "output_dir": args.out,
        "transform_path": getattr(args, "transform", None),
        "jobs": getattr(args, "jobs", None),
        "search": {
            "restarts": args.restarts,
            "max_iters": args.max_iters,
            "seed": args.search_seed
        },
        "tolerances": {field: getattr(args, TOL_PREFIX + field) for field in Tolerances.model_fields}
    }


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one command

    Returns:
        0 ok, 1 malformed input, 2 invalid parameters, 3 pipeline stage failure,
        4 not in class, 5 numerical degeneracy
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level, args.log_json)

    try:
        config = load_run_config(args.config, _overrides(args))
        logger.info("command_started", command=config.command, seed=config.seed)
        return COMMAND_HANDLERS[config.command](config)
    except UpbStateError as e:
        logger.error("command_failed", code=e.code, stage=e.stage, message=e.message)
        sys.stderr.write(dumps(e.to_dict()))
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
