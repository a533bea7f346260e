"""
Command implementations for the UPB state toolkit
Each command takes a validated RunConfig and returns a process exit code
"""

import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, Any, Callable, List, Tuple

from core.density_matrix import DensityMatrix
from core.errors import InvalidParametersError, MalformedInputError, UpbStateError
from core.serialization import dumps, read_json, write_json
from core.tensor_core import numerical_rank, partial_transpose
from construction.transform import ProductTransform, apply_to_state, random_transform
from construction.upb import UpbParams, build_state, build_upb, WELL_CONDITIONED_RANGE
from classification.orthogonalizer import classify
from classification.symmetry import ParamPoint, canonical_representative, canonical_params, orbit, symmetry_group
from verification.certificate import certify
from utils.config_loader import RunConfig, SearchConfig, Tolerances
from utils.logger import get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_STAGE_FAILURE = 3


def _emit(payload: Any) -> None:
    sys.stdout.write(dumps(payload))


def _require_params(config: RunConfig) -> UpbParams:
    if not config.params or len(config.params) != 4:
        raise InvalidParametersError("Command needs --params a,b,c,d", details={"params": config.params})
    return UpbParams(*config.params)


def _require_inputs(config: RunConfig, single: bool = False) -> List[str]:
    if not config.inputs:
        raise MalformedInputError(f"Command '{config.command}' needs an input file")
    if single and len(config.inputs) != 1:
        raise MalformedInputError(f"Command '{config.command}' takes exactly one input file")
    return config.inputs


def _load_state(path: str, tolerances: Tolerances) -> DensityMatrix:
    return DensityMatrix.from_dict(read_json(path), herm_tol=tolerances.herm_tol, trace_tol=tolerances.trace_tol)


def cmd_generate(config: RunConfig) -> int:
    """
    Write state.json and upb.json for the standard-form UPB of --params
    """
    params = _require_params(config)
    if not params.is_well_conditioned():
        logger.warning("params_outside_well_conditioned_range", params=list(params.as_tuple()),
                       range=list(WELL_CONDITIONED_RANGE))

    upb = build_upb(params)
    rho = build_state(upb)
    out = config.resolved_output_dir()
    state_path = write_json(out / "state.json", rho.to_dict())
    upb_path = write_json(out / "upb.json", upb.to_dict())

    _emit({
        "state": str(state_path),
        "upb": str(upb_path),
        "params": list(params.as_tuple()),
        "rank_pair": [numerical_rank(rho.matrix, config.tolerances.rank_rel_tol),
                      numerical_rank(partial_transpose(rho.matrix), config.tolerances.rank_rel_tol)]
    })
    return EXIT_OK


def cmd_transform(config: RunConfig) -> int:
    """
    Apply a product transform (from --transform, else seeded random) to a state file
    """
    path = _require_inputs(config, single=True)[0]
    rho = _load_state(path, config.tolerances)
    if config.transform_path:
        transform = ProductTransform.from_dict(read_json(config.transform_path))
    else:
        transform = random_transform(config.seed, config.cond_max)

    out = config.resolved_output_dir()
    state_path = write_json(out / "transformed_state.json", apply_to_state(transform, rho).to_dict())
    transform_path = write_json(out / "transform.json", transform.to_dict())
    _emit({
        "input": path,
        "state": str(state_path),
        "transform": str(transform_path),
        "condition_numbers": transform.condition_numbers()
    })
    return EXIT_OK


def _classify_path(path: str, search: Dict[str, Any], tolerances: Dict[str, Any]) -> Tuple[Dict[str, Any], int]:
    """Classify one state file; errors come back as payloads"""
    try:
        tol = Tolerances(**tolerances)
        report = classify(_load_state(path, tol), SearchConfig(**search), tol)
        return report.to_dict(), EXIT_OK
    except UpbStateError as e:
        return e.to_dict(), e.exit_code


def cmd_classify(config: RunConfig) -> int:
    """
    Classify one or more state files

    A single input writes classification.json and vectors.json; a batch writes
    <stem>.classification.json per input, in input order. --jobs > 1 spreads a
    batch over worker processes.
    """
    inputs = _require_inputs(config)
    search = config.search.model_dump()
    tolerances = config.tolerances.model_dump()

    if config.jobs > 1 and len(inputs) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_classify_path, inputs, [search] * len(inputs), [tolerances] * len(inputs)))
    else:
        results = [_classify_path(path, search, tolerances) for path in inputs]

    out = config.resolved_output_dir()
    summary = []
    exit_code = EXIT_OK
    for path, (payload, code) in zip(inputs, results):
        if len(inputs) == 1:
            target = out / "classification.json"
            if code == EXIT_OK:
                write_json(out / "vectors.json", payload["kernel_vectors"])
        else:
            target = out / f"{Path(path).stem}.classification.json"
        write_json(target, payload)
        entry = {"input": path, "output": str(target), "exit_code": code}
        if code == EXIT_OK:
            entry["canonical_params"] = payload["canonical_params"]
        else:
            entry["error"] = payload["error"]["code"]
            exit_code = exit_code or code
        summary.append(entry)

    _emit(summary[0] if len(summary) == 1 else summary)
    return exit_code


def cmd_verify(config: RunConfig) -> int:
    """
    Write certificate.json for a state file
    """
    path = _require_inputs(config, single=True)[0]
    rho = _load_state(path, config.tolerances)
    certificate = certify(rho, config.search, config.tolerances)
    payload = dict(certificate.to_dict(),
                   search=config.search.model_dump(),
                   tolerances=config.tolerances.model_dump())
    write_json(config.resolved_output_dir() / "certificate.json", payload)
    _emit(payload)
    return EXIT_OK


def cmd_orbit(config: RunConfig) -> int:
    """
    Print the 60 images of --params under the symmetry group, one row each
    """
    point = ParamPoint.from_params(_require_params(config))
    canonical = canonical_representative(point)
    for element, image in zip(symmetry_group(), orbit(point)):
        params = image.to_params()
        marker = "*" if image.is_close(canonical) else " "
        word = ".".join(label.value for label in element.word) or "id"
        sys.stdout.write("{} {:.12g} {:.12g} {:.12g} {:.12g}  {}\n".format(marker, *params.as_tuple(), word))
    return EXIT_OK


def cmd_roundtrip(config: RunConfig) -> int:
    """
    generate -> seeded random transform -> classify -> compare canonical parameters

    Exit 0 iff the relative error is below roundtrip_rel_tol; any pipeline
    failure exits 3 with its stage name.
    """
    params = _require_params(config)
    expected = canonical_params(params)
    transform = random_transform(config.seed, config.cond_max)
    rho = apply_to_state(transform, build_state(build_upb(params)))

    report: Dict[str, Any] = {
        "params": list(params.as_tuple()),
        "seed": config.seed,
        "cond_max": config.cond_max,
        "transform": transform.to_dict(),
        "expected_canonical": list(expected.as_tuple()),
        "search": config.search.model_dump(),
        "tolerances": config.tolerances.model_dump()
    }
    try:
        result = classify(rho, config.search, config.tolerances)
    except UpbStateError as e:
        report.update(passed=False, stage=e.stage, error=e.to_dict()["error"]["code"])
        report_path = write_json(config.resolved_output_dir() / "roundtrip.json", report)
        logger.error("roundtrip_failed", stage=e.stage, code=e.code, report=str(report_path))
        sys.stderr.write(f"roundtrip failed at stage: {e.stage}\n")
        _emit(report)
        return EXIT_STAGE_FAILURE

    error = expected.relative_error(result.canonical_params)
    passed = error < config.tolerances.roundtrip_rel_tol
    report.update(passed=passed,
                  recovered_canonical=list(result.canonical_params.as_tuple()),
                  recovered_params=list(result.params.as_tuple()),
                  relative_error=error,
                  residuals=result.residuals)
    write_json(config.resolved_output_dir() / "roundtrip.json", report)
    _emit(report)
    if not passed:
        sys.stderr.write("roundtrip failed at stage: compare\n")
        return EXIT_STAGE_FAILURE
    return EXIT_OK


COMMAND_HANDLERS: Dict[str, Callable[[RunConfig], int]] = {
    "generate": cmd_generate,
    "transform": cmd_transform,
    "classify": cmd_classify,
    "verify": cmd_verify,
    "orbit": cmd_orbit,
    "roundtrip": cmd_roundtrip
}
