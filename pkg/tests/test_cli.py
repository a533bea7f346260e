"""
End-to-end tests for the command-line entry point
"""

import json

import numpy as np
import pytest

from cli.main import build_parser, main
from core.density_matrix import DensityMatrix
from core.serialization import read_json, write_json
from construction.transform import apply_to_state, random_transform
from construction.upb import UpbParams, standard_state
from classification.symmetry import canonical_params


def run(capsys, *argv):
    code = main([*argv, "--log-level", "CRITICAL"])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_parser_maps_tolerance_flags():
    args = build_parser().parse_args(["verify", "state.json", "--tol-rank-rel", "1e-6", "--tol-null-gap-min", "10"])
    assert args.tol_rank_rel_tol == 1e-6
    assert args.tol_null_gap_min == 10.0


def test_generate_writes_state_and_upb(tmp_path, capsys):
    code, out, _ = run(capsys, "generate", "--params", "2,1,3,1", "--out", str(tmp_path))
    assert code == 0
    assert json.loads(out)["rank_pair"] == [4, 4]
    state = DensityMatrix.from_dict(read_json(tmp_path / "state.json"))
    assert np.trace(state.matrix).real == pytest.approx(1.0)
    assert read_json(tmp_path / "upb.json")["params"] == [2.0, 1.0, 3.0, 1.0]


def test_generate_rejects_non_positive_params(tmp_path, capsys):
    code, _, err = run(capsys, "generate", "--params", "0,1,1,1", "--out", str(tmp_path))
    assert code == 2
    assert json.loads(err)["error"]["code"] == "invalid_parameters"


def test_orbit_prints_sixty_rows(capsys):
    code, out, _ = run(capsys, "orbit", "--params", "1,1,1,1")
    rows = out.strip().splitlines()
    assert code == 0
    assert len(rows) == 60
    assert any(row.startswith("*") for row in rows)
    assert rows[0].split()[-1] == "id"


def test_generate_then_classify(tmp_path, capsys):
    assert run(capsys, "generate", "--params", "2,1,3,1", "--out", str(tmp_path))[0] == 0
    code, out, _ = run(capsys, "classify", str(tmp_path / "state.json"), "--out", str(tmp_path))
    assert code == 0
    expected = canonical_params(UpbParams(2.0, 1.0, 3.0, 1.0)).as_tuple()
    np.testing.assert_allclose(json.loads(out)["canonical_params"], expected, rtol=1e-8)
    assert len(read_json(tmp_path / "vectors.json")) == 6
    assert set(read_json(tmp_path / "classification.json")["residuals"]) >= {"reconstruction", "null_gap"}


def test_classify_rank_nine_state_is_not_in_class(tmp_path, capsys, rng):
    a = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
    path = write_json(tmp_path / "random.json", DensityMatrix(a @ a.conj().T, normalize=True).to_dict())
    code, out, _ = run(capsys, "classify", str(path), "--out", str(tmp_path))
    assert code == 4
    assert json.loads(out)["error"] == "not_in_class"
    assert read_json(tmp_path / "classification.json")["error"]["stage"] == "rank"


def test_verify_rejects_malformed_json(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{ not json", encoding="utf-8")
    code, _, err = run(capsys, "verify", str(path), "--out", str(tmp_path))
    assert code == 1
    assert json.loads(err)["error"]["code"] == "malformed_input"


def test_verify_mixed_state(tmp_path, capsys):
    path = write_json(tmp_path / "mixed.json", DensityMatrix.maximally_mixed().to_dict())
    code, out, _ = run(capsys, "verify", str(path), "--out", str(tmp_path), "--restarts", "20")
    payload = json.loads(out)
    assert code == 0
    assert payload["extremal"] is False
    assert payload["entangled"] == "no"
    assert payload["search"]["restarts"] == 20


def test_roundtrip_is_reproducible(tmp_path, capsys):
    argv = ("roundtrip", "--params", "1,2,0.5,3", "--seed", "7", "--out", str(tmp_path))
    code, first, _ = run(capsys, *argv)
    assert code == 0
    assert json.loads(first)["passed"] is True
    code, second, _ = run(capsys, *argv)
    assert code == 0
    assert first == second


def test_roundtrip_with_unitary_transform(tmp_path, capsys):
    code, out, _ = run(capsys, "roundtrip", "--params", "1.3,0.7,2.1,0.9", "--cond-max", "1", "--out", str(tmp_path))
    assert code == 0
    assert json.loads(out)["cond_max"] == 1.0


@pytest.mark.slow
def test_classify_batch_in_parallel(tmp_path, capsys):
    paths = []
    state = standard_state(UpbParams(1.3, 0.7, 2.1, 0.9))
    for seed in (1, 2):
        rho = apply_to_state(random_transform(seed), state)
        paths.append(str(write_json(tmp_path / f"state{seed}.json", rho.to_dict())))

    code, out, _ = run(capsys, "classify", *paths, "--jobs", "2", "--out", str(tmp_path))
    summary = json.loads(out)
    assert code == 0
    assert [entry["input"] for entry in summary] == paths
    expected = canonical_params(UpbParams(1.3, 0.7, 2.1, 0.9)).as_tuple()
    for seed in (1, 2):
        payload = read_json(tmp_path / f"state{seed}.classification.json")
        np.testing.assert_allclose(payload["canonical_params"], expected, rtol=1e-6)


def test_config_file_rejects_unknown_keys(tmp_path, capsys):
    config = tmp_path / "run.yaml"
    config.write_text("search:\n  restarts: 10\n  sweeps: 3\n", encoding="utf-8")
    code, _, err = run(capsys, "orbit", "--params", "1,1,1,1", "--config", str(config))
    assert code == 1
    assert json.loads(err)["error"]["code"] == "malformed_input"
