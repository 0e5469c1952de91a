"""Test the command-line surface on the bundled presets."""

import json
from pathlib import Path

import pytest
import pandas as pd

from mwmw.cli.main import main
from mwmw.cli.utils import apply_set_overrides, load_config, preset_names
from mwmw.configs.settings import app_config
from mwmw.errors import ConfigError


@pytest.fixture(autouse=True)
def _log_to_tmp(tmp_path: Path, monkeypatch):
    monkeypatch.setattr(app_config, "LOG_FILE", tmp_path / "mwmw.log")


def _run(command: str, preset: str, out: Path, *extra: str) -> int:
    return main([command, "--config", preset, "--out", str(out), "--no-progress", *extra])


def test_presets_are_valid():
    """Test that every bundled preset parses into a run config."""
    names = preset_names()
    assert "dipole_hop4" in names
    for name in names:
        assert load_config(name).name == name


@pytest.mark.parametrize(
    "overrides,path,expected",
    [
        (["run.s=0.5"], ("run", "s"), 0.5),
        (["run.m_range=[2,4]"], ("run", "m_range"), [2, 4]),
        (["output.format=json"], ("output", "format"), "json"),
    ],
)
def test_set_overrides(overrides, path, expected):
    """Test that --set values are parsed as JSON with a plain-string fallback."""
    data = apply_set_overrides({"run": {"s": 1.0}, "output": {}}, overrides)
    assert data[path[0]][path[1]] == expected


def test_unknown_config_is_a_config_error():
    """Test that a missing preset is reported as a configuration error."""
    with pytest.raises(ConfigError):
        load_config("no_such_preset")


@pytest.mark.parametrize("cutoff,valid", [(3, False), (1, True)])
def test_charge_dimension_must_match_interaction(cutoff: int, valid: bool):
    """Test that boson charges are accepted with the spin-1/2 zoo only for occupation cutoff 1."""
    overrides = ["charges.kind=boson_number", f"charges.cutoff={cutoff}"]
    if valid:
        assert load_config("dipole_hop4", overrides).charges.local_dim == 2
    else:
        with pytest.raises(ConfigError, match="dimension 4 per site"):
            load_config("dipole_hop4", overrides)


def test_charge_dimension_mismatch_exits_2(tmp_path: Path):
    """Test that the mismatch is reported before any computation."""
    args = ("--set", "charges.kind=boson_number", "--set", "charges.cutoff=2")
    assert _run("verify", "dipole_hop4", tmp_path, *args) == 2
    assert not list(tmp_path.glob("*_verify.json"))


def test_verify_symmetric_model_passes(tmp_path: Path):
    """Test that the ring exchange passes every assumption check."""
    assert _run("verify", "dipole_hop4", tmp_path) == 0
    report = json.loads((tmp_path / "dipole_hop4_verify.json").read_text())
    assert report["passed"] is True
    assert report["k"] == 1
    names = [check["name"] for check in report["checks"]]
    assert names[:3] == ["growth", "charge_family", "k_symmetric(k=1)"]


def test_verify_symmetry_breaker_fails(tmp_path: Path):
    """Test that a transverse field fails the charge symmetry check with exit code 1."""
    assert _run("verify", "symmetry_breaker", tmp_path) == 1
    report = json.loads((tmp_path / "symmetry_breaker_verify.json").read_text())
    failed = [check["name"] for check in report["checks"] if check["passed"] is False]
    assert failed == ["k_symmetric(k=0)"]


def test_multi_index_length_mismatch_exits_2(tmp_path: Path):
    """Test that a multi-index of the wrong length is a configuration error."""
    assert _run("sweep", "dipole_hop4", tmp_path, "--set", "symmetry.a=[[0,0]]") == 2
    assert not list(tmp_path.glob("*_sweep*"))


def test_sweep_is_deterministic(tmp_path: Path):
    """Test that two runs of the same sweep write byte-identical tables."""
    args = ("--set", "run.m_range=[2,4]", "--set", "run.exact_max_m=2")
    assert _run("sweep", "dipole_hop4", tmp_path / "first", *args) == 0
    assert _run("sweep", "dipole_hop4", tmp_path / "second", *args, "--threads", "2") == 0
    first = (tmp_path / "first" / "dipole_hop4_sweep.csv").read_bytes()
    assert first == (tmp_path / "second" / "dipole_hop4_sweep.csv").read_bytes()

    df = pd.read_csv(tmp_path / "first" / "dipole_hop4_sweep.csv")
    assert df["m"].tolist() == [2.0, 3.0, 4.0]
    assert df["Dm_norm_exact"].notna().tolist() == [True, False, False]
    assert set(df["verdict"]) == {"bounded"}
    assert (df["Dm_norm_triangle"] <= df["rhs_bound"]).all()
    meta = json.loads((tmp_path / "first" / "dipole_hop4_sweep.meta.json").read_text())
    assert meta["truncated"] is False
    assert meta["failures"] == []


def test_sweep_dipole_twist_is_bounded(tmp_path: Path):
    """Test that the dipole twist of the 1-symmetric ring exchange is bounded on m = 2..8."""
    assert _run("sweep", "dipole_hop4_dipole", tmp_path, "--set", "run.exact_max_m=2") == 0
    df = pd.read_csv(tmp_path / "dipole_hop4_dipole_sweep.csv")
    assert df["m"].tolist() == [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]
    assert set(df["verdict"]) == {"bounded"}
    assert (df["Dm_norm_triangle"] <= df["rhs_bound"]).all()
    meta = json.loads((tmp_path / "dipole_hop4_dipole_sweep.meta.json").read_text())
    summary = meta["verdicts"]["1"]["verdict"]
    assert summary["symmetric"] is True
    assert summary["reason"] == "symmetric_within_bound"


def test_sweep_xy_contrast_grows(tmp_path: Path):
    """Test that hopping under the dipole twist gives a growing sweep."""
    assert _run("sweep", "xy_contrast", tmp_path, "--format", "json") == 0
    payload = json.loads((tmp_path / "xy_contrast_sweep.json").read_text())
    assert payload["meta"]["verdicts"]["1"]["verdict"]["verdict"] == "growing"
    assert [row["m"] for row in payload["rows"]] == [2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]


def test_sweep_symmetry_breaker_entropy_columns(tmp_path: Path):
    """Test the entropy equality columns of a sweep on ten sites."""
    assert _run("sweep", "symmetry_breaker", tmp_path) == 0
    df = pd.read_csv(tmp_path / "symmetry_breaker_sweep.csv")
    assert len(df) == 1
    row = df.iloc[0]
    assert row["beta"] == 1.0
    assert row["equality_defect"] <= 1e-8 * max(1.0, abs(row["beta_trace"]))
    assert row["Dm_norm_exact"] <= row["Dm_norm_triangle"] + 1e-9


def test_sweep_resource_limit_exits_3(tmp_path: Path, monkeypatch):
    """Test that rows above the sparse ceiling are kept as truncated and the run exits with 3."""
    monkeypatch.setattr(app_config, "DENSE_LIMIT", 8)
    monkeypatch.setattr(app_config, "SPARSE_LIMIT", 8)
    assert _run("sweep", "dipole_hop4", tmp_path, "--set", "run.m_range=[2,3]") == 3
    df = pd.read_csv(tmp_path / "dipole_hop4_sweep.csv")
    assert df["verdict"].tolist() == ["truncated", "truncated"]
    meta = json.loads((tmp_path / "dipole_hop4_sweep.meta.json").read_text())
    assert meta["verdicts"]["0"]["truncated_m"] == [2.0, 3.0]


def test_entropy_suite(tmp_path: Path):
    """Test the seeded identity suites end to end."""
    assert _run("entropy", "entropy_suite", tmp_path) == 0
    df = pd.read_csv(tmp_path / "entropy_suite_entropy.csv")
    counts = df["check"].value_counts().to_dict()
    assert counts["perturbation"] == 100
    assert counts["twist"] == 100
    assert counts["kms"] == 50
    assert counts["uhlmann"] == 50
    assert counts["tracial"] == 20 * 3 * 3
    assert df["passed"].all()


def test_geometry_z2(tmp_path: Path):
    """Test the growth certificate of Z^2 with C = 9 and gamma = 2."""
    assert _run("geometry", "z2_geometry", tmp_path) == 0
    df = pd.read_csv(tmp_path / "z2_geometry_geometry.csv")
    assert bool(df.loc[0, "passed"])
    assert df.loc[0, "n_sites"] == 441
    assert 2.0 <= df.loc[0, "gamma_estimate"] <= 3.0


def test_geometry_rejects_too_small_constant(tmp_path: Path):
    """Test that an understated growth constant fails with a witness."""
    assert _run("geometry", "z2_geometry", tmp_path, "--set", "geometry.C=1.0") == 1
    df = pd.read_csv(tmp_path / "z2_geometry_geometry.csv")
    assert df.loc[0, "witness_r"] > 0


@pytest.mark.parametrize("preset,growing", [("ffunction_lambda3", False), ("ffunction_lambda1", True)])
def test_ffunction_presets(tmp_path: Path, preset: str, growing: bool):
    """Test that the measured growth of norm_F agrees with the admissibility criterion."""
    assert _run("ffunction", preset, tmp_path) == 0
    meta = json.loads((tmp_path / f"{preset}_ffunction.meta.json").read_text())
    assert meta["growing"] is growing
    assert meta["consistent"] is True


def test_missing_section_exits_2(tmp_path: Path):
    """Test that running a command without its config section is a configuration error."""
    assert _run("ffunction", "dipole_hop4", tmp_path) == 2
