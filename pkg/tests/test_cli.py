"""Command-line interface: config resolution, files, exit codes."""

import json
import math

import numpy as np
import pytest

from dodewalk.cli import PRESETS, ConfigError, main, parse_config
from dodewalk.spacefrac import SpectralMixture, LatticeGeometry, q_zero, tau_max
from dodewalk.timefrac import weight_table

TINY = [
    "--alphas", "1.5", "--a", "9e-12", "--N", "1", "--K", "4",
    "--steps", "6", "--walkers", "50", "--J", "20",
]


def read(path):
    return path.read_text().splitlines()


# ------------------------------------------------------------- parsing


def test_parse_config_defaults_and_units():
    res = parse_config(
        {"alphas": [2.0], "a_m2s": [9e-12], "n_steps": 10}
    )
    assert res.variant == "caputo"
    assert res.geometry.h == 6.0 and res.geometry.K == 26
    # 9e-12 m^2/s converts by 1e18 to 9e6 nm^2/s, giving q0 = 1e6/s
    assert res.q0 == pytest.approx(1e6, rel=1e-12)
    assert res.tau == pytest.approx(1e-6, rel=1e-12)
    assert res.config["a_m2s"] == [9e-12]


def test_parse_config_accepts_native_units():
    res = parse_config(
        {"alphas": [2.0], "a_nm2s": [9e6], "n_steps": 10}
    )
    assert res.q0 == 1e6
    assert res.tau == 1e-6
    assert "a_m2s" not in res.config


def test_parse_config_scalar_coefficient_broadcasts():
    res = parse_config(
        {"alphas": [1.5, 2.0], "a_m2s": 4.5e-12, "n_steps": 5}
    )
    assert res.config["a_m2s"] == [4.5e-12, 4.5e-12]


@pytest.mark.parametrize(
    "overrides, message",
    (
        ({"bogus_key": 1}, "unknown configuration"),
        ({"a_nm2s": [9e6]}, "not both"),
        ({"tau_s": 1e-7, "p0": 0.1}, "not both"),
        ({"T_s": 1.0, "n_steps": 5}, "not both"),
        ({"alphas": [1.5, 2.0]}, "2 entries"),
        ({"beta": 0.0}, "beta"),
        ({"variant": "weird"}, "variant"),
        ({"p0": 1.5}, "not reachable"),
        ({"barrier": {"period_sites": 3}}, "p_escape"),
        ({"barrier": {"period_sites": 3, "p_escape": 0.5, "x": 1}}, "barrier"),
        ({"seed": -2}, "seed"),
        ({"n_walkers": 0}, "n_walkers"),
    ),
)
def test_parse_config_rejections(overrides, message):
    base = {"alphas": [2.0], "a_m2s": [9e-12], "n_steps": 10}
    base.update(overrides)
    with pytest.raises(ConfigError, match=message):
        parse_config(base)


def test_infeasible_stay_target_names_the_bound():
    with pytest.raises(ConfigError, match="w_n"):
        parse_config(
            {"alphas": [2.0], "a_m2s": [9e-12], "beta": 0.9,
             "p0": 0.95, "n_steps": 5}
        )


def test_horizon_resolves_step_count():
    res = parse_config(
        {"alphas": [2.0], "a_m2s": [9e-12], "T_s": 1.0 / 30.0}
    )
    assert res.n_steps == int((1.0 / 30.0) / res.tau)
    assert res.derived()["horizon_s"] == pytest.approx(
        res.n_steps * res.tau
    )


def test_all_presets_resolve():
    for name, preset in PRESETS.items():
        res = parse_config(dict(preset))
        assert res.n_steps >= 1, name
        assert res.geometry.N == 2
        if name == "kusumi":
            assert res.barrier is not None
            assert res.barrier.period_sites == 11


# ------------------------------------------------------------- commands


def test_weights_command_files_and_stdout(tmp_path, capsys):
    rc = main(
        ["weights", "--beta", "0.9", "--n", "50", "--out", str(tmp_path)]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert f"1 - w_n (memory mass) = {2.0 ** 0.1 - 1.0!r}" in out
    lines = read(tmp_path / "weights.csv")
    assert lines[0] == "m,w"
    assert len(lines) == 52
    table = weight_table(50, 0.9)
    for m in (0, 1, 50):
        assert lines[1 + m] == f"{m},{float(table.w[m])!r}"
    doc = json.loads((tmp_path / "weights_manifest.json").read_text())
    assert doc["command"] == "weights"
    assert doc["derived"]["nonmarkov_mass"] == pytest.approx(2.0**0.1 - 1.0)


def test_kernel_command_writes_rates_and_sidecar(tmp_path):
    rc = main(["kernel", "--preset", "plot1-left", "--out", str(tmp_path)])
    assert rc == 0
    lines = read(tmp_path / "kernel.csv")
    assert lines[0] == "k1,k2,q_k"
    assert len(lines) == 5  # classical stencil only
    side = json.loads((tmp_path / "kernel.json").read_text())
    assert side["q0_per_s"] == pytest.approx(1e6, rel=1e-12)
    assert side["p0"] == 0.0
    assert side["expected_jump_nm"] == 6.0


def test_walk_command_trajectory_roundtrip(tmp_path):
    rc = main(
        ["walk", "--alphas", "1.5", "--a", "9e-12", "--beta", "0.8",
         "--K", "6", "--p0", "0.2", "--steps", "40", "--seed", "3",
         "--walker", "7", "--out", str(tmp_path)]
    )
    assert rc == 0
    lines = read(tmp_path / "trajectory.csv")
    assert lines[0] == "step,t_s,x_nm,y_nm,type,k1,k2,revisit_m,jump_nm"
    assert len(lines) == 42
    first = lines[1].split(",")
    assert first[0] == "0" and first[4] == "init"
    # positions replay: each jump row advances by its offset times h
    x = y = 0.0
    for row in lines[2:]:
        cols = row.split(",")
        if cols[4] == "jump":
            x += float(cols[5]) * 6.0
            y += float(cols[6]) * 6.0
        elif cols[4] == "revisit":
            x, y = float(cols[2]), float(cols[3])
        assert float(cols[2]) == pytest.approx(x)
        x, y = float(cols[2]), float(cols[3])
    doc = json.loads((tmp_path / "walk_manifest.json").read_text())
    assert doc["results"]["kind_counts"]["jump"] > 0


def test_ensemble_command_outputs(tmp_path):
    rc = main(["ensemble", *TINY, "--out", str(tmp_path)])
    assert rc == 0
    lines = read(tmp_path / "positions.csv")
    assert lines[0] == "walker,x_nm"
    assert len(lines) == 51
    msd = read(tmp_path / "msd.csv")
    assert msd[0] == "step,t_s,msd_nm2"
    assert len(msd) == 8
    doc = json.loads((tmp_path / "ensemble_manifest.json").read_text())
    assert doc["results"]["n_jump"] > 0
    assert doc["outputs"] == ["positions.csv", "msd.csv"]


def test_fd_command_density_headers(tmp_path):
    rc = main(["fd", *TINY, "--out", str(tmp_path)])
    assert rc == 0
    lines = read(tmp_path / "density.csv")
    assert lines[0] == "j1,u"
    assert len(lines) == 42
    total = math.fsum(float(r.split(",")[1]) for r in lines[1:])
    doc = json.loads((tmp_path / "fd_manifest.json").read_text())
    assert doc["results"]["mass"] == pytest.approx(total, rel=1e-12)


def test_fd_command_2d_headers(tmp_path):
    rc = main(
        ["fd", "--alphas", "2", "--a", "9e-12", "--steps", "3",
         "--J", "5", "--out", str(tmp_path)]
    )
    assert rc == 0
    lines = read(tmp_path / "density.csv")
    assert lines[0] == "j1,j2,u"
    assert len(lines) == 1 + 11 * 11


def test_compare_command_passes_on_matched_setup(tmp_path):
    rc = main(
        ["compare", *TINY, "--walkers", "4000", "--tv-tol", "0.2",
         "--out", str(tmp_path)]
    )
    assert rc == 0
    doc = json.loads((tmp_path / "compare_manifest.json").read_text())
    assert doc["results"]["verdict"] == "PASS"
    assert doc["results"]["tv"] < 0.2
    assert (tmp_path / "mc_density.csv").exists()
    assert (tmp_path / "fd_density.csv").exists()


def test_compare_command_exit_4_on_mismatch(tmp_path):
    rc = main(
        ["compare", *TINY, "--walkers", "200", "--tv-tol", "1e-6",
         "--out", str(tmp_path)]
    )
    assert rc == 4
    doc = json.loads((tmp_path / "compare_manifest.json").read_text())
    assert doc["results"]["verdict"] == "FAIL"


def test_barrier_command_defaults_to_compartments(tmp_path):
    rc = main(
        ["barrier", "--alphas", "2", "--a", "9e-12", "--steps", "50",
         "--walkers", "100", "--out", str(tmp_path)]
    )
    assert rc == 0
    doc = json.loads((tmp_path / "barrier_manifest.json").read_text())
    assert doc["config"]["barrier"] == {"period_sites": 11, "p_escape": 0.01}
    assert doc["results"]["n_blocked_jump"] > 0


def test_manifest_round_trip_reproduces_run(tmp_path):
    d1, d2 = tmp_path / "a", tmp_path / "b"
    rc = main(["ensemble", *TINY, "--seed", "9", "--out", str(d1)])
    assert rc == 0
    rc = main(
        ["ensemble", "--config", str(d1 / "ensemble_manifest.json"),
         "--out", str(d2)]
    )
    assert rc == 0
    for name in ("positions.csv", "msd.csv", "ensemble_manifest.json"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()


def test_config_file_merges_under_flags(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps(
        {"alphas": [2.0], "a_m2s": [9e-12], "n_steps": 4, "seed": 5}
    ))
    out = tmp_path / "out"
    rc = main(
        ["ensemble", "--config", str(cfg), "--walkers", "30",
         "--seed", "6", "--out", str(out)]
    )
    assert rc == 0
    doc = json.loads((out / "ensemble_manifest.json").read_text())
    assert doc["config"]["seed"] == 6       # flag wins
    assert doc["config"]["n_walkers"] == 30
    assert doc["config"]["n_steps"] == 4    # file survives where unopposed


def test_flag_replaces_exclusive_alternate(tmp_path):
    # presets carry T_s; an explicit --steps must displace it
    out = tmp_path / "o"
    rc = main(
        ["ensemble", "--preset", "plot1-left", "--steps", "5",
         "--walkers", "20", "--out", str(out)]
    )
    assert rc == 0
    doc = json.loads((out / "ensemble_manifest.json").read_text())
    assert doc["config"]["n_steps"] == 5
    assert "T_s" not in doc["config"]


# ------------------------------------------------------------- exit codes


def test_exit_2_on_bad_configs(tmp_path, capsys):
    assert main(["kernel", "--preset", "nope", "--out", str(tmp_path)]) == 2
    assert main(["ensemble", "--steps", "5", "--out", str(tmp_path)]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["kernel", "--config", str(bad), "--out", str(tmp_path)]) == 2
    assert main(
        ["ensemble", "--alphas", "2", "--a", "9e-12", "--p0", "2.0",
         "--steps", "5", "--out", str(tmp_path)]
    ) == 2
    capsys.readouterr()


def test_exit_3_on_unstable_step(tmp_path, capsys):
    mix = SpectralMixture(alphas=(2.0,), coefs=(9.0e6,))
    geo = LatticeGeometry(N=2, h=6.0, K=26)
    bad_tau = 1.01 * tau_max(mix, geo)
    rc = main(
        ["kernel", "--alphas", "2", "--a", "9e-12", "--tau",
         repr(bad_tau), "--out", str(tmp_path)]
    )
    assert rc == 3
    assert "stability" in capsys.readouterr().err


def test_argparse_failures_return_2():
    assert main(["no-such-command"]) == 2
    assert main([]) == 2


def test_version_flag_returns_0(capsys):
    assert main(["--version"]) == 0
    assert "dode-walk" in capsys.readouterr().out
