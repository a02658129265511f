"""Campaign driver: config parsing, determinism, persistence, CLI."""
import json
import math

import numpy as np
import pytest

from enttomo.cli import main
from enttomo.entanglement import page_entropy_bits
from enttomo.errors import ParameterError, SchemaError
from enttomo.experiment import (
    ExperimentConfig,
    load_config,
    load_result_records,
    parse_config_file,
    run_haar_reference,
    run_protocol,
    run_spectral_diagnostics,
    run_tomography,
    simulate,
)


def small_config(**kw) -> ExperimentConfig:
    base = dict(protocol="nn_thermal", L=6, n_samples=4, master_seed=7,
                time_points=(0.1, 2.0))
    base.update(kw)
    return ExperimentConfig(**base).normalized()


# -- config file parsing ----------------------------------------------------

def test_parse_config_file_types_and_comments(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text(
        "# full line comment\n"
        "protocol = mbl\n"
        "L = 8            # trailing comment\n"
        "n0_list = 2, 4\n"
        "time_points = 0.1, 1e12\n"
        "orbit_average = false\n"
        "n_up = full\n"
        "\n"
        "master_seed = 42\n")
    values = parse_config_file(path)
    assert values == {"protocol": "mbl", "L": 8, "n0_list": (2, 4),
                      "time_points": (0.1, 1e12), "orbit_average": False,
                      "n_up": None, "master_seed": 42}


def test_parse_config_rejects_unknown_key(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("volume = 11\n")
    with pytest.raises(SchemaError):
        parse_config_file(path)


def test_parse_config_rejects_bad_value_and_format(tmp_path):
    bad_value = tmp_path / "v.cfg"
    bad_value.write_text("L = twelve\n")
    with pytest.raises(SchemaError):
        parse_config_file(bad_value)
    bad_line = tmp_path / "l.cfg"
    bad_line.write_text("just some words\n")
    with pytest.raises(SchemaError):
        parse_config_file(bad_line)


def test_load_config_overrides_and_none_skipped(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("protocol = rqc\nL = 8\nmaster_seed = 1\n")
    cfg = load_config(path, master_seed=99, n_samples=None)
    assert cfg.protocol == "rqc"
    assert cfg.master_seed == 99
    assert cfg.n_samples == 200  # dataclass default, None override skipped
    bare = load_config(None, protocol="nn_thermal", L=6, n_samples=3)
    assert bare.L == 6 and bare.n_samples == 3


# -- normalization ----------------------------------------------------------

def test_protocol_dependent_disorder_defaults():
    assert small_config(protocol="nn_thermal").W == 0.5
    assert small_config(protocol="nnn_thermal").W == 0.5
    assert small_config(protocol="mbl", time_points=(1.0,)).W == 5.0
    assert small_config(protocol="floquet", time_points=(1, 2)).W == 5.0
    assert small_config(protocol="mbl", time_points=(1.0,), W=0.25).W == 0.25


def test_normalized_fills_n0_and_times():
    cfg = small_config(time_points=None)
    assert cfg.n0_list == (3,)
    assert cfg.time_points == (0.1, 2.0, 1000.0)
    cfg = small_config(protocol="rqc", time_points=None)
    assert cfg.time_points == (5, 100, 2000)


def test_normalized_validation_errors():
    with pytest.raises(ParameterError):
        ExperimentConfig(protocol="quantum_soup").normalized()
    with pytest.raises(ParameterError):
        ExperimentConfig(L=7).normalized()
    with pytest.raises(ParameterError):
        ExperimentConfig(n_samples=0).normalized()
    with pytest.raises(ParameterError):
        ExperimentConfig(threads=0).normalized()
    with pytest.raises(ParameterError):
        ExperimentConfig(L=8, n0_list=(5,)).normalized()
    with pytest.raises(ParameterError):
        ExperimentConfig(time_points=(-1.0,)).normalized()


def test_circuit_times_must_be_ascending_integers():
    with pytest.raises(ParameterError):
        small_config(protocol="rqc", time_points=(5.5, 10))
    with pytest.raises(ParameterError):
        small_config(protocol="rqc", time_points=(10, 5))
    with pytest.raises(ParameterError):
        small_config(protocol="floquet", time_points=(3, 3))
    cfg = small_config(protocol="floquet", time_points=(1.0, 4.0))
    assert cfg.time_points == (1, 4)
    assert all(isinstance(t, int) for t in cfg.time_points)


# -- protocol runs ----------------------------------------------------------

@pytest.mark.parametrize("protocol,times", [
    ("nn_thermal", (0.1, 2.0)),
    ("nnn_thermal", (2.0,)),
    ("mbl", (1e12,)),
    ("mixed_field", (2.0,)),
    ("nn_random_product", (2.0,)),
    ("rqc", (5, 20)),
    ("floquet", (1, 3)),
])
def test_every_protocol_runs_with_clean_audits(protocol, times):
    cfg = small_config(protocol=protocol, time_points=times, n_samples=3)
    result = run_protocol(cfg)
    audits = result.audits
    assert audits["max_norm_drift"] <= 1e-10
    if protocol in ("nn_thermal", "nnn_thermal", "mbl", "mixed_field", "nn_random_product"):
        assert audits["max_energy_drift"] <= audits["energy_tolerance"]
    if protocol in ("nn_thermal", "nnn_thermal", "mbl", "rqc", "floquet"):
        assert audits["sector_leak"] == 0.0
    if protocol == "nn_random_product":
        assert audits["max_magnetization_block_drift"] <= 1e-10
    stats = result.records[3]
    assert stats.mean.shape == (len(times), len(result.rep_sets[3]))
    assert np.all(stats.mean >= -1e-12)
    assert result.mutual_information.mean.shape == (len(times), 3)
    assert result.half_chain.mean.shape == (len(times),)


def test_entropies_grow_from_product_start():
    cfg = small_config(protocol="nn_thermal", time_points=(0.0, 2.0), n_samples=5)
    result = run_protocol(cfg)
    # basis product states carry no entanglement at t=0
    assert np.all(result.half_chain.mean[0] < 1e-10)
    assert result.half_chain.mean[1] > 0.5


def test_simulate_outputs_are_deterministic(tmp_path):
    out = tmp_path / "results"
    cfg = small_config(out_dir=str(out), n_samples=3)
    _, first_paths = simulate(cfg)
    first = {p.name: p.read_bytes() for p in first_paths}
    _, second_paths = simulate(cfg)
    for path in second_paths:
        if path.name.startswith("manifest"):
            a = json.loads(first[path.name])
            b = json.loads(path.read_bytes())
            a.pop("timing"), b.pop("timing")
            assert a == b
        else:
            assert path.read_bytes() == first[path.name], path.name
    names = {p.name for p in first_paths}
    assert names == {"results_nn_thermal_n03.csv", "mi_nn_thermal.csv",
                     "hcee_nn_thermal.csv", "manifest_nn_thermal.json"}


def test_thread_count_does_not_change_results(tmp_path):
    serial = run_protocol(small_config(protocol="rqc", time_points=(5, 20), n_samples=6))
    threaded = run_protocol(small_config(protocol="rqc", time_points=(5, 20),
                                         n_samples=6, threads=3))
    np.testing.assert_array_equal(serial.records[3].mean, threaded.records[3].mean)
    np.testing.assert_array_equal(serial.half_chain.mean, threaded.half_chain.mean)


def test_orbit_average_toggle():
    on = run_protocol(small_config(n_samples=3))
    off = run_protocol(small_config(n_samples=3, orbit_average=False))
    assert on.records[3].mean.shape == off.records[3].mean.shape
    # averaging over each orbit changes finite-sample values
    assert not np.allclose(on.records[3].mean, off.records[3].mean)


def test_sample_seed_layout_in_manifest(tmp_path):
    cfg = small_config(out_dir=str(tmp_path / "r"), n_samples=3, master_seed=17)
    _, paths = simulate(cfg)
    manifest = json.loads((tmp_path / "r" / "manifest_nn_thermal.json").read_text())
    assert manifest["sample_seeds"] == [[17, 0], [17, 1], [17, 2]]
    assert manifest["config"]["protocol"] == "nn_thermal"
    assert manifest["config"]["W"] == 0.5


# -- tomography over memory and disk ----------------------------------------

def test_tomography_memory_and_disk_agree(tmp_path):
    cfg = small_config(out_dir=str(tmp_path / "r"), n_samples=4)
    result, _ = simulate(cfg)
    from_memory, _ = run_tomography(cfg, result)
    from_disk, written = run_tomography(cfg)
    assert len(from_memory) == len(from_disk) == 2
    for a, b in zip(from_memory, from_disk):
        assert a.time == b.time
        assert a.S0 == pytest.approx(b.S0, abs=1e-12)
        np.testing.assert_allclose(a.omega, b.omega, atol=1e-12)
        assert a.r2 == pytest.approx(b.r2, abs=1e-12)
    payload = json.loads((tmp_path / "r" / "fits_nn_thermal.json").read_text())
    assert [f["time"] for f in payload] == [0.1, 2.0]
    assert all(set(f) == {"L", "n0", "protocol", "time", "S0", "omega", "r2",
                          "rank_flag", "hierarchy"} for f in payload)
    points = (tmp_path / "r" / "fit_points_nn_thermal.csv").read_text().splitlines()
    assert points[0] == "time,n0,rep_id,mask,mean_S,fitted_S,residual"
    assert len(points) == 1 + 2 * len(result.rep_sets[3])


def test_load_result_records_round_trip(tmp_path):
    cfg = small_config(out_dir=str(tmp_path / "r"), n_samples=3)
    result, _ = simulate(cfg)
    times, masks, geometry, mean, stderr = load_result_records(tmp_path / "r",
                                                               "nn_thermal", 3)
    assert times == [0.1, 2.0]
    assert masks == list(result.rep_sets[3].reps)
    np.testing.assert_array_equal(geometry, result.rep_sets[3].geometry)
    np.testing.assert_array_equal(mean, result.records[3].mean)
    np.testing.assert_array_equal(stderr, result.records[3].stderr)


def test_tomography_before_simulate_fails(tmp_path):
    cfg = small_config(out_dir=str(tmp_path / "empty"))
    with pytest.raises(SchemaError):
        run_tomography(cfg)


# -- spectral diagnostics and the Haar reference ------------------------------

def test_spectral_diagnostics_outputs(tmp_path):
    cfg = small_config(out_dir=str(tmp_path / "r"), L=8, n_samples=5,
                       time_points=(1.0,))
    aggregate, written = run_spectral_diagnostics(cfg)
    assert 0.0 < aggregate["mean_r"] < 1.0
    assert aggregate["n_realizations"] == 5
    assert len(aggregate["histogram"]["densities"]) == 50
    assert aggregate["references"]["poisson"] == pytest.approx(2 * math.log(2) - 1)
    lines = (tmp_path / "r" / "ratios_nn_thermal.csv").read_text().splitlines()
    assert lines[0] == "seed,mean_r"
    assert len(lines) == 6
    payload = json.loads((tmp_path / "r" / "spectral_nn_thermal.json").read_text())
    assert payload["mean_r"] == aggregate["mean_r"]


def test_spectral_diagnostics_rejects_circuit_protocol(tmp_path):
    cfg = small_config(protocol="rqc", time_points=(5,), out_dir=str(tmp_path))
    with pytest.raises(ParameterError):
        run_spectral_diagnostics(cfg)


def test_haar_reference_full_space(tmp_path):
    cfg = small_config(out_dir=str(tmp_path / "r"), L=6, n_samples=2000)
    payload, written = run_haar_reference(cfg)
    page = page_entropy_bits(8, 8)
    assert payload["page_full_space_bits"] == pytest.approx(page)
    assert abs(payload["mean_entropy_bits"] - page) < 5 * payload["stderr"]
    assert payload["mask"] == 0b000111
    disk = json.loads((tmp_path / "r" / "haar.json").read_text())
    assert disk == payload


def test_haar_reference_sector_and_mask_override(tmp_path):
    cfg = small_config(out_dir=str(tmp_path / "r"), L=6, n_samples=500,
                       n_up=3, haar_mask=0b010101)
    payload, _ = run_haar_reference(cfg)
    assert payload["n_up"] == 3 and payload["mask"] == 0b010101
    # sector mean sits below the full-space Page value of the same cut
    assert payload["mean_entropy_bits"] < payload["page_full_space_bits"]


# -- CLI ----------------------------------------------------------------------

def test_cli_simulate_then_tomography(tmp_path, capsys):
    cfg_path = tmp_path / "run.cfg"
    cfg_path.write_text(
        "protocol = nn_thermal\nL = 6\nn_samples = 3\ntime_points = 0.1, 2.0\n")
    out = str(tmp_path / "r")
    assert main(["simulate", "--config", str(cfg_path), "--out", out,
                 "--seed", "5"]) == 0
    stdout = capsys.readouterr().out.splitlines()
    assert any(line.endswith("results_nn_thermal_n03.csv") for line in stdout)
    assert main(["tomography", "--config", str(cfg_path), "--out", out]) == 0
    stdout = capsys.readouterr().out.splitlines()
    assert any(line.endswith("fits_nn_thermal.json") for line in stdout)


def test_cli_bipartitions_table(capsys):
    assert main(["bipartitions", "--L", "8", "--n0", "4"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "L,n0,rep_id,mask,n_1,n_2,n_3,n_4"
    assert len(lines) == 1 + 7  # seven representatives at (8, 4)


def test_cli_error_exit_codes(tmp_path, capsys):
    bad_cfg = tmp_path / "bad.cfg"
    bad_cfg.write_text("protocol = nonsense\n")
    assert main(["simulate", "--config", str(bad_cfg)]) == 2
    # tomography without prior simulate: schema error, same exit class
    empty_cfg = tmp_path / "ok.cfg"
    empty_cfg.write_text("protocol = nn_thermal\nL = 6\n")
    assert main(["tomography", "--config", str(empty_cfg),
                 "--out", str(tmp_path / "void")]) == 2
    capsys.readouterr()


def test_cli_haar_and_spectral(tmp_path, capsys):
    cfg_path = tmp_path / "h.cfg"
    cfg_path.write_text("protocol = nn_thermal\nL = 6\nn_samples = 200\n")
    out = str(tmp_path / "r")
    assert main(["haar", "--config", str(cfg_path), "--out", out]) == 0
    assert main(["spectral", "--config", str(cfg_path), "--out", out,
                 "--samples", "3"]) == 0
    stdout = capsys.readouterr().out
    assert "haar.json" in stdout and "spectral_nn_thermal.json" in stdout
