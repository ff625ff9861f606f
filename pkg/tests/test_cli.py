"""End-to-end checks of the command-line entry points.

Everything runs in-process through ``main(argv)`` so exit codes and output
can be asserted without spawning interpreters.
"""

import json

import numpy as np
import pytest

from fpcombi.cli import gen_function, main, parse_spec, read_family_file, scan_error_decay
from fpcombi.gridfn import write_grid, write_mask, SubsetMask


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# --- seeded function families ---------------------------------------------


def test_gen_function_is_deterministic():
    a = gen_function("rademacher", 11, 2, seed=5, trial=3, index=1)
    b = gen_function("rademacher", 11, 2, seed=5, trial=3, index=1)
    assert np.array_equal(a.values, b.values)


def test_gen_function_separates_slots():
    base = gen_function("rademacher", 11, 2, seed=5, trial=3, index=0)
    for kwargs in ({"index": 1}, {"trial": 4, "index": 0}, {"seed": 6, "trial": 3}):
        other = gen_function("rademacher", 11, 2, **{"seed": 5, "trial": 3, **kwargs})
        assert not np.array_equal(base.values, other.values)


def test_rademacher_values_are_signs():
    f = gen_function("rademacher", 13, 1, seed=0, trial=0)
    assert set(np.unique(f.values.real)) == {-1.0, 1.0}


def test_unit_circle_values_have_unit_modulus():
    f = gen_function("unit-circle", 13, 2, seed=0, trial=0)
    assert np.allclose(np.abs(f.values), 1.0)


def test_random_set_respects_density():
    f = gen_function("random-set", 31, 2, seed=1, trial=0, density=0.9)
    frac = float(np.mean(f.values.real))
    assert 0.8 < frac <= 1.0
    full = gen_function("random-set", 31, 2, seed=1, trial=0, density=1.0)
    assert np.all(full.values.real == 1.0)


def test_gen_function_rejects_bad_inputs():
    with pytest.raises(ValueError, match="unknown function family"):
        gen_function("gaussian", 11, 1, seed=0, trial=0)
    with pytest.raises(ValueError, match="density"):
        gen_function("random-set", 11, 1, seed=0, trial=0, density=0.0)


# --- literal parsing --------------------------------------------------------


def test_parse_spec_square_shape():
    spec = parse_spec(2, "1,0;0,1", "0,1|0,0,1")
    assert spec.dimension == 2
    assert spec.directions == ((1, 0), (0, 1))
    assert spec.m == 2


def test_parse_spec_rejects_wrong_arity_vector():
    with pytest.raises(ValueError, match="coordinates"):
        parse_spec(2, "1,0;0,1,1", "0,1|0,0,1")


def test_family_file_round_trip(tmp_path):
    path = tmp_path / "fam.txt"
    path.write_text("t=2 m=2\n0,1|0\n0|0,0,1\n")
    fam = read_family_file(str(path))
    assert fam.t == 2 and fam.m == 2
    assert str(fam.rows[0][0]) == "y"
    assert str(fam.rows[1][1]) == "y^2"


@pytest.mark.parametrize(
    "text,message",
    [
        ("", "empty"),
        ("t=2 m=2\n0,1|0\n", "family rows"),
        ("t=1 m=2\n0,1\n", "entries"),
        ("hello\n0,1\n", "first line"),
    ],
)
def test_family_file_rejects_malformed_input(tmp_path, text, message):
    path = tmp_path / "bad.txt"
    path.write_text(text)
    with pytest.raises(ValueError, match=message):
        read_family_file(str(path))


# --- simple subcommands ------------------------------------------------------


def test_weyl_quadratic_passes(capsys):
    code, out, _ = run(capsys, "weyl", "--prime", "5", "--poly", "0,0,1")
    assert code == 0
    assert "verdict pass" in out
    assert "0.447214" in out


def test_weyl_linear_has_no_bound_issue(capsys):
    code, out, _ = run(capsys, "weyl", "--prime", "7", "--poly", "0,1")
    assert code == 0
    assert "verdict pass" in out


def test_weyl_degree_collapse_reports_no_bound(capsys):
    # y^7 reduces to y mod 7, and 7 >= p leaves the raw degree without a bound
    code, out, _ = run(capsys, "weyl", "--prime", "5", "--poly", "0,0,0,0,0,1")
    assert code == 0


def test_count_emits_stable_json(capsys):
    code, out, _ = run(capsys, "count", "--prime", "11", "--seed", "7")
    assert code == 0
    first = json.loads(out)
    code, out, _ = run(capsys, "count", "--prime", "11", "--seed", "7")
    assert json.loads(out) == first
    assert first["p"] == 11
    assert first["abs_error"] >= 0


def test_count_accepts_function_files(tmp_path, capsys):
    paths = []
    for i in range(3):
        f = gen_function("unit-circle", 7, 2, seed=9, trial=0, index=i)
        path = tmp_path / f"f{i}.txt"
        write_grid(f, str(path))
        paths.append(str(path))
    argv = ["count", "--prime", "7"]
    for path in paths:
        argv += ["--fn", path]
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert json.loads(out)["p"] == 7


def test_count_rejects_wrong_file_count(tmp_path, capsys):
    f = gen_function("rademacher", 7, 2, seed=0, trial=0)
    path = tmp_path / "f.txt"
    write_grid(f, str(path))
    code, _, err = run(capsys, "count", "--prime", "7", "--fn", str(path))
    assert code == 1
    assert "function files" in err


def test_norm_of_stored_function(tmp_path, capsys):
    f = gen_function("rademacher", 11, 1, seed=2, trial=0)
    path = tmp_path / "f.txt"
    write_grid(f, str(path))
    code, out, _ = run(
        capsys, "norm", "--prime", "11", "--dim", "1",
        "--vector", "1", "--degree", "2", "--fn", str(path),
    )
    assert code == 0
    value = float(out.strip())
    assert 0.0 <= value <= 1.0


def test_norm_rejects_metadata_mismatch(tmp_path, capsys):
    f = gen_function("rademacher", 11, 1, seed=2, trial=0)
    path = tmp_path / "f.txt"
    write_grid(f, str(path))
    code, _, err = run(
        capsys, "norm", "--prime", "13", "--dim", "1",
        "--vector", "1", "--degree", "2", "--fn", str(path),
    )
    assert code == 1
    assert "flags say" in err


# --- descent traces -----------------------------------------------------------


def test_pet_trace_square_family(tmp_path, capsys):
    path = tmp_path / "fam.txt"
    path.write_text("t=2 m=2\n0,1|0\n0|0,0,1\n")
    code, out, _ = run(capsys, "pet-trace", "--family", str(path))
    assert code == 0
    assert "terminated after 2 steps" in out
    records = [json.loads(line) for line in out.splitlines() if line.startswith("{")]
    assert [r["step"] for r in records] == [1, 2]
    assert records[0]["subtracted"] == ["y", "0"]
    assert records[1]["type_after"] == [[0], [2]]
    assert all("degenerate_shifts" in r for r in records)


def test_pet_trace_budget_failure_exits_nonzero(tmp_path, capsys):
    path = tmp_path / "cubic.txt"
    path.write_text("t=3 m=3\n0,1|0|0\n0|0,0,1|0\n0|0|0,0,0,1\n")
    code, out, _ = run(capsys, "pet-trace", "--family", str(path), "--max-steps", "8")
    assert code == 1
    assert "descent failed after 8 steps" in out
    records = [json.loads(line) for line in out.splitlines() if line.startswith("{")]
    assert len(records) == 8


# --- witness search -----------------------------------------------------------


def test_find_emits_witness_json(capsys):
    code, out, _ = run(capsys, "find", "--prime", "7", "--seed", "3", "--density", "0.9")
    assert code == 0
    payload = json.loads(out)
    assert payload["witness"] is not None
    assert len(payload["witness"]["x"]) == 2
    assert 0.0 < payload["density"] <= 1.0


def test_find_reads_mask_file(tmp_path, capsys):
    mask = SubsetMask.full(5, 2)
    path = tmp_path / "mask.txt"
    write_mask(mask, str(path))
    code, out, _ = run(capsys, "find", "--prime", "5", "--mask", str(path))
    assert code == 0
    payload = json.loads(out)
    # y = 0 collapses every offset to the same point and is skipped
    assert payload["witness"] == {"x": [0, 0], "y": 1}
    assert payload["density"] == 1.0


def test_find_empty_set_has_no_witness(tmp_path, capsys):
    mask = SubsetMask.empty(5, 2)
    path = tmp_path / "mask.txt"
    write_mask(mask, str(path))
    code, out, _ = run(capsys, "find", "--prime", "5", "--mask", str(path))
    assert code == 0
    assert json.loads(out)["witness"] is None


# --- scan ----------------------------------------------------------------------


def scan_cfg(tmp_path, **overrides):
    cfg = {
        "dim": 2,
        "vectors": "1,0;0,1",
        "polys": "0,1|0,0,1",
        "pmin": 11,
        "pmax": 17,
        "trials": 2,
        "seed": 42,
        "family": "rademacher",
        "density": 0.5,
        "envelope": None,
        "out": str(tmp_path / "scan.csv"),
    }
    cfg.update(overrides)
    return cfg


def strip_runtime(csv_text):
    rows = []
    for line in csv_text.splitlines():
        if line.startswith("#") or line.startswith("p,"):
            rows.append(line)
        else:
            rows.append(line.rsplit(",", 1)[0])
    return rows


def test_scan_csv_is_reproducible_modulo_runtime(tmp_path):
    cfg_a = scan_cfg(tmp_path, out=str(tmp_path / "a.csv"))
    cfg_b = scan_cfg(tmp_path, out=str(tmp_path / "b.csv"))
    scan_error_decay(cfg_a, plot=False)
    scan_error_decay(cfg_b, plot=False)
    text_a = (tmp_path / "a.csv").read_text()
    text_b = (tmp_path / "b.csv").read_text()
    assert strip_runtime(text_a) == strip_runtime(text_b)


def test_scan_outputs_csv_jsonl_and_figure(tmp_path):
    summary = scan_error_decay(scan_cfg(tmp_path), plot=True)
    assert (tmp_path / "scan.csv").exists()
    assert (tmp_path / "scan.jsonl").exists()
    assert (tmp_path / "scan.png").exists()
    assert summary["rows"] == summary["primes"] * 2
    jsonl_rows = [json.loads(l) for l in (tmp_path / "scan.jsonl").read_text().splitlines()]
    assert len(jsonl_rows) == summary["rows"]
    assert jsonl_rows[0]["p"] == 11 and jsonl_rows[0]["trial"] == 0


def test_scan_rows_are_ordered_and_headed(tmp_path):
    scan_error_decay(scan_cfg(tmp_path), plot=False)
    lines = (tmp_path / "scan.csv").read_text().splitlines()
    assert lines[0].startswith("#")
    assert "generator=PCG64" in lines[1]
    assert lines[3] == "p,trial,counting_re,counting_im,main_re,main_im,abs_error,runtime_ms"
    keys = []
    for line in lines[4:]:
        p, trial = line.split(",")[:2]
        keys.append((int(p), int(trial)))
    assert keys == sorted(keys)


def test_scan_fit_is_positive_for_square_points(tmp_path):
    summary = scan_error_decay(scan_cfg(tmp_path, pmax=31, trials=3), plot=False)
    assert isinstance(summary["c_hat"], float)
    assert summary["c_hat"] > 0


def test_scan_no_plot_flag_skips_figure(tmp_path, capsys):
    out = str(tmp_path / "s.csv")
    code, stdout, _ = run(
        capsys, "scan", "--pmin", "11", "--pmax", "13",
        "--trials", "1", "--out", out, "--no-plot",
    )
    assert code == 0
    assert "figure" not in stdout
    assert not (tmp_path / "s.png").exists()


def test_scan_renders_figure_by_default(tmp_path, capsys):
    out = str(tmp_path / "s.csv")
    code, stdout, _ = run(capsys, "scan", "--pmin", "11", "--pmax", "13", "--trials", "1", "--out", out)
    assert code == 0
    assert "figure" in stdout
    assert (tmp_path / "s.png").exists()


def test_scan_config_file_with_flag_override(tmp_path, capsys):
    cfg_path = tmp_path / "scan.cfg"
    cfg_path.write_text(
        "# square corner sweep\n"
        "pmin = 11\n"
        "pmax = 31\n"
        "trials = 4\n"
        "seed = 7\n"
    )
    out = str(tmp_path / "s.csv")
    code, _, _ = run(
        capsys, "scan", "--config", str(cfg_path),
        "--pmax", "13", "--out", out, "--no-plot",
    )
    assert code == 0
    lines = [l for l in (tmp_path / "s.csv").read_text().splitlines() if not l.startswith(("#", "p,"))]
    primes = {int(l.split(",")[0]) for l in lines}
    assert primes == {11, 13}
    assert len(lines) == 2 * 4


def test_scan_rejects_unknown_config_key(tmp_path, capsys):
    cfg_path = tmp_path / "scan.cfg"
    cfg_path.write_text("primes = 11\n")
    code, _, err = run(capsys, "scan", "--config", str(cfg_path), "--no-plot")
    assert code == 1
    assert "unknown config key" in err


def test_scan_skips_unusable_primes(tmp_path, capsys):
    # cubic corners need p > 3 to keep the point polynomials distinct mod p
    out = str(tmp_path / "s.csv")
    code, _, err = run(
        capsys, "scan", "--dim", "3",
        "--vectors", "1,0,0;0,1,0;0,0,1",
        "--polys", "0,1|0,0,1|0,0,0,1",
        "--pmin", "2", "--pmax", "7", "--trials", "1",
        "--out", out, "--no-plot",
    )
    assert code == 0
    lines = [l for l in (tmp_path / "s.csv").read_text().splitlines() if not l.startswith(("#", "p,"))]
    assert {int(l.split(",")[0]) for l in lines} == {5, 7}


# --- exit-code hygiene ----------------------------------------------------------


def test_usage_error_exits_two():
    with pytest.raises(SystemExit) as info:
        main(["no-such-command"])
    assert info.value.code == 2


def test_contract_violation_exits_one(capsys):
    code, _, err = run(capsys, "count", "--prime", "4")
    assert code == 1
    assert err.startswith("error:")


def test_missing_file_exits_one(capsys):
    code, _, err = run(capsys, "norm", "--prime", "5", "--dim", "1",
                       "--vector", "1", "--degree", "2", "--fn", "/nonexistent/f.txt")
    assert code == 1
