import csv
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from jacspec import cli


def _read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


# ---- parser and shared plumbing ----


def test_parser_accepts_every_subcommand():
    parser = cli.build_parser()
    for argv in (
        ["density", "--points", "10"],
        ["figures"],
        ["exponent", "--tolerance", "0.3"],
        ["conditions", "--max-n", "1000"],
        ["product", "--x", "1", "--k", "9000"],
        ["ode", "--x", "0.05"],
    ):
        args = parser.parse_args(argv)
        assert args.command == argv[0]


def test_missing_subcommand_is_an_error():
    with pytest.raises(SystemExit):
        cli.build_parser().parse_args([])


@pytest.mark.parametrize(
    "argv",
    [
        ["density", "--alpha", "0.5"],
        ["density", "--alpha", "1.0"],
        ["density", "--alpha", "1.3"],
        ["density", "--b0", "0"],
        ["density", "--b0", "-2"],
    ],
)
def test_parameter_bounds_rejected(argv, tmp_path):
    with pytest.raises(SystemExit):
        cli.main(argv + ["--out", str(tmp_path)])


def test_fmt_cells_round_trip():
    assert cli._fmt(True) == "1"
    assert cli._fmt(False) == "0"
    assert cli._fmt(42) == "42"
    assert cli._fmt(np.int64(-7)) == "-7"
    assert cli._fmt("verdict") == "verdict"
    for v in (0.1, 1.0 / 3.0, 2.5e-17, -math.pi, 4410.0):
        assert float(cli._fmt(v)) == v


# ---- density ----


def test_density_writes_expected_csv(tmp_path):
    rc = cli.main(
        ["density", "--x-min", "0.5", "--x-max", "2.5", "--points", "11",
         "--out", str(tmp_path)]
    )
    assert rc == 0
    header, rows = _read_csv(tmp_path / "density_alpha_0.6.csv")
    assert header == ["x", "delta", "f", "n_used", "spread", "amplitude_delta", "converged"]
    assert len(rows) == 11
    xs = [float(r[0]) for r in rows]
    assert xs == pytest.approx(list(np.linspace(0.5, 2.5, 11)), abs=0.0)
    for r in rows:
        assert r[6] == "1"
        f = float(r[2])
        assert math.isfinite(f) and f > 0.0


def test_density_is_byte_deterministic(tmp_path):
    argv = ["density", "--x-min", "0.5", "--x-max", "2.5", "--points", "41"]
    a = tmp_path / "a"
    b = tmp_path / "b"
    assert cli.main(argv + ["--out", str(a)]) == 0
    assert cli.main(argv + ["--out", str(b)]) == 0
    first = (a / "density_alpha_0.6.csv").read_bytes()
    second = (b / "density_alpha_0.6.csv").read_bytes()
    assert first == second


@pytest.mark.parametrize(
    "argv",
    [
        ["density", "--points", "0"],
        ["density", "--x-min", "2", "--x-max", "1"],
        ["density", "--x-min", "-1", "--x-max", "1", "--points", "3"],
    ],
)
def test_density_rejects_bad_grids(argv, tmp_path):
    with pytest.raises(SystemExit):
        cli.main(argv + ["--out", str(tmp_path)])


def test_density_strict_flags_unconverged_points(tmp_path, capsys):
    argv = ["density", "--x-min", "0.0004", "--x-max", "0.0006", "--points", "3",
            "--n-max", "1000", "--out", str(tmp_path)]
    assert cli.main(argv) == 0
    assert cli.main(argv + ["--strict"]) == 1
    err = capsys.readouterr().err
    assert "unconverged" in err
    _, rows = _read_csv(tmp_path / "density_alpha_0.6.csv")
    assert all(r[6] == "0" for r in rows)


# ---- exponent ----


def test_exponent_reports_pass_at_the_boundary(tmp_path, capsys):
    rc = cli.main(
        ["exponent", "--alpha", repr(2.0 / 3.0), "--out", str(tmp_path)]
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "PASS" in out
    assert "classification: finite_nonzero" in out
    header, rows = _read_csv(tmp_path / "exponent_alpha_0.666667.csv")
    assert header == ["alpha", "slope", "predicted", "residual_rms", "x_lo", "x_hi", "points_used"]
    assert len(rows) == 1
    assert abs(float(rows[0][1]) - float(rows[0][2])) < 0.15


def test_exponent_strict_fails_on_hopeless_tolerance(tmp_path, capsys):
    argv = ["exponent", "--alpha", repr(2.0 / 3.0), "--tolerance", "1e-9",
            "--out", str(tmp_path)]
    assert cli.main(argv) == 0
    assert cli.main(argv + ["--strict"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_exponent_insufficient_data_exits_nonzero(tmp_path, capsys):
    # a two-point window cannot host the 36-point geometric grid's 10
    # converged-point quota once the cap bites inside it
    rc = cli.main(
        ["exponent", "--x-lo", "0.02", "--x-hi", "0.021", "--points", "10",
         "--n-max", "1000", "--out", str(tmp_path)]
    )
    assert rc == 1
    assert "exponent:" in capsys.readouterr().err


# ---- conditions ----


def test_conditions_csv_and_verdicts(tmp_path, capsys):
    rc = cli.main(
        ["conditions", "--max-n", "100000", "--out", str(tmp_path)]
    )
    assert rc == 0
    header, rows = _read_csv(tmp_path / "conditions_alpha_0.6.csv")
    assert header == ["condition", "verdict", "statistic"]
    verdicts = {r[0]: r[1] for r in rows}
    assert verdicts == {
        "condition1": "holds",
        "condition2": "holds",
        "condition3": "fails",
        "condition4": "holds",
    }
    out = capsys.readouterr().out
    assert "condition3: fails" in out


# ---- product ----


def test_product_writes_snapshots_and_tails(tmp_path, capsys):
    rc = cli.main(
        ["product", "--x", "1", "--k", "10000", "--out", str(tmp_path)]
    )
    assert rc == 0
    header, rows = _read_csv(tmp_path / "product_snapshots_alpha_0.6.csv")
    assert header == ["k", "t_k", "g11", "g12", "g21", "g22", "det_g", "diff_to_double"]
    assert len(rows) >= 30
    ks = [int(r[0]) for r in rows]
    assert ks == sorted(ks)
    for r in rows:
        assert float(r[6]) == pytest.approx(1.0, abs=0.05)
    header, tail_rows = _read_csv(tmp_path / "product_tails_alpha_0.6.csv")
    assert header == ["n", "q_norm"]
    assert len(tail_rows) > 3
    assert "fitted slope" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        ["product", "--x", "0"],
        ["product", "--x", "1", "--k", "4000"],
    ],
)
def test_product_rejects_degenerate_requests(argv, tmp_path):
    with pytest.raises(SystemExit):
        cli.main(argv + ["--out", str(tmp_path)])


# ---- ode ----


def test_ode_writes_ladder_comparison(tmp_path, capsys):
    rc = cli.main(
        ["ode", "--x", "1.0", "--k-end", "20000", "--out", str(tmp_path)]
    )
    assert rc == 0
    header, rows = _read_csv(tmp_path / "ode_compare_alpha_0.6.csv")
    assert header == ["x", "k_start", "k_end", "discrete_first_col", "ode_first_col"]
    assert len(rows) == 9
    xs = [float(r[0]) for r in rows]
    assert xs == sorted(xs)
    assert xs[0] == pytest.approx(0.4) and xs[-1] == pytest.approx(4.0)
    for r in rows:
        assert int(r[2]) == 20000
        assert float(r[3]) > 0.0 and float(r[4]) > 0.0
    assert "continuum slope" in capsys.readouterr().out


def test_ode_rejects_nonpositive_energy(tmp_path):
    with pytest.raises(SystemExit):
        cli.main(["ode", "--x", "-0.05", "--out", str(tmp_path)])


# ---- config file ----


def test_config_file_supplies_defaults(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment line\nalpha = 0.8\nkappa = 10\n")
    rc = cli.main(
        ["density", "--config", str(cfg), "--x-min", "0.5", "--x-max", "0.6",
         "--points", "2", "--out", str(tmp_path)]
    )
    assert rc == 0
    assert (tmp_path / "density_alpha_0.8.csv").exists()


def test_explicit_flag_beats_config_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("kappa = 10\n")
    argv = ["density", "--config", str(cfg), "--x-min", "0.05", "--x-max", "0.06",
            "--points", "2", "--out", str(tmp_path)]
    assert cli.main(argv) == 0
    _, rows = _read_csv(tmp_path / "density_alpha_0.6.csv")
    assert int(rows[0][3]) == 1000  # kappa 10 leaves the floor in charge

    assert cli.main(argv + ["--kappa", "50"]) == 0
    _, rows = _read_csv(tmp_path / "density_alpha_0.6.csv")
    assert int(rows[0][3]) == 4410  # flag overrode the file


def test_config_file_can_turn_strict_on(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("strict = yes\nn-max = 1000\n")
    rc = cli.main(
        ["density", "--config", str(cfg), "--x-min", "0.0004", "--x-max", "0.0006",
         "--points", "3", "--out", str(tmp_path)]
    )
    assert rc == 1


@pytest.mark.parametrize("text", ["kappa 10\n", "kappa = not-a-number\n", "strict = maybe\n"])
def test_config_file_rejects_malformed_entries(text, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(text)
    with pytest.raises(SystemExit):
        cli.main(
            ["density", "--config", str(cfg), "--x-min", "0.5", "--x-max", "1.0",
             "--points", "2", "--out", str(tmp_path)]
        )


# ---- figures ----


def test_figures_render_all_three_panels(figure_bundle):
    assert figure_bundle["returncode"] == 0
    out = figure_bundle["dir"]
    for tag in ("0.6", "0.666667", "0.8"):
        svg = out / f"fig_alpha_{tag}.svg"
        csv_path = out / f"fig_alpha_{tag}.csv"
        assert svg.exists() and csv_path.exists()
        assert 0 < svg.stat().st_size < 2 * 1024 * 1024
        root = ET.parse(svg).getroot()
        assert root.tag.endswith("svg")


def test_figure_grids_dodge_the_origin(figure_bundle):
    for tag in ("0.6", "0.666667", "0.8"):
        _, rows = _read_csv(figure_bundle["dir"] / f"fig_alpha_{tag}.csv")
        xs = [float(r[0]) for r in rows]
        assert all(x != 0.0 for x in xs)
        assert min(abs(x) for x in xs) == pytest.approx(0.01)
        assert len(xs) == len(set(xs))


def test_figures_are_deterministic(figure_bundle, tmp_path):
    rc = cli.main(["figures", "--out", str(tmp_path)])
    assert rc == 0
    for tag in ("0.6", "0.666667", "0.8"):
        fresh = (tmp_path / f"fig_alpha_{tag}.svg").read_bytes()
        cached = (figure_bundle["dir"] / f"fig_alpha_{tag}.svg").read_bytes()
        assert fresh == cached
